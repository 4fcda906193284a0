"""FODC-level objects on Gamma_l (N^2-dim) and (Gamma (x) Gamma)_l (N^4-dim).

Coordinates.  A left-invariant 1-form ``a^{ij} theta_ij`` is the 2-leg
vector ``a``; ``a^{ijkl} theta_ij (x) theta_kl`` is the "plain" 4-leg vector.
The "bar" basis ``thetabar_vwst = G^{yz}_{ws} theta_vy (x) theta_zt`` with
``G = acute(R)^{-1}`` has coordinates ``abar`` related by
``a = G_23 abar`` and ``abar = A_23 a`` (``A = acute(R)``).

Right adjoint actions are matrices on coordinate vectors, so
``rho <| (u^a_b u^c_d)`` is ``M(c,d) @ M(a,b) @ rho``.

Each function states the index contraction it computes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

from .qdata import TAUS, QData
from .tensor import (
    SingularMatrix,
    Subspace,
    Tensor,
    acute,
    check,
    einsum,
    inverse,
    kron,
    leg_embed,
)

__all__ = [
    "PreconditionViolated",
    "CalculusSpec",
    "Calculus",
    "InvariantVectors",
    "orbit_span",
]


class PreconditionViolated(ValueError):
    pass


@dataclass(frozen=True)
class CalculusSpec:
    sign: str   # "plus" | "minus"
    qd: QData

    def __post_init__(self):
        if self.sign not in ("plus", "minus"):
            raise ValueError(f"unknown calculus sign {self.sign!r}")
        if self.sign == "minus":
            cs = self.qd.consts
            if 2 * cs.x + cs.qhat * cs.rhat_diff == 0:
                raise PreconditionViolated("2x + qhat (rhat - 1/rhat) = 0 for Gamma_-")

    @property
    def eps_sign(self) -> int:
        return 1 if self.sign == "plus" else -1


@dataclass(frozen=True)
class InvariantVectors:
    """Bi-invariant vectors of (Gamma (x) Gamma)_l in bar coordinates."""
    theta_theta: Tensor
    eta: Tensor
    xi: Tensor
    eta_plus: Tensor
    eta_minus: Tensor
    eta_zero: Tensor

    def eta_tau(self, tau: str) -> Tensor:
        return {"+": self.eta_plus, "-": self.eta_minus, "0": self.eta_zero}[tau]


class Calculus:
    """Lazily built calculus data shared by the check suites.

    All heavy matrices are cached on first use; the object is otherwise
    read-only.
    """

    def __init__(self, qd: QData):
        self.qd = qd
        self.N = qd.N
        self.field = qd.field

    # --- transforms -----------------------------------------------------
    @cached_property
    def acute_R(self) -> Tensor:
        return acute(self.qd.R)

    @cached_property
    def grave_R(self) -> Tensor:
        """``grave(R^-) = acute(R)^{-1}``; raises SingularMatrix."""
        return inverse(self.acute_R)

    @cached_property
    def check_Rinv(self) -> Tensor:
        return check(self.qd.Rinv)

    @cached_property
    def check_P(self) -> dict:
        return {t: check(self.qd.P[t]) for t in TAUS}

    def _emb(self, T: Tensor, start: int, total: int = 4) -> Tensor:
        return leg_embed(T, start, total)

    # --- basis change -----------------------------------------------------
    @cached_property
    def to_plain(self) -> Tensor:
        """``G_23``: bar coordinates -> plain coordinates."""
        return self._emb(self.grave_R, 2)

    @cached_property
    def to_bar(self) -> Tensor:
        """``A_23``: plain coordinates -> bar coordinates."""
        return self._emb(self.acute_R, 2)

    def basis_change(self) -> Tensor:
        return self.to_plain

    # --- braiding and blocks ---------------------------------------------
    @cached_property
    def sigma(self) -> Tensor:
        """``sigma = G_23 R_12 (check R^-1)_34 A_23`` in plain coordinates."""
        return self.to_plain @ self.sigma_bar @ self.to_bar

    @cached_property
    def sigma_bar(self) -> Tensor:
        """``R_12 (check R^-1)_34``: the braiding in bar coordinates."""
        return self._emb(self.qd.R, 1) @ self._emb(self.check_Rinv, 3)

    def block_bar(self, tau: str, nu: str) -> Tensor:
        """``P^tau_12 (check P^nu)_34``: a block idempotent in bar coordinates."""
        return self._bar_blocks[(tau, nu)]

    @cached_property
    def _bar_blocks(self) -> dict:
        P1 = {t: self._emb(self.qd.P[t], 1) for t in TAUS}
        P3 = {t: self._emb(self.check_P[t], 3) for t in TAUS}
        return {(t, n): P1[t] @ P3[n] for t in TAUS for n in TAUS}

    @cached_property
    def lambda_blocks(self) -> dict:
        """``Lambda^{tau nu} = G_23 P^tau_12 (check P^nu)_34 A_23`` (plain coordinates)."""
        return {k: self.to_plain @ B @ self.to_bar for k, B in self._bar_blocks.items()}

    # --- adjoint actions ----------------------------------------------------
    def adj_action_1(self, sign: str) -> dict:
        """``theta_ij <| u^s_t = +-R^{sm}_{iy} R^{jy}_{tn} theta_mn``, one matrix per (s,t)."""
        e = 1 if sign == "plus" else -1
        base = self._adj1_unsigned
        if e == 1:
            return base
        return {k: M.scale(self.field(-1)) for k, M in base.items()}

    @cached_property
    def _adj1_unsigned(self) -> dict:
        R = self.qd.R
        N = self.N
        # full[s, t, m, n, i, j] = R^{sm}_{iy} R^{jy}_{tn}
        full = einsum("smiy,jytn->stmnij", R, R, legs_out=6)
        out = {}
        for s in range(N):
            for t in range(N):
                out[(s, t)] = Tensor(full.data[s, t].copy(), 2, 2, self.field)
        return out

    def quantum_trace_action_1(self, sign: str) -> Tensor:
        """Matrix of ``<| U`` on Gamma_l, ``U = D^j_i u^i_j``."""
        M = self.adj_action_1(sign)
        D = self.qd.D
        acc = Tensor.zeros(2, 2, self.N, self.field)
        for i in range(self.N):
            for j in range(self.N):
                d = D.data[j, i]
                if d:
                    acc = acc + M[(i, j)].scale(d)
        return acc

    @cached_property
    def adj_action_2(self) -> dict:
        """``thetabar <| u^i_j`` in bar coordinates, one 4-leg matrix per (i, j).

        Built by letting each theta factor act (the +- signs square away) and
        changing basis: ``A_23 [sum_c M(i,c) (x) M(c,j)] G_23``.
        """
        M = self._adj1_unsigned
        N = self.N
        out = {}
        for i in range(N):
            for j in range(N):
                acc = None
                for c in range(N):
                    term = kron(M[(i, c)], M[(c, j)])
                    acc = term if acc is None else acc + term
                out[(i, j)] = self.to_bar @ acc @ self.to_plain
        return out

    def five_leg_operator(self) -> Tensor:
        """``acute(R)_34 R_12 acute(R)_23 R_34 acute(R)_45 grave(R)_23`` on 5 legs."""
        A, G, R = self.acute_R, self.grave_R, self.qd.R
        e = leg_embed
        return (e(A, 3, 5) @ e(R, 1, 5) @ e(A, 2, 5) @ e(R, 3, 5) @ e(A, 4, 5)
                @ e(G, 2, 5))

    def adj_action_2_from_five_leg(self) -> dict:
        """``M2(i,j)^{vwst}_{mnkl} = O^{ivwst}_{mnklj}`` from the 5-leg operator."""
        O = self.five_leg_operator().data
        return {(i, j): Tensor(O[i, :, :, :, :, :, :, :, :, j].copy(), 4, 4, self.field)
                for i in range(self.N) for j in range(self.N)}

    def quantum_trace_action_2(self) -> Tensor:
        D = self.qd.D
        acc = Tensor.zeros(4, 4, self.N, self.field)
        for (i, j), M in self.adj_action_2.items():
            d = D.data[j, i]
            if d:
                acc = acc + M.scale(d)
        return acc

    # --- bi-invariants ----------------------------------------------------
    def plain_to_bar(self, v: Tensor) -> Tensor:
        return self.to_bar @ v

    @cached_property
    def invariants(self) -> InvariantVectors:
        qd = self.qd
        N, f = self.N, self.field
        one, zero = f.one, f.zero
        tt = Tensor.from_function(4, 0, N, lambda a, b, c, d: one if (a == b and c == d) else zero, f)
        # eta = D^k_j theta_ik (x) theta_ji
        D = qd.D
        eta = Tensor.from_function(4, 0, N, lambda a, b, c, d: D.data[b, c] if a == d else zero, f)
        # xi = C^i_z R^{ym}_{zn} B^y_j theta_ij (x) theta_mn
        xi = einsum("iz,ymzn,yj->ijmn", qd.C, qd.R, qd.B, legs_out=4)
        etas = {t: self.eta_tau(t) for t in TAUS}
        return InvariantVectors(self.plain_to_bar(tt), self.plain_to_bar(eta),
                                self.plain_to_bar(xi), etas["+"], etas["-"], etas["0"])

    def eta_tau(self, tau: str) -> Tensor:
        """``eta^tau = (P^tau)^{mn}_{lk} thetabar_mnkl``."""
        P = self.qd.P[tau]
        return Tensor(P.data.transpose((0, 1, 3, 2)).copy(), 4, 0, self.field)

    # vector families: legs_out are the 4 bar indices, legs_in the family indices
    def eta_ij(self, tau: str) -> Tensor:
        """``eta^tau_ij = B^i_z (P)^{mn}_{zk} (checkP)^{vw}_{ky} C^j_y thetabar_mnvw``."""
        qd = self.qd
        return einsum("iz,mnzk,vwky,jy->mnvwij", qd.B, qd.P[tau], self.check_P[tau], qd.C,
                      legs_out=4, legs_in=2)

    def xi_ij(self, tau: str) -> Tensor:
        """``xi^tau_ij = (P)^{mn}_{yk} (checkP)^{vw}_{kz} acute(R)^{yz}_{ij} thetabar_mnvw``."""
        return einsum("mnyk,vwkz,yzij->mnvwij", self.qd.P[tau], self.check_P[tau], self.acute_R,
                      legs_out=4, legs_in=2)

    def xi_sijt(self, tau: str) -> Tensor:
        """``xi^tau_sijt = (P)^{mn}_{sy} (checkP)^{vw}_{zt} acute(R)^{yz}_{ij}``."""
        return einsum("mnsy,vwzt,yzij->mnvwsijt", self.qd.P[tau], self.check_P[tau],
                      self.acute_R, legs_out=4, legs_in=4)

    def eta_sijt(self, tau: str) -> Tensor:
        """``eta^tau_sijt = B^s_y B^i_z (P)^{mn}_{yz} (checkP)^{vw}_{dc} C^j_d C^t_c``."""
        qd = self.qd
        return einsum("sy,iz,mnyz,vwdc,jd,tc->mnvwsijt", qd.B, qd.B, qd.P[tau],
                      self.check_P[tau], qd.C, qd.C, legs_out=4, legs_in=4)

    def theta_tau_basis(self, tau: str) -> Tensor:
        """Canonical spanning family of Lambda^tau_l in bar coordinates: ``P_12 checkP_34 A_23``."""
        return self.block_bar(tau, tau) @ self.to_bar

    @staticmethod
    def member(family: Tensor, *idx) -> Tensor:
        """Vector of a family tensor at fixed family indices."""
        k = family.legs_out
        sl = (slice(None),) * k + tuple(idx)
        return Tensor(family.data[sl].copy(), k, 0, family.field)

    # --- projected T matrices of the generation argument ------------------
    def T_tau(self, tau: str) -> Tensor:
        """``qhat (l^2 + 1) R^{-1} - rhat^{-1} qhat (1 + l^{-2}) I``."""
        cs = self.qd.consts
        l = cs.lam[tau]
        I2 = Tensor.identity(2, self.N, self.field)
        return (self.qd.Rinv.scale(cs.qhat * (l * l + 1))
                - I2.scale(cs.rhatm * cs.qhat * (1 + 1 / (l * l))))

    def T_tau_inverse_closed(self, tau: str) -> Tensor:
        """Stated inverse of ``T_tau`` as a combination of projectors."""
        cs = self.qd.consts
        q, qm, r, rm = cs.q, 1 / cs.q, cs.rhat, cs.rhatm
        pref = 1 / (cs.qhat * cs.two_q)
        P = self.qd.P
        if tau == "+":
            co = (1 / (1 - qm * rm), 1 / (-q * q - qm * rm), 1 / (r * q - rm * qm))
        elif tau == "-":
            co = (1 / (qm * qm - q * rm), 1 / (-1 - q * rm), 1 / (qm * r - q * rm))
        else:
            raise ValueError("T_tau only for tau in {+,-}")
        return (P["+"].scale(co[0]) + P["-"].scale(co[1]) + P["0"].scale(co[2])).scale(pref)

    def T_second(self) -> Tensor:
        """``qhat (R^{-1} - rhat^{-1} I)``."""
        cs = self.qd.consts
        I2 = Tensor.identity(2, self.N, self.field)
        return (self.qd.Rinv - I2.scale(cs.rhatm)).scale(cs.qhat)

    def T_second_inverse_closed(self) -> Tensor:
        """Stated inverse ``qhat^-1 ((q^-1 - rhat^-1)^-1 P^+ - (q + rhat^-1)^-1 P^-)``."""
        cs = self.qd.consts
        P = self.qd.P
        return (P["+"].scale(1 / (1 / cs.q - cs.rhatm))
                - P["-"].scale(1 / (cs.q + cs.rhatm))).scale(1 / cs.qhat)


def braiding(qd: QData) -> Tensor:
    return Calculus(qd).sigma


def lambda_blocks(qd: QData) -> dict:
    return Calculus(qd).lambda_blocks


def orbit_span(v: Tensor, gens: Iterable[Tensor], max_dim: Optional[int] = None) -> Subspace:
    """Smallest subspace containing ``v`` and closed under every generator."""
    gens = list(gens)
    sp = Subspace(v.dim, v.legs_out, v.field)
    if v.is_zero():
        return sp
    sp.add(v)
    frontier = [v]
    limit = max_dim if max_dim is not None else v.dim ** v.legs_out
    while frontier:
        new = []
        for w in frontier:
            for g in gens:
                cand = g @ w
                if cand.is_zero():
                    continue
                if sp.add(cand):
                    new.append(cand)
        frontier = new
        if sp.dim > limit:
            raise RuntimeError("orbit exceeded ambient dimension")
    return sp
