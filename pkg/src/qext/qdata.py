"""Group data for O_q(N) and Sp_q(N): metric, constants, braid matrix, projectors.

Index conventions: indices are 0-based internally, ``i' = N-1-i``; a
2-leg tensor ``T`` is read as ``T^{ab}_{st} = T.data[a, b, s, t]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

from .scalar import SYMBOLIC
from .tensor import (
    ShapeMismatch,
    SingularMatrix,
    Tensor,
    einsum,
    inverse,
    leg_embed,
    partial_qtrace,
    rank,
)

__all__ = [
    "OddSymplectic",
    "NTooSmall",
    "CertificationFailed",
    "DegenerateEigenvalues",
    "GroupSpec",
    "Constants",
    "ProjectorSet",
    "QData",
    "group_spec",
    "build_metric",
    "rhat_candidate",
    "certify_rhat",
    "build_rhat",
    "spectral_projectors",
    "build_qdata",
    "TAUS",
]

TAUS = ("+", "-", "0")


class OddSymplectic(ValueError):
    pass


class NTooSmall(ValueError):
    pass


class CertificationFailed(ArithmeticError):
    def __init__(self, identity: str, detail: str = ""):
        super().__init__(f"{identity} violated {detail}".strip())
        self.identity = identity


class DegenerateEigenvalues(ArithmeticError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    family: str                  # "orthogonal" | "symplectic"
    N: int
    eps: int                     # +1 orthogonal, -1 symplectic
    rho2: tuple[int, ...]        # 2*rho_i
    eps_i: tuple[int, ...]

    def iprime(self, i: int) -> int:
        return self.N - 1 - i

    @property
    def short(self) -> str:
        return ("o" if self.family == "orthogonal" else "sp") + str(self.N)

    @property
    def rho(self) -> tuple:
        from fractions import Fraction
        return tuple(Fraction(r, 2) for r in self.rho2)


_FAMILIES = {"o": "orthogonal", "orthogonal": "orthogonal",
             "sp": "symplectic", "symplectic": "symplectic"}


def group_spec(family: str, N: int) -> GroupSpec:
    try:
        family = _FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}") from None
    if N < 3:
        raise NTooSmall(f"N = {N} < 3")
    if family == "symplectic":
        if N % 2:
            raise OddSymplectic(f"symplectic groups need even N, got {N}")
        n = N // 2
        rho2 = tuple(2 * r for r in list(range(n, 0, -1)) + list(range(-1, -n - 1, -1)))
        eps_i = tuple([1] * n + [-1] * n)
        return GroupSpec(family, N, -1, rho2, eps_i)
    if N % 2:
        # (N/2 - 1, ..., 1/2, 0, -1/2, ..., 1 - N/2)
        half = [N - 2 - 2 * i for i in range(N // 2)]
        rho2 = tuple(half + [0] + [-r for r in reversed(half)])
    else:
        n = N // 2
        half = [2 * (n - 1 - i) for i in range(n)]
        rho2 = tuple(half + [-r for r in reversed(half)])
    return GroupSpec(family, N, 1, rho2, tuple([1] * N))


@dataclass(frozen=True)
class Constants:
    q: object
    qhat: object
    rhat: object
    rhatm: object
    x: object
    two_q: object
    rhat_diff: object
    crit: object
    mu_plus: object
    mu_minus: object
    t_plus: object
    t_minus: object
    lam: dict
    alpha: dict

    def mu(self, nu: str):
        return {"+": self.mu_plus, "-": self.mu_minus}[nu]

    def t(self, nu: str):
        return {"+": self.t_plus, "-": self.t_minus}[nu]


def make_constants(spec: GroupSpec, field) -> Constants:
    q = field.q
    qm = 1 / q
    qhat = q - qm
    rhat = field(spec.eps) * field.qpow(spec.N - spec.eps)
    rhatm = 1 / rhat
    rdiff = rhat - rhatm
    x = 1 + rdiff / qhat
    lam = {"+": q, "-": -qm, "0": rhatm}
    denom = qhat * rdiff + 2 * x
    mu_plus = rdiff * (-q * q * rhat + qm * qm * rhatm - qhat) / denom
    mu_minus = rdiff * (-qm * qm * rhat + q * q * rhatm - qhat) / denom

    def tpro(nu):
        l = lam[nu]
        return rdiff * (l * l * rhat - 1 / l) / (qhat * (l + 1 / l) * (l * rhat - 1))

    alpha = {t: qhat * (lam[t] + 1 / lam[t]) * (lam[t] * rhat - rhatm / lam[t]) for t in TAUS}
    return Constants(
        q=q, qhat=qhat, rhat=rhat, rhatm=rhatm, x=x, two_q=q + qm, rhat_diff=rdiff,
        crit=qhat * q * q * rhat * (2 * x + qhat * rdiff),
        mu_plus=mu_plus, mu_minus=mu_minus, t_plus=tpro("+"), t_minus=tpro("-"),
        lam=lam, alpha=alpha,
    )


def build_metric(spec: GroupSpec, field=SYMBOLIC) -> dict:
    """C, B = eps*C, K (K^{ab}_{st} = C^a_b B^s_t), D = B^T C and the constants."""
    N = spec.N
    C = Tensor.zeros(1, 1, N, field)
    for i in range(N):
        j = spec.iprime(i)
        C.data[i, j] = field(spec.eps_i[i]) * field.spow(spec.rho2[j])
    B = C.scale(field(spec.eps))
    K = einsum("ab,st->abst", C, B, legs_out=2, legs_in=2)
    D = einsum("ji,jk->ik", B, C, legs_out=1, legs_in=1)
    return {"C": C, "B": B, "K": K, "D": D, "consts": make_constants(spec, field)}


def rhat_candidate(spec: GroupSpec, field=SYMBOLIC, *, lower: bool = True,
                   flip_exponent: bool = False) -> Tensor:
    """Braid matrix from the standard entry formula under one convention toggle.

    ``lower`` selects ``i < j`` (else ``i > j``) in the two q-hat sums;
    ``flip_exponent`` uses ``q^(rho_j - rho_i)`` instead of ``q^(rho_i - rho_j)``.
    Entry ``(E_ab (x) E_cd)`` lands at ``R[a, c, b, d]``.
    """
    N = spec.N
    q = field.q
    qm = 1 / q
    qhat = q - qm
    R = Tensor.zeros(2, 2, N, field)
    d = R.data
    ip = spec.iprime
    for i in range(N):
        if i != ip(i):
            d[i, i, i, i] += q
            d[ip(i), i, i, ip(i)] += qm
        else:
            d[i, i, i, i] += field.one
        for j in range(N):
            if i != j and j != ip(i):
                d[j, i, i, j] += field.one
    for i in range(N):
        for j in range(N):
            if (i < j) if lower else (i > j):
                d[j, i, j, i] += qhat
                e = spec.rho2[i] - spec.rho2[j]
                if flip_exponent:
                    e = -e
                coeff = field(spec.eps_i[i] * spec.eps_i[j]) * field.spow(e)
                d[ip(i), i, j, ip(j)] -= qhat * coeff
    return R


@dataclass
class CertReport:
    checks: dict = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def first_failure(self) -> Optional[str]:
        return next((k for k, v in self.checks.items() if not v), None)


def certify_rhat(R: Tensor, metric: dict, *, stop_early: bool = True) -> CertReport:
    """The certification identities for a braid matrix candidate."""
    C, K, D, cs = metric["C"], metric["K"], metric["D"], metric["consts"]
    field = R.field
    N = R.dim
    I1 = Tensor.identity(1, N, field)
    I2 = Tensor.identity(2, N, field)
    rep = CertReport()

    def record(name, fn):
        if stop_early and not rep.ok:
            rep.checks[name] = False
            return
        try:
            rep.checks[name] = bool(fn())
        except (SingularMatrix, ShapeMismatch, ZeroDivisionError):
            rep.checks[name] = False

    record("C R = rhat^-1 C (left contraction)", lambda: einsum("yz,yzst->st", C, R, legs_out=1, legs_in=1)
           == C.scale(cs.rhatm))
    record("R C = rhat^-1 C (right contraction)", lambda: einsum("abyz,yz->ab", R, C, legs_out=1, legs_in=1)
           == C.scale(cs.rhatm))
    Rinv = {}

    def rm():
        Rinv["v"] = inverse(R)
        return R - Rinv["v"] == (I2 - K).scale(cs.qhat)

    record("R - R^-1 = qhat (I - K)", rm)
    record("tr D = x", lambda: D.trace() == cs.x)
    record("tr_q R = rhat I", lambda: partial_qtrace(R, D) == I1.scale(cs.rhat))
    record("tr_q I = x I", lambda: partial_qtrace(I2, D) == I1.scale(cs.x))
    record("tr_q K = I", lambda: partial_qtrace(K, D) == I1)

    def braid():
        R12 = leg_embed(R, 1, 3)
        R23 = leg_embed(R, 2, 3)
        return R12 @ R23 @ R12 == R23 @ R12 @ R23

    record("braid", braid)

    def spectral():
        P = _projectors_from(R, cs, I2)
        tot = P["+"] + P["-"] + P["0"]
        if tot != I2:
            return False
        for a in TAUS:
            for b in TAUS:
                prod = P[a] @ P[b]
                if prod != (P[a] if a == b else Tensor.zeros(2, 2, N, field)):
                    return False
        comb = P["+"].scale(cs.lam["+"]) + P["-"].scale(cs.lam["-"]) + P["0"].scale(cs.lam["0"])
        return comb == R

    record("spectral", spectral)
    return rep


def _projectors_from(R: Tensor, cs: Constants, I2: Tensor) -> dict:
    out = {}
    for t in TAUS:
        acc = I2
        for n in TAUS:
            if n == t:
                continue
            denom = cs.lam[t] - cs.lam[n]
            if denom == 0:
                raise DegenerateEigenvalues(f"lambda_{t} = lambda_{n}")
            acc = acc @ (R - I2.scale(cs.lam[n])).scale(1 / denom)
        out[t] = acc
    return out


VARIANTS = tuple((lower, flip) for lower in (True, False) for flip in (False, True))


def build_rhat(spec: GroupSpec, field=SYMBOLIC, metric: Optional[dict] = None,
               return_variant: bool = False):
    """The unique certified braid matrix among the convention variants."""
    metric = metric or build_metric(spec, field)
    passing = []
    failures = {}
    for lower, flip in VARIANTS:
        R = rhat_candidate(spec, field, lower=lower, flip_exponent=flip)
        rep = certify_rhat(R, metric)
        if rep.ok:
            passing.append(((lower, flip), R))
        else:
            failures[(lower, flip)] = rep.first_failure()
    if len(passing) != 1:
        if not passing:
            first = next(iter(failures.values()))
            raise CertificationFailed(first, f"(no convention variant passes: {failures})")
        raise CertificationFailed("uniqueness", f"{len(passing)} variants pass")
    variant, R = passing[0]
    return (R, variant) if return_variant else R


@dataclass(frozen=True)
class ProjectorSet:
    P_plus: Tensor
    P_minus: Tensor
    P_zero: Tensor
    ranks: tuple

    def __getitem__(self, tau: str) -> Tensor:
        return {"+": self.P_plus, "-": self.P_minus, "0": self.P_zero}[tau]


def spectral_projectors(R: Tensor, consts: Constants) -> ProjectorSet:
    """``P^t = prod_{n != t} (R - lam_n) / (lam_t - lam_n)`` with ranks."""
    N = R.dim
    P = _projectors_from(R, consts, Tensor.identity(2, N, R.field))
    return ProjectorSet(P["+"], P["-"], P["0"], tuple(rank(P[t]) for t in TAUS))


def closed_form_projector(nu: str, R: Tensor, K: Tensor, cs: Constants) -> Tensor:
    """``P^nu = (l + 1/l)^-1 (l^-1 I + R + qhat (1 - rhat l)^-1 K)`` for nu in {+,-}."""
    l = cs.lam[nu]
    I2 = Tensor.identity(2, R.dim, R.field)
    body = I2.scale(1 / l) + R + K.scale(cs.qhat / (1 - cs.rhat * l))
    return body.scale(1 / (l + 1 / l))


@dataclass(frozen=True)
class QData:
    spec: GroupSpec
    field: object
    C: Tensor
    B: Tensor
    K: Tensor
    D: Tensor
    consts: Constants
    R: Tensor
    Rinv: Tensor
    P: ProjectorSet
    variant: tuple
    certified: bool = True

    @property
    def N(self) -> int:
        return self.spec.N


def build_qdata(spec: GroupSpec, field=SYMBOLIC, *, rhat_override: Optional[Tensor] = None
                ) -> QData:
    """All group data; ``rhat_override`` skips certification (negative controls)."""
    metric = build_metric(spec, field)
    if rhat_override is None:
        R, variant = build_rhat(spec, field, metric, return_variant=True)
        certified = True
    else:
        R, variant, certified = rhat_override, ("override",), False
    try:
        Rinv = inverse(R)
    except SingularMatrix:
        Rinv = Tensor.zeros(2, 2, spec.N, field)
    try:
        P = spectral_projectors(R, metric["consts"])
    except DegenerateEigenvalues:
        raise
    return QData(spec, field, metric["C"], metric["B"], metric["K"], metric["D"],
                 metric["consts"], R, Rinv, P, variant, certified)
