"""Check suites with exact witnesses.

Every suite returns a :class:`Report`.  A check that raises is recorded as a
failure carrying the exception text, so a broken input never aborts a run.
Each suite also contains at least one negative control: a deliberately
perturbed input whose check must come out false.  A control passes when the
perturbation is detected.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Callable, Optional

import flint
import numpy as np

from .calculus import Calculus, CalculusSpec, PreconditionViolated, orbit_span
from .functionals import Element, FunctionalEngine
from .qdata import TAUS, QData, build_qdata, certify_rhat, closed_form_projector, group_spec
from .scalar import SYMBOLIC, RPoly, Scalar, ext_gcd, resultant
from .tensor import (Subspace, Tensor, einsum, kernel_of, partial_qtrace, rank, rank_of,
                     stack_rank)

__all__ = [
    "Check",
    "Report",
    "Context",
    "SUITES",
    "run_suite",
    "perturb_rhat",
    "suite_rmatrix",
    "suite_decomposition",
    "suite_biinvariants",
    "suite_adjoint",
    "suite_SR_plus",
    "suite_SR_minus",
    "suite_theorem",
    "d_polynomials",
    "bezout_cleared",
]


@dataclass
class Check:
    name: str
    status: str              # "pass" | "fail" | "skipped"
    witness: Optional[str] = None
    elapsed_ms: float = 0.0

    def to_dict(self) -> dict:
        d = {"name": self.name, "status": self.status}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class Report:
    name: str
    checks: list = dc_field(default_factory=list)
    elapsed_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if c.status == "fail"]

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self, timing: bool = True) -> dict:
        d = {"name": self.name, "checks": [c.to_dict() for c in self.checks]}
        if timing:
            d["elapsed_ms"] = round(self.elapsed_ms, 3)
        return d

    # -- recording helpers -------------------------------------------------
    def check(self, name: str, fn: Callable[[], object]) -> bool:
        """Run ``fn``; truthy -> pass.  A ``(bool, witness)`` tuple attaches a witness."""
        t0 = time.perf_counter()
        try:
            out = fn()
            if isinstance(out, tuple):
                ok, witness = out
            else:
                ok, witness = out, None
            ok = bool(ok)
            status = "pass" if ok else "fail"
            wit = None if witness is None else str(witness)
        except Exception as exc:  # noqa: BLE001 - failures belong in the report
            ok, status, wit = False, "fail", f"{type(exc).__name__}: {exc}"
        self.checks.append(Check(name, status, wit, (time.perf_counter() - t0) * 1e3))
        return ok

    def control(self, name: str, broken: Callable[[], object]) -> bool:
        """Negative control: passes when ``broken`` evaluates falsy or raises."""
        t0 = time.perf_counter()
        try:
            out = broken()
            if isinstance(out, tuple):
                out = out[0]
            detected = not bool(out)
            wit = None if detected else "perturbation not detected"
        except Exception as exc:  # noqa: BLE001
            detected, wit = True, f"raised {type(exc).__name__}"
        self.checks.append(Check("control: " + name, "pass" if detected else "fail",
                                 wit if not detected else None,
                                 (time.perf_counter() - t0) * 1e3))
        return detected

    def skip(self, name: str, why: str):
        self.checks.append(Check(name, "skipped", why))


def _timed(name: str, body: Callable[[Report], None]) -> Report:
    rep = Report(name)
    t0 = time.perf_counter()
    try:
        body(rep)
    except Exception as exc:  # noqa: BLE001
        rep.checks.append(Check("suite aborted", "fail", f"{type(exc).__name__}: {exc}"))
    rep.elapsed_ms = (time.perf_counter() - t0) * 1e3
    return rep


# ---------------------------------------------------------------------------
# shared context


class Context:
    """Read-only bundle of group data, calculus and functional engines.

    Expensive objects are built lazily once and then reused by later suites.
    """

    def __init__(self, qd: QData, sign: str = "plus"):
        if sign not in ("plus", "minus"):
            raise ValueError(f"unknown calculus sign {sign!r}")
        self.qd = qd
        self.sign = sign
        self.calc = Calculus(qd)

    @classmethod
    def build(cls, family: str, N: int, sign: str = "plus", field=SYMBOLIC,
              perturb: bool = False) -> "Context":
        spec = group_spec(family, N)
        if perturb:
            clean = build_qdata(spec, field)
            qd = build_qdata(spec, field, rhat_override=perturb_rhat(clean.R))
        else:
            qd = build_qdata(spec, field)
        return cls(qd, sign)

    @property
    def field(self):
        return self.qd.field

    @property
    def eps(self) -> int:
        return 1 if self.sign == "plus" else -1

    @cached_property
    def engine(self) -> FunctionalEngine:
        return FunctionalEngine(self.qd)

    @cached_property
    def theta(self) -> Tensor:
        """``theta = sum_i theta_ii`` in Gamma_l coordinates."""
        N, f = self.qd.N, self.field
        return Tensor.from_function(2, 0, N, lambda i, j: f.one if i == j else f.zero, f)

    def act1(self, i: int, j: int) -> Tensor:
        return self._act1[(i, j)]

    @cached_property
    def _act1(self) -> dict:
        return self.calc.adj_action_1(self.sign)

    def act2(self, i: int, j: int) -> Tensor:
        return self.calc.adj_action_2[(i, j)]

    @cached_property
    def U(self) -> Element:
        return Element.quantum_trace(self.qd)

    @cached_property
    def machine_c(self) -> dict:
        """``c_{tau nu}`` from ``eta^tau <| V_nu^+ = c eta^tau``."""
        out = {}
        for t in ("+", "-"):
            e = self.calc.eta_tau(t)
            for n in ("+", "-"):
                V = Element.quadratic_invariant(self.qd, n).plus()
                w = V.act(e, self.act2)
                c = proportionality(w, e)
                if c is None:
                    raise ArithmeticError(f"eta^{t} <| V_{n}^+ is not a multiple of eta^{t}")
                out[(t, n)] = c
        return out

    @cached_property
    def orbits(self) -> dict:
        gens = list(self.calc.adj_action_2.values())
        return {t: orbit_span(self.calc.eta_tau(t), gens) for t in TAUS}


def proportionality(v: Tensor, base: Tensor):
    """``c`` with ``v == c * base``, or ``None``."""
    for x, y in zip(v.flat(), base.flat()):
        if y != 0:
            c = x / y
            return c if v == base.scale(c) else None
    return base.field.zero if v.is_zero() else None


def perturb_rhat(R: Tensor) -> Tensor:
    """``R`` with its first nonzero entry increased by one."""
    data = R.data.copy()
    for idx in np.ndindex(data.shape):
        if data[idx] != 0:
            data[idx] = data[idx] + R.field.one
            break
    return Tensor(data, R.legs_out, R.legs_in, R.field)


def _fmt(x) -> str:
    return str(x)


# ---------------------------------------------------------------------------
# suites


def suite_rmatrix(ctx: Context) -> Report:
    def body(rep: Report):
        qd = ctx.qd
        cs, N, f = qd.consts, qd.N, qd.field
        metric = {"C": qd.C, "K": qd.K, "D": qd.D, "consts": cs}
        cert = certify_rhat(qd.R, metric, stop_early=False)
        for name, ok in cert.checks.items():
            rep.check(name, lambda ok=ok: ok)
        I1 = Tensor.identity(1, N, f)
        I2 = Tensor.identity(2, N, f)
        rep.check("curl R^-1 gives rhat^-1", lambda: partial_qtrace(qd.Rinv, qd.D) == I1.scale(cs.rhatm))
        rep.check("closed loop gives x", lambda: (qd.D.trace() == cs.x, cs.x))
        rep.check("K^2 = x K", lambda: qd.K @ qd.K == qd.K.scale(cs.x))
        rep.check("{I, R, K} independent",
                  lambda: ((r := stack_rank([I2, qd.R, qd.K])) == 3, f"rank {r}"))
        for nu in ("+", "-"):
            rep.check(f"closed-form P^{nu}",
                      lambda nu=nu: closed_form_projector(nu, qd.R, qd.K, cs) == qd.P[nu])
        rep.check("projector ranks", lambda: (True, qd.P.ranks))
        # R replaced by the identity must violate the inverse relation
        rep.control("R := I fails R - R^-1 = qhat (I - K)",
                    lambda: I2 - I2 == (I2 - qd.K).scale(cs.qhat))
        rep.control("one altered entry fails certification",
                    lambda: certify_rhat(perturb_rhat(qd.R), metric, stop_early=True).ok)
    return _timed("rmatrix", body)


def suite_decomposition(ctx: Context) -> Report:
    def body(rep: Report):
        qd, calc = ctx.qd, ctx.calc
        cs, N, f = qd.consts, qd.N, qd.field
        n4 = N ** 4
        I4 = Tensor.identity(4, N, f)
        Z4 = Tensor.zeros(4, 4, N, f)
        blocks = calc.lambda_blocks
        rep.check("A_23 G_23 = I", lambda: calc.to_bar @ calc.to_plain == I4)
        ranks = {}

        def idem():
            for k, L in blocks.items():
                if L @ L != L:
                    return False, f"block {k}"
            return True
        rep.check("blocks idempotent", idem)

        def orth():
            keys = list(blocks)
            for a in keys:
                for b in keys:
                    if a != b and not (blocks[a] @ blocks[b]).is_zero():
                        return False, f"{a} {b}"
            return True
        rep.check("blocks orthogonal", orth)

        def total():
            acc = Z4
            for L in blocks.values():
                acc = acc + L
            return acc == I4
        rep.check("blocks sum to I", total)

        def sig_eig():
            for (t, n), L in blocks.items():
                lam = cs.lam[t] / cs.lam[n]
                if calc.sigma @ L != L.scale(lam):
                    return False, f"block {(t, n)}"
            return True
        rep.check("sigma eigenvalue lambda_t / lambda_n per block", sig_eig)

        def block_ranks():
            for k, L in blocks.items():
                ranks[k] = rank(L)
            want = {(t, n): qd.P.ranks[TAUS.index(t)] * qd.P.ranks[TAUS.index(n)]
                    for t in TAUS for n in TAUS}
            return ranks == want, {f"{t}{n}": r for (t, n), r in ranks.items()}
        rep.check("block ranks = rank P^t * rank P^n", block_ranks)
        rep.check("block ranks sum to N^4", lambda: (sum(ranks.values()) == n4, sum(ranks.values())))

        diag = blocks[("+", "+")] + blocks[("-", "-")] + blocks[("0", "0")]
        rp, rm_ = qd.P.ranks[0], qd.P.ranks[1]
        kdim = {}

        def kernel_dim():
            kdim["v"] = n4 - rank(I4 - calc.sigma)
            return kdim["v"] == rp * rp + rm_ * rm_ + 1, kdim["v"]
        rep.check("dim ker(I - sigma) = r+^2 + r-^2 + 1", kernel_dim)
        rep.check("diagonal blocks inside ker(I - sigma)",
                  lambda: ((I4 - calc.sigma) @ diag).is_zero())
        rep.check("ker(I - sigma) = diagonal blocks (rank)",
                  lambda: rank(diag) == kdim.get("v", -1))
        broken = calc.sigma + Tensor.from_function(
            4, 4, N, lambda *ix: f.one if all(v == 0 for v in ix) else f.zero, f)
        rep.control("sigma with one altered entry keeps the kernel dimension",
                    lambda: n4 - rank(I4 - broken) == kdim.get("v", -1)
                    and ((I4 - broken) @ diag).is_zero())
    return _timed("decomposition", body)


def suite_biinvariants(ctx: Context) -> Report:
    def body(rep: Report):
        qd, calc = ctx.qd, ctx.calc
        cs, N = qd.consts, qd.N
        iv = calc.invariants
        sb = calc.sigma_bar
        rep.check("dim span{theta(x)theta, eta, xi} = 3",
                  lambda: ((r := stack_rank([iv.theta_theta, iv.eta, iv.xi])) == 3, f"rank {r}"))
        for name, v in (("theta(x)theta", iv.theta_theta), ("eta", iv.eta), ("xi", iv.xi)):
            rep.check(f"sigma fixes {name}", lambda v=v: sb @ v == v)
        rep.check("eta = rhat (eta+ + eta- + eta0)",
                  lambda: iv.eta == (iv.eta_plus + iv.eta_minus + iv.eta_zero).scale(cs.rhat))
        rep.check("xi = x eta0", lambda: iv.xi == iv.eta_zero.scale(cs.x))
        trans = lambda a, b, c: (iv.eta_plus.scale(a) + iv.eta_minus.scale(b)
                                 + iv.eta_zero.scale(c))
        rep.check("theta(x)theta = q eta+ - q^-1 eta- + rhat^-1 eta0",
                  lambda: iv.theta_theta == trans(cs.q, -1 / cs.q, cs.rhatm))

        def tn():
            e0 = iv.eta_zero
            for i in range(N):
                for j in range(N):
                    want = e0 if i == j else e0.scale(qd.field.zero)
                    if ctx.act2(i, j) @ e0 != want:
                        return False, f"(i, j) = {(i, j)}"
            return True
        rep.check("eta0 <| u^i_j = delta_ij eta0", tn)
        for t in TAUS:
            rep.check(f"eta^{t} in Lambda^{t}{t}",
                      lambda t=t: calc.block_bar(t, t) @ calc.eta_tau(t) == calc.eta_tau(t))
        rep.control("sign flip on q in the theta(x)theta decomposition",
                    lambda: iv.theta_theta == trans(-cs.q, -1 / cs.q, cs.rhatm))
    return _timed("biinvariants", body)


def reference_c_forms(cs) -> dict:
    """Reference closed forms for ``c_{tau nu}``, transcribed literally (a leading "(2" is read as 2)."""
    q, r = cs.q, cs.rhat
    qm, rm = 1 / q, 1 / r
    c = cs.crit
    two = q + qm
    tail = (q * q - 1 + qm * qm) * r * r + cs.qhat * r - q * q + 1 - qm * qm
    pp = ((q ** 12 + q ** 4) * r ** 4 + (2 * q ** 11 - 2 * q ** 9 + 2 * q ** 5 - 2) * r ** 3
          + (-q ** 12 + q ** 8 - 4 * q ** 6 + q ** 4 - 1) * r * r
          + (-2 * q ** 9 + 2 * q ** 7 - 2 * q ** 3 + 2 * q) * r + q ** 8 + 1)
    mm = ((q ** 8 + 1) * r ** 4 + (2 * q ** 9 - 2 * q ** 7 + 2 * q ** 3 - 2 * q) * r ** 3
          + (-q ** 12 + q ** 8 - 4 * q ** 6 + q ** 4 - 1) * r * r
          + (-2 * q ** 11 + 2 * q ** 9 - 2 * q ** 5 + 2 * q ** 3) * r + q ** 12 + q ** 4)
    return {
        ("+", "+"): (1 / c) * (q * q + 1) * (q * q * r * r - 1) * rm * rm * qm ** 6 * pp,
        ("+", "-"): (1 / c) * two * 2 * (q - qm * rm * rm) * (r + q ** 3) * (r - q) * tail,
        ("-", "+"): (1 / c) * two * 2 * (qm - q * rm * rm) * (q * r + 1) * (q ** 3 * r - 1) * tail,
        ("-", "-"): (1 / c) * (q * q + 1) * (r * r - q * q) * rm * rm * qm ** 6 * mm,
    }


def corrected_c_plus_plus(cs):
    """The (+,+) reference form with cubic coefficient ``... + 2q^5 - 2q^3`` (matching d_1)."""
    q, r = cs.q, cs.rhat
    d1 = d_polynomials(cs)[0]
    return (1 / cs.crit) * (q * q + 1) * (q * q * r * r - 1) / (r * r) / q ** 6 * d1(r)


def e_closed(cs, t: str, n: str):
    lt, ln = cs.lam[t], cs.lam[n]
    return (1 / (ln + 1 / ln)) * (1 / lt + cs.qhat / (1 - cs.rhat * ln))


def suite_adjoint(ctx: Context) -> Report:
    def body(rep: Report):
        qd, calc = ctx.qd, ctx.calc
        cs, N, f = qd.consts, qd.N, qd.field
        D = qd.D.data
        member = Calculus.member
        zero4 = Tensor.zeros(4, 0, N, f)
        for t in ("+", "-"):
            e = calc.eta_tau(t)
            X, E = calc.xi_ij(t), calc.eta_ij(t)
            lam = cs.lam[t]

            def etatu(e=e, X=X, E=E, lam=lam):
                for i in range(N):
                    for j in range(N):
                        lhs = ctx.act2(i, j) @ e - (e if i == j else zero4)
                        rhs = (member(X, i, j).scale(cs.qhat * (lam * lam + 1))
                               - member(E, i, j).scale(cs.rhatm * cs.qhat * (1 + 1 / (lam * lam))))
                        if lhs != rhs:
                            return False, f"(i, j) = {(i, j)}"
                return True
            rep.check(f"eta^{t} <| u^i_j^+ (all i, j)", etatu)

            def contr(fam, factor):
                acc = zero4
                for i in range(N):
                    if D[i, i] != 0:
                        acc = acc + member(fam, i, i).scale(D[i, i])
                return acc == e.scale(factor)
            rep.check(f"D^j_i eta^{t}_ij = eta^{t}", lambda E=E: contr(E, f.one))
            rep.check(f"D^j_i xi^{t}_ij = rhat eta^{t}", lambda X=X: contr(X, cs.rhat))
            U2 = calc.quantum_trace_action_2()
            rep.check(f"eta^{t} <| U^+ = alpha_{t} eta^{t}",
                      lambda e=e, U2=U2, t=t: ((c := proportionality(U2 @ e - e.scale(cs.x), e))
                                               == cs.alpha[t], c))
        # tau = 0
        e0 = calc.eta_tau("0")

        def deg0(scale):
            E0, X0 = calc.eta_ij("0"), calc.xi_ij("0")
            for i in range(N):
                for j in range(N):
                    want = e0.scale(scale) if i == j else zero4
                    if member(E0, i, j) != want or member(X0, i, j) != want.scale(cs.rhat):
                        return False, (f"eta^0_ij = {proportionality(member(E0, i, j), e0)} "
                                       f"* eta0 at (i, j) = {(i, j)}")
            return True
        rep.check("eta^0_ij = delta_ij eta0, xi^0_ij = rhat delta_ij eta0", lambda: deg0(f.one))
        rep.check("eta^0_ij = x^-1 delta_ij eta0, xi^0_ij = rhat x^-1 delta_ij eta0",
                  lambda: deg0(1 / cs.x))
        I1 = Tensor.identity(1, N, f)
        for n in ("+", "-"):
            rep.check(f"tr_q P^{n} = t_{n} I", lambda n=n: partial_qtrace(qd.P[n], qd.D) == I1.scale(cs.t(n)))
            rep.check(f"eps(V_{n}) = x t_{n}",
                      lambda n=n: Element.quadratic_invariant(qd, n).counit() == cs.x * cs.t(n))
        # e_{tau nu} through the two action formulas it enters
        for t in ("+", "-"):
            X, E, e = calc.xi_ij(t), calc.eta_ij(t), calc.eta_tau(t)
            lt = cs.lam[t]
            for n in ("+", "-"):
                def action_formulas(t=t, n=n, X=X, E=E, e=e, lt=lt):
                    ln, tn, en = cs.lam[n], cs.t(n), e_closed(cs, t, n)
                    P = qd.P[n].data
                    accX, accE = zero4, zero4
                    for i in range(N):
                        for j in range(N):
                            vx, ve = member(X, i, j), member(E, i, j)
                            for s in range(N):
                                for tt in range(N):
                                    w = P[j, tt, i, s] * D[i, i] * D[s, s]
                                    if w == 0:
                                        continue
                                    M = ctx.act2(s, tt)
                                    accX = accX + (M @ vx).scale(w)
                                    accE = accE + (M @ ve).scale(w)
                    d = 1 if t == n else 0
                    cX = (cs.qhat * d * cs.rhat ** 2 * lt ** 2 + cs.rhat * ln ** 2 * tn
                          - cs.qhat * ln / lt * en)
                    cE = (cs.qhat * cs.rhat / ln * lt * en + tn / (ln * ln)
                          - cs.qhat * cs.rhatm / (lt * lt) * d)
                    return accX == e.scale(cX) and accE == e.scale(cE), f"e = {en}"
                rep.check(f"e_{t}{n} closed form via xi/eta action formulas", action_formulas)
        # c_{tau nu}
        disp = reference_c_forms(cs)
        for (t, n), shown in disp.items():
            rep.check(f"c_{t}{n} machine = reference closed form",
                      lambda t=t, n=n, shown=shown: ((m := ctx.machine_c[(t, n)]) == shown,
                                                     f"machine c_{t}{n} = {m}"))
        for (t, n), shown in disp.items():
            rep.check(f"c_{t}{n} - mu^{n} alpha_{t} = reference closed form",
                      lambda t=t, n=n, shown=shown: (
                          (m := ctx.machine_c[(t, n)] - cs.mu(n) * cs.alpha[t]) == shown,
                          f"machine value {m}"))
        rep.check("c_++ - mu^+ alpha_+ = reference form with cubic coefficient -2q^3",
                  lambda: ctx.machine_c[("+", "+")] - cs.mu("+") * cs.alpha["+"]
                  == corrected_c_plus_plus(cs))
        rep.control("alpha_+ shifted by one",
                    lambda: proportionality(calc.quantum_trace_action_2() @ calc.eta_tau("+")
                                            - calc.eta_tau("+").scale(cs.x), calc.eta_tau("+"))
                    == cs.alpha["+"] + 1)
    return _timed("adjoint", body)


def _theta_theta_bar(ctx: Context) -> Tensor:
    return ctx.calc.invariants.theta_theta


def relation_image(ctx: Context) -> Subspace:
    """``S(p) = (theta (x) theta) <| p`` for every ``p`` of degree <= 2 in the relation ideal.

    ``p`` ranges over combinations of ``m^+`` (``m`` a monomial of degree 1 or 2)
    with ``theta <| p = 0``; on such ``p`` the quadratic map is the plain action.
    """
    qd = ctx.qd
    N, f = qd.N, qd.field
    theta, tt = ctx.theta, _theta_theta_bar(ctx)
    monos = [Element.generator(i, j, f) for i in range(N) for j in range(N)]
    monos += [Element.generator(i, j, f) * Element.generator(k, l, f)
              for i in range(N) for j in range(N) for k in range(N) for l in range(N)]
    cols1, cols2 = [], []
    for m in monos:
        mp = m.plus()
        cols1.append(mp.act(theta, ctx.act1).flat())
        cols2.append(mp.act(tt, ctx.act2).flat())
    A = np.array(cols1, dtype=object).T
    _, ker = kernel_of(A, f)
    S2 = np.array(cols2, dtype=object)
    out = Subspace(N, 4, f)
    for kv in ker:
        acc = np.empty(N ** 4, dtype=object)
        acc.fill(f.zero)
        for c, row in zip(kv, S2):
            if c != 0:
                acc = acc + row * c
        out.add(Tensor.vector(list(acc), N, f))
    return out


def _direct_membership(rep: Report, ctx: Context):
    img = {}

    def build():
        img["v"] = relation_image(ctx)
        return True, f"dim S(R, deg <= 2) = {img['v'].dim}"
    rep.check("direct: S(R, deg <= 2) computed", build)
    for t in ("+", "-"):
        rep.check(f"direct: eta{t} in S(R, deg <= 2)",
                  lambda t=t: img["v"].contains(ctx.calc.eta_tau(t)))
    rep.check("direct: eta0 not in S(R, deg <= 2)",
              lambda: not img["v"].contains(ctx.calc.eta_tau("0")))


def suite_SR_plus(ctx: Context) -> Report:
    def body(rep: Report):
        if ctx.sign != "plus":
            rep.skip("SR plus", "calculus sign is minus")
            return
        qd, calc = ctx.qd, ctx.calc
        cs, f = qd.consts, qd.field
        kappa = cs.qhat * cs.rhat_diff
        Up = ctx.U.plus()
        Q = Up * Up - Up.scale(kappa)
        theta = ctx.theta
        rep.check("theta <| U^+ = qhat rhat_diff theta",
                  lambda: Up.act(theta, ctx.act1) == theta.scale(kappa))
        rep.check("omega(Q) = 0", lambda: (Q.act(theta, ctx.act1) + theta.scale(Q.counit())).is_zero())
        rep.check("eps(Q) = 0", lambda: Q.counit() == 0)
        tt = _theta_theta_bar(ctx)
        ep, em = calc.eta_tau("+"), calc.eta_tau("-")
        ap, am = cs.alpha["+"], cs.alpha["-"]
        q, qm = cs.q, 1 / cs.q
        SQ = Q.act(tt, ctx.act2)
        SQU = (Q * Up).act(tt, ctx.act2)
        e1 = ep.scale(q * ap * (ap - kappa)) - em.scale(qm * am * (am - kappa))
        e2 = ep.scale(q * ap * ap * (ap - kappa)) - em.scale(qm * am * am * (am - kappa))
        rep.check("S(Q) machine = closed form", lambda: SQ == e1)
        rep.check("S(Q U^+) machine = closed form", lambda: SQU == e2)
        det = ap * am * (ap - am) * (ap - kappa) * (am - kappa)
        rm = cs.rhatm
        r = cs.rhat
        shown = ((r + rm) * cs.qhat ** 6 * cs.two_q ** 3 * (q * r - qm * rm) * (qm * r - q * rm)
                 * (q * q * r - qm * qm * rm) * (qm * qm * r - q * q * rm))
        rep.check("det = factored form", lambda: (det == shown, det))
        rep.check("det != 0", lambda: det != 0)
        sub = Subspace(qd.N, 4, f, [SQ, SQU])
        rep.check("span{S(Q), S(QU^+)} = span{eta+, eta-}",
                  lambda: (sub.dim == 2 and sub.contains(ep) and sub.contains(em), f"dim {sub.dim}"))
        _direct_membership(rep, ctx)
        UU = Up * Up
        rep.control("U^+ U^+ alone is not in the ideal (omega != 0)",
                    lambda: (UU.act(theta, ctx.act1) + theta.scale(UU.counit())).is_zero())
    return _timed("sr_plus", body)


def d_polynomials(cs) -> tuple:
    """``d_1 .. d_4`` as polynomials in ``r`` with coefficients in q (``d_3 = d_2``)."""
    F = SYMBOLIC if isinstance(cs.q, Scalar) else _NumericCoeffField()
    q = cs.q

    def P(*c):
        return RPoly(list(c), F)
    d1 = P(q ** 8 + 1, -2 * q ** 9 + 2 * q ** 7 - 2 * q ** 3 + 2 * q,
           -q ** 12 + q ** 8 - 4 * q ** 6 + q ** 4 - 1, 2 * q ** 11 - 2 * q ** 9 + 2 * q ** 5 - 2 * q ** 3,
           q ** 12 + q ** 4)
    d2 = P(-q ** 4 + q ** 2 - 1, q ** 3 - q, q ** 4 - q ** 2 + 1)
    d4 = P(q ** 12 + q ** 4, -2 * q ** 11 + 2 * q ** 9 - 2 * q ** 5 + 2 * q ** 3,
           -q ** 12 + q ** 8 - 4 * q ** 6 + q ** 4 - 1, 2 * q ** 9 - 2 * q ** 7 + 2 * q ** 3 - 2 * q,
           q ** 8 + 1)
    return d1, d2, d2, d4


class _NumericCoeffField:
    """Minimal field wrapper so RPoly works over fmpq coefficients."""
    def __init__(self):
        self.zero = flint.fmpq(0)
        self.one = flint.fmpq(1)

    def __call__(self, n):
        return flint.fmpq(n)


def symbolic_d_polynomials() -> tuple:
    """``d_1..d_4`` over ``Q(s)[r]`` with ``q = s^2`` (independent of N)."""
    from .qdata import make_constants
    cs = make_constants(group_spec("o", 3), SYMBOLIC)
    return d_polynomials(cs)


def bezout_cleared(p1: RPoly, p2: RPoly):
    """Cofactors with cleared denominators: ``A p1 + B p2 = L`` with ``L`` free of r.

    Returns ``(g, A, B, L)`` where ``g`` is the monic gcd and ``L`` is an
    integer polynomial in ``s`` (as ``flint.fmpz_poly``) up to a power of ``s``.
    """
    g, a, b = ext_gcd(p1, p2)
    if g.degree != 0:
        return g, a, b, None
    L = flint.fmpz_poly(1)
    for c in a.coeffs + b.coeffs:
        d = c.den
        L = (L * d) // L.gcd(d)
    Ls = Scalar(L)
    return g, a * Ls, b * Ls, L


def _q_poly(p: flint.fmpz_poly) -> Optional[flint.fmpz_poly]:
    """Rewrite an even polynomial in s as a polynomial in q = s^2."""
    cs = p.coeffs()
    if any(c != 0 for c in cs[1::2]):
        return None
    return flint.fmpz_poly(cs[0::2])


def strip_q(p: flint.fmpz_poly) -> tuple[flint.fmpz_poly, int]:
    k = 0
    cs = p.coeffs()
    while cs and cs[0] == 0:
        cs = cs[1:]
        k += 1
    return flint.fmpz_poly(cs), k


def divide_out(p: flint.fmpz_poly, factor: flint.fmpz_poly, times: int) -> Optional[flint.fmpz_poly]:
    for _ in range(times):
        quo, rem = divmod(p, factor)
        if rem != 0:
            return None
        p = quo
    return p


CASE_FACTORS = {
    # factor in q, exponent in the stated Bezout value
    1: [([1, 0, 0, 1, 0, 0, 1], 1), ([1, 0, 0, -1, 0, 0, 1], 1), ([-1, 1], 6), ([1, 1], 6)],
    2: [([1, 0, 0, 1, 0, 0, 1], 1), ([1, 0, 0, -1, 0, 0, 1], 1), ([1, 0, -1, 0, 1], 1),
        ([-1, 1], 12), ([1, 1], 12)],
}


def factor_report(L: flint.fmpz_poly, case: int) -> tuple[bool, bool, str]:
    """``(only_listed, exact, witness)`` for a cleared value written in s.

    ``only_listed``: every irreducible factor of ``L`` (in q) is among the stated ones.
    ``exact``: ``L`` equals the stated product up to a rational constant and a power of q.
    """
    Lq = _q_poly(L)
    if Lq is None:
        return False, False, f"not a polynomial in q: {L}"
    Lq, _ = strip_q(Lq)
    allowed = [flint.fmpz_poly(c) for c, _ in CASE_FACTORS[case]]
    _, facs = Lq.factor()
    only = all(any(f == a or f == -a for a in allowed) for f, _ in facs)
    rest = Lq
    for c, e in CASE_FACTORS[case]:
        rest = divide_out(rest, flint.fmpz_poly(c), e) if rest is not None else None
    exact = rest is not None and rest.degree() == 0
    return only, exact, "factors in q: " + ", ".join(f"({f})^{e}" for f, e in facs)


def suite_SR_minus(ctx: Context) -> Report:
    def body(rep: Report):
        if ctx.sign != "minus":
            rep.skip("SR minus", "calculus sign is plus")
            return
        qd, calc = ctx.qd, ctx.calc
        cs, f, N = qd.consts, qd.field, qd.N
        try:
            CalculusSpec("minus", qd)
        except PreconditionViolated as exc:
            rep.check("critical value c != 0", lambda: (False, str(exc)))
            return
        rep.check("critical value c != 0", lambda: (cs.crit != 0, cs.crit))
        c = ctx.machine_c
        U = ctx.U
        theta, tt = ctx.theta, _theta_theta_bar(ctx)
        ep, em = calc.eta_tau("+"), calc.eta_tau("-")
        ap, am = cs.alpha["+"], cs.alpha["-"]
        q, qm = cs.q, 1 / cs.q
        Up = U.plus()
        for n in ("+", "-"):
            W = Element.quadratic_invariant(qd, n) - U.scale(cs.mu(n))
            Wp = W.plus()
            rep.check(f"theta <| W_{n}^+ = 0 on Gamma_-", lambda Wp=Wp: Wp.act(theta, ctx.act1).is_zero())
            a_p = c[("+", n)] - cs.mu(n) * ap
            a_m = c[("-", n)] - cs.mu(n) * am
            rep.check(f"S(W_{n}) machine = closed form",
                      lambda Wp=Wp, a_p=a_p, a_m=a_m: Wp.act(tt, ctx.act2)
                      == ep.scale(q * a_p) - em.scale(qm * a_m))
            rep.check(f"S(W_{n} U^+) machine = closed form",
                      lambda Wp=Wp, a_p=a_p, a_m=a_m: (Wp * Up).act(tt, ctx.act2)
                      == ep.scale(q * ap * a_p) - em.scale(qm * am * a_m))
        col1 = [c[("+", "+")] - cs.mu("+") * ap, c[("+", "-")] - cs.mu("-") * ap]
        col2 = [c[("-", "+")] - cs.mu("+") * am, c[("-", "-")] - cs.mu("-") * am]
        T = np.empty((4, 2), dtype=object)
        for k in range(2):
            T[k, 0] = q * col1[k]
            T[k + 2, 0] = q * ap * col1[k]
            T[k, 1] = -qm * col2[k]
            T[k + 2, 1] = -qm * am * col2[k]
        rep.check("rank T = 2", lambda: ((r := rank_of(T, f)) == 2, f"rank {r}"))
        Tz = T.copy()
        for k in range(4):
            Tz[k, 0] = f.zero
        rep.control("T with its first column zeroed has rank 2", lambda: rank_of(Tz, f) == 2)

        # the d polynomials are the factors of the T entries at this group's rhat
        d1, d2, d3, d4 = d_polynomials(cs)
        r = cs.rhat
        rm = 1 / r
        rep.check("T_11 / q = c^-1 (q^2+1)(q^2 rhat^2-1) rhat^-2 q^-6 d1(rhat)",
                  lambda: col1[0] == (1 / cs.crit) * (q * q + 1) * (q * q * r * r - 1) * rm * rm
                  * qm ** 6 * d1(r))
        rep.check("T_21 / q = c^-1 [2] 2 (q - q^-1 rhat^-2)(rhat+q^3)(rhat-q) q^-2 d2(rhat)",
                  lambda: col1[1] == (1 / cs.crit) * cs.two_q * 2 * (q - qm * rm * rm) * (r + q ** 3)
                  * (r - q) * qm * qm * d2(r))
        rep.check("T_12 / -q^-1 = c^-1 [2] 2 (q^-1 - q rhat^-2)(q rhat+1)(q^3 rhat-1) q^-2 d3(rhat)",
                  lambda: col2[0] == (1 / cs.crit) * cs.two_q * 2 * (qm - q * rm * rm) * (q * r + 1)
                  * (q ** 3 * r - 1) * qm * qm * d3(r))
        rep.check("T_22 / -q^-1 = c^-1 (q^2+1)(rhat^2-q^2) rhat^-2 q^-6 d4(rhat)",
                  lambda: col2[1] == (1 / cs.crit) * (q * q + 1) * (r * r - q * q) * rm * rm
                  * qm ** 6 * d4(r))

        # generic-rhat case analysis over Q(q)[r]
        s1, s2, s3, s4 = symbolic_d_polynomials()
        for case, (a, b) in ((1, (s1, s2)), (2, (s3, s4))):
            g, A, B, L = bezout_cleared(a, b)
            rep.check(f"case {case}: gcd = 1 in Q(q)[r]", lambda g=g: (g.degree == 0, g))
            if L is None:
                continue
            rep.check(f"case {case}: A d + B d' = L free of r",
                      lambda A=A, B=B, a=a, b=b, L=L: A * a + B * b == RPoly([Scalar(L)], SYMBOLIC))
            only, exact, wit = factor_report(L, case)
            rep.check(f"case {case}: cleared value has only the listed factors", lambda only=only, wit=wit: (only, wit))
            if case == 1:
                rep.check("case 1: cleared value = (q^6+q^3+1)(q^6-q^3+1)(q-1)^6(q+1)^6 q^k c",
                          lambda exact=exact, wit=wit: (exact, wit))
            res = resultant(a, b)
            rep.check(f"case {case}: resultant has only the listed factors",
                      lambda res=res, case=case: factor_report(res.num, case)[0::2])
        _direct_membership(rep, ctx)
        rep.control("d2 and d2 (r - 1) have a common factor",
                    lambda: ext_gcd(s2, s2 * RPoly([-1, 1], SYMBOLIC))[0].degree == 0)
    return _timed("sr_minus", body)


def suite_theorem(ctx: Context, sr_report: Optional[Report] = None) -> Report:
    def body(rep: Report):
        qd, calc = ctx.qd, ctx.calc
        f, N = qd.field, qd.N
        n4 = N ** 4
        rp, rm_ = qd.P.ranks[0], qd.P.ranks[1]
        if sr_report is not None:
            rep.check("SR suite for this calculus passed", lambda: (sr_report.passed, sr_report.name))
        orb = ctx.orbits
        rep.check("dim orbit(eta+) = rank(P+)^2", lambda: (orb["+"].dim == rp * rp, orb["+"].dim))
        rep.check("dim orbit(eta-) = rank(P-)^2", lambda: (orb["-"].dim == rm_ * rm_, orb["-"].dim))
        rep.check("dim orbit(eta0) = 1", lambda: (orb["0"].dim == 1, orb["0"].dim))
        SR = orb["+"].copy()
        SR.extend(orb["-"].basis)
        dimSR = SR.dim
        rep.check("S(R) = orbit(eta+) + orbit(eta-) is direct",
                  lambda: (dimSR == rp * rp + rm_ * rm_, f"dim S(R) = {dimSR}"))
        I4 = Tensor.identity(4, N, f)
        kd = n4 - rank(I4 - calc.sigma_bar)
        rep.check("(ker A2)_l = S(R) + <eta0>", lambda: (kd == dimSR + 1, f"dim ker = {kd}"))
        e0 = calc.eta_tau("0")
        rep.check("eta0 not in S(R)", lambda: not SR.contains(e0))
        rep.check("S(R) inside ker(I - sigma)",
                  lambda: all((calc.sigma_bar @ v) == v for v in SR.basis))
        du, ds = n4 - dimSR, n4 - kd
        rep.check("dim Omega2_u,l - dim Omega2_s,l = 1",
                  lambda: (du - ds == 1, f"dim Omega2_u,l = {du}, dim Omega2_s,l = {ds}"))
        iv = calc.invariants
        inv = Subspace(N, 4, f, [iv.theta_theta, iv.eta, iv.xi])
        SRI = Subspace(N, 4, f, [v for v in (calc.eta_tau("+"), calc.eta_tau("-"))])
        kerI = sum(1 for v in (iv.theta_theta, iv.eta, iv.xi) if calc.sigma_bar @ v == v)
        counts = (inv.dim, inv.dim - SRI.dim, inv.dim - kerI)
        rep.check("bi-invariant counts (3, 1, 0)", lambda: (counts == (3, 1, 0), counts))
        rep.control("orbit of eta+ + eta0 has the size of orbit(eta+)",
                    lambda: orbit_span(calc.eta_tau("+") + e0,
                                       list(calc.adj_action_2.values())).dim == rp * rp)
    return _timed("theorem", body)


SUITES = ("rmatrix", "decomposition", "biinvariants", "adjoint", "sr_plus", "sr_minus", "theorem")


def run_suite(name: str, ctx: Context, previous: Optional[dict] = None) -> Report:
    previous = previous or {}
    if name == "rmatrix":
        return suite_rmatrix(ctx)
    if name == "decomposition":
        return suite_decomposition(ctx)
    if name == "biinvariants":
        return suite_biinvariants(ctx)
    if name == "adjoint":
        return suite_adjoint(ctx)
    if name == "sr_plus":
        return suite_SR_plus(ctx)
    if name == "sr_minus":
        return suite_SR_minus(ctx)
    if name == "theorem":
        sr = previous.get("sr_plus" if ctx.sign == "plus" else "sr_minus")
        return suite_theorem(ctx, sr)
    raise KeyError(f"unknown suite {name!r}")
