"""Acceptance criteria, one verdict line per criterion.

Every comparison is exact.  Expected values are either classical
dimension counts, loop-based oracles from ``oracles.py`` or closed forms
transcribed once in ``qext.verify``.
"""
from __future__ import annotations

import itertools

import pytest

from conftest import context, record_verdict, reports
from oracles import FunctionalOracle, braid_defect, classical_ranks, monomials
from qext.cli import main
from qext.functionals import FunctionalEngine, Monomial
from qext.qdata import build_metric, build_qdata, certify_rhat, group_spec
from qext.scalar import SYMBOLIC, NumericField
from qext.tensor import Subspace, Tensor, rank
from qext.verify import SUITES

NUMERIC_GROUPS = [("o", 3), ("o", 4), ("o", 5), ("sp", 4), ("sp", 6)]
SYMBOLIC_GROUPS = [("o", 3), ("sp", 4)]
# configurations for the representation-theoretic criteria
GEN_CONFIGS = [("o", 3, "symbolic"), ("sp", 4, "numeric")]


def failed(report, names=None):
    return [c.name for c in report.checks
            if c.status == "fail" and (names is None or c.name in names)]


def test_criterion_1_rmatrix_certification():
    bad = []
    for (fam, N), mode in ([(g, "numeric") for g in NUMERIC_GROUPS]
                           + [(g, "symbolic") for g in SYMBOLIC_GROUPS]):
        f = NumericField(2) if mode == "numeric" else SYMBOLIC
        spec = group_spec(fam, N)
        qd = build_qdata(spec, f)
        metric = build_metric(spec, f)
        cert = certify_rhat(qd.R, metric, stop_early=False)
        if not cert.ok:
            bad.append(f"{fam}{N} {mode}: {cert.first_failure()}")
        if braid_defect(qd.R, f):
            bad.append(f"{fam}{N} {mode}: loop braid oracle")
    record_verdict(1, "braid matrix identities, braid equation, spectral decomposition",
                   not bad, "; ".join(bad))
    assert not bad


def test_criterion_2_decomposition():
    bad, dims = [], []
    for fam, N, mode in GEN_CONFIGS:
        ctx = context(fam, N, "plus", mode)
        rp, rm, _ = classical_ranks(fam, N)
        want = rp * rp + rm * rm + 1
        I4 = Tensor.identity(4, N, ctx.field)
        got = N ** 4 - rank(I4 - ctx.calc.sigma)
        dims.append(f"{fam}{N}: {got}")
        if got != want:
            bad.append(f"{fam}{N}: dim ker = {got}, classical {want}")
        rep = reports(fam, N, "plus", mode)["decomposition"]
        bad += [f"{fam}{N}: {n}" for n in failed(rep)]
    record_verdict(2, "dim ker(I - sigma) and the nine block idempotents",
                   not bad, "; ".join(bad) or ", ".join(dims))
    assert not bad


def test_criterion_3_biinvariants():
    bad = []
    for fam, N, mode in GEN_CONFIGS:
        rep = reports(fam, N, "plus", mode)["biinvariants"]
        bad += [f"{fam}{N}: {n}" for n in failed(rep)]
        iv = context(fam, N, "plus", mode).calc.invariants
        if Subspace(N, 4, iv.eta.field, [iv.theta_theta, iv.eta, iv.xi]).dim != 3:
            bad.append(f"{fam}{N}: span dimension")
    record_verdict(3, "three bi-invariants, sigma-fixed, decomposition coefficients (q, -1/q, 1/rhat)",
                   not bad, "; ".join(bad))
    assert not bad


def test_criterion_4_generation():
    bad, dims = [], []
    for fam, N, mode in GEN_CONFIGS:
        rp, rm, _ = classical_ranks(fam, N)
        orb = context(fam, N, "plus", mode).orbits
        got = (orb["+"].dim, orb["-"].dim, orb["0"].dim)
        dims.append(f"{fam}{N}: {got}")
        if got != (rp * rp, rm * rm, 1):
            bad.append(f"{fam}{N}: {got} != {(rp * rp, rm * rm, 1)}")
    record_verdict(4, "orbit of eta^tau has dimension rank(P^tau)^2, and 1 for tau = 0",
                   not bad, "; ".join(bad) or ", ".join(dims))
    assert not bad


SR_PLUS_CHECKS = ["theta <| U^+ = qhat rhat_diff theta", "omega(Q) = 0", "eps(Q) = 0",
                  "S(Q) machine = closed form", "S(Q U^+) machine = closed form",
                  "det = factored form", "det != 0", "span{S(Q), S(QU^+)} = span{eta+, eta-}",
                  "direct: eta+ in S(R, deg <= 2)", "direct: eta- in S(R, deg <= 2)",
                  "direct: eta0 not in S(R, deg <= 2)"]
ADJ_CHECKS = [f"eta^{t} <| u^i_j^+ (all i, j)" for t in "+-"]


def test_criterion_5_gamma_plus_chain():
    reps = reports("o", 3, "plus", "symbolic")
    sr = reps["sr_plus"]
    bad = failed(sr, SR_PLUS_CHECKS) + failed(reps["adjoint"], ADJ_CHECKS)
    wit = [f"{n} ({sr.get(n).witness})" if sr.get(n).witness else n
           for n in bad if n in SR_PLUS_CHECKS]
    record_verdict(5, "Gamma_+ chain at O_q(3): Q in the ideal, closed forms, det != 0, "
                      "dim S(R)_I = 2", not bad, "; ".join(wit or bad))
    assert not bad


SR_MINUS_CHECKS = ["rank T = 2", "case 1: gcd = 1 in Q(q)[r]", "case 2: gcd = 1 in Q(q)[r]",
                   "case 1: cleared value = (q^6+q^3+1)(q^6-q^3+1)(q-1)^6(q+1)^6 q^k c"]
C_CHECKS = [f"c_{t}{n} machine = reference closed form" for t in "+-" for n in "+-"]


def test_criterion_6_gamma_minus_chain():
    reps = reports("o", 3, "minus", "symbolic")
    sr, adj = reps["sr_minus"], reps["adjoint"]
    bad = failed(sr, SR_MINUS_CHECKS) + failed(adj, C_CHECKS)
    wit = [f"{n}: {adj.get(n).witness}" if n in C_CHECKS else n for n in bad]
    record_verdict(6, "c_tau_nu closed forms, rank T = 2, Bezout gcds and cleared value",
                   not bad, "; ".join(wit))
    assert not bad


def _functional_identity(fam, N, mode):
    qd = context(fam, N, "plus", mode).qd
    eng, orc = FunctionalEngine(qd), FunctionalOracle(qd)
    rm, x = qd.consts.rhatm, qd.consts.x
    out = {"engine = oracle": [], "mu(T) = -2 rhat^-1 X0": [], "T0 = rhat^-1 x eps": []}
    t0 = eng.T0()
    for sign in (1, -1):
        mu, x0 = eng.mu_T(sign), eng.x0(sign)
        for mono in monomials(N, 2):
            m = Monomial(mono)
            lhs = orc.mu_T(sign, mono)
            if lhs != mu.value(m) or orc.X0(sign, mono) != x0.value(m):
                out["engine = oracle"].append((sign, mono))
            if lhs != -2 * rm * orc.X0(sign, mono):
                out["mu(T) = -2 rhat^-1 X0"].append((sign, mono))
            if sign == 1:
                t = orc.T0(mono)
                if t != t0.value(m) or t != rm * x * orc.counit(mono):
                    out["T0 = rhat^-1 x eps"].append(mono)
    return out


def test_criterion_7_functional_identity():
    bad = []
    for fam, N, mode in GEN_CONFIGS:
        for name, miss in _functional_identity(fam, N, mode).items():
            if miss:
                bad.append(f"{fam}{N} {name}: {len(miss)} monomials, first {miss[0]}")
    record_verdict(7, "mu(T) = -2 rhat^-1 X0 and T0 = rhat^-1 x eps on degree <= 2, both signs",
                   not bad, "; ".join(bad))
    assert not bad


THEOREM_CONFIGS = [("o", 3, "plus", "symbolic"), ("o", 3, "minus", "symbolic"),
                   ("sp", 4, "plus", "numeric"), ("sp", 4, "minus", "numeric")]


def test_criterion_8_theorem_assembly():
    bad = []
    for fam, N, sign, mode in THEOREM_CONFIGS:
        reps = reports(fam, N, sign, mode)
        th = reps["theorem"]
        bad += [f"{fam}{N} {sign}: {n}" for n in failed(th)]
        bad += [f"{fam}{N} {sign}: {n}" for n in failed(reps["biinvariants"],
                                                          ["eta0 <| u^i_j = delta_ij eta0"])]
    record_verdict(8, "dim Omega2_u - dim Omega2_s = 1 spanned by eta0, counts (3, 1, 0), "
                      "eta0 invariant", not bad, "; ".join(bad))
    assert not bad


@pytest.mark.parametrize("sign", ["plus", "minus"])
def test_criterion_9_negative_controls(sign, capsys):
    bad = []
    reps = reports("o", 3, sign, "numeric", perturb=True)
    for name, rep in reps.items():
        if rep.passed:
            bad.append(f"{name} passed on perturbed input")
    names = [s for s in SUITES if s != ("sr_minus" if sign == "plus" else "sr_plus")]
    for name in names:
        code = main(["--family", "o", "--N", "3", "--mode", "numeric", "--calculus", sign,
                     "--suite", name, "--perturb", "--no-timing"])
        if code != 1:
            bad.append(f"{name}: exit code {code}")
    capsys.readouterr()
    # every clean report also carries at least one control that passed
    for name, rep in reports("o", 3, sign, "numeric").items():
        if name.startswith("sr_") and name != ("sr_plus" if sign == "plus" else "sr_minus"):
            continue
        if not any(c.name.startswith("control: ") and c.status == "pass" for c in rep.checks):
            bad.append(f"{name}: no passing control")
    record_verdict(9, f"negative controls ({sign})", not bad, "; ".join(bad))
    assert not bad
