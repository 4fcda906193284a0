from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from conftest import context
from oracles import FunctionalOracle, monomials
from qext.functionals import (DegreeTooHigh, Element, FunctionalEngine, FunctionalWord, Monomial,
                              eval_word)


@pytest.fixture(scope="module", params=["symbolic", "numeric"])
def setup(request):
    qd = context("o", 3, "plus", request.param).qd
    return qd, FunctionalEngine(qd), FunctionalOracle(qd)


def test_ell_matches_recursive_oracle(setup):
    qd, eng, orc = setup
    L = eng.ell()
    for mono in monomials(3, 2):
        for i, j in itertools.product(range(3), repeat=2):
            assert L.value(Monomial(mono), i, j) == orc.ell(i, j, mono)


@pytest.mark.parametrize("sign", [1, -1])
def test_x_functionals_match_oracle(setup, sign):
    qd, eng, orc = setup
    X, X0 = eng.x_table(sign), eng.x0(sign)
    for mono in monomials(3, 2):
        m = Monomial(mono)
        assert X0.value(m) == orc.X0(sign, mono)
        for i, j in ((0, 0), (0, 2), (1, 1), (2, 1)):
            assert X.value(m, i, j) == orc.X(sign, i, j, mono)


@pytest.mark.parametrize("sign", [1, -1])
def test_mu_t_and_t0_match_oracle(setup, sign):
    qd, eng, orc = setup
    mu, t0 = eng.mu_T(sign), eng.T0()
    for mono in monomials(3, 2):
        m = Monomial(mono)
        assert mu.value(m) == orc.mu_T(sign, mono)
        assert t0.value(m) == orc.T0(mono)


@pytest.mark.parametrize("atom", ["lplus", "lminus", "S_lminus", "S_lplus"])
def test_atoms_are_homomorphisms_and_preserve_the_metric(setup, atom):
    _, eng, _ = setup
    assert eng.homomorphism_check(atom) is None
    if atom in ("lplus", "lminus"):
        assert eng.metric_check(atom) is None


def test_l_plus_l_minus_exchange_relation(setup):
    _, eng, _ = setup
    assert eng.exchange_check() is None


def test_characters_are_diagonal(setup):
    qd, eng, orc = setup
    for sign in (1, -1):
        ch = eng.character(sign)
        for mono in monomials(3, 2):
            assert ch.value(Monomial(mono)) == orc.counit(mono, sign)


def test_degree_guard(setup):
    qd, eng, _ = setup
    with pytest.raises(DegreeTooHigh):
        eval_word(eng, FunctionalWord(("lplus",)), Monomial(((0, 0),) * 3), 0, 0)
    with pytest.raises(DegreeTooHigh):
        FunctionalEngine(qd, max_degree=3)
    with pytest.raises(ValueError):
        FunctionalWord(("nope",))


gens = st.tuples(st.integers(0, 2), st.integers(0, 2))
words = st.lists(gens, min_size=0, max_size=2)
elements = st.lists(st.tuples(words, st.integers(-3, 3)), max_size=4)


def build(terms, f):
    acc = Element({}, f)
    for word, c in terms:
        e = Element.unit(f)
        for i, j in word:
            e = e * Element.generator(i, j, f)
        acc = acc + e.scale(f(c))
    return acc


@settings(max_examples=40, deadline=None)
@given(elements, elements)
def test_counit_is_multiplicative(a, b):
    f = context("o", 3, "plus", "numeric").field
    A, B = build(a, f), build(b, f)
    for sign in (1, -1):
        assert (A * B).counit(sign) == A.counit(sign) * B.counit(sign)
    assert A.plus().counit() == 0


@settings(max_examples=20, deadline=None)
@given(elements, elements)
def test_action_of_a_product_is_sequential(a, b):
    ctx = context("o", 3, "plus", "numeric")
    f = ctx.field
    A, B = build(a, f), build(b, f)
    v = ctx.theta
    assert (A * B).act(v, ctx.act1) == B.act(A.act(v, ctx.act1), ctx.act1)


def test_quadratic_invariant_counit():
    qd = context("o", 3, "plus", "symbolic").qd
    cs = qd.consts
    for nu in ("+", "-"):
        assert Element.quadratic_invariant(qd, nu).counit() == cs.x * cs.t(nu)
    assert Element.quantum_trace(qd).counit() == cs.x


def test_mu_t_identity_holds_with_b_c_transpose_weights(setup):
    """The exact form of mu(T): weights (B C^T)_ij, which is D^-1 rather than D."""
    qd, eng, orc = setup
    import numpy as np
    from qext.tensor import Tensor, inverse
    BCt = np.einsum("mz,nz->mn", qd.B.data, qd.C.data)
    assert Tensor(BCt, 1, 1, qd.field) == inverse(qd.D)
    assert Tensor(BCt, 1, 1, qd.field) != qd.D
    rm = qd.consts.rhatm
    for sign in (1, -1):
        for mono in monomials(3, 2):
            weighted = sum((BCt[i, j] * orc.X(sign, i, j, mono)
                            for i in range(3) for j in range(3) if BCt[i, j] != 0), qd.field.zero)
            assert orc.mu_T(sign, mono) == -2 * rm * weighted
