from __future__ import annotations

import itertools

import pytest

from conftest import context
from qext.calculus import Calculus, CalculusSpec, orbit_span
from qext.qdata import TAUS
from qext.tensor import Tensor, leg_embed


@pytest.fixture(scope="module")
def o3num():
    return context("o", 3, "plus", "numeric").calc


@pytest.fixture(scope="module")
def o3sym():
    return context("o", 3, "plus", "symbolic").calc


def rtt_holds(M: dict, R, N: int) -> bool:
    """``R^{ij}_{kl} u^k_m u^l_n = u^i_k u^j_l R^{kl}_{mn}`` for a right action (left factor first)."""
    Z = next(iter(M.values())).scale(R.field.zero)
    Rd = R.data
    for i, j, m, n in itertools.product(range(N), repeat=4):
        lhs = rhs = Z
        for k, l in itertools.product(range(N), repeat=2):
            if Rd[k, l, m, n] != 0:
                lhs = lhs + (M[(j, l)] @ M[(i, k)]).scale(Rd[k, l, m, n])
            if Rd[i, j, k, l] != 0:
                rhs = rhs + (M[(l, n)] @ M[(k, m)]).scale(Rd[i, j, k, l])
        if lhs != rhs:
            return False
    return True


@pytest.mark.parametrize("sign", ["plus", "minus"])
def test_first_order_action_respects_rtt(o3num, sign):
    assert rtt_holds(o3num.adj_action_1(sign), o3num.qd.R, 3)


def test_second_order_action_respects_rtt(o3num):
    assert rtt_holds(o3num.adj_action_2, o3num.qd.R, 3)


def test_second_order_action_equals_five_leg_contraction(o3num):
    assert o3num.adj_action_2 == o3num.adj_action_2_from_five_leg()


def test_second_order_action_is_sign_free(o3num):
    m = o3num.adj_action_1("minus")
    for (i, j), M2 in o3num.adj_action_2.items():
        acc = None
        for c in range(3):
            t = leg_embed(m[(i, c)], 1, 4) @ leg_embed(m[(c, j)], 3, 4)
            acc = t if acc is None else acc + t
        assert o3num.to_bar @ acc @ o3num.to_plain == M2


def test_quantum_trace_action_is_the_weighted_sum(o3num):
    D = o3num.qd.D.data
    acts = o3num.adj_action_1("plus")
    acc = Tensor.zeros(2, 2, 3, o3num.field)
    for i, j in itertools.product(range(3), repeat=2):
        acc = acc + acts[(i, j)].scale(D[j, i])
    assert o3num.quantum_trace_action_1("plus") == acc


def test_basis_change_is_invertible(o3sym):
    I4 = Tensor.identity(4, 3, o3sym.field)
    assert o3sym.to_bar @ o3sym.to_plain == I4
    assert o3sym.to_plain @ o3sym.to_bar == I4


def test_braiding_commutes_with_the_action(o3num):
    sb = o3num.sigma_bar
    for M in o3num.adj_action_2.values():
        assert sb @ M == M @ sb


def test_braiding_in_plain_coordinates_is_conjugate(o3num):
    assert o3num.sigma == o3num.to_plain @ o3num.sigma_bar @ o3num.to_bar


def test_braid_relation_for_sigma(o3num):
    s = o3num.sigma
    s12, s23 = leg_embed(s, 1, 6), leg_embed(s, 3, 6)
    assert s12 @ s23 @ s12 == s23 @ s12 @ s23


@pytest.mark.parametrize("tau", TAUS)
def test_eta_tau_is_an_eigenvector_of_sigma(o3sym, tau):
    e = o3sym.eta_tau(tau)
    assert o3sym.sigma_bar @ e == e


def test_orbit_dimensions(o3num):
    gens = list(o3num.adj_action_2.values())
    dims = tuple(orbit_span(o3num.eta_tau(t), gens).dim for t in TAUS)
    assert dims == (25, 9, 1)


@pytest.mark.parametrize("tau", ["+", "-"])
def test_t_tau_closed_inverse(o3sym, tau):
    I2 = Tensor.identity(2, 3, o3sym.field)
    assert o3sym.T_tau(tau) @ o3sym.T_tau_inverse_closed(tau) == I2


def test_second_t_closed_form_is_only_a_pseudo_inverse(o3sym):
    P = o3sym.qd.P
    prod = o3sym.T_second() @ o3sym.T_second_inverse_closed()
    assert prod == P["+"] + P["-"]
    # the closed form is the true inverse restricted to the + and - blocks
    from qext.tensor import inverse
    assert inverse(o3sym.T_second()) @ (P["+"] + P["-"]) == o3sym.T_second_inverse_closed()


def test_member_extracts_family_vectors(o3sym):
    fam = o3sym.eta_ij("+")
    v = Calculus.member(fam, 1, 2)
    assert v.legs_out == 4 and v.legs_in == 0
    assert v.data[0, 0, 0, 0] == fam.data[0, 0, 0, 0, 1, 2]


def test_minus_calculus_precondition():
    qd = context("o", 3, "minus", "symbolic").qd
    CalculusSpec("minus", qd)
    with pytest.raises(ValueError):
        CalculusSpec("other", qd)
