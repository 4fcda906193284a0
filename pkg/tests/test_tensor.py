from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import naive_compose
from qext.scalar import SYMBOLIC, NumericField, Scalar
from qext.tensor import (ShapeMismatch, SingularMatrix, Subspace, Tensor, acute, check, compose,
                         dump_tensor, inverse, kernel_of, kron, leg_embed, load_tensor,
                         partial_qtrace, rank, rank_of, stack_rank)

F = NumericField(2)
small = st.integers(-3, 3)


def tensors(legs_out, legs_in, N=2, field=F):
    n = N ** (legs_out + legs_in)
    return st.lists(small, min_size=n, max_size=n).map(
        lambda xs: Tensor(np.array([field(x) for x in xs], dtype=object)
                          .reshape((N,) * (legs_out + legs_in)), legs_out, legs_in, field))


def sym_tensor(legs_out, legs_in, N=2):
    """Entries mixing powers of s so the symbolic path is exercised."""
    def entry(*ix):
        k = sum((i + 1) * (p + 2) for p, i in enumerate(ix))
        return Scalar.spow(k % 5 - 2) - Scalar.from_int(k % 3)
    return Tensor.from_function(legs_out, legs_in, N, entry, SYMBOLIC)


@settings(max_examples=30, deadline=None)
@given(tensors(2, 2), tensors(2, 1))
def test_compose_matches_naive_loops(A, B):
    assert compose(A, B).matrix().tolist() == naive_compose(A, B, F)


def test_compose_symbolic_matches_naive_loops():
    A, B = sym_tensor(2, 2), sym_tensor(2, 2)
    assert (A @ B).matrix().tolist() == naive_compose(A, B, SYMBOLIC)


@settings(max_examples=20, deadline=None)
@given(tensors(1, 1), tensors(1, 1))
def test_kron_entries(A, B):
    K = kron(A, B)
    for a, b, c, d in itertools.product(range(2), repeat=4):
        assert K.data[a, b, c, d] == A.data[a, c] * B.data[b, d]


@settings(max_examples=20, deadline=None)
@given(tensors(2, 2), tensors(2, 2))
def test_leg_embeddings_commute_on_disjoint_legs(A, B):
    a, b = leg_embed(A, 1, 4), leg_embed(B, 3, 4)
    assert a @ b == b @ a


def test_leg_embed_rejects_overflow():
    with pytest.raises(ShapeMismatch):
        leg_embed(Tensor.identity(2, 2, F), 4, 4)


@settings(max_examples=20, deadline=None)
@given(tensors(2, 2))
def test_check_and_acute_index_rules(T):
    c, a = check(T), acute(T)
    for i, j, k, l in itertools.product(range(2), repeat=4):
        assert c.data[i, j, k, l] == T.data[l, k, j, i]
        assert a.data[i, j, k, l] == T.data[k, i, l, j]
    assert check(c) == T


@settings(max_examples=30, deadline=None)
@given(tensors(2, 2))
def test_inverse_or_singular(T):
    r = rank(T)
    if r < 4:
        with pytest.raises(SingularMatrix):
            inverse(T)
    else:
        assert T @ inverse(T) == Tensor.identity(2, 2, F)


def test_symbolic_inverse():
    T = sym_tensor(1, 1, N=3)
    assert T @ inverse(T) == Tensor.identity(1, 3, SYMBOLIC)


@settings(max_examples=30, deadline=None)
@given(tensors(2, 1))
def test_rank_nullity(T):
    mat = T.matrix()
    r, ker = kernel_of(mat, F)
    assert r == rank_of(mat, F)
    assert r + len(ker) == mat.shape[1]
    for v in ker:
        for row in mat:
            assert sum((a * b for a, b in zip(row, v)), F.zero) == 0


def test_partial_qtrace_loop_oracle():
    T, D = sym_tensor(2, 2), sym_tensor(1, 1)
    got = partial_qtrace(T, D)
    for b, t in itertools.product(range(2), repeat=2):
        want = sum((D.data[s, a] * T.data[a, b, s, t] for a in range(2) for s in range(2)),
                   SYMBOLIC.zero)
        assert got.data[b, t] == want


vecs = st.lists(tensors(2, 0), min_size=0, max_size=5)


@settings(max_examples=40, deadline=None)
@given(vecs, tensors(2, 0))
def test_subspace_membership(vs, w):
    S = Subspace(2, 2, F, vs)
    assert S.dim == stack_rank(vs) if vs else S.dim == 0
    for v in vs:
        assert S.contains(v)
    combo = Tensor.zeros(2, 0, 2, F)
    for k, v in enumerate(vs):
        combo = combo + v.scale(F(k + 1))
    assert S.contains(combo)
    T = S.copy()
    grew = T.add(w)
    assert grew == (not S.contains(w))
    assert T.dim == S.dim + int(grew)


def test_dump_round_trip(tmp_path):
    for T in (sym_tensor(2, 2), sym_tensor(2, 0)):
        p = tmp_path / "t.mat"
        dump_tensor(T, p)
        assert load_tensor(p, SYMBOLIC) == T
    T = Tensor.from_function(1, 1, 3, lambda i, j: F(i - 2 * j) / 3, F)
    dump_tensor(T, tmp_path / "n.mat")
    assert load_tensor(tmp_path / "n.mat", F) == T
    head = (tmp_path / "n.mat").read_text().splitlines()[0]
    assert head == "1 1 3"
