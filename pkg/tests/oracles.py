"""Slow, loop-based reference computations used as independent oracles.

Nothing here goes through the package's einsum, compose or functional
tables: everything is plain nested sums over dictionaries of entries.
"""
from __future__ import annotations

import itertools
from functools import lru_cache


def entries(T) -> dict:
    """Nonzero entries of a tensor as ``{index tuple: value}``."""
    out = {}
    for idx in itertools.product(range(T.dim), repeat=T.data.ndim):
        v = T.data[idx]
        if v != 0:
            out[idx] = v
    return out


def braid_defect(R, field) -> list:
    """Indices where ``R12 R23 R12 != R23 R12 R23`` (R as a dict over (o1, o2, i1, i2))."""
    N = R.dim
    E = entries(R)
    by_out = {}
    for (a, b, c, d), v in E.items():
        by_out.setdefault((a, b), []).append((c, d, v))

    def apply(vec, pos):
        out = {}
        for key, c0 in vec.items():
            for c, d, v in by_out.get((key[pos], key[pos + 1]), []):
                k = list(key)
                k[pos], k[pos + 1] = c, d
                k = tuple(k)
                out[k] = out.get(k, field.zero) + c0 * v
        return {k: v for k, v in out.items() if v != 0}

    bad = []
    for col in itertools.product(range(N), repeat=3):
        e = {col: field.one}
        lhs = apply(apply(apply(e, 0), 1), 0)
        rhs = apply(apply(apply(e, 1), 0), 1)
        if lhs != rhs:
            bad.append(col)
    return bad


def naive_compose(A, B, field):
    """Matrix product of the flattened operators with explicit loops."""
    a, b = A.matrix(), B.matrix()
    rows, inner, cols = a.shape[0], a.shape[1], b.shape[1]
    out = [[field.zero] * cols for _ in range(rows)]
    for i in range(rows):
        for k in range(inner):
            if a[i, k] == 0:
                continue
            for j in range(cols):
                if b[k, j] != 0:
                    out[i][j] = out[i][j] + a[i, k] * b[k, j]
    return out


def classical_ranks(family: str, N: int) -> tuple:
    """Dimensions of the symmetric-traceless/antisymmetric/trivial pieces of V (x) V."""
    sym, anti = N * (N + 1) // 2, N * (N - 1) // 2
    if family == "o":
        return sym - 1, anti, 1
    return sym, anti - 1, 1


class FunctionalOracle:
    """Evaluates products of matrix-valued functionals on monomials by recursion.

    A monomial is a tuple of ``(m, n)`` pairs for ``u^m_n``.  The coproduct
    ``u^a_b -> sum_c u^a_c (x) u^c_b`` splits a monomial over a middle
    multi-index, and convolution sums over it.
    """

    def __init__(self, qd):
        self.qd = qd
        self.N = qd.N
        self.f = qd.field
        self.R = entries(qd.R)
        self.Ri = entries(qd.Rinv)
        self.D = qd.D.data
        self.B = qd.B.data
        self.C = qd.C.data

    def _r(self, a, b, c, d):
        return self.R.get((a, b, c, d), self.f.zero)

    def _ri(self, a, b, c, d):
        return self.Ri.get((a, b, c, d), self.f.zero)

    # l^{+i}_j(u^m_n) = R^{im}_{nj};  multiplicative
    @lru_cache(maxsize=None)
    def lplus(self, i, j, mono):
        if not mono:
            return self.f.one if i == j else self.f.zero
        (m, n), rest = mono[0], mono[1:]
        return sum((self._r(i, m, n, k) * self.lplus(k, j, rest) for k in range(self.N)),
                   self.f.zero)

    # l^{-i}_j(S(u^m_n)) = R^{mi}_{jn};  S reverses products
    @lru_cache(maxsize=None)
    def s_lminus(self, i, j, mono):
        if not mono:
            return self.f.one if i == j else self.f.zero
        head, (m, n) = mono[:-1], mono[-1]
        return sum((self._r(m, i, k, n) * self.s_lminus(k, j, head) for k in range(self.N)),
                   self.f.zero)

    def counit(self, mono, sign=1):
        out = self.f.one
        for m, n in mono:
            if m != n:
                return self.f.zero
            out = out * sign
        return out

    def splits(self, mono):
        """Pairs ``(left, right)`` of the coproduct of a monomial."""
        for mids in itertools.product(range(self.N), repeat=len(mono)):
            left = tuple((m, c) for (m, _), c in zip(mono, mids))
            right = tuple((c, n) for (_, n), c in zip(mono, mids))
            yield left, right

    @lru_cache(maxsize=None)
    def ell(self, i, j, mono):
        """``l^i_j = sum_y S(l^{-i}_y) * l^{+y}_j`` under convolution."""
        acc = self.f.zero
        for left, right in self.splits(mono):
            for y in range(self.N):
                a = self.s_lminus(i, y, left)
                if a != 0:
                    acc = acc + a * self.lplus(y, j, right)
        return acc

    @lru_cache(maxsize=None)
    def X(self, sign, i, j, mono):
        """``X_ij = eps_sign * l^i_j - delta_ij eps``."""
        acc = self.f.zero
        for left, right in self.splits(mono):
            e = self.counit(left, sign)
            if e != 0:
                acc = acc + e * self.ell(i, j, right)
        if i == j:
            acc = acc - self.counit(mono)
        return acc

    @lru_cache(maxsize=None)
    def weight(self):
        """``W^{ijmn} = B^i_y R^{jy}_{mz} C^n_z`` as a dict."""
        N, f = self.N, self.f
        W = {}
        for i, j, m, n, y, z in itertools.product(range(N), repeat=6):
            b, c = self.B[i, y], self.C[n, z]
            if b == 0 or c == 0:
                continue
            r = self._r(j, y, m, z)
            if r != 0:
                W[(i, j, m, n)] = W.get((i, j, m, n), f.zero) + b * r * c
        return W

    def pair(self, F, mono):
        """``sum W^{ijmn} (F_ij * F_mn)(mono)`` with F a function of (i, j, mono)."""
        acc = self.f.zero
        for (i, j, m, n), w in self.weight().items():
            for left, right in self.splits(mono):
                a = F(i, j, left)
                if a != 0:
                    acc = acc + w * a * F(m, n, right)
        return acc

    def mu_T(self, sign, mono):
        return self.pair(lambda i, j, mm: self.X(sign, i, j, mm), mono)

    def T0(self, mono):
        return self.pair(self.ell, mono)

    def X0(self, sign, mono):
        N = self.N
        return sum((self.D[j, i] * self.X(sign, i, j, mono)
                    for i in range(N) for j in range(N) if self.D[j, i] != 0), self.f.zero)


def monomials(N: int, max_degree: int):
    gens = [(m, n) for m in range(N) for n in range(N)]
    for d in range(max_degree + 1):
        yield from itertools.product(gens, repeat=d)
