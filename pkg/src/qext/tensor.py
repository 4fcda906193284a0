"""Dense exact tensors with leg bookkeeping.

A :class:`Tensor` with ``legs_out = k`` and ``legs_in = l`` over ``C^N`` is a
numpy object array of shape ``(N,)*k + (N,)*l``; axis order is
``(out_1, ..., out_k, in_1, ..., in_l)``.  Reading ``T^{ab}_{st}`` as
``T.data[a, b, s, t]`` (0-based).  Flattening in C order gives the matrix
view whose row index encodes ``(i_1, ..., i_k)`` as ``sum i_j * N**(k-j)``
(big-endian), the one encoding used everywhere in the package.

Linear algebra over Q(s) is done here by sparse row elimination with
gcd-normalised entries; over Q it is delegated to ``flint.fmpq_mat``.
"""

from __future__ import annotations

import itertools
from pathlib import Path
from typing import Callable, Iterable, Sequence

import flint
import numpy as np

from .scalar import SYMBOLIC, NumericField, Scalar, SymbolicField

__all__ = [
    "ShapeMismatch",
    "SingularMatrix",
    "Tensor",
    "Subspace",
    "tensor_algebra",
    "leg_embed",
    "partial_qtrace",
    "rank_kernel",
    "transforms",
    "check",
    "acute",
    "inverse",
    "determinant",
    "einsum",
    "dump_tensor",
    "load_tensor",
]


class ShapeMismatch(ValueError):
    pass


class SingularMatrix(ArithmeticError):
    pass


def _is_numeric(field) -> bool:
    return isinstance(field, NumericField)


def _obj_array(shape, fill) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.fill(fill)
    return arr


class Tensor:
    """Exact matrix whose rows and columns are tensor products of ``N``-dim legs."""

    __slots__ = ("data", "legs_out", "legs_in", "field")

    def __init__(self, data: np.ndarray, legs_out: int, legs_in: int, field=SYMBOLIC):
        data = np.asarray(data, dtype=object)
        if data.ndim != legs_out + legs_in:
            raise ShapeMismatch(f"array rank {data.ndim} != {legs_out}+{legs_in} legs")
        if data.ndim and len(set(data.shape)) != 1:
            raise ShapeMismatch(f"legs of unequal dimension: {data.shape}")
        self.data = data
        self.legs_out = legs_out
        self.legs_in = legs_in
        self.field = field

    # construction ---------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def shape2(self) -> tuple[int, int]:
        n = self.dim
        return n ** self.legs_out, n ** self.legs_in

    @classmethod
    def zeros(cls, legs_out: int, legs_in: int, N: int, field=SYMBOLIC) -> "Tensor":
        return cls(_obj_array((N,) * (legs_out + legs_in), field.zero), legs_out, legs_in, field)

    @classmethod
    def identity(cls, legs: int, N: int, field=SYMBOLIC) -> "Tensor":
        n = N ** legs
        mat = _obj_array((n, n), field.zero)
        for i in range(n):
            mat[i, i] = field.one
        return cls(mat.reshape((N,) * (2 * legs)), legs, legs, field)

    @classmethod
    def from_matrix(cls, mat, legs_out: int, legs_in: int, N: int, field=SYMBOLIC) -> "Tensor":
        arr = np.asarray(mat, dtype=object).reshape((N,) * (legs_out + legs_in))
        return cls(arr, legs_out, legs_in, field)

    @classmethod
    def from_function(cls, legs_out: int, legs_in: int, N: int,
                      fn: Callable[..., object], field=SYMBOLIC) -> "Tensor":
        arr = _obj_array((N,) * (legs_out + legs_in), field.zero)
        for idx in itertools.product(range(N), repeat=legs_out + legs_in):
            arr[idx] = fn(*idx)
        return cls(arr, legs_out, legs_in, field)

    @classmethod
    def vector(cls, data, N: int, field=SYMBOLIC) -> "Tensor":
        arr = np.asarray(data, dtype=object)
        legs = 0
        size = arr.size
        while size > 1:
            size //= N
            legs += 1
        return cls(arr.reshape((N,) * legs), legs, 0, field)

    def matrix(self) -> np.ndarray:
        return self.data.reshape(self.shape2)

    def flat(self) -> list:
        return list(self.data.reshape(-1))

    def copy(self) -> "Tensor":
        return Tensor(self.data.copy(), self.legs_out, self.legs_in, self.field)

    def with_data(self, data) -> "Tensor":
        return Tensor(data, self.legs_out, self.legs_in, self.field)

    # arithmetic -------------------------------------------------------
    def _same_shape(self, other: "Tensor"):
        if (self.legs_out, self.legs_in, self.dim) != (other.legs_out, other.legs_in, other.dim):
            raise ShapeMismatch("tensors of different shape")

    def __add__(self, other: "Tensor") -> "Tensor":
        self._same_shape(other)
        return self.with_data(self.data + other.data)

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._same_shape(other)
        return self.with_data(self.data - other.data)

    def __neg__(self) -> "Tensor":
        return self.with_data(-self.data)

    def scale(self, c) -> "Tensor":
        out = np.empty(self.data.shape, dtype=object)
        flat_in = self.data.reshape(-1)
        flat_out = out.reshape(-1)
        zero = self.field.zero
        for i, v in enumerate(flat_in):
            flat_out[i] = v * c if v else zero
        return self.with_data(out)

    def __mul__(self, c) -> "Tensor":
        if isinstance(c, Tensor):
            raise TypeError("use @ for composition")
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "Tensor") -> "Tensor":
        return compose(self, other)

    def is_zero(self) -> bool:
        return not any(bool(v) for v in self.data.reshape(-1))

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        if (self.legs_out, self.legs_in, self.dim) != (other.legs_out, other.legs_in, other.dim):
            return False
        return all(a == b for a, b in zip(self.data.reshape(-1), other.data.reshape(-1)))

    __hash__ = None

    def nonzero_count(self) -> int:
        return sum(1 for v in self.data.reshape(-1) if v)

    def transpose(self) -> "Tensor":
        k = self.legs_out
        l = self.legs_in
        axes = tuple(range(k, k + l)) + tuple(range(k))
        return Tensor(self.data.transpose(axes).copy(), l, k, self.field)

    def trace(self):
        mat = self.matrix()
        acc = self.field.zero
        for i in range(mat.shape[0]):
            acc = acc + mat[i, i]
        return acc

    def map(self, fn, field) -> "Tensor":
        out = np.empty(self.data.shape, dtype=object)
        fo, fi = out.reshape(-1), self.data.reshape(-1)
        for i, v in enumerate(fi):
            fo[i] = fn(v)
        return Tensor(out, self.legs_out, self.legs_in, field)

    def first_difference(self, other: "Tensor"):
        """First (row, col) where two equal-shape tensors differ, else ``None``."""
        a, b = self.matrix(), other.matrix()
        for r in range(a.shape[0]):
            for c in range(a.shape[1]):
                if a[r, c] != b[r, c]:
                    return r, c
        return None

    def __repr__(self):
        return (f"Tensor(legs_out={self.legs_out}, legs_in={self.legs_in}, "
                f"N={self.dim}, nnz={self.nonzero_count()}, field={self.field!r})")


# ---------------------------------------------------------------------------
# products

def _sparse_rows(mat: np.ndarray) -> list[list[tuple[int, object]]]:
    return [[(j, v) for j, v in enumerate(row) if v] for row in mat]


def _matmul_objects(A: np.ndarray, B: np.ndarray, zero) -> np.ndarray:
    brows = _sparse_rows(B)
    out = _obj_array((A.shape[0], B.shape[1]), zero)
    for i, row in enumerate(A):
        acc: dict[int, object] = {}
        for k, a in enumerate(row):
            if not a:
                continue
            for j, b in brows[k]:
                p = a * b
                if j in acc:
                    acc[j] = acc[j] + p
                else:
                    acc[j] = p
        orow = out[i]
        for j, v in acc.items():
            orow[j] = v
    return out


def _to_fmpq_mat(mat: np.ndarray) -> flint.fmpq_mat:
    r, c = mat.shape
    return flint.fmpq_mat(r, c, [v for v in mat.reshape(-1)])


def _from_fmpq_mat(m: flint.fmpq_mat) -> np.ndarray:
    arr = np.empty((m.nrows(), m.ncols()), dtype=object)
    flat = arr.reshape(-1)
    for i, v in enumerate(m.entries()):
        flat[i] = v
    return arr


def matmul(A: np.ndarray, B: np.ndarray, field) -> np.ndarray:
    if _is_numeric(field):
        return _from_fmpq_mat(_to_fmpq_mat(A) * _to_fmpq_mat(B))
    return _matmul_objects(A, B, field.zero)


def compose(A: Tensor, B: Tensor) -> Tensor:
    if A.legs_in != B.legs_out or A.dim != B.dim:
        raise ShapeMismatch(
            f"cannot compose {A.legs_out}x{A.legs_in} with {B.legs_out}x{B.legs_in} (N={A.dim},{B.dim})")
    prod = matmul(A.matrix(), B.matrix(), A.field)
    return Tensor.from_matrix(prod, A.legs_out, B.legs_in, A.dim, A.field)


def kron(A: Tensor, B: Tensor) -> Tensor:
    """Tensor product; legs of ``A`` come first on both sides."""
    if A.dim != B.dim:
        raise ShapeMismatch("kron of tensors over different N")
    ka, la, kb, lb = A.legs_out, A.legs_in, B.legs_out, B.legs_in
    zero = A.field.zero
    out = _obj_array(A.data.shape + B.data.shape, zero)
    bflat = [(idx, v) for idx, v in np.ndenumerate(B.data) if v]
    for ia, a in np.ndenumerate(A.data):
        if not a:
            continue
        for ib, b in bflat:
            out[ia + ib] = a * b
    # reorder (outA, inA, outB, inB) -> (outA, outB, inA, inB)
    axes = (tuple(range(ka)) + tuple(range(ka + la, ka + la + kb))
            + tuple(range(ka, ka + la)) + tuple(range(ka + la + kb, ka + la + kb + lb)))
    return Tensor(out.transpose(axes).copy(), ka + kb, la + lb, A.field)


def tensor_algebra(A: Tensor, B: Tensor, mode: str) -> Tensor:
    if mode == "compose":
        return compose(A, B)
    if mode == "kron":
        return kron(A, B)
    raise ValueError(f"unknown mode {mode!r}")


def leg_embed(T: Tensor, start: int, total: int) -> Tensor:
    """``T`` acting on legs ``start .. start+k-1`` (1-based) of ``total`` legs."""
    k = T.legs_out
    if T.legs_in != k:
        raise ShapeMismatch("leg_embed needs a square tensor")
    if start < 1 or start + k - 1 > total:
        raise ShapeMismatch(f"legs {start}..{start + k - 1} do not fit in {total}")
    N, field = T.dim, T.field
    out = T
    if start > 1:
        out = kron(Tensor.identity(start - 1, N, field), out)
    rest = total - (start + k - 1)
    if rest:
        out = kron(out, Tensor.identity(rest, N, field))
    return out


def einsum(spec: str, *tensors: Tensor, legs_out: int, legs_in: int = 0) -> Tensor:
    """Index contraction in numpy ``einsum`` notation over the tensors' data.

    The output subscripts must be listed as output legs then input legs.
    """
    field = tensors[0].field
    arrays = [t.data for t in tensors]
    res = np.einsum(spec, *arrays, optimize=True)
    res = np.asarray(res, dtype=object)
    zero = field.zero
    flat = res.reshape(-1)
    for i, v in enumerate(flat):
        if isinstance(v, int):
            flat[i] = field(v) if v else zero
    return Tensor(res, legs_out, legs_in, field)


def partial_qtrace(T: Tensor, D: Tensor) -> Tensor:
    """``(tr_q^1 T)^b_t = D^s_a T^{ab}_{st}``."""
    if T.legs_out != 2 or T.legs_in != 2 or D.legs_out != 1 or D.legs_in != 1:
        raise ShapeMismatch("partial_qtrace expects a 2-leg operator and a 1-leg D")
    return einsum("sa,abst->bt", D, T, legs_out=1, legs_in=1)


# ---------------------------------------------------------------------------
# transforms of 2-leg operators

def _two_leg(T: Tensor):
    if T.legs_out != 2 or T.legs_in != 2:
        raise ShapeMismatch("expected an operator on two legs")


def check(T: Tensor) -> Tensor:
    """``check(T)^{ab}_{st} = T^{ts}_{ba}``."""
    _two_leg(T)
    return T.with_data(T.data.transpose((3, 2, 1, 0)).copy())


def acute(T: Tensor) -> Tensor:
    """``acute(T)^{ab}_{st} = T^{sa}_{tb}``."""
    _two_leg(T)
    return T.with_data(T.data.transpose((1, 3, 0, 2)).copy())


def transforms(T: Tensor) -> dict[str, Tensor]:
    """check, acute and grave-minus (the inverse of acute) of a 2-leg operator."""
    a = acute(T)
    return {"check": check(T), "acute": a, "grave_minus": inverse(a)}


# ---------------------------------------------------------------------------
# elimination

def _rref_rows(rows: list[dict[int, object]], ncols: int, field, full: bool = True):
    """Row-reduce sparse rows in place; returns ``(pivot_cols, reduced_rows)``.

    Pivot choice per column: the candidate row with the fewest nonzeros.
    With ``full`` the result is reduced row echelon form (pivots 1).
    """
    one = field.one
    remaining = [r for r in rows if r]
    pivots: list[tuple[int, dict]] = []
    for col in range(ncols):
        cands = [r for r in remaining if col in r]
        if not cands:
            continue
        prow = min(cands, key=len)
        remaining.remove(prow)
        inv = one / prow[col]
        prow = {j: v * inv for j, v in prow.items()}
        prow[col] = one
        new_remaining = []
        for r in remaining:
            f = r.get(col)
            if f is not None:
                for j, v in prow.items():
                    nv = r.get(j)
                    nv = -(f * v) if nv is None else nv - f * v
                    if nv:
                        r[j] = nv
                    else:
                        r.pop(j, None)
                r.pop(col, None)
            if r:
                new_remaining.append(r)
        remaining = new_remaining
        pivots.append((col, prow))
        if not remaining:
            break
    if full:
        for idx in range(len(pivots) - 1, -1, -1):
            col, prow = pivots[idx]
            for jdx in range(idx):
                _, r = pivots[jdx]
                f = r.get(col)
                if f is None:
                    continue
                for j, v in prow.items():
                    nv = r.get(j)
                    nv = -(f * v) if nv is None else nv - f * v
                    if nv:
                        r[j] = nv
                    else:
                        r.pop(j, None)
    return pivots


def _matrix_rows(mat: np.ndarray) -> list[dict[int, object]]:
    return [{j: v for j, v in enumerate(row) if v} for row in mat]


def rank_of(mat: np.ndarray, field) -> int:
    if mat.size == 0:
        return 0
    if _is_numeric(field):
        return _to_fmpq_mat(mat).rank()
    return len(_rref_rows(_matrix_rows(mat), mat.shape[1], field, full=False))


def _kernel_from_rref(pivots: list[tuple[int, dict]], ncols: int, field) -> list[list]:
    pivot_cols = {c for c, _ in pivots}
    basis = []
    for f in range(ncols):
        if f in pivot_cols:
            continue
        v = [field.zero] * ncols
        v[f] = field.one
        for c, row in pivots:
            a = row.get(f)
            if a is not None:
                v[c] = -a
        basis.append(v)
    return basis


def kernel_of(mat: np.ndarray, field) -> tuple[int, list[list]]:
    ncols = mat.shape[1]
    if _is_numeric(field):
        R, rank = _to_fmpq_mat(mat).rref()
        pivots = []
        row = 0
        for col in range(ncols):
            if row < rank and R[row, col] != 0:
                pivots.append((col, {j: R[row, j] for j in range(ncols) if R[row, j] != 0}))
                row += 1
        return rank, _kernel_from_rref(pivots, ncols, field)
    pivots = _rref_rows(_matrix_rows(mat), ncols, field, full=True)
    return len(pivots), _kernel_from_rref(pivots, ncols, field)


def inverse(T: Tensor) -> Tensor:
    if T.legs_out != T.legs_in:
        raise ShapeMismatch("only square tensors are invertible")
    mat = T.matrix()
    n = mat.shape[0]
    field = T.field
    if _is_numeric(field):
        m = _to_fmpq_mat(mat)
        if m.rank() < n:
            raise SingularMatrix("matrix is singular")
        return Tensor.from_matrix(_from_fmpq_mat(m.inv()), T.legs_out, T.legs_in, T.dim, field)
    rows = _matrix_rows(mat)
    for i, r in enumerate(rows):
        r[n + i] = field.one
    pivots = _rref_rows(rows, 2 * n, field, full=True)
    if len(pivots) < n or any(c >= n for c, _ in pivots[:n]):
        raise SingularMatrix("matrix is singular")
    out = _obj_array((n, n), field.zero)
    for i, (c, row) in enumerate(pivots[:n]):
        for j, v in row.items():
            if j >= n:
                out[c, j - n] = v
    return Tensor.from_matrix(out, T.legs_out, T.legs_in, T.dim, field)


def determinant(rows: Sequence[Sequence], field=SYMBOLIC):
    """Determinant by fraction elimination (small matrices)."""
    m = [list(r) for r in rows]
    n = len(m)
    det = field.one
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return field.zero
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        p = m[c][c]
        det = det * p
        inv = field.one / p
        for r in range(c + 1, n):
            f = m[r][c]
            if not f:
                continue
            f = f * inv
            for j in range(c, n):
                if m[c][j]:
                    m[r][j] = m[r][j] - f * m[c][j]
    return det


# ---------------------------------------------------------------------------
# subspaces

class Subspace:
    """Span of a list of vectors kept as an echelon basis.

    ``basis`` holds the original-form vectors that were accepted (linearly
    independent by construction); the echelon rows are internal.
    """

    def __init__(self, N: int, legs: int, field=SYMBOLIC, vectors: Iterable[Tensor] = ()):
        self.N = N
        self.legs = legs
        self.field = field
        self.size = N ** legs
        self.basis: list[Tensor] = []
        self._rows: dict[int, dict[int, object]] = {}
        self.extend(vectors)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _reduce(self, v: dict[int, object]) -> dict[int, object]:
        v = dict(v)
        for p in sorted(self._rows):
            f = v.get(p)
            if f is None:
                continue
            for j, a in self._rows[p].items():
                nv = v.get(j)
                nv = -(f * a) if nv is None else nv - f * a
                if nv:
                    v[j] = nv
                else:
                    v.pop(j, None)
        return v

    def _as_dict(self, vec: Tensor) -> dict[int, object]:
        if vec.legs_in != 0 or vec.legs_out != self.legs or vec.dim != self.N:
            raise ShapeMismatch("vector does not live in this space")
        return {i: x for i, x in enumerate(vec.data.reshape(-1)) if x}

    def add(self, vec: Tensor) -> bool:
        """Insert ``vec``; returns True if it enlarged the span."""
        r = self._reduce(self._as_dict(vec))
        if not r:
            return False
        p = min(r)
        inv = self.field.one / r[p]
        row = {j: a * inv for j, a in r.items()}
        row[p] = self.field.one
        # keep rows reduced at the new pivot so _reduce stays one pass
        for q, other in self._rows.items():
            f = other.get(p)
            if f is None:
                continue
            for j, a in row.items():
                nv = other.get(j)
                nv = -(f * a) if nv is None else nv - f * a
                if nv:
                    other[j] = nv
                else:
                    other.pop(j, None)
        self._rows[p] = row
        self.basis.append(vec)
        return True

    def extend(self, vectors: Iterable[Tensor]) -> int:
        vectors = list(vectors)
        if _is_numeric(self.field) and len(vectors) > 8:
            return self._extend_batch(vectors)
        return sum(1 for v in vectors if self.add(v))

    def _extend_batch(self, vectors: list[Tensor]) -> int:
        # numeric: rank-reveal the candidates with flint, then insert survivors
        start = self.dim
        rows = [self._echelon_vector(p) for p in sorted(self._rows)]
        cand = [v.data.reshape(-1) for v in vectors]
        mat = flint.fmpq_mat(len(rows) + len(cand), self.size,
                             [x for r in rows for x in r] + [x for c in cand for x in c])
        if mat.rank() == len(rows):
            return 0
        for v in vectors:
            self.add(v)
        return self.dim - start

    def _echelon_vector(self, p):
        row = self._rows[p]
        return [row.get(j, self.field.zero) for j in range(self.size)]

    def contains(self, vec: Tensor) -> bool:
        return not self._reduce(self._as_dict(vec))

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)

    def copy(self) -> "Subspace":
        out = Subspace(self.N, self.legs, self.field)
        out.basis = list(self.basis)
        out._rows = {p: dict(r) for p, r in self._rows.items()}
        return out

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.size})"


def rank_kernel(T: Tensor) -> tuple[int, Subspace]:
    """Exact rank and a kernel basis (as a :class:`Subspace`) of ``T``."""
    rank, vecs = kernel_of(T.matrix(), T.field)
    ker = Subspace(T.dim, T.legs_in, T.field)
    for v in vecs:
        ker.add(Tensor.vector(v, T.dim, T.field) if T.legs_in else
                Tensor(np.asarray(v[0], dtype=object), 0, 0, T.field))
    return rank, ker


def rank(T: Tensor) -> int:
    return rank_of(T.matrix(), T.field)


def image(T: Tensor) -> Subspace:
    """Column space of ``T``."""
    cols = T.matrix().T
    sp = Subspace(T.dim, T.legs_out, T.field)
    sp.extend(Tensor.vector(list(c), T.dim, T.field) for c in cols if any(bool(x) for x in c))
    return sp


def stack_rank(vectors: Sequence[Tensor]) -> int:
    if not vectors:
        return 0
    field = vectors[0].field
    mat = np.array([v.data.reshape(-1) for v in vectors], dtype=object)
    return rank_of(mat, field)


# ---------------------------------------------------------------------------
# dump format

def dump_tensor(T: Tensor, path) -> None:
    """Header ``legs_out legs_in N``, then ``row col value`` per nonzero entry."""
    lines = [f"{T.legs_out} {T.legs_in} {T.dim}"]
    mat = T.matrix()
    for r in range(mat.shape[0]):
        for c in range(mat.shape[1]):
            v = mat[r, c]
            if v:
                lines.append(f"{r} {c} {T.field.fmt(v)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_tensor(path, field=None) -> Tensor:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    legs_out, legs_in, N = (int(t) for t in text[0].split())
    entries = [line.split(" ", 2) for line in text[1:] if line.strip()]
    if field is None:
        field = SYMBOLIC if any("s" in e[2] for e in entries) else NumericField()
    T = Tensor.zeros(legs_out, legs_in, N, field)
    mat = T.matrix()
    for r, c, v in entries:
        mat[int(r), int(c)] = field.parse(v)
    return T
