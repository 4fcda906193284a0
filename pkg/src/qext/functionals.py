"""Functionals on low-degree monomials of the coordinate algebra, and formal elements.

A functional is tabulated degree by degree.  For degree ``d`` the value on
the monomial ``u^{a1}_{b1} ... u^{ad}_{bd}`` sits at flat position
``(a, b)`` of an ``N^d x N^d`` block, with ``a = (a1..ad)`` and ``b = (b1..bd)``
read as base-``N`` digits.  Matrix-valued functionals carry two extra leading
axes ``(i, j)``.  With this layout the coproduct
``u^a_b -> u^a_c (x) u^c_b`` turns the convolution product into an ordinary
matrix product over the middle multi-index ``c``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .qdata import QData
from .tensor import Tensor

__all__ = [
    "DegreeTooHigh",
    "IdentityViolated",
    "MAX_DEGREE",
    "ATOMS",
    "Monomial",
    "FunctionalWord",
    "FunctionalTable",
    "FunctionalEngine",
    "Element",
    "eval_word",
]

MAX_DEGREE = 2
ATOMS = ("lplus", "lminus", "S_lminus", "S_lplus", "eps_sign")


class DegreeTooHigh(ValueError):
    pass


class IdentityViolated(AssertionError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------------------
# monomials and formal elements


@dataclass(frozen=True)
class Monomial:
    """Product ``u^{m1}_{n1} u^{m2}_{n2} ...``; ``factors`` holds ``(m, n)`` pairs."""
    factors: tuple = ()

    @property
    def degree(self) -> int:
        return len(self.factors)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.factors + other.factors)

    def flat_index(self, N: int) -> tuple[int, int]:
        a = b = 0
        for m, n in self.factors:
            a = a * N + m
            b = b * N + n
        return a, b

    def __str__(self):
        if not self.factors:
            return "1"
        return " ".join(f"u^{m}_{n}" for m, n in self.factors)


def all_monomials(N: int, degree: int) -> Iterable[Monomial]:
    gens = [(m, n) for m in range(N) for n in range(N)]
    for combo in itertools.product(gens, repeat=degree):
        yield Monomial(tuple(combo))


class Element:
    """Formal linear combination of monomials in the generators ``u^i_j``.

    No relations are imposed; elements are only ever used through
    counits, representations and functionals, all of which respect the
    relations.
    """

    __slots__ = ("terms", "field")

    def __init__(self, terms: dict, field):
        self.field = field
        self.terms = {m: c for m, c in terms.items() if c != 0}

    @classmethod
    def unit(cls, field) -> "Element":
        return cls({Monomial(): field.one}, field)

    @classmethod
    def generator(cls, i: int, j: int, field) -> "Element":
        return cls({Monomial(((i, j),)): field.one}, field)

    @classmethod
    def quantum_trace(cls, qd: QData) -> "Element":
        """``U = D^j_i u^i_j``."""
        N, D = qd.N, qd.D.data
        return cls({Monomial(((i, j),)): D[j, i] for i in range(N) for j in range(N)
                    if D[j, i] != 0}, qd.field)

    @classmethod
    def quadratic_invariant(cls, qd: QData, nu: str) -> "Element":
        """``V_nu = D^b_a D^j_i (P^nu)^{ai}_{yz} u^y_b u^z_j``."""
        N, D, P = qd.N, qd.D.data, qd.P[nu].data
        terms: dict = {}
        for a, b, i, j, y, z in itertools.product(range(N), repeat=6):
            d = D[b, a] * D[j, i]
            if d == 0:
                continue
            c = d * P[a, i, y, z]
            if c == 0:
                continue
            m = Monomial(((y, b), (z, j)))
            terms[m] = terms.get(m, qd.field.zero) + c
        return cls(terms, qd.field)

    @property
    def degree(self) -> int:
        return max((m.degree for m in self.terms), default=0)

    def __add__(self, other: "Element") -> "Element":
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, self.field.zero) + c
        return Element(t, self.field)

    def __neg__(self) -> "Element":
        return Element({m: -c for m, c in self.terms.items()}, self.field)

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, c) -> "Element":
        return Element({m: c * v for m, v in self.terms.items()}, self.field)

    def __mul__(self, other: "Element") -> "Element":
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                t[m] = t.get(m, self.field.zero) + c1 * c2
        return Element(t, self.field)

    def counit(self, sign: int = 1):
        """``eps_sign`` extended multiplicatively: ``u^i_j -> sign * delta_ij``."""
        acc = self.field.zero
        for m, c in self.terms.items():
            if all(a == b for a, b in m.factors):
                acc = acc + c * (sign ** m.degree)
        return acc

    def plus(self) -> "Element":
        """``a^+ = a - eps(a) 1``."""
        return self - Element.unit(self.field).scale(self.counit())

    def act(self, vec: Tensor, gen_action: Callable[[int, int], Tensor]) -> Tensor:
        """Right action ``vec <| self`` given the matrix of ``<| u^i_j``.

        Monomials are applied left factor first.  Terms sharing a prefix reuse
        the partial result.
        """
        cache: dict = {(): vec}

        def partial(prefix: tuple) -> Tensor:
            if prefix not in cache:
                prev = partial(prefix[:-1])
                cache[prefix] = gen_action(*prefix[-1]) @ prev
            return cache[prefix]

        acc = None
        for m, c in self.terms.items():
            term = partial(m.factors).scale(c)
            acc = term if acc is None else acc + term
        if acc is None:
            return vec.scale(self.field.zero)
        return acc

    def __repr__(self):
        return f"Element({len(self.terms)} terms, degree {self.degree})"


# ---------------------------------------------------------------------------
# functional tables


@dataclass
class FunctionalTable:
    """Values of a (matrix of) functional(s) on all monomials of degree 0..``max_degree``.

    ``blocks[d]`` has shape ``extra + (N**d, N**d)``; ``extra`` is ``(N, N)``
    for a matrix of functionals and ``()`` for a single functional.
    """
    N: int
    extra: tuple
    blocks: dict = dc_field(default_factory=dict)

    @property
    def max_degree(self) -> int:
        return max(self.blocks)

    def value(self, m: Monomial, *idx):
        if m.degree not in self.blocks:
            raise DegreeTooHigh(f"degree {m.degree} not tabulated")
        a, b = m.flat_index(self.N)
        return self.blocks[m.degree][tuple(idx) + (a, b)]

    def entry(self, i: int, j: int) -> "FunctionalTable":
        return FunctionalTable(self.N, (), {d: B[i, j].copy() for d, B in self.blocks.items()})

    def __add__(self, other: "FunctionalTable") -> "FunctionalTable":
        return FunctionalTable(self.N, self.extra,
                               {d: self.blocks[d] + other.blocks[d] for d in self.blocks})

    def __sub__(self, other: "FunctionalTable") -> "FunctionalTable":
        return FunctionalTable(self.N, self.extra,
                               {d: self.blocks[d] - other.blocks[d] for d in self.blocks})

    def scale(self, c) -> "FunctionalTable":
        return FunctionalTable(self.N, self.extra, {d: B * c for d, B in self.blocks.items()})

    def equals(self, other: "FunctionalTable") -> Optional[tuple]:
        """``None`` when equal, else ``(degree, index)`` of the first difference."""
        for d in sorted(self.blocks):
            A, B = self.blocks[d], other.blocks[d]
            for idx in np.ndindex(A.shape):
                if A[idx] != B[idx]:
                    return d, idx
        return None


def _conv_blocks(F: np.ndarray, G: np.ndarray, eins: str) -> np.ndarray:
    """Convolution on one degree block; ``eins`` names the extra axes of F, G and the result."""
    fe, ge, out = eins.split(",")[0], eins.split(",")[1].split("->")[0], eins.split("->")[1]
    spec = f"{fe}AC,{ge}CB->{out}AB"
    return np.einsum(spec, F, G, optimize=True)


def convolve(F: FunctionalTable, G: FunctionalTable, eins: str, extra: tuple) -> FunctionalTable:
    """Generic convolution ``(F G)(a) = F(a_(1)) G(a_(2))`` with extra-axis contraction.

    ``eins`` is an einsum fragment over extra axes only, e.g. ``"iy,yj->ij"``.
    """
    return FunctionalTable(F.N, extra, {d: _conv_blocks(F.blocks[d], G.blocks[d], eins)
                                        for d in F.blocks})


class FunctionalEngine:
    """Builds and combines functional tables for one ``QData`` up to degree 2."""

    def __init__(self, qd: QData, max_degree: int = MAX_DEGREE):
        if max_degree > MAX_DEGREE:
            raise DegreeTooHigh(f"engine supports degree <= {MAX_DEGREE}")
        self.qd = qd
        self.N = qd.N
        self.field = qd.field
        self.max_degree = max_degree
        self._atoms: dict = {}

    # -- building blocks --------------------------------------------------
    def _identity_block(self, d: int) -> np.ndarray:
        n = self.N ** d
        out = np.empty((n, n), dtype=object)
        out.fill(self.field.zero)
        for k in range(n):
            out[k, k] = self.field.one
        return out

    def _matrix_from_degree1(self, deg1: np.ndarray, anti: bool) -> FunctionalTable:
        """Extend degree-1 values multiplicatively (or anti-multiplicatively)."""
        N, f = self.N, self.field
        blocks = {}
        d0 = np.empty((N, N, 1, 1), dtype=object)
        d0.fill(f.zero)
        for i in range(N):
            d0[i, i, 0, 0] = f.one
        blocks[0] = d0
        if self.max_degree >= 1:
            blocks[1] = deg1.copy()
        if self.max_degree >= 2:
            if anti:
                two = np.einsum("ikcd,kjab->ijacbd", deg1, deg1, optimize=True)
            else:
                two = np.einsum("ikab,kjcd->ijacbd", deg1, deg1, optimize=True)
            blocks[2] = two.reshape(N, N, N * N, N * N)
        return FunctionalTable(N, (N, N), blocks)

    def atom(self, name: str) -> FunctionalTable:
        if name not in self._atoms:
            self._atoms[name] = self._build_atom(name)
        return self._atoms[name]

    def _build_atom(self, name: str) -> FunctionalTable:
        R, Ri = self.qd.R.data, self.qd.Rinv.data
        if name == "lplus":        # l^{+i}_j(u^m_n) = R^{im}_{nj}
            return self._matrix_from_degree1(R.transpose(0, 3, 1, 2), anti=False)
        if name == "lminus":       # l^{-i}_j(u^m_n) = (R^-1)^{im}_{nj}
            return self._matrix_from_degree1(Ri.transpose(0, 3, 1, 2), anti=False)
        if name == "S_lminus":     # l^{-i}_j(S u^m_n) = R^{mi}_{jn}
            return self._matrix_from_degree1(R.transpose(1, 2, 0, 3), anti=True)
        if name == "S_lplus":      # l^{+i}_j(S u^m_n) = (R^-1)^{mi}_{jn}
            return self._matrix_from_degree1(Ri.transpose(1, 2, 0, 3), anti=True)
        if name == "eps_sign":
            raise ValueError("eps_sign needs a sign; use character(sign)")
        raise ValueError(f"unknown atom {name!r}")

    def character(self, sign: int) -> FunctionalTable:
        """``eps_+`` (the counit) or ``eps_-``; value ``sign**d`` on diagonal monomials."""
        return FunctionalTable(self.N, (), {d: self._identity_block(d) * self.field(sign ** d)
                                            for d in range(self.max_degree + 1)})

    def character_matrix(self, sign: int) -> FunctionalTable:
        """Character placed on the diagonal of an N x N functional matrix."""
        ch = self.character(sign)
        N = self.N
        blocks = {}
        for d, B in ch.blocks.items():
            out = np.empty((N, N) + B.shape, dtype=object)
            out.fill(self.field.zero)
            for i in range(N):
                out[i, i] = B
            blocks[d] = out
        return FunctionalTable(N, (N, N), blocks)

    # -- products -----------------------------------------------------------
    @staticmethod
    def matmul(F: FunctionalTable, G: FunctionalTable) -> FunctionalTable:
        """``(F G)^i_j = F^i_y G^y_j`` with convolution of the entries."""
        return convolve(F, G, "iy,yj->ij", F.extra)

    def word(self, atoms: Sequence, sign: int = 1) -> FunctionalTable:
        acc = None
        for a in atoms:
            t = self.character_matrix(sign) if a == "eps_sign" else self.atom(a)
            acc = t if acc is None else self.matmul(acc, t)
        return acc

    def ell(self) -> FunctionalTable:
        """``l^i_j = S(l^{-i}_y) l^{+y}_j``."""
        return self.word(("S_lminus", "lplus"))

    def x_table(self, sign: int) -> FunctionalTable:
        """``X_ij = eps_sign l^i_j - delta_ij`` (the trailing term is ``delta_ij`` times the counit)."""
        return self.word(("eps_sign", "S_lminus", "lplus"), sign) - self.character_matrix(1)

    def x0(self, sign: int) -> FunctionalTable:
        X = self.x_table(sign)
        D = self.qd.D.data
        return FunctionalTable(self.N, (), {d: np.einsum("ji,ijab->ab", D, B, optimize=True)
                                            for d, B in X.blocks.items()})

    def _weight(self) -> np.ndarray:
        """``W^{ijmn} = B^i_y R^{jy}_{mz} C^n_z``."""
        qd = self.qd
        return np.einsum("iy,jymz,nz->ijmn", qd.B.data, qd.R.data, qd.C.data, optimize=True)

    def contract_pair(self, F: FunctionalTable, G: FunctionalTable) -> FunctionalTable:
        """``sum F^i_j G^m_n W^{ijmn}`` with the entries convolved."""
        W = self._weight()
        return FunctionalTable(self.N, (), {
            d: np.einsum("ijmn,ijAC,mnCB->AB", W, F.blocks[d], G.blocks[d], optimize=True)
            for d in F.blocks})

    def mu_T(self, sign: int) -> FunctionalTable:
        X = self.x_table(sign)
        return self.contract_pair(X, X)

    def T0(self) -> FunctionalTable:
        L = self.ell()
        return self.contract_pair(L, L)

    # -- checks -------------------------------------------------------------
    def mu_T_check(self, sign: int) -> dict:
        """Returns ``{name: None | (degree, index)}`` for the two functional identities."""
        cs = self.qd.consts
        lhs = self.mu_T(sign)
        rhs = self.x0(sign).scale(-2 * cs.rhatm)
        t0 = self.T0()
        eps = self.character(1).scale(cs.rhatm * cs.x)
        return {"mu(T) = -2 rhat^-1 X0": lhs.equals(rhs), "T0 = rhat^-1 x eps": t0.equals(eps)}

    def exchange_check(self) -> Optional[tuple]:
        """``R^{wm}_{vj} (l^-c)^m_y l^{+j}_z = l^{+w}_j (l^-c)^v_m R^{jy}_{mz}``, ``(l^-c)^a_b = S l^{-b}_a``."""
        R = self.qd.R.data
        Lc = self.atom("S_lminus")
        Lp = self.atom("lplus")
        out = {}
        for d in Lc.blocks:
            Lcb = Lc.blocks[d].transpose(1, 0, 2, 3)   # (l^-c)^a_b at [a, b]
            lhs = np.einsum("wmvj,myAC,jzCB->wvyzAB", R, Lcb, Lp.blocks[d], optimize=True)
            rhs = np.einsum("wjAC,vmCB,jymz->wvyzAB", Lp.blocks[d], Lcb, R, optimize=True)
            out[d] = (lhs, rhs)
        for d in sorted(out):
            lhs, rhs = out[d]
            for idx in np.ndindex(lhs.shape):
                if lhs[idx] != rhs[idx]:
                    return d, idx
        return None

    def metric_check(self, atom: str) -> Optional[tuple]:
        """``l C^T l^T = C^T 1``: ``l^i_a C^b_a l^j_b = C^j_i eps``."""
        L = self.atom(atom)
        C = self.qd.C.data
        for d, B in L.blocks.items():
            lhs = np.einsum("iaAC,ba,jbCB->ijAB", B, C, B, optimize=True)
            eye = self._identity_block(d)
            for idx in np.ndindex(lhs.shape):
                i, j, A_, B_ = idx
                want = C[j, i] * eye[A_, B_]
                if lhs[idx] != want:
                    return d, idx
        return None

    def homomorphism_check(self, atom: str) -> Optional[tuple]:
        """Degree-2 values against ``l(u1 u2) = l(u1) l(u2)`` evaluated entrywise."""
        L = self.atom(atom)
        if self.max_degree < 2:
            return None
        anti = atom.startswith("S_")
        N = self.N
        one = L.blocks[1]
        for m1 in all_monomials(N, 1):
            for m2 in all_monomials(N, 1):
                mono = m1 * m2
                first, second = (m2, m1) if anti else (m1, m2)
                a1, b1 = first.flat_index(N)
                a2, b2 = second.flat_index(N)
                for i in range(N):
                    for j in range(N):
                        acc = self.field.zero
                        for k in range(N):
                            acc = acc + one[i, k, a1, b1] * one[k, j, a2, b2]
                        if acc != L.value(mono, i, j):
                            return 2, (i, j, str(mono))
        return None


@dataclass(frozen=True)
class FunctionalWord:
    """Ordered product of atoms; ``eps_sign`` uses ``sign``."""
    atoms: tuple
    sign: int = 1

    def __post_init__(self):
        for a in self.atoms:
            if a not in ATOMS:
                raise ValueError(f"unknown atom {a!r}")


def eval_word(engine: FunctionalEngine, w: FunctionalWord, m: Monomial, i: int, j: int):
    """Value of the ``(i, j)`` entry of the word ``w`` on the monomial ``m``."""
    if m.degree > engine.max_degree:
        raise DegreeTooHigh(f"monomial degree {m.degree} > {engine.max_degree}")
    return engine.word(w.atoms, w.sign).value(m, i, j)
