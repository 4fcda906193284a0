"""Exact scalars: rational functions in ``s`` (with ``q = s**2``) and rationals.

Two coefficient fields are supported and share one small interface
(:class:`SymbolicField`, :class:`NumericField`):

* symbolic mode works in Q(s) through :class:`Scalar`, a reduced fraction
  ``s**shift * num(s) / den(s)`` with ``num, den`` in Z[s];
* numeric mode works in Q through ``flint.fmpq`` at a fixed rational sample
  ``s0`` (so ``q = s0**2``).

Half-integer exponents of ``q`` are integral exponents of ``s``; every entry
of the metric and of the braid matrix lives in one Laurent ring this way.

:class:`RPoly` is a univariate polynomial in an indeterminate ``r`` with
coefficients in either field; :func:`ext_gcd` is the extended Euclidean
algorithm over it.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

import flint

__all__ = [
    "DivisionByZero",
    "PoleAtSample",
    "BadSample",
    "Scalar",
    "SymbolicField",
    "NumericField",
    "SYMBOLIC",
    "as_fmpq",
    "evaluate",
    "field_ops",
    "RPoly",
    "ext_gcd",
    "resultant",
]

_ZERO_POLY = flint.fmpz_poly([])
_ONE_POLY = flint.fmpz_poly([1])


class DivisionByZero(ZeroDivisionError):
    pass


class PoleAtSample(ValueError):
    """The denominator of a scalar vanishes at the requested sample."""


class BadSample(ValueError):
    """The sample puts ``q`` on the unit circle (or at zero)."""


def _valuation(p: flint.fmpz_poly) -> int:
    for k, c in enumerate(p.coeffs()):
        if c != 0:
            return k
    raise ValueError("valuation of the zero polynomial")


class Scalar:
    """Element of Q(s) kept in canonical form.

    The value is ``s**shift * num / den`` where ``num`` and ``den`` are
    coprime in Z[s], neither is divisible by ``s``, and ``den`` has a
    positive leading coefficient.  Zero is ``0 / 1`` with ``shift == 0``.
    With that normalisation equality is structural.
    """

    __slots__ = ("num", "den", "shift", "_hash")

    def __init__(self, num, den=None, shift: int = 0):
        if not isinstance(num, flint.fmpz_poly):
            num = flint.fmpz_poly(num if isinstance(num, list) else [num])
        if den is None:
            den = _ONE_POLY
        elif not isinstance(den, flint.fmpz_poly):
            den = flint.fmpz_poly(den if isinstance(den, list) else [den])
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        self._hash = None
        if num.is_zero():
            self.num, self.den, self.shift = _ZERO_POLY, _ONE_POLY, 0
            return
        if not den.is_one():
            g = num.gcd(den)
            if not g.is_one():
                num = num // g
                den = den // g
            if den.leading_coefficient() < 0:
                num, den = -num, -den
            v = _valuation(den)
            if v:
                den = den.right_shift(v)
                shift -= v
        v = _valuation(num)
        if v:
            num = num.right_shift(v)
            shift += v
        self.num, self.den, self.shift = num, den, shift

    @classmethod
    def _raw(cls, num, den, shift):
        obj = object.__new__(cls)
        obj.num, obj.den, obj.shift, obj._hash = num, den, shift, None
        return obj

    # constructors -----------------------------------------------------
    @classmethod
    def from_int(cls, n) -> "Scalar":
        return cls(flint.fmpz_poly([int(n)]))

    @classmethod
    def from_rational(cls, r) -> "Scalar":
        r = Fraction(r)
        return cls(flint.fmpz_poly([r.numerator]), flint.fmpz_poly([r.denominator]))

    @classmethod
    def spow(cls, k: int) -> "Scalar":
        """``s**k`` for any integer ``k``."""
        return cls._raw(_ONE_POLY, _ONE_POLY, int(k))

    @classmethod
    def qpow(cls, k: int) -> "Scalar":
        """``q**k = s**(2k)``."""
        return cls._raw(_ONE_POLY, _ONE_POLY, 2 * int(k))

    @classmethod
    def laurent(cls, coeffs: dict[int, int]) -> "Scalar":
        """Laurent polynomial in ``s`` from ``{exponent: coefficient}``."""
        coeffs = {e: c for e, c in coeffs.items() if c}
        if not coeffs:
            return ZERO
        lo = min(coeffs)
        hi = max(coeffs)
        body = [0] * (hi - lo + 1)
        for e, c in coeffs.items():
            body[e - lo] = int(c)
        return cls(flint.fmpz_poly(body), _ONE_POLY, lo)

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.shift == 0 and self.num.is_one() and self.den.is_one()

    def is_laurent(self) -> bool:
        return self.den.is_one()

    def __bool__(self):
        return not self.num.is_zero()

    # arithmetic --------------------------------------------------------
    def __neg__(self):
        if self.num.is_zero():
            return self
        return Scalar._raw(-self.num, self.den, self.shift)

    def __add__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, int):
                other = Scalar.from_int(other)
            else:
                return NotImplemented
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        e = min(self.shift, other.shift)
        n1 = self.num.left_shift(self.shift - e) if self.shift != e else self.num
        n2 = other.num.left_shift(other.shift - e) if other.shift != e else other.num
        if self.den == other.den:
            return Scalar(n1 + n2, self.den, e)
        return Scalar(n1 * other.den + n2 * self.den, self.den * other.den, e)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, int):
                other = Scalar.from_int(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, int):
                other = Scalar.from_int(other)
            else:
                return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if d1.is_one() and d2.is_one():
            return Scalar._raw(n1 * n2, _ONE_POLY, self.shift + other.shift)
        # cross-cancel keeps the final gcd small
        if not d2.is_one():
            g = n1.gcd(d2)
            if not g.is_one():
                n1, d2 = n1 // g, d2 // g
        if not d1.is_one():
            g = n2.gcd(d1)
            if not g.is_one():
                n2, d1 = n2 // g, d1 // g
        num, den = n1 * n2, d1 * d2
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return Scalar._raw(num, den, self.shift + other.shift)

    __rmul__ = __mul__

    def inv(self) -> "Scalar":
        if self.num.is_zero():
            raise DivisionByZero("inverse of zero")
        num, den = self.den, self.num
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return Scalar._raw(num, den, -self.shift)

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, int):
                other = Scalar.from_int(other)
            else:
                return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, k: int):
        k = int(k)
        if k < 0:
            return self.inv() ** (-k)
        if self.num.is_zero():
            return ONE if k == 0 else ZERO
        return Scalar._raw(self.num ** k, self.den ** k, self.shift * k)

    # comparison ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            other = Scalar.from_int(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return (self.shift == other.shift and self.num == other.num
                and self.den == other.den)

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.shift, tuple(int(c) for c in self.num.coeffs()),
                               tuple(int(c) for c in self.den.coeffs())))
        return self._hash

    # conversions ---------------------------------------------------------
    def evaluate(self, s0) -> flint.fmpq:
        return evaluate(self, s0)

    def numerator_laurent(self) -> dict[int, int]:
        return {k + self.shift: int(c) for k, c in enumerate(self.num.coeffs()) if c != 0}

    def denominator_poly(self) -> dict[int, int]:
        return {k: int(c) for k, c in enumerate(self.den.coeffs()) if c != 0}

    def __str__(self):
        num = _format_laurent(self.numerator_laurent())
        if self.den.is_one():
            return num
        return f"{num} / {_format_laurent(self.denominator_poly())}"

    def __repr__(self):
        return f"Scalar({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        """Inverse of ``str``: ``"num(s)"`` or ``"num(s) / den(s)"``."""
        parts = text.split(" / ")
        if len(parts) > 2:
            raise ValueError(f"malformed scalar string {text!r}")
        num = cls.laurent(_parse_laurent(parts[0]))
        if len(parts) == 1:
            return num
        return num / cls.laurent(_parse_laurent(parts[1]))


ZERO = Scalar._raw(_ZERO_POLY, _ONE_POLY, 0)
ONE = Scalar._raw(_ONE_POLY, _ONE_POLY, 0)


def _format_laurent(terms: dict[int, int]) -> str:
    if not terms:
        return "0"
    out = []
    for e in sorted(terms, reverse=True):
        c = terms[e]
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if e == 0:
            body = str(a)
        else:
            mono = "s" if e == 1 else f"s^{e}"
            body = mono if a == 1 else f"{a}*{mono}"
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


_TERM = re.compile(r"^(?:(\d+)\*)?s(?:\^(-?\d+))?$|^(\d+)$")


def _parse_laurent(text: str) -> dict[int, int]:
    text = text.strip()
    if text == "0":
        return {}
    tokens = text.replace(" - ", " + -").split(" + ")
    terms: dict[int, int] = {}
    for tok in tokens:
        tok = tok.strip()
        sign = 1
        if tok.startswith("-"):
            sign, tok = -1, tok[1:]
        m = _TERM.match(tok)
        if not m:
            raise ValueError(f"cannot parse term {tok!r}")
        if m.group(3) is not None:
            e, c = 0, int(m.group(3))
        else:
            c = int(m.group(1)) if m.group(1) else 1
            e = int(m.group(2)) if m.group(2) is not None else 1
        terms[e] = terms.get(e, 0) + sign * c
    return terms


def as_fmpq(value) -> flint.fmpq:
    """Coerce int / Fraction / ``"p/q"`` strings / fmpq to ``flint.fmpq``."""
    if isinstance(value, flint.fmpq):
        return value
    if isinstance(value, str):
        value = Fraction(value.strip())
    if isinstance(value, (int, flint.fmpz)):
        return flint.fmpq(int(value))
    fr = Fraction(value)
    return flint.fmpq(fr.numerator, fr.denominator)


def _poly_at(p: flint.fmpz_poly, x: flint.fmpq) -> flint.fmpq:
    acc = flint.fmpq(0)
    for c in reversed(p.coeffs()):
        acc = acc * x + c
    return acc


def check_sample(s0) -> flint.fmpq:
    s0 = as_fmpq(s0)
    if s0 == 0:
        raise BadSample("s0 = 0 does not define q")
    if s0 == 1 or s0 == -1:
        raise BadSample("|s0| = 1 puts q on the unit circle")
    return s0


def evaluate(a: Scalar, s0) -> flint.fmpq:
    """Exact value of ``a`` at ``s = s0``."""
    s0 = check_sample(s0)
    if a.is_zero():
        return flint.fmpq(0)
    d = _poly_at(a.den, s0)
    if d == 0:
        raise PoleAtSample(f"denominator of {a} vanishes at s = {s0}")
    return _poly_at(a.num, s0) / d * s0 ** a.shift


def field_ops(a, b, op: str):
    """Dispatch one field operation by name (add, sub, mul, div, neg, inv)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0:
            raise DivisionByZero("division by zero")
        return a / b
    if op == "neg":
        return -a
    if op == "inv":
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return 1 / a
    raise ValueError(f"unknown op {op!r}")


class SymbolicField:
    """Q(s) with q = s^2."""

    name = "symbolic"
    zero = ZERO
    one = ONE

    def __init__(self):
        self.s = Scalar.spow(1)
        self.q = Scalar.qpow(1)

    def __call__(self, n) -> Scalar:
        if isinstance(n, Scalar):
            return n
        if isinstance(n, int):
            return Scalar.from_int(n)
        return Scalar.from_rational(n)

    def spow(self, k: int) -> Scalar:
        return Scalar.spow(k)

    def qpow(self, k: int) -> Scalar:
        return Scalar.qpow(k)

    def from_scalar(self, a: Scalar) -> Scalar:
        return a

    def fmt(self, a: Scalar) -> str:
        return str(a)

    def parse(self, text: str) -> Scalar:
        return Scalar.parse(text)

    def describe_q(self) -> str:
        return "s^2"

    def __eq__(self, other):
        return isinstance(other, SymbolicField)

    def __hash__(self):
        return hash("symbolic")

    def __repr__(self):
        return "SymbolicField()"


class NumericField:
    """Q at a fixed sample ``s = s0`` (``q = s0**2``), via ``flint.fmpq``."""

    name = "numeric"

    def __init__(self, s0=2):
        self.s0 = check_sample(s0)
        self.zero = flint.fmpq(0)
        self.one = flint.fmpq(1)
        self.s = self.s0
        self.q = self.s0 ** 2

    def __call__(self, n) -> flint.fmpq:
        return as_fmpq(n)

    def spow(self, k: int) -> flint.fmpq:
        return self.s0 ** int(k)

    def qpow(self, k: int) -> flint.fmpq:
        return self.q ** int(k)

    def from_scalar(self, a: Scalar) -> flint.fmpq:
        return evaluate(a, self.s0)

    def fmt(self, a) -> str:
        return str(a)

    def parse(self, text: str) -> flint.fmpq:
        return as_fmpq(text)

    def describe_q(self) -> str:
        return str(self.q)

    def __eq__(self, other):
        return isinstance(other, NumericField) and other.s0 == self.s0

    def __hash__(self):
        return hash(("numeric", str(self.s0)))

    def __repr__(self):
        return f"NumericField(s0={self.s0})"


SYMBOLIC = SymbolicField()


# ---------------------------------------------------------------------------
# polynomials in r over a field

class RPoly:
    """Dense polynomial in ``r`` over a field; ``coeffs[k]`` multiplies ``r**k``.

    Trailing zeros are trimmed; the zero polynomial has ``degree == -1``.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, coeffs: Iterable, field=SYMBOLIC):
        cs = [field(c) if isinstance(c, (int, Fraction)) else c for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self):
        return self.coeffs[-1]

    @classmethod
    def const(cls, c, field=SYMBOLIC) -> "RPoly":
        return cls([c], field)

    def __add__(self, other: "RPoly") -> "RPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        z = self.field.zero
        a = self.coeffs + (z,) * (n - len(self.coeffs))
        b = other.coeffs + (z,) * (n - len(other.coeffs))
        return RPoly([x + y for x, y in zip(a, b)], self.field)

    def __neg__(self) -> "RPoly":
        return RPoly([-c for c in self.coeffs], self.field)

    def __sub__(self, other: "RPoly") -> "RPoly":
        return self + (-other)

    def __mul__(self, other) -> "RPoly":
        if not isinstance(other, RPoly):
            return RPoly([c * other for c in self.coeffs], self.field)
        if self.is_zero() or other.is_zero():
            return RPoly([], self.field)
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return RPoly(out, self.field)

    __rmul__ = __mul__

    def divmod(self, other: "RPoly") -> tuple["RPoly", "RPoly"]:
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        inv_lc = 1 / other.lc()
        quot = [self.field.zero] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            f = c * inv_lc
            quot[k - dq] = f
            for j, b in enumerate(other.coeffs):
                rem[k - dq + j] = rem[k - dq + j] - f * b
        return RPoly(quot, self.field), RPoly(rem[:dq] if dq > 0 else [], self.field)

    def monic(self) -> "RPoly":
        return self * (1 / self.lc())

    def __call__(self, r):
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * r + c
        return acc

    def __eq__(self, other):
        return isinstance(other, RPoly) and self.coeffs == other.coeffs

    def __repr__(self):
        return "RPoly([" + ", ".join(str(c) for c in self.coeffs) + "])"


def ext_gcd(p1: RPoly, p2: RPoly) -> tuple[RPoly, RPoly, RPoly]:
    """Extended Euclid in K[r]: returns ``(g, a, b)`` with ``g = a*p1 + b*p2``.

    ``g`` is monic.  Both inputs zero is rejected.
    """
    field = p1.field
    if p1.is_zero() and p2.is_zero():
        raise ValueError("ext_gcd of two zero polynomials")
    one = RPoly([field.one], field)
    zero = RPoly([], field)
    r0, r1 = p1, p2
    a0, a1 = one, zero
    b0, b1 = zero, one
    while not r1.is_zero():
        quo, rem = r0.divmod(r1)
        r0, r1 = r1, rem
        a0, a1 = a1, a0 - quo * a1
        b0, b1 = b1, b0 - quo * b1
    inv = 1 / r0.lc()
    return r0 * inv, a0 * inv, b0 * inv


def resultant(p1: RPoly, p2: RPoly):
    """Sylvester resultant of two polynomials over the coefficient field."""
    from .tensor import determinant

    m, n = p1.degree, p2.degree
    if m < 0 or n < 0:
        return p1.field.zero
    size = m + n
    field = p1.field
    rows = []
    for i in range(n):
        row = [field.zero] * size
        for k, c in enumerate(reversed(p1.coeffs)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [field.zero] * size
        for k, c in enumerate(reversed(p2.coeffs)):
            row[i + k] = c
        rows.append(row)
    return determinant(rows, field)


def sample_points(values: Sequence) -> list[flint.fmpq]:
    return [check_sample(v) for v in values]
