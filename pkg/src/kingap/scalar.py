"""Exact scalars: rationals and single-radicand quadratic surds.

A scalar is either a :class:`gmpy2.mpq` (the rational case) or a
:class:`Surd` ``a + b*sqrt(r)`` with ``b != 0`` and ``r`` a square-free
integer ``>= 2``.  Every operation returns a value in that canonical
form, so structural equality is value equality.  Rationals are kept as
bare ``mpq`` values because almost all computation in this package stays
in Q and the native type is several times faster than any wrapper.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

import gmpy2
from gmpy2 import mpq

__all__ = [
    "Scalar",
    "Surd",
    "ScalarError",
    "DivisionByZero",
    "MixedRadicands",
    "NegativeRadicand",
    "to_scalar",
    "quad",
    "arith",
    "sqrt",
    "sign",
    "is_rational",
    "rational_part",
    "surd_coefficient",
    "radicand",
    "format_scalar",
    "parse_scalar",
    "ZERO",
    "ONE",
]


class ScalarError(ArithmeticError):
    pass


class DivisionByZero(ScalarError, ZeroDivisionError):
    pass


class MixedRadicands(ScalarError):
    pass


class NegativeRadicand(ScalarError, ValueError):
    pass


ZERO = mpq(0)
ONE = mpq(1)

_RATIONAL_TYPES = (type(ZERO), int, type(gmpy2.mpz(0)), Fraction)


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(k, m)`` with ``n == k*k*m`` and ``m`` square-free."""
    if n == 0:
        return 0, 1
    if gmpy2.is_square(n):
        return int(gmpy2.isqrt(n)), 1
    k, m = 1, 1
    rest = n
    p = 2
    while p < 1000 and p * p <= rest:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        if e:
            k *= p ** (e // 2)
            if e % 2:
                m *= p
        p += 1 if p == 2 else 2
    if rest > 1:
        if gmpy2.is_square(rest):
            k *= int(gmpy2.isqrt(rest))
        elif rest < 1000 * 1000:
            # no prime factor below 1000 left, so rest is prime here
            m *= rest
        else:
            from sympy import factorint

            for prime, e in factorint(rest).items():
                k *= prime ** (e // 2)
                if e % 2:
                    m *= prime
    return k, m


def _rat(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


class Surd:
    """``a + b*sqrt(r)`` with ``b != 0`` and ``r`` square-free, ``r >= 2``.

    Build through :func:`quad` or :func:`sqrt`; the constructor trusts its
    arguments to already be canonical.
    """

    __slots__ = ("a", "b", "r")

    def __init__(self, a: mpq, b: mpq, r: int):
        self.a = a
        self.b = b
        self.r = r

    def _same_field(self, other: "Surd") -> None:
        if other.r != self.r:
            raise MixedRadicands(
                f"cannot combine sqrt({self.r}) and sqrt({other.r})"
            )

    def conjugate(self) -> "Surd":
        return Surd(self.a, -self.b, self.r)

    def norm(self) -> mpq:
        """Field norm ``a^2 - b^2 r``; nonzero because ``r`` is not a square."""
        return self.a * self.a - self.b * self.b * self.r

    def __add__(self, other):
        if isinstance(other, Surd):
            self._same_field(other)
            return quad(self.a + other.a, self.b + other.b, self.r)
        if isinstance(other, _RATIONAL_TYPES):
            return Surd(self.a + _rat(other), self.b, self.r)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.r)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, (Surd,) + _RATIONAL_TYPES):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Surd):
            self._same_field(other)
            return quad(
                self.a * other.a + self.b * other.b * self.r,
                self.a * other.b + self.b * other.a,
                self.r,
            )
        if isinstance(other, _RATIONAL_TYPES):
            other = _rat(other)
            if not other:
                return ZERO
            return Surd(self.a * other, self.b * other, self.r)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Surd):
            self._same_field(other)
            return self * other.conjugate() * (ONE / other.norm())
        if isinstance(other, _RATIONAL_TYPES):
            other = _rat(other)
            if not other:
                raise DivisionByZero("division by zero")
            return Surd(self.a / other, self.b / other, self.r)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            return self.conjugate() * (_rat(other) / self.norm())
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    def __abs__(self):
        return -self if sign(self) < 0 else self

    def __eq__(self, other):
        if isinstance(other, Surd):
            return self.a == other.a and self.b == other.b and self.r == other.r
        if isinstance(other, _RATIONAL_TYPES):
            return False
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.r))

    def __bool__(self):
        return True

    def _cmp(self, other) -> int:
        if not isinstance(other, (Surd,) + _RATIONAL_TYPES):
            raise TypeError(f"cannot compare Surd with {type(other).__name__}")
        return sign(self - other)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * float(gmpy2.sqrt(self.r))

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"Surd({format_scalar(self)!r})"


Scalar = Union[mpq, Surd]


def to_scalar(x) -> Scalar:
    """Coerce ints, Fractions, mpq, Surds and scalar literals to a Scalar."""
    if isinstance(x, Surd):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError(f"refusing inexact or boolean value {x!r}")
    if isinstance(x, _RATIONAL_TYPES):
        return _rat(x)
    raise TypeError(f"not a scalar: {x!r}")


def quad(a, b, r: int) -> Scalar:
    """Canonical form of ``a + b*sqrt(r)`` for a nonnegative integer ``r``."""
    a, b = _rat(a), _rat(b)
    if r < 0:
        raise NegativeRadicand(f"negative radicand {r}")
    if not b or r == 0:
        return a
    k, m = _squarefree_split(int(r))
    if m == 1:
        return a + b * k
    return Surd(a, b * k, m)


def sqrt(x) -> Scalar:
    x = to_scalar(x)
    if isinstance(x, Surd):
        raise TypeError("sqrt is only defined on rationals")
    if x < 0:
        raise NegativeRadicand(f"sqrt of negative value {x}")
    p, q = int(x.numerator), int(x.denominator)
    # sqrt(p/q) = sqrt(p*q)/q
    return quad(ZERO, mpq(1, q), p * q)


def sign(x) -> int:
    """Exact sign as -1, 0 or 1."""
    if isinstance(x, Surd):
        sa = (x.a > 0) - (x.a < 0)
        sb = (x.b > 0) - (x.b < 0)
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: the larger square wins; equality is impossible
        return sa if x.a * x.a > x.b * x.b * x.r else sb
    return (x > 0) - (x < 0)


def is_rational(x) -> bool:
    return not isinstance(x, Surd)


def rational_part(x) -> mpq:
    return x.a if isinstance(x, Surd) else _rat(x)


def surd_coefficient(x) -> mpq:
    return x.b if isinstance(x, Surd) else ZERO


def radicand(x) -> int | None:
    return x.r if isinstance(x, Surd) else None


_OPS = {
    "add": lambda x, y: x + y,
    "sub": lambda x, y: x - y,
    "mul": lambda x, y: x * y,
    "div": lambda x, y: x / y,
}


def arith(op: str, x, y=None) -> Scalar:
    """Named arithmetic entry point: add, sub, mul, div, neg, inv."""
    x = to_scalar(x)
    try:
        if op == "neg":
            return -x
        if op == "inv":
            if isinstance(x, Surd):
                return ONE / x
            if not x:
                raise DivisionByZero("inverse of zero")
            return ONE / x
        if op not in _OPS:
            raise ValueError(f"unknown operation {op!r}")
        if y is None:
            raise TypeError(f"{op} needs two operands")
        y = to_scalar(y)
        if op == "div" and not isinstance(y, Surd) and not y:
            raise DivisionByZero("division by zero")
        return _OPS[op](x, y)
    except ZeroDivisionError as exc:
        if isinstance(exc, DivisionByZero):
            raise
        raise DivisionByZero(str(exc)) from exc


def format_scalar(x) -> str:
    """``p/q`` or ``p`` for rationals, ``a+b*sqrt(r)`` for surds."""
    if isinstance(x, Surd):
        return f"{x.a}+{x.b}*sqrt({x.r})"
    return str(_rat(x))


_RAT = r"[+-]?\d+(?:/\d+)?"
_RAT_RE = re.compile(rf"^{_RAT}$")
_SURD_RE = re.compile(rf"^({_RAT})\+({_RAT})\*sqrt\((\d+)\)$")


def _parse_rational(text: str) -> mpq:
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            raise DivisionByZero(f"zero denominator in {text!r}")
        return mpq(int(num), int(den))
    return mpq(int(text))


def parse_scalar(text: str) -> Scalar:
    s = text.strip()
    if _RAT_RE.match(s):
        return _parse_rational(s)
    m = _SURD_RE.match(s)
    if m:
        return quad(_parse_rational(m.group(1)), _parse_rational(m.group(2)), int(m.group(3)))
    raise ValueError(f"not a scalar literal: {text!r}")
