"""Exact arithmetic in a real quadratic field Q(sqrt(d)).

Elements are ``a + b*sqrt(d)`` with rational ``a``, ``b`` and a square-free
integer ``d > 1``.  Results with ``b == 0`` collapse to plain ``gmpy2.mpq``
rationals, so surds mix freely with rationals inside numpy object arrays.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq


def to_rational(x) -> mpq:
    """Exact rational from an int, a ``"p/q"`` string or any :class:`numbers.Rational`."""
    if isinstance(x, mpq):
        return x
    if isinstance(x, str):
        x = Fraction(x)
    if not isinstance(x, Rational):
        raise TypeError(f"not an exact rational: {x!r}")
    return mpq(int(x.numerator), int(x.denominator))


def squarefree_split(d: int) -> tuple[int, int]:
    """Return ``(k, m)`` with ``d == k*k*m`` and ``m`` square-free."""
    if d <= 0:
        raise ValueError(f"radicand must be positive, got {d}")
    k, m = 1, d
    p = 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            k *= p
        p += 1
    return k, m


def sqrt_rational(d: int) -> "mpq | QuadraticSurd":
    """Exact square root of a positive integer."""
    k, m = squarefree_split(d)
    return surd(0, k, m)


def surd(a, b, d: int) -> "mpq | QuadraticSurd":
    """``a + b*sqrt(d)``, collapsed to a rational when it is rational."""
    k, m = squarefree_split(int(d))
    if m == 1 or b == 0:
        return to_rational(a) + to_rational(b) * k
    return QuadraticSurd(a, b, d)


class QuadraticSurd:
    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        k, m = squarefree_split(int(d))
        if m == 1 or b == 0:
            raise ValueError("rational value; use surd() to collapse automatically")
        self.a = to_rational(a)
        self.b = to_rational(b) * k
        self.d = m

    @classmethod
    def _make(cls, a, b, d):
        if b == 0:
            return a
        obj = cls.__new__(cls)
        obj.a, obj.b, obj.d = a, b, d
        return obj

    def _coerce(self, other):
        if type(other) is mpq or type(other) is int:
            return other, 0
        if isinstance(other, QuadraticSurd):
            if other.d != self.d:
                raise ValueError(f"mixing Q(sqrt({self.d})) with Q(sqrt({other.d}))")
            return other.a, other.b
        if isinstance(other, Rational):
            return to_rational(other), mpq(0)
        return None

    def conjugate(self):
        return QuadraticSurd._make(self.a, -self.b, self.d)

    def norm(self) -> mpq:
        return self.a * self.a - self.b * self.b * self.d

    def __add__(self, other):
        if type(other) is mpq or type(other) is int:
            return QuadraticSurd._make(self.a + other, self.b, self.d)
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadraticSurd._make(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd._make(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadraticSurd._make(self.a - c[0], self.b - c[1], self.d)

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadraticSurd._make(c[0] - self.a, c[1] - self.b, self.d)

    def __mul__(self, other):
        if type(other) is mpq or type(other) is int:
            return QuadraticSurd._make(self.a * other, self.b * other, self.d)
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        return QuadraticSurd._make(
            self.a * a + self.b * b * self.d, self.a * b + self.b * a, self.d
        )

    __rmul__ = __mul__

    def _inverse(self):
        n = self.norm()
        return QuadraticSurd._make(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        if c[1] == 0:
            if c[0] == 0:
                raise ZeroDivisionError("division by zero")
            return QuadraticSurd._make(self.a / c[0], self.b / c[0], self.d)
        return self * other._inverse()

    def __rtruediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self._inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = mpq(1)
        for _ in range(k):
            out = out * self
        return out

    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt(d)``."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sa == 0:
            return sb if sa == 0 else sa
        # opposite signs: compare a^2 with b^2 d
        big = (self.a * self.a) - (self.b * self.b * self.d)
        return sa if big > 0 else sb

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __eq__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self.a == c[0] and self.b == c[1]

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def _cmp(self, other) -> int:
        if self._coerce(other) is None:
            return NotImplemented
        diff = self - other
        if isinstance(diff, QuadraticSurd):
            return diff.sign()
        return (diff > 0) - (diff < 0)

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def __bool__(self):
        return True  # b != 0 by construction

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"QuadraticSurd({self.a!s}, {self.b!s}, {self.d})"

    def __str__(self):
        return format_exact(self)


def format_exact(x) -> str:
    """Serialize an exact scalar as ``p/q`` or ``a+b*sqrt(d)``."""
    if isinstance(x, QuadraticSurd):
        a = format_exact(x.a)
        b = format_exact(x.b)
        if not b.startswith("-"):
            b = "+" + b
        return f"{a}{b}*sqrt({x.d})"
    if isinstance(x, Rational):
        return str(Fraction(int(x.numerator), int(x.denominator)))
    return repr(float(x))
