"""Exact scalars: rationals and Gaussian rationals, plus fraction-string I/O."""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

__all__ = [
    "GaussianRational",
    "Scalar",
    "conj",
    "abs2",
    "is_exact",
    "to_complex",
    "exact_sqrt",
    "parse_fraction",
    "format_fraction",
    "as_exact",
]


class GaussianRational:
    """A complex number ``re + i*im`` with rational parts.

    Interoperates with ``int`` and ``Fraction`` in both operand positions and
    degrades to ``complex`` when mixed with floats.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Rational)):
            return GaussianRational(other, 0)
        return None

    def simplify(self):
        """Return a ``Fraction`` when the imaginary part vanishes."""
        return self.re if self.im == 0 else self

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) + other
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) * other
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) / other
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * o.conjugate()
        return GaussianRational(num.re / d, num.im / d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return other / complex(self)
        return o / self

    def __eq__(self, other):
        if isinstance(other, complex):
            return complex(self) == other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


Scalar = Union[int, Fraction, GaussianRational, float, complex]


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, GaussianRational)) and not isinstance(x, bool)


def conj(x):
    if isinstance(x, (int, Fraction)):
        return x
    return x.conjugate()


def abs2(x):
    """Squared modulus; exact for exact inputs."""
    if isinstance(x, GaussianRational):
        return x.re * x.re + x.im * x.im
    if isinstance(x, (int, Fraction)):
        return x * x
    return abs(x) ** 2


def to_complex(x) -> complex:
    return complex(x)


def exact_sqrt(q: Fraction) -> Fraction | None:
    """Square root of a nonnegative rational if it is rational, else None."""
    q = Fraction(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def parse_fraction(text) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int into an exact rational.

    Floats are rejected so that documents stay exact.
    """
    if isinstance(text, bool):
        raise ValueError(f"not a fraction: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise ValueError(f"not a fraction string: {text!r}")
    s = text.strip()
    if not s:
        raise ValueError("empty fraction string")
    try:
        value = Fraction(s)
    except ValueError:
        raise ValueError(f"not a fraction string: {text!r}") from None
    if "." in s or "e" in s.lower():
        raise ValueError(f"decimal notation is not exact: {text!r}")
    return value


def format_fraction(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def as_exact(x):
    """Normalize an exact scalar: Gaussian rationals with zero imaginary part
    become Fractions, ints become Fractions."""
    if isinstance(x, GaussianRational):
        return x.simplify()
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    return x
