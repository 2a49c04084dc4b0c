"""Exact arithmetic in Q and Q(zeta3), 7-adic valuations and reduction modulo a prime over 7.

Elements of Q(zeta3) are stored on the power basis {1, z} with z = zeta3, z^2 = -1 - z.
Over Q(zeta3) the rational prime 7 splits as (1 + 3z)(-2 - 3z); the two primes are
labelled by the residue of z in F_7 (2 or 4).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Q = "Q"
QZ3 = "QZeta3"
FIELDS = (Q, QZ3)

INFINITY = math.inf

Scalar = Union[int, Fraction]


class FieldError(ArithmeticError):
    """Raised for invalid field operations (division by zero, bad reduction, mixed input)."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


class FieldElement:
    """An element a + b*zeta3 of Q or Q(zeta3) with rational coordinates."""

    __slots__ = ("field", "a", "b")

    def __init__(self, a: Scalar = 0, b: Scalar = 0, field: str | None = None):
        a = _frac(a)
        b = _frac(b)
        if field is None:
            field = Q if b == 0 else QZ3
        if field not in FIELDS:
            raise FieldError(f"unknown field {field!r}")
        if field == Q and b != 0:
            raise FieldError("element of Q cannot have a zeta3 coordinate")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    # constructors
    @classmethod
    def zeta3(cls) -> "FieldElement":
        return cls(0, 1, QZ3)

    @classmethod
    def one(cls, field: str = Q) -> "FieldElement":
        return cls(1, 0, field)

    @classmethod
    def zero(cls, field: str = Q) -> "FieldElement":
        return cls(0, 0, field)

    @classmethod
    def coerce(cls, x, field: str | None = None) -> "FieldElement":
        if isinstance(x, FieldElement):
            if field is None or field == x.field:
                return x
            if field == QZ3:
                return cls(x.a, x.b, QZ3)
            if x.b != 0:
                raise FieldError("cannot coerce an irrational element into Q")
            return cls(x.a, 0, Q)
        return cls(_frac(x), 0, field or Q)

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return (self.a,) if self.field == Q else (self.a, self.b)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    # arithmetic
    def _other(self, other) -> "FieldElement | None":
        if isinstance(other, FieldElement):
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(other, 0, self.field)
        return None

    @staticmethod
    def _join(x: "FieldElement", y: "FieldElement") -> str:
        return Q if x.field == Q and y.field == Q else QZ3

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.a + o.a, self.b + o.b, self._join(self, o))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.a, -self.b, self.field)

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.a - o.a, self.b - o.b, self._join(self, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        field = self._join(self, o)
        if self.b == 0:
            return FieldElement(self.a * o.a, self.a * o.b, field)
        if o.b == 0:
            return FieldElement(self.a * o.a, self.b * o.a, field)
        # (a + bz)(c + dz) = ac - bd + (ad + bc - bd) z
        bd = self.b * o.b
        return FieldElement(self.a * o.a - bd, self.a * o.b + self.b * o.a - bd, field)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """a^2 - ab + b^2, the norm of a + b*zeta3 down to Q."""
        return self.a * self.a - self.a * self.b + self.b * self.b

    def conj(self) -> "FieldElement":
        """The nontrivial automorphism zeta3 -> zeta3^2 (identity on Q)."""
        if self.field == Q:
            return self
        return FieldElement(self.a - self.b, -self.b, QZ3)

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise FieldError("division by zero")
        if self.b == 0:
            return FieldElement(1 / self.a, 0, self.field)
        n = self.norm()
        c = self.conj()
        return FieldElement(c.a / n, c.b / n, QZ3)

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = FieldElement(1, 0, self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b)) if self.b else hash(self.a)

    def __repr__(self):
        return f"FieldElement({self.to_text()!r})"

    def __str__(self):
        return self.to_text()

    # text encoding
    def to_text(self) -> str:
        s = f"{self.a.numerator}/{self.a.denominator}"
        if self.field == QZ3:
            sign = "-" if self.b < 0 else "+"
            s += f"{sign}{abs(self.b.numerator)}/{self.b.denominator}*z3"
        return s

    @classmethod
    def from_text(cls, text: str) -> "FieldElement":
        m = _TEXT_RE.fullmatch(text.strip())
        if not m:
            raise FieldError(f"malformed field element {text!r}")
        a = Fraction(int(m["an"]), int(m["ad"]))
        if m["bn"] is None:
            return cls(a, 0, Q)
        b = Fraction(int(m["bn"]), int(m["bd"]))
        return cls(a, -b if m["sign"] == "-" else b, QZ3)

    def to_complex(self) -> complex:
        z = complex(-0.5, math.sqrt(3) / 2)
        return float(self.a) + float(self.b) * z


_TEXT_RE = re.compile(r"(?P<an>-?\d+)/(?P<ad>\d+)(?:(?P<sign>[+-])(?P<bn>\d+)/(?P<bd>\d+)\*z3)?")

ZETA3 = FieldElement.zeta3()


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Binary operation by name; both operands must share a field tag."""
    if a.field != b.field:
        raise FieldError(f"field mismatch: {a.field} vs {b.field}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def _v7_int(n: int) -> int:
    v = 0
    while n % 7 == 0:
        n //= 7
        v += 1
    return v


def valuation7(x) -> float | int:
    """Exponent of 7 in a rational number; +inf for 0."""
    x = _frac(x) if not isinstance(x, FieldElement) else x.a
    if x == 0:
        return INFINITY
    return _v7_int(x.numerator) - _v7_int(x.denominator)


# Generators of the two primes over 7, keyed by the residue of zeta3.
# pi(r) = A + B z vanishes under z -> r.
PRIME_GENERATORS = {2: (1, 3), 4: (-2, -3)}


@dataclass(frozen=True)
class PrimeReduction:
    """Reduction Z[zeta3] -> F_7 (or Z -> F_7) at a chosen prime over 7."""

    field: str = Q
    residue: int | None = None

    def __post_init__(self):
        if self.field == QZ3:
            if self.residue not in (2, 4):
                raise FieldError("residue must be 2 or 4 for Q(zeta3)")
        elif self.residue is not None:
            raise FieldError("a residue only makes sense over Q(zeta3)")

    @property
    def other(self) -> "PrimeReduction":
        if self.field == Q:
            return self
        return PrimeReduction(QZ3, 6 - self.residue)

    def valuation(self, x) -> float | int:
        return prime_valuation(FieldElement.coerce(x), self)

    def is_integral(self, x) -> bool:
        return is_integral(FieldElement.coerce(x), self)

    def reduce(self, x) -> int:
        return reduce_mod_prime7(FieldElement.coerce(x), self)


def _common_den(x: FieldElement) -> tuple[int, int, int]:
    """Return (A, B, m) with x = (A + B z)/m, m > 0 minimal."""
    m = math.lcm(x.a.denominator, x.b.denominator)
    return x.a.numerator * (m // x.a.denominator), x.b.numerator * (m // x.b.denominator), m


def _div_pi(A: int, B: int, r: int) -> tuple[int, int]:
    # divide A + Bz by pi_r, assuming divisibility: multiply by conj(pi_r) = pi_{6-r}, then by 1/7
    pa, pb = PRIME_GENERATORS[6 - r]
    bd = B * pb
    na = A * pa - bd
    nb = A * pb + B * pa - bd
    return na // 7, nb // 7


def _pi_adic(A: int, B: int, r: int, limit: int | None = None) -> tuple[int, int, int]:
    """Strip factors of pi_r from A + B z; stop after `limit` steps if given."""
    v = 0
    while (A + B * r) % 7 == 0 and (limit is None or v < limit):
        A, B = _div_pi(A, B, r)
        v += 1
    return A, B, v


def prime_valuation(x: FieldElement, pr: PrimeReduction) -> float | int:
    if x.is_zero():
        return INFINITY
    if pr.field == Q:
        if x.b != 0:
            raise FieldError("valuation over Q of an irrational element")
        return valuation7(x.a)
    A, B, m = _common_den(x)
    _, _, v = _pi_adic(A, B, pr.residue)
    # 7 = pi_2 * pi_4 (up to unit), so each factor 7 in m costs one unit of valuation
    return v - _v7_int(m)


def is_integral(x: FieldElement, pr: PrimeReduction) -> bool:
    """True iff x lies in the local ring at pr."""
    if x.is_zero():
        return True
    A, B, m = _common_den(x)
    k = _v7_int(m)
    if k == 0:
        return True
    if pr.field == Q:
        if x.b != 0:
            raise FieldError("Q-reduction of an irrational element")
        return False
    _, _, v = _pi_adic(A, B, pr.residue, limit=k)
    return v >= k


def reduce_mod_prime7(x: FieldElement, pr: PrimeReduction) -> int:
    """Image of a pr-integral element in F_7 = {0..6}."""
    if pr.field == Q:
        if x.b != 0:
            raise FieldError("Q-reduction of an irrational element")
        n, d = x.a.numerator, x.a.denominator
        if d % 7 == 0:
            raise FieldError(f"{x} is not 7-integral")
        return n * pow(d, -1, 7) % 7
    r = pr.residue
    A, B, m = _common_den(x)
    k = _v7_int(m)
    m7 = m // 7**k
    if k:
        A, B, v = _pi_adic(A, B, r, limit=k)
        if v < k:
            raise FieldError(f"{x} is not integral at the prime with residue {r}")
        # 7 = pi * pibar exactly, so x = (alpha / pi^k) / (pibar^k * m7)
        pa, pb = PRIME_GENERATORS[6 - r]
        pibar = (pa + pb * r) % 7
        den = m7 * pow(pibar, k, 7) % 7
    else:
        den = m7 % 7
    return (A + B * r) * pow(den, -1, 7) % 7
