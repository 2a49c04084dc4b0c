"""Truncated Laurent series over Q or Q(zeta3) and the level-one series E4, E6, Delta, j.

A series stores its coefficients as integer numerator lists (one per coordinate on the
basis {1, zeta3}) over a single positive common denominator.  Products go through
Kronecker substitution, so one series product is one big-integer product per coordinate
pair (three for Q(zeta3), Karatsuba style).
"""
from __future__ import annotations

import functools
import math
from fractions import Fraction
from typing import Iterable, Sequence

from .exactfield import Q, QZ3, FieldElement, FieldError

try:
    import gmpy2

    _mpz = gmpy2.mpz
except ImportError:  # pragma: no cover - exercised only without gmpy2
    gmpy2 = None
    _mpz = None

__all__ = [
    "LaurentSeries",
    "SeriesError",
    "level_one_series",
    "series_arith",
    "substitute_scaled_power",
]

_SCHOOLBOOK = 12


class SeriesError(ArithmeticError):
    pass


# ---------------------------------------------------------------- integer polys

def _pack(a: Sequence[int], nbytes: int) -> int:
    pos = b"".join((x if x > 0 else 0).to_bytes(nbytes, "little") for x in a)
    neg = b"".join((-x if x < 0 else 0).to_bytes(nbytes, "little") for x in a)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _unpack(x: int, nbytes: int, n: int) -> list[int]:
    nbits = 8 * nbytes
    raw = (x & ((1 << (nbits * n)) - 1)).to_bytes(nbytes * n, "little")
    half = 1 << (nbits - 1)
    full = 1 << nbits
    out = []
    carry = 0
    for i in range(0, nbytes * n, nbytes):
        u = int.from_bytes(raw[i:i + nbytes], "little") + carry
        if u >= half:
            u -= full
            carry = 1
        else:
            carry = 0
        out.append(u)
    return out


def _maxbits(a: Sequence[int]) -> int:
    return max(max(a), -min(a)).bit_length()


def _bigmul(x: int, y: int) -> int:
    if _mpz is None:
        return x * y
    return int(_mpz(x) * _mpz(y))


def mul_trunc(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """First n coefficients of the product of two integer polynomials."""
    a = a[:n]
    b = b[:n]
    if not a or not b:
        return [0] * n
    if min(len(a), len(b)) <= _SCHOOLBOOK:
        out = [0] * n
        if len(a) > len(b):
            a, b = b, a
        for i, x in enumerate(a):
            if x:
                for j in range(min(len(b), n - i)):
                    out[i + j] += x * b[j]
        return out
    ba = _maxbits(a)
    bb = _maxbits(b)
    if ba == 0 or bb == 0:
        return [0] * n
    bits = ba + bb + min(len(a), len(b)).bit_length() + 1
    nbytes = (bits + 7) // 8
    if a is b:
        xa = _pack(a, nbytes)
        prod = _bigmul(xa, xa)
    else:
        prod = _bigmul(_pack(a, nbytes), _pack(b, nbytes))
    m = min(n, len(a) + len(b) - 1)
    out = _unpack(prod, nbytes, m)
    if m < n:
        out.extend([0] * (n - m))
    return out


def _addv(a: Sequence[int], b: Sequence[int]) -> list[int]:
    return [x + y for x, y in zip(a, b)]


def _subv(a: Sequence[int], b: Sequence[int]) -> list[int]:
    return [x - y for x, y in zip(a, b)]


def _scalev(a: Sequence[int], k: int) -> list[int]:
    if k == 1:
        return list(a)
    return [x * k for x in a]


def _int_coords(x: FieldElement) -> tuple[int, int, int]:
    m = math.lcm(x.a.denominator, x.b.denominator)
    return x.a.numerator * (m // x.a.denominator), x.b.numerator * (m // x.b.denominator), m


# ---------------------------------------------------------------- series class

class LaurentSeries:
    """sum_{i = start}^{prec - 1} c_i q^i + O(q^prec) with exact coefficients."""

    __slots__ = ("field", "start", "prec", "_nums", "_den")

    def __init__(self, coeffs: Iterable = (), start: int = 0, prec: int | None = None,
                 field: str | None = None):
        elems = [FieldElement.coerce(c) for c in coeffs]
        if field is None:
            field = QZ3 if any(e.field == QZ3 for e in elems) else Q
        if prec is None:
            prec = start + len(elems)
        if prec <= start:
            raise SeriesError("truncation order must exceed the start exponent")
        length = prec - start
        elems = elems[:length] + [FieldElement.zero(field)] * (length - len(elems))
        den = 1
        for e in elems:
            den = math.lcm(den, e.a.denominator, e.b.denominator)
        nums = [[int(e.a * den) for e in elems]]
        if field == QZ3:
            nums.append([int(e.b * den) for e in elems])
        elif any(e.b for e in elems):
            raise FieldError("irrational coefficient in a series over Q")
        self._set(field, start, prec, nums, den)

    def _set(self, field, start, prec, nums, den):
        self.field = field
        self.start = start
        self.prec = prec
        self._nums = nums
        self._den = den
        self._normalize()

    @classmethod
    def _raw(cls, field: str, start: int, prec: int, nums: list[list[int]], den: int = 1
             ) -> "LaurentSeries":
        s = cls.__new__(cls)
        if prec <= start:
            raise SeriesError("truncation order must exceed the start exponent")
        s._set(field, start, prec, nums, den)
        return s

    @classmethod
    def from_ints(cls, nums: Sequence[int] | Sequence[Sequence[int]], den: int = 1, start: int = 0,
                  prec: int | None = None, field: str = Q) -> "LaurentSeries":
        if field == Q:
            rows = [list(nums)]
        else:
            rows = [list(nums[0]), list(nums[1])]
        n = len(rows[0])
        if prec is None:
            prec = start + n
        length = prec - start
        rows = [r[:length] + [0] * (length - len(r)) for r in rows]
        return cls._raw(field, start, prec, rows, den)

    @classmethod
    def constant(cls, c, prec: int, field: str | None = None, start: int = 0) -> "LaurentSeries":
        """c * q^start + O(q^prec)."""
        c = FieldElement.coerce(c)
        field = field or c.field
        return cls([c], start=start, prec=prec, field=field)

    @classmethod
    def monomial(cls, exponent: int, prec: int, c=1, field: str = Q) -> "LaurentSeries":
        return cls.constant(c, prec, field=field, start=exponent)

    @classmethod
    def zero(cls, prec: int, start: int = 0, field: str = Q) -> "LaurentSeries":
        return cls([], start=start, prec=prec, field=field)

    def _normalize(self):
        den = self._den
        if den < 0:
            den = -den
            self._nums = [[-x for x in r] for r in self._nums]
        if den != 1:
            g = den
            for r in self._nums:
                g = math.gcd(g, *r) if r else g
                if g == 1:
                    break
            if g != 1:
                self._nums = [[x // g for x in r] for r in self._nums]
                den //= g
        self._den = den

    # ------------------------------------------------------------ accessors
    @property
    def start_exponent(self) -> int:
        return self.start

    @property
    def trunc_order(self) -> int:
        return self.prec

    @property
    def denominator(self) -> int:
        return self._den

    def numerators(self) -> tuple[list[int], ...]:
        return tuple(list(r) for r in self._nums)

    def __len__(self):
        return self.prec - self.start

    def coeff(self, n: int) -> FieldElement:
        if n >= self.prec:
            raise SeriesError(f"coefficient q^{n} is beyond the truncation order {self.prec}")
        if n < self.start:
            return FieldElement.zero(self.field)
        i = n - self.start
        a = Fraction(self._nums[0][i], self._den)
        if self.field == Q:
            return FieldElement(a, 0, Q)
        return FieldElement(a, Fraction(self._nums[1][i], self._den), QZ3)

    __getitem__ = coeff

    @property
    def coeffs(self) -> list[FieldElement]:
        return [self.coeff(n) for n in range(self.start, self.prec)]

    def items(self):
        for n in range(self.start, self.prec):
            yield n, self.coeff(n)

    def valuation(self) -> int:
        """Exponent of the first nonzero coefficient (trunc order if none)."""
        length = self.prec - self.start
        for i in range(length):
            if any(r[i] for r in self._nums):
                return self.start + i
        return self.prec

    def is_zero(self) -> bool:
        return all(not any(r) for r in self._nums)

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        if self.prec != other.prec:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.prec, tuple(str(c) for c in self.coeffs)))

    def __repr__(self):
        terms = [f"({c})*q^{n}" for n, c in self.items() if not c.is_zero()][:6]
        return "LaurentSeries(" + " + ".join(terms) + f" + O(q^{self.prec}))"

    # ------------------------------------------------------------ structure
    def _with_field(self, field: str) -> "LaurentSeries":
        if field == self.field:
            return self
        if field == QZ3:
            return LaurentSeries._raw(QZ3, self.start, self.prec,
                                      [list(self._nums[0]), [0] * len(self)], self._den)
        if any(self._nums[1]):
            raise FieldError("series has irrational coefficients")
        return LaurentSeries._raw(Q, self.start, self.prec, [list(self._nums[0])], self._den)

    def to_field(self, field: str) -> "LaurentSeries":
        return self._with_field(field)

    def _rows(self, start: int, prec: int) -> list[list[int]]:
        """Numerator rows re-indexed to [start, prec), padding with zeros (no precision check)."""
        lo = self.start - start
        out = []
        for r in self._nums:
            if lo >= 0:
                row = [0] * lo + r
            else:
                row = r[-lo:]
            length = prec - start
            row = row[:length] + [0] * (length - len(row))
            out.append(row)
        return out

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by q^k."""
        return LaurentSeries._raw(self.field, self.start + k, self.prec + k,
                                  [list(r) for r in self._nums], self._den)

    def truncate(self, prec: int) -> "LaurentSeries":
        if prec > self.prec:
            raise SeriesError("truncate cannot raise the truncation order; use extend")
        if prec <= self.start:
            raise SeriesError("truncation below the start exponent")
        return LaurentSeries._raw(self.field, self.start, prec, self._rows(self.start, prec), self._den)

    def extend(self, prec: int) -> "LaurentSeries":
        """Declare the unknown coefficients up to prec to be zero (explicit precision lift)."""
        if prec < self.prec:
            return self.truncate(prec)
        return LaurentSeries._raw(self.field, self.start, prec, self._rows(self.start, prec), self._den)

    def with_start(self, start: int) -> "LaurentSeries":
        """Re-index storage to begin at `start`; dropped coefficients must be zero."""
        if start > self.start:
            drop = start - self.start
            if any(any(r[:drop]) for r in self._nums):
                raise SeriesError("cannot drop nonzero leading coefficients")
        return LaurentSeries._raw(self.field, start, self.prec, self._rows(start, self.prec), self._den)

    def conj(self) -> "LaurentSeries":
        if self.field == Q:
            return self
        a, b = self._nums
        return LaurentSeries._raw(QZ3, self.start, self.prec, [_subv(a, b), [-x for x in b]], self._den)

    def map_coefficients(self, f) -> "LaurentSeries":
        return LaurentSeries([f(c) for c in self.coeffs], start=self.start, prec=self.prec)

    # ------------------------------------------------------------ arithmetic
    def _unify(self, other: "LaurentSeries"):
        field = QZ3 if QZ3 in (self.field, other.field) else Q
        return self._with_field(field), other._with_field(field), field

    def __add__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            return self._add_scalar(FieldElement.coerce(other))
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        a, b, field = self._unify(other)
        start = min(a.start, b.start)
        prec = min(a.prec, b.prec)
        if prec <= start:
            raise SeriesError("sum has no known coefficients")
        den = math.lcm(a._den, b._den)
        fa, fb = den // a._den, den // b._den
        ra, rb = a._rows(start, prec), b._rows(start, prec)
        nums = [[x * fa + y * fb for x, y in zip(p, s)] for p, s in zip(ra, rb)]
        return LaurentSeries._raw(field, start, prec, nums, den)

    __radd__ = __add__

    def _add_scalar(self, c: FieldElement) -> "LaurentSeries":
        if self.prec <= 0:
            return self  # constant term lies beyond the truncation order
        return self + LaurentSeries.constant(c, prec=self.prec, start=0)

    def __neg__(self):
        return LaurentSeries._raw(self.field, self.start, self.prec,
                                  [[-x for x in r] for r in self._nums], self._den)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            return self._add_scalar(-FieldElement.coerce(other))
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "LaurentSeries":
        c = FieldElement.coerce(c)
        A, B, m = _int_coords(c)
        if B == 0:
            nums = [_scalev(r, A) for r in self._nums]
            return LaurentSeries._raw(self.field, self.start, self.prec, nums, self._den * m)
        s = self._with_field(QZ3)
        x0, x1 = s._nums
        n0 = [u * A - v * B for u, v in zip(x0, x1)]
        n1 = [u * B + v * A - v * B for u, v in zip(x0, x1)]
        return LaurentSeries._raw(QZ3, s.start, s.prec, [n0, n1], s._den * m)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            return self.scale(other)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        a, b, field = self._unify(other)
        va, vb = a.valuation(), b.valuation()
        start = a.start + b.start
        prec = min(a.prec + vb, b.prec + va)
        if prec <= start:
            raise SeriesError("product has no known coefficients")
        n = prec - start
        den = a._den * b._den
        if field == Q:
            nums = [mul_trunc(a._nums[0], b._nums[0], n)]
        else:
            a0, a1 = a._nums
            b0, b1 = b._nums
            a_rat = not any(a1)
            b_rat = not any(b1)
            if a_rat and b_rat:
                nums = [mul_trunc(a0, b0, n), [0] * n]
            elif a_rat:
                nums = [mul_trunc(a0, b0, n), mul_trunc(a0, b1, n)]
            elif b_rat:
                nums = [mul_trunc(a0, b0, n), mul_trunc(a1, b0, n)]
            else:
                if a is b:
                    p00 = mul_trunc(a0, a0, n)
                    p11 = mul_trunc(a1, a1, n)
                    s = _addv(a0, a1)
                    pss = mul_trunc(s, s, n)
                else:
                    p00 = mul_trunc(a0, b0, n)
                    p11 = mul_trunc(a1, b1, n)
                    pss = mul_trunc(_addv(a0, a1), _addv(b0, b1), n)
                # (a0 + a1 z)(b0 + b1 z) = p00 - p11 + (pss - p00 - 2 p11) z
                nums = [_subv(p00, p11), [s - x - 2 * y for s, x, y in zip(pss, p00, p11)]]
        return LaurentSeries._raw(field, start, prec, nums, den)

    __rmul__ = __mul__

    def square(self) -> "LaurentSeries":
        return self * self

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return LaurentSeries.constant(FieldElement.one(self.field),
                                          prec=max(1, self.prec - self.valuation()))
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def inverse(self) -> "LaurentSeries":
        v = self.valuation()
        if v >= self.prec:
            raise SeriesError("division by a series that is zero to its truncation order")
        rel = self.prec - v
        unit = self.shift(-v).with_start(0)
        c0 = unit.coeff(0)
        f = unit.scale(c0.inverse())
        g = LaurentSeries.constant(FieldElement.one(f.field), prec=1, field=f.field)
        p = 1
        while p < rel:
            p = min(2 * p, rel)
            fp = f.truncate(p)
            gp = g.extend(p)
            e = 1 - fp * gp
            g = (gp + gp * e).truncate(p)
        return g.scale(c0.inverse()).shift(-v)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            return self.scale(FieldElement.coerce(other).inverse())
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    # ------------------------------------------------------------ export
    def to_json(self) -> dict:
        return {
            "startExponent": self.start,
            "truncOrder": self.prec,
            "field": self.field,
            "coefficients": [c.to_text() for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LaurentSeries":
        coeffs = [FieldElement.from_text(t) for t in data["coefficients"]]
        return cls(coeffs, start=data["startExponent"], prec=data["truncOrder"], field=data.get("field"))


def series_arith(a: LaurentSeries, b: LaurentSeries, op: str) -> LaurentSeries:
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


def substitute_scaled_power(a: LaurentSeries, lam, w: int, N: int | None = None) -> LaurentSeries:
    """The series a(lam * qhat^w) in qhat, truncated at qhat^N (default: all known terms)."""
    lam = FieldElement.coerce(lam)
    if lam.is_zero():
        raise FieldError("lambda must be nonzero")
    if w < 1:
        raise ValueError("w must be positive")
    prec = w * a.prec if N is None else min(w * a.prec, N)
    start = w * a.start
    if prec <= start:
        raise SeriesError("target order leaves no known coefficients")
    field = QZ3 if QZ3 in (a.field, lam.field) else Q
    A, B, m = _int_coords(lam)
    top = (prec - 1 - start) // w + 1  # number of source coefficients used
    rows = a._with_field(field)._nums
    length = prec - start
    out = [[0] * length for _ in rows]
    # lam^k = (A + B z)^k / m^k; use integer powers scaled to the common denominator m^(top-1)
    # relative to the first exponent a.start, handling negative exponents via lam^start.
    base = FieldElement.coerce(lam) ** a.start
    bA, bB, bm = _int_coords(base)
    kmax = top - 1
    pa, pb = 1, 0  # (A + Bz)^k
    den_total = bm * m ** kmax
    for k in range(top):
        # coefficient factor: base * lam^k = (bA + bB z)(pa + pb z) / (bm m^k)
        fa = bA * pa - bB * pb
        fb = bA * pb + bB * pa - bB * pb
        scale = m ** (kmax - k)
        fa *= scale
        fb *= scale
        j = k * w
        x0 = rows[0][k]
        if field == Q:
            out[0][j] = x0 * fa
        else:
            x1 = rows[1][k]
            out[0][j] = x0 * fa - x1 * fb
            out[1][j] = x0 * fb + x1 * fa - x1 * fb
        pa, pb = pa * A - pb * B, pa * B + pb * A - pb * B
    return LaurentSeries._raw(field, start, prec, out, den_total * a._den)


# ---------------------------------------------------------------- level one

def _sigma_table(k: int, n: int) -> list[int]:
    s = [0] * n
    for d in range(1, n):
        dk = d ** k
        for m in range(d, n, d):
            s[m] += dk
    return s


@functools.lru_cache(maxsize=32)
def _level_one(N: int) -> dict[str, LaurentSeries]:
    M = N + 2
    s3 = _sigma_table(3, M)
    s5 = _sigma_table(5, M)
    e4 = [1] + [240 * s3[i] for i in range(1, M)]
    e6 = [1] + [-504 * s5[i] for i in range(1, M)]
    e4_3 = mul_trunc(mul_trunc(e4, e4, M), e4, M)
    e6_2 = mul_trunc(e6, e6, M)
    delta = []
    for x, y in zip(e4_3, e6_2):
        q, r = divmod(x - y, 1728)
        if r:
            raise AssertionError("E4^3 - E6^2 not divisible by 1728")
        delta.append(q)
    E4 = LaurentSeries.from_ints(e4)
    E6 = LaurentSeries.from_ints(e6)
    D = LaurentSeries.from_ints(delta)
    J = LaurentSeries.from_ints(e4_3) / D
    return {
        "E4": E4.truncate(N),
        "E6": E6.truncate(N),
        "Delta": D.truncate(N),
        "j": J.truncate(N),
    }


def level_one_series(which: str, N: int) -> LaurentSeries:
    """E4, E6, Delta or j with all coefficients of q^n, n < N."""
    if N < 1:
        raise ValueError("N must be at least 1")
    table = _level_one(N)
    if which not in table:
        raise ValueError(f"unknown level-one series {which!r}")
    return table[which]
