"""Eisenstein series for the index-7 groups: X(n, c), D(n, k), Fourier coefficients, exact g2,
the g4 ansatz and the X(1, c) statistics.

For a group of cusp width w at infinity,

    X(n, c) = sum_{D=1}^{w c} chi(c, D) e(n D / (w c)),      D(n, k) = sum_c X(n, c) / c^k,
    a_n = (2 pi i n / w)^k D(n, k) / (n (k - 1)!).

X(n, c) for small c is evaluated at the working precision with mpmath; beyond that the
compiled kernel returns doubles and a rounding bound is carried next to the truncation bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .exactfield import FieldElement
from .hauptmodul import load_constants, solve_hauptmodul
from .kernels import ChiKernel
from .permgroup import GroupDescriptor, get_group, reflection_offset
from .qseries import LaurentSeries, level_one_series, substitute_scaled_power

__all__ = [
    "ComplexHP",
    "PartialSum",
    "EisensteinCoefficient",
    "make_kernel",
    "x_values",
    "X_sum",
    "D_partial",
    "truncation_bound",
    "eisenstein_coefficient",
    "u_branch",
    "g2_exact",
    "g4_series",
    "g4_fit_and_predict",
    "totients",
    "stats_scan",
    "TABLE9",
]

MIN_PRECISION = 15
EXACT_C = 256          # X(n, c) for c <= EXACT_C is summed at the working precision
KERNEL_EPS = 1e-15     # per-term rounding allowance of the double kernel, times w*c

# Table 9: a_n / u^n of g4 for G1, as printed (string keeps every digit)
TABLE9 = {
    1: "40.7303189636318364926",
    2: "303.7319312003984",
    3: "-1113445.924994532325",
    4: "-101378021.6026120116",
    5: "-4677356098.49752275",
    6: "110516113983.5601513",
    7: "10622672944963.34244",
    8: "703827515349172.972",
    9: "20587451911329502.7",
    10: "54985771355001805.6",
}


def _check_precision(P: int) -> int:
    P = int(P)
    if P < MIN_PRECISION:
        raise ValueError(f"precision must be at least {MIN_PRECISION} digits, got {P}")
    return P


class ComplexHP:
    """A complex number carried at P decimal digits."""

    __slots__ = ("value", "precision")

    def __init__(self, value, precision: int = 30):
        self.precision = _check_precision(precision)
        with mpmath.workdps(self.precision):
            self.value = mpmath.mpc(value)

    @property
    def real(self):
        return self.value.real

    @property
    def imag(self):
        return self.value.imag

    def _wrap(self, v, other=None):
        p = self.precision if other is None else min(self.precision, other.precision)
        return ComplexHP(v, p)

    def __add__(self, o):
        o = o if isinstance(o, ComplexHP) else ComplexHP(o, self.precision)
        with mpmath.workdps(self.precision):
            return self._wrap(self.value + o.value, o)

    def __sub__(self, o):
        o = o if isinstance(o, ComplexHP) else ComplexHP(o, self.precision)
        with mpmath.workdps(self.precision):
            return self._wrap(self.value - o.value, o)

    def __mul__(self, o):
        o = o if isinstance(o, ComplexHP) else ComplexHP(o, self.precision)
        with mpmath.workdps(self.precision):
            return self._wrap(self.value * o.value, o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = o if isinstance(o, ComplexHP) else ComplexHP(o, self.precision)
        with mpmath.workdps(self.precision):
            return self._wrap(self.value / o.value, o)

    def __abs__(self):
        with mpmath.workdps(self.precision):
            return abs(self.value)

    def conjugate(self) -> "ComplexHP":
        return ComplexHP(mpmath.conj(self.value), self.precision)

    def __complex__(self):
        return complex(self.value)

    def __repr__(self):
        return f"ComplexHP({self.to_strings()})"

    def to_strings(self) -> tuple[str, str]:
        return (mpmath.nstr(self.value.real, self.precision, min_fixed=-math.inf, max_fixed=math.inf),
                mpmath.nstr(self.value.imag, self.precision, min_fixed=-math.inf, max_fixed=math.inf))

    def to_json(self) -> dict:
        re, im = self.to_strings()
        return {"re": re, "im": im, "precision": self.precision}


@dataclass
class PartialSum:
    """S_N = sum_{c <= N} X(n, c) / c^k with its error bounds.

    ``error_bound`` is the truncation bound w / ((k - 2) N^(k - 2)) (infinite for N = 0 and
    for k = 2, where it is only heuristic); ``rounding_bound`` covers the double-precision
    kernel terms.
    """

    n: int
    k: int
    N: int
    value: ComplexHP
    error_bound: float
    chunk_size: int
    precision: int
    rounding_bound: float = 0.0
    heuristic: bool = False
    group_id: str = "G1"

    @property
    def total_bound(self) -> float:
        return self.error_bound + self.rounding_bound

    def to_json(self) -> dict:
        return {
            "groupId": self.group_id,
            "n": self.n,
            "k": self.k,
            "N": self.N,
            "chunkSize": self.chunk_size,
            "precision": self.precision,
            "value": self.value.to_json(),
            "errorBound": _bound_text(self.error_bound),
            "roundingBound": _bound_text(self.rounding_bound),
            "heuristic": self.heuristic,
        }


@dataclass
class EisensteinCoefficient:
    n: int
    k: int
    value: ComplexHP
    error_bound: float
    derived_from: PartialSum = field(repr=False)

    def normalized(self, u) -> ComplexHP:
        """a_n / u^n for a chosen numeric branch of u."""
        with mpmath.workdps(self.value.precision):
            return ComplexHP(self.value.value / mpmath.mpc(u) ** self.n, self.value.precision)

    def normalized_bound(self, u) -> float:
        return self.error_bound / float(abs(mpmath.mpc(u))) ** self.n

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "value": self.value.to_json(),
            "errorBound": _bound_text(self.error_bound),
            "constantTerm": "1",
        }


def _bound_text(x: float) -> str:
    return "inf" if math.isinf(x) else repr(float(x))


# ---------------------------------------------------------------- X(n, c)

def make_kernel(g: GroupDescriptor | str, kernel_class=None, **kw):
    """A chi kernel for the stabilizer of the basepoint of ``g``."""
    g = get_group(g) if isinstance(g, str) else g
    cls = kernel_class or ChiKernel
    s = [g.phi_s(i + 1) - 1 for i in range(7)]
    t = [g.phi_t(i + 1) - 1 for i in range(7)]
    return cls(s, t, g.basepoint - 1, g.width, reflection_offset(g), **kw)


def x_values(g, ns, c_lo: int, c_hi: int, threads: int = 1, kernel=None) -> np.ndarray:
    """Double-precision X(n, c) for n in ns, c_lo <= c <= c_hi; shape (len(ns), count)."""
    if c_hi < c_lo:
        return np.zeros((len(ns), 0), dtype=np.complex128)
    kernel = kernel or make_kernel(g)
    return kernel.x_values(int(c_lo), int(c_hi), [int(n) for n in ns], int(threads))


def _x_mp(row: np.ndarray, n: int, c: int, w: int) -> mpmath.mpc:
    """X(n, c) from a chi row, summed at the current mpmath precision."""
    M = w * c
    acc = mpmath.mpc(0)
    for D in np.nonzero(row)[0]:
        m = (n * (int(D) + 1)) % M
        acc += mpmath.expjpi(mpmath.mpf(2 * m) / M)
    return acc


def X_sum(n: int, c: int, g: GroupDescriptor | str = "G1", P: int = 30, kernel=None) -> ComplexHP:
    """X(n, c) at P digits; the chi row is reused for all w offsets D = d + j c."""
    P = _check_precision(P)
    if n < 1 or c < 1:
        raise ValueError("X_sum needs n >= 1 and c >= 1")
    g = get_group(g) if isinstance(g, str) else g
    kernel = kernel or make_kernel(g)
    row = kernel.chi_row(int(c))
    with mpmath.workdps(P + 10):
        return ComplexHP(_x_mp(row, int(n), int(c), g.width), P)


# ---------------------------------------------------------------- D(n, k)

def truncation_bound(k: int, N: int, w: int = 4) -> float:
    """sum_{c > N} |X(n, c)| / c^k <= w / ((k - 2) N^(k - 2)), using |X| <= w c."""
    if N <= 0 or k <= 2:
        return math.inf
    return w / ((k - 2) * float(N) ** (k - 2))


def D_partial(n: int, k: int, N: int, chunk_size: int = 4096, P: int = 30,
              g: GroupDescriptor | str = "G1", threads: int = 1, xvals=None,
              kernel=None) -> PartialSum:
    """sum_{c=1}^N X(n, c)/c^k, folded in ascending chunks of c.

    ``xvals`` may supply precomputed double X(n, c) for c = 1..len(xvals); entries with
    c <= EXACT_C are recomputed at the working precision regardless.
    """
    P = _check_precision(P)
    if k < 2:
        raise ValueError("k must be at least 2")
    if chunk_size < 1:
        raise ValueError("chunk_size must be positive")
    g = get_group(g) if isinstance(g, str) else g
    w = g.width
    heuristic = k < 4
    if N <= 0:
        return PartialSum(n, k, 0, ComplexHP(0, P), math.inf, chunk_size, P, 0.0, heuristic, g.id)
    kernel = kernel or make_kernel(g)
    dps = P + 10
    total = mpmath.mpc(0)
    with mpmath.workdps(dps):
        for lo in range(1, N + 1, chunk_size):
            hi = min(N, lo + chunk_size - 1)
            chunk = mpmath.mpc(0)
            e_hi = min(hi, EXACT_C)
            for c in range(lo, e_hi + 1):
                chunk += _x_mp(kernel.chi_row(c), n, c, w) / mpmath.mpf(c) ** k
            if hi > EXACT_C:
                a = max(lo, EXACT_C + 1)
                if xvals is not None and len(xvals) >= hi:
                    xs = np.asarray(xvals[a - 1:hi])
                else:
                    xs = x_values(g, [n], a, hi, threads, kernel)[0]
                re = mpmath.fsum(mpmath.mpf(float(x.real)) / mpmath.mpf(c) ** k
                                 for c, x in zip(range(a, hi + 1), xs))
                im = mpmath.fsum(mpmath.mpf(float(x.imag)) / mpmath.mpf(c) ** k
                                 for c, x in zip(range(a, hi + 1), xs))
                chunk += mpmath.mpc(re, im)
            total += chunk
    rounding = 0.0
    if N > EXACT_C:
        rounding = KERNEL_EPS * w / ((k - 2) * float(EXACT_C) ** (k - 2)) if k > 2 else math.inf
    bound = truncation_bound(k, N, w)
    return PartialSum(n, k, N, ComplexHP(total, P), bound, chunk_size, P, rounding, heuristic, g.id)


def eisenstein_coefficient(n: int, k: int, N: int, P: int = 30, g="G1", chunk_size: int = 4096,
                           threads: int = 1, xvals=None, partial: PartialSum | None = None
                           ) -> EisensteinCoefficient:
    """a_n of g_k = 1 + sum_n a_n q_w^n from a partial sum of D(n, k)."""
    if k < 4 or k % 2:
        raise ValueError("k must be even and at least 4")
    g = get_group(g) if isinstance(g, str) else g
    if partial is None:
        partial = D_partial(n, k, N, chunk_size, P, g, threads, xvals)
    w = g.width
    with mpmath.workdps(partial.precision + 10):
        factor = (2 * mpmath.pi * 1j * n / w) ** k / (n * mpmath.factorial(k - 1))
        value = factor * partial.value.value
        bound = float(abs(factor)) * partial.total_bound
    return EisensteinCoefficient(n, k, ComplexHP(value, partial.precision), bound, partial)


def u_branch(group_id: str, target=None, P: int = 30):
    """A numeric value of u with u^w equal to the stored u^w.

    Without ``target`` this is the principal root.  With ``target`` (a numeric a_1), the
    root making target/u a positive real is chosen, as the phase of a_1 / u fixes it.
    """
    ud, _ = load_constants(group_id)
    w = ud.base_power
    with mpmath.workdps(P + 10):
        uw = ud.u_power_in_base
        zeta = mpmath.mpc(-0.5, mpmath.sqrt(3) / 2)
        val = mpmath.mpf(uw.a.numerator) / uw.a.denominator \
            + zeta * mpmath.mpf(uw.b.numerator) / uw.b.denominator
        root = mpmath.root(mpmath.mpc(val), w)
        if target is None:
            return root
        roots = [root * mpmath.expjpi(mpmath.mpf(2 * j) / w) for j in range(w)]
        return min(roots, key=lambda r: abs(mpmath.arg(mpmath.mpc(target) / r)))


# ---------------------------------------------------------------- exact weight 2 and the g4 ansatz

def _normalized_parts(group_id: str, N: int):
    """Y = qhat*zhat mod qhat^(N+1) and the pulled-back level-one series."""
    ud, jd = load_constants(group_id)
    z = solve_hauptmodul(group_id, max(N, 1)).series
    Y = z.shift(1).truncate(N + 1)
    return ud, jd, Y


def _pullback(series_name_or_series, ud, N: int) -> LaurentSeries:
    w = ud.base_power
    K = N // w + 2
    src = series_name_or_series
    if isinstance(src, str):
        src = level_one_series(src, K)
    return substitute_scaled_power(src, ud.lam, w, N + 1)


def _lin(Y: LaurentSeries, c: FieldElement, k: int) -> LaurentSeries:
    if k >= Y.prec:
        return Y
    return Y + LaurentSeries.monomial(k, Y.prec, c, field=c.field)


def g2_exact(group_id: str, N: int) -> LaurentSeries:
    """Normalized coefficients a_n / u^n, 0 <= n <= N, of g2 = E6 e3 f3 / (E4 f2).

    In Y = qhat*zhat the u-weights cancel: e3 f3 / f2 = E3 F3 / F2 with E3 = Y + c4 qhat etc.
    """
    ud, jd, Y = _normalized_parts(group_id, N)
    c = jd.c
    K = N // ud.base_power + 2
    E6_E4 = level_one_series("E6", K) / level_one_series("E4", K)
    pulled = _pullback(E6_E4, ud, N)
    E3 = _lin(Y, c[3], 1)
    F3 = Y * _lin(Y, c[1], 1) + _mono(c[2], 2, Y.prec)
    F2 = Y * (Y * _lin(Y, c[4], 1) + _mono(c[5], 2, Y.prec)) + _mono(c[6], 3, Y.prec)
    return (pulled * E3 * F3 / F2).truncate(N + 1)


def _mono(c, k, prec):
    if k >= prec:
        return LaurentSeries.zero(prec, field=c.field)
    return LaurentSeries.monomial(k, prec, c, field=c.field)


def g4_series(group_id: str, N: int) -> tuple[LaurentSeries, LaurentSeries]:
    """(alpha, beta) with g4 = E4 * a1 (z - C u) / f3 normalized as alpha - C beta.

    a1 (z - Cu) / f3 = ahat1 (zhat - C) / fhat3 = A (Y - C qhat) / F3 in Y = qhat*zhat.
    """
    ud, jd, Y = _normalized_parts(group_id, N)
    c = jd.c
    E4 = _pullback("E4", ud, N)
    A = _lin(Y, c[0], 1)
    F3 = Y * _lin(Y, c[1], 1) + _mono(c[2], 2, Y.prec)
    base = E4 * A / F3
    alpha = (base * Y).truncate(N + 1)
    beta = (base * LaurentSeries.monomial(1, Y.prec + 1)).truncate(N + 1)
    return alpha, beta


def g4_fit_and_predict(a1_normalized, a1_bound: float, N_pred: int = 10, group_id: str = "G1",
                       P: int = 30) -> dict:
    """Fit C from a numeric a_1/u and predict a_n/u^n for n <= N_pred.

    The fit is exact in a_1; every prediction carries |beta_n| / |beta_1| times the a_1
    error.  The condition estimate is max |beta_n| / |beta_1|.
    """
    alpha, beta = g4_series(group_id, N_pred)
    with mpmath.workdps(P + 10):
        a1 = mpmath.mpf(mpmath.re(mpmath.mpmathify(a1_normalized)))
        b1 = _fe_to_mp(beta.coeff(1))
        if abs(b1) == 0:
            raise ValueError("ill-conditioned fit: beta_1 = 0")
        C = (_fe_to_mp(alpha.coeff(1)) - a1) / b1
        rows = []
        cond = 0.0
        for n in range(0, N_pred + 1):
            an = _fe_to_mp(alpha.coeff(n)) - C * _fe_to_mp(beta.coeff(n))
            ratio = float(abs(_fe_to_mp(beta.coeff(n)) / b1))
            cond = max(cond, ratio)
            rows.append({
                "n": n,
                "predicted": mpmath.nstr(an, P, min_fixed=-math.inf, max_fixed=math.inf),
                "bound": ratio * a1_bound,
                "alpha": alpha.coeff(n).to_text(),
                "beta": beta.coeff(n).to_text(),
            })
            if n in TABLE9:
                tab = mpmath.mpf(TABLE9[n])
                rows[-1]["table"] = TABLE9[n]
                rows[-1]["deviation"] = float(abs(an - tab))
        return {
            "groupId": group_id,
            "C": mpmath.nstr(C, P, min_fixed=-math.inf, max_fixed=math.inf),
            "a1Input": mpmath.nstr(a1, P, min_fixed=-math.inf, max_fixed=math.inf),
            "a1Bound": a1_bound,
            "conditionEstimate": cond,
            "fitResidual": float(abs(_fe_to_mp(alpha.coeff(1)) - C * b1 - a1)),
            "rows": rows,
        }


def _fe_to_mp(x: FieldElement):
    if x.b:
        raise ValueError("expected a rational coefficient")
    return mpmath.mpf(x.a.numerator) / x.a.denominator


# ---------------------------------------------------------------- statistics

def totients(n: int) -> np.ndarray:
    """phi(0..n) by a sieve."""
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


BANDS = {
    "+-2": (2, 10),
    "6": (6,),
    "+-5": (5, 7),
    "+-3": (3, 9),
    "+-1": (1, 11),
    "0": (0,),
    "+-4": (4, 8),
}


def stats_scan(n_list=(1,), c_max: int = 200000, P: int = 30, g="G1", threads: int = 1,
               xvals=None, bins: int = 40) -> dict:
    """Per-c records of X(n, c), the normalized values and the |X(1, c)| >= c^(5/7) exceptions.

    ``xvals`` may supply precomputed rows (shape (len(n_list), c_max)).
    """
    _check_precision(P)
    if c_max < 12:
        raise ValueError("c_max must be at least 12")
    g = get_group(g) if isinstance(g, str) else g
    ns = [int(n) for n in n_list]
    X = xvals if xvals is not None else x_values(g, ns, 1, c_max, threads)
    X = np.asarray(X)[:, :c_max]
    c = np.arange(1, c_max + 1, dtype=np.float64)
    phi = totients(c_max)[1:].astype(np.float64)
    records = {}
    summary = {}
    for i, n in enumerate(ns):
        x = X[i]
        rot = x * np.exp(-1j * np.pi * n / 4)
        ax = np.abs(x)
        norm27 = (rot * c ** (2 / 7) / phi).real
        norm12 = (rot * c ** 0.5 / phi).real
        exc = ax >= c ** (5 / 7)
        records[n] = {
            "c": np.arange(1, c_max + 1),
            "c_mod_12": np.arange(1, c_max + 1) % 12,
            "re": x.real, "im": x.imag, "abs": ax,
            "norm27": norm27, "norm12": norm12, "is_exception": exc,
        }
        bands = {}
        for name, residues in BANDS.items():
            mask = np.isin(np.arange(1, c_max + 1) % 12, residues)
            vals27, vals12 = norm27[mask], norm12[mask]
            hist, edges = np.histogram(vals27, bins=bins)
            bands[name] = {
                "count": int(mask.sum()),
                "norm27Mean": float(vals27.mean()), "norm27Std": float(vals27.std()),
                "norm12Mean": float(vals12.mean()), "norm12Std": float(vals12.std()),
                "histogram27": hist.tolist(), "edges27": edges.tolist(),
            }
        summary[n] = {
            "exceptions": [int(v) for v in np.nonzero(exc)[0] + 1],
            "maxPhaseResidual": float(np.max(np.abs(rot.imag))),
            "bands": bands,
        }
    return {"groupId": g.id, "cMax": c_max, "records": records, "summary": summary}


def write_stats_csv(dataset: dict, n: int, path) -> None:
    rec = dataset["records"][n]
    cols = ["c", "c_mod_12", "re", "im", "abs", "norm27", "norm12", "is_exception"]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in zip(*(rec[k] for k in cols)):
            c, m, re, im, ab, n27, n12, ex = row
            vals = ",".join(repr(float(v)) for v in (re, im, ab, n27, n12))
            fh.write(f"{int(c)},{int(m)},{vals},{int(bool(ex))}\n")
