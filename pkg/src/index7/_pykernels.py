"""Pure-Python implementation of the chi / X(n, c) kernels.

Same interface and the same continued-fraction walk as the compiled kernel, without the
memo table or the reflection shortcut, so it doubles as an independent check on both.
"""
from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


class ChiKernel:
    """Indicator chi(c, d) and sums X(n, c) for the stabiliser of a point.

    ``s`` and ``t`` are 0-based image lists of phi(S), phi(T); ``basepoint`` is 0-based.
    """

    backend = BACKEND

    def __init__(self, s, t, basepoint: int, width: int, reflect=None, memo_limit: int = 0,
                 threads: int = 1):
        self.s = list(s)
        self.width = int(width)
        self.basepoint = int(basepoint)
        self.reflect = reflect
        self.memo_limit = 0
        tp = [list(range(7))]
        while True:
            nxt = [t[x] for x in tp[-1]]
            if nxt == tp[0]:
                break
            tp.append(nxt)
        self.tpow = tp
        self.order = len(tp)
        orbit = [self.basepoint]
        for _ in range(self.width - 1):
            orbit.append(t[orbit[-1]])
        self.orbit = frozenset(orbit)

    # one continued-fraction walk for the w values D = d + k c, 1 <= d <= c
    def _block(self, c: int, d: int) -> list[int]:
        s, tp, order, w = self.s, self.tpow, self.order, self.width
        q0, r = divmod(d, c)
        b = self.basepoint
        pts = [tp[(q0 + k) % order][b] for k in range(w)]
        cc, dd = c, r
        while True:
            if dd == 0:
                if cc != 1:
                    return [0] * w
                pts = [s[p] for p in pts]
                return [int(p in self.orbit) for p in pts]
            pts = [s[p] for p in pts]
            nc, nd = dd, -cc
            q = _trunc_div(nd, nc)
            nd -= q * nc
            e = q % order
            tq = tp[e]
            pts = [tq[p] for p in pts]
            if nc < 0:
                nc, nd = -nc, -nd
            cc, dd = nc, nd

    def chi(self, c: int, d: int) -> int:
        if c < 0:
            c, d = -c, -d
        if c == 0:
            return int(abs(d) == 1)
        if math.gcd(c, d) != 1:
            return 0
        D = (d - 1) % (self.width * c) + 1
        k, dd = divmod(D - 1, c)
        return self._block(c, dd + 1)[k]

    def chi_row(self, c: int) -> np.ndarray:
        """chi(c, D) for D = 1..w c as a uint8 array."""
        w = self.width
        row = np.zeros(w * c, dtype=np.uint8)
        for d in range(1, c + 1):
            bits = self._block(c, d)
            for k in range(w):
                row[d - 1 + k * c] = bits[k]
        return row

    def x_values(self, c_lo: int, c_hi: int, ns, threads: int = 1) -> np.ndarray:
        """X(n, c) for n in ns and c_lo <= c <= c_hi, shape (len(ns), c_hi - c_lo + 1)."""
        ns = [int(n) for n in ns]
        out = np.zeros((len(ns), c_hi - c_lo + 1), dtype=np.complex128)
        w = self.width
        for j, c in enumerate(range(c_lo, c_hi + 1)):
            row = self.chi_row(c)
            D = np.nonzero(row)[0].astype(np.int64) + 1
            M = w * c
            for i, n in enumerate(ns):
                m = (n * D) % M
                ang = 2.0 * np.pi * m / M
                out[i, j] = complex(math.fsum(np.cos(ang)), math.fsum(np.sin(ang)))
        return out


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q
