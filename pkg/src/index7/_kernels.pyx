# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled chi / X(n, c) kernels.

For fixed c the values D = d + k c (k = 0..w-1) share one continued-fraction walk; only
the first T-power differs, so the w starting points are tracked through a single walk and
the result is a w-bit mask.  Walks stop early at a table memo[a][r] (|r| < a <= L) whose
bit j says whether a point j entering state (a, r) ends in the T-orbit of the base point.
When psi(G_b) = G_{t^a(b)} the mask at c - d is a fixed permutation of the mask at d.

Since e(n (d + k c) / (w c)) = e(n d / (w c)) zeta_w^(n k), a whole block contributes
e(n d / (w c)) times a tabulated pattern sum over the mask.
"""
import numpy as np

from cython.parallel cimport prange
from libc.math cimport cos, sin, M_PI
from libc.stdlib cimport free, malloc

BACKEND = "cython"

cdef enum:
    MAXW = 8
    MAXORD = 16
    QT = 64              # |q| <= QT uses the residue table


cdef struct Tables:
    int st[MAXORD][7]     # st[e][x] = t^e(s(x))
    int tp[MAXORD][7]     # tp[e][x] = t^e(x)
    int tpb[MAXW + 1]     # t^j(b)
    int qmod[2 * QT + 1]  # q mod order for |q| <= QT
    int refl[1 << MAXW]   # mask at c - d from the mask at d
    int order
    int w
    int b
    int orbit_mask
    int reflect           # -1 if unavailable
    int L
    int stride            # 2 L + 1
    unsigned char *memo


cdef inline int _popcount(int m) noexcept nogil:
    cdef int n = 0
    while m:
        n += m & 1
        m >>= 1
    return n


cdef inline int _qmod(const Tables *tb, int q) noexcept nogil:
    cdef int e
    if -QT <= q <= QT:
        return tb.qmod[q + QT]
    e = q % tb.order
    if e < 0:
        e += tb.order
    return e


cdef inline int _finish(const Tables *tb, int cc, int dd, const int *p) noexcept nogil:
    cdef int k, m, mask = 0
    if cc > tb.L:
        return 0
    m = tb.memo[cc * tb.stride + dd + tb.L]
    for k in range(tb.w):
        mask |= ((m >> p[k]) & 1) << k
    return mask


cdef inline int _block(const Tables *tb, int c, int d) noexcept nogil:
    """Mask with bit k = chi(c, d + k c), for 1 <= d <= c."""
    cdef int q0 = 1 if d == c else 0
    cdef int p[MAXW]
    cdef int k, cc, dd, nc, nd, q, e, sg
    cdef int w = tb.w
    for k in range(w):
        p[k] = tb.tpb[q0 + k]
    cc = c
    dd = d - q0 * c
    while cc > tb.L and dd != 0:
        nc = dd
        nd = -cc
        q = nd / nc
        nd = nd - q * nc
        e = _qmod(tb, q)
        for k in range(w):
            p[k] = tb.st[e][p[k]]
        sg = nc >> 31  # branch-free sign normalisation
        cc = (nc ^ sg) - sg
        dd = (nd ^ sg) - sg
    return _finish(tb, cc, dd, p)


cdef inline void _block4(const Tables *tb, int c, int d0, const int *qs, int *masks) noexcept nogil:
    """Four interleaved walks for d = d0..d0+3 < c; qs[l] = floor(c / (d0 + l))."""
    cdef int cc[4]
    cdef int dd[4]
    cdef const int *tab[4]
    cdef int p[4][MAXW]
    cdef int l, k, nc, nd, q, e, busy, act, d, sg
    cdef int w = tb.w
    cdef int L = tb.L
    for l in range(4):
        # first step, S then T^(-q): (c, d) -> (d, -(c - q d))
        d = d0 + l
        e = _qmod(tb, -qs[l])
        for k in range(w):
            p[l][k] = tb.st[e][tb.tpb[k]]
        cc[l] = d
        dd[l] = qs[l] * d - c
    while True:
        busy = 0
        for l in range(4):
            act = cc[l] > L and dd[l] != 0
            busy |= act
            nc = dd[l] if act else 1
            nd = -cc[l]
            q = nd / nc
            nd = nd - q * nc
            tab[l] = &tb.st[_qmod(tb, q)][0] if act else &tb.tp[0][0]
            sg = nc >> 31
            nc = (nc ^ sg) - sg
            nd = (nd ^ sg) - sg
            cc[l] = nc if act else cc[l]
            dd[l] = nd if act else dd[l]
        if not busy:
            break
        for l in range(4):
            for k in range(w):
                p[l][k] = tab[l][p[l][k]]
    for l in range(4):
        masks[l] = _finish(tb, cc[l], dd[l], p[l])


cdef inline void _cis(long long num, long long den, double *re, double *im) noexcept nogil:
    """exp(2 pi i num/den) for 0 <= num < den, evaluated on [0, pi/4]."""
    cdef long long q4 = (4 * num) / den
    cdef long long r4 = 4 * num - q4 * den
    cdef double c, s, t
    if 2 * r4 <= den:
        t = 0.5 * M_PI * (<double>r4 / <double>den)
        c = cos(t)
        s = sin(t)
    else:
        t = 0.5 * M_PI * (<double>(den - r4) / <double>den)
        c = sin(t)
        s = cos(t)
    # rotate by i^q4
    if q4 == 0:
        re[0] = c
        im[0] = s
    elif q4 == 1:
        re[0] = -s
        im[0] = c
    elif q4 == 2:
        re[0] = -c
        im[0] = -s
    else:
        re[0] = s
        im[0] = -c


cdef inline void _two_sum(double *acc, double *comp, double x) noexcept nogil:
    cdef double s = acc[0] + x
    cdef double bb = s - acc[0]
    comp[0] += (acc[0] - (s - bb)) + (x - bb)
    acc[0] = s


cdef struct Phase:
    long long M
    int shift
    long long lowmask
    double *Ar
    double *Ai
    double *Br
    double *Bi


cdef inline void _add_block(const Phase *ph, long long d, int mask, const long long *ns, int nn,
                            const double *pat, double *part) noexcept nogil:
    """part += e(n d / M) * pattern(mask) for each n."""
    cdef int j
    cdef long long m
    cdef double ar, ai, br, bi, er, ei, pr, pi
    for j in range(nn):
        m = ns[j] * d
        if m >= ph.M:
            m %= ph.M
        ar = ph.Ar[m >> ph.shift]; ai = ph.Ai[m >> ph.shift]
        br = ph.Br[m & ph.lowmask]; bi = ph.Bi[m & ph.lowmask]
        er = ar * br - ai * bi
        ei = ar * bi + ai * br
        pr = pat[((2 * j) << MAXW) | mask]
        pi = pat[((2 * j + 1) << MAXW) | mask]
        part[2 * j] += er * pr - ei * pi
        part[2 * j + 1] += er * pi + ei * pr


cdef int _x_for_c(const Tables *tb, int c, const long long *ns, int nn, const double *pat,
                  double *out_re, double *out_im) noexcept nogil:
    """X(n, c) for the nn values of n; returns 0, or -1 on allocation failure."""
    cdef Phase ph
    cdef int shift = 0
    cdef long long L1, L0, m
    cdef int masks[4]
    cdef int qs[4]
    cdef int q = 0
    cdef int i, j, l, d, dl, half, mask
    cdef int pending = 0
    ph.M = <long long>tb.w * c
    while (1LL << (2 * shift)) < ph.M:
        shift += 1
    L1 = 1LL << shift
    L0 = ph.M / L1 + 1
    ph.shift = shift
    ph.lowmask = L1 - 1
    ph.Ar = <double *>malloc(L0 * sizeof(double))
    ph.Ai = <double *>malloc(L0 * sizeof(double))
    ph.Br = <double *>malloc(L1 * sizeof(double))
    ph.Bi = <double *>malloc(L1 * sizeof(double))
    cdef double *acc = <double *>malloc(4 * nn * sizeof(double))
    cdef double *part = <double *>malloc(2 * nn * sizeof(double))
    if (ph.Ar == NULL or ph.Ai == NULL or ph.Br == NULL or ph.Bi == NULL or acc == NULL
            or part == NULL):
        free(ph.Ar); free(ph.Ai); free(ph.Br); free(ph.Bi); free(acc); free(part)
        return -1
    for i in range(L0):
        m = <long long>i * L1
        if m < ph.M:
            _cis(m, ph.M, &ph.Ar[i], &ph.Ai[i])
        else:
            ph.Ar[i] = 1.0
            ph.Ai[i] = 0.0
    for i in range(L1):
        if i < ph.M:
            _cis(i, ph.M, &ph.Br[i], &ph.Bi[i])
        else:
            ph.Br[i] = 1.0
            ph.Bi[i] = 0.0
    for j in range(4 * nn):
        acc[j] = 0.0
    for j in range(2 * nn):
        part[j] = 0.0

    half = c / 2 if tb.reflect >= 0 else c - 1
    d = 1
    while d <= half:
        dl = half - d + 1
        if dl >= 4 and d + 3 < c:
            dl = 4
            for l in range(4):
                if (d + l) * <long long>(d + l) <= c or q == 0:
                    q = c / (d + l)
                else:
                    while q * <long long>(d + l) > c:
                        q -= 1
                qs[l] = q
            _block4(tb, c, d, qs, masks)
        else:
            dl = 1
            masks[0] = _block(tb, c, d)
        for l in range(dl):
            mask = masks[l]
            if mask:
                _add_block(&ph, d + l, mask, ns, nn, pat, part)
            if tb.reflect >= 0 and c - (d + l) != d + l:
                mask = tb.refl[mask]
                if mask:
                    _add_block(&ph, c - (d + l), mask, ns, nn, pat, part)
        d += dl
        pending += dl
        if pending >= 32 or d > half:
            # short plain sums, folded into the compensated total
            for j in range(nn):
                _two_sum(&acc[4 * j], &acc[4 * j + 1], part[2 * j])
                _two_sum(&acc[4 * j + 2], &acc[4 * j + 3], part[2 * j + 1])
                part[2 * j] = 0.0
                part[2 * j + 1] = 0.0
            pending = 0
    # d = c contributes only when c = 1
    mask = _block(tb, c, c)
    if mask:
        for j in range(2 * nn):
            part[j] = 0.0
        _add_block(&ph, c, mask, ns, nn, pat, part)
        for j in range(nn):
            _two_sum(&acc[4 * j], &acc[4 * j + 1], part[2 * j])
            _two_sum(&acc[4 * j + 2], &acc[4 * j + 3], part[2 * j + 1])
    for j in range(nn):
        out_re[j] = acc[4 * j] + acc[4 * j + 1]
        out_im[j] = acc[4 * j + 2] + acc[4 * j + 3]
    free(ph.Ar); free(ph.Ai); free(ph.Br); free(ph.Bi); free(acc); free(part)
    return 0


cdef class ChiKernel:
    """Indicator chi(c, d) and sums X(n, c) for the stabiliser of a point.

    ``s`` and ``t`` are 0-based image lists of phi(S), phi(T); ``basepoint`` is 0-based.
    ``reflect`` is the offset a with chi(c, d) = chi(c, a c - d), or None.
    """

    cdef Tables tb
    cdef object _memo
    cdef readonly int width
    cdef readonly int memo_limit
    cdef readonly object reflect
    cdef readonly str backend

    def __init__(self, s, t, int basepoint, int width, reflect=None, int memo_limit=1024):
        cdef int e, x, j, k, a, r, q, nd, nc, sub, mask, y, same
        cdef unsigned char[::1] mv
        cdef Tables *tb = &self.tb
        if width < 1 or width > 6:
            raise ValueError("width out of range")
        if memo_limit < 1:
            raise ValueError("memo_limit must be positive")
        self.backend = BACKEND
        self.width = width
        self.memo_limit = memo_limit
        self.reflect = reflect
        tb.w = width
        tb.b = basepoint
        tb.reflect = -1 if reflect is None else int(reflect)
        tb.L = memo_limit
        tb.stride = 2 * memo_limit + 1
        for x in range(7):
            tb.tp[0][x] = x
        e = 0
        while True:
            e += 1
            if e >= MAXORD:
                raise ValueError("phi(T) has too large an order")
            same = 1
            for x in range(7):
                tb.tp[e][x] = t[tb.tp[e - 1][x]]
                if tb.tp[e][x] != x:
                    same = 0
            if same:
                break
        tb.order = e
        for e in range(tb.order):
            for x in range(7):
                tb.st[e][x] = tb.tp[e][s[x]]
        for j in range(2 * QT + 1):
            tb.qmod[j] = ((j - QT) % tb.order + tb.order) % tb.order
        x = basepoint
        tb.orbit_mask = 0
        for j in range(width + 1):
            tb.tpb[j] = x
            if j < width:
                tb.orbit_mask |= 1 << x
            x = t[x]
        for mask in range(1 << width):
            y = 0
            if tb.reflect >= 0:
                for k in range(width):
                    # chi(c, D) = chi(c, a c - D): bit k at c - d is bit (a - 1 - k) mod w at d
                    j = ((tb.reflect - 1 - k) % width + width) % width
                    y |= ((mask >> j) & 1) << k
            tb.refl[mask] = y
        self._memo = np.zeros((memo_limit + 1) * tb.stride, dtype=np.uint8)
        mv = self._memo
        tb.memo = &mv[0]
        with nogil:
            # state (1, 0): S sends the bottom row to (0, -1); st[0] is s itself
            mask = 0
            for x in range(7):
                if (tb.orbit_mask >> tb.st[0][x]) & 1:
                    mask |= 1 << x
            tb.memo[1 * tb.stride + tb.L] = mask
            for a in range(2, memo_limit + 1):
                for r in range(-a + 1, a):
                    if r == 0:
                        continue
                    nc = r
                    nd = -a
                    q = nd / nc
                    nd = nd - q * nc
                    e = _qmod(tb, q)
                    if nc < 0:
                        nc = -nc
                        nd = -nd
                    sub = tb.memo[nc * tb.stride + nd + tb.L]
                    mask = 0
                    for x in range(7):
                        y = tb.st[e][x]
                        if (sub >> y) & 1:
                            mask |= 1 << x
                    tb.memo[a * tb.stride + r + tb.L] = mask

    def chi(self, c, d):
        """chi(c, d) for integers with |c| < 2^27."""
        c = int(c)
        d = int(d)
        if c < 0:
            c, d = -c, -d
        if c == 0:
            return int(abs(d) == 1)
        if c >= 2**27:
            raise OverflowError("c too large for the compiled kernel")
        D = (d - 1) % (self.width * c) + 1
        k, dd = divmod(D - 1, c)
        return (_block(&self.tb, c, dd + 1) >> k) & 1

    def chi_row(self, int c):
        """chi(c, D) for D = 1..w c as a uint8 array."""
        cdef int d, k, mask
        cdef int w = self.width
        out = np.zeros(w * c, dtype=np.uint8)
        cdef unsigned char[::1] o = out
        with nogil:
            for d in range(1, c + 1):
                mask = _block(&self.tb, c, d)
                for k in range(w):
                    o[d - 1 + k * c] = (mask >> k) & 1
        return out

    def x_values(self, int c_lo, int c_hi, ns, int threads=1):
        """X(n, c) for n in ns and c_lo <= c <= c_hi, shape (len(ns), c_hi - c_lo + 1).

        Every c is summed by one thread in a fixed order, so results do not depend on
        the thread count.
        """
        if c_lo < 1 or c_hi < c_lo:
            raise ValueError("need 1 <= c_lo <= c_hi")
        if c_hi >= 2**27:
            raise OverflowError("c too large for the compiled kernel")
        cdef long long[::1] nv = np.ascontiguousarray(ns, dtype=np.int64)
        cdef int nn = nv.shape[0]
        cdef int count = c_hi - c_lo + 1
        if nn == 0:
            return np.zeros((0, count), dtype=np.complex128)
        cdef int w = self.width
        pat_np = np.zeros((2 * nn) << MAXW, dtype=np.float64)
        cdef double[::1] pat = pat_np
        cdef double zr, zi
        cdef int j, k, mask
        for j in range(nn):
            if nv[j] < 1:
                raise ValueError("n must be positive")
            for mask in range(1 << w):
                for k in range(w):
                    if (mask >> k) & 1:
                        _cis((nv[j] * k) % w, w, &zr, &zi)
                        pat[((2 * j) << MAXW) | mask] += zr
                        pat[((2 * j + 1) << MAXW) | mask] += zi
        re = np.zeros((count, nn), dtype=np.float64)
        im = np.zeros((count, nn), dtype=np.float64)
        cdef double[:, ::1] rv = re
        cdef double[:, ::1] iv = im
        cdef int i, status = 0
        cdef int bad = 0
        cdef int nt = max(1, threads)
        cdef Tables *tb = &self.tb
        for i in prange(count, nogil=True, schedule="dynamic", chunksize=16, num_threads=nt):
            status = _x_for_c(tb, c_lo + i, &nv[0], nn, &pat[0], &rv[i, 0], &iv[i, 0])
            if status != 0:
                bad += 1
        if bad:
            raise MemoryError("allocation failed in the X(n, c) kernel")
        return (re + 1j * im).T.copy()

    def walk_count(self, int c_lo, int c_hi, bint interleave=True):
        """Number of D in 1..w c with chi(c, D) = 1, summed over c; walks only (benchmark)."""
        cdef int masks[4]
        cdef int qs[4]
        cdef int c, d, l
        cdef long long total = 0
        cdef Tables *tb = &self.tb
        with nogil:
            for c in range(c_lo, c_hi + 1):
                d = 1
                while d <= c:
                    if interleave and d + 3 < c:
                        for l in range(4):
                            qs[l] = c / (d + l)
                        _block4(tb, c, d, qs, masks)
                        for l in range(4):
                            total += _popcount(masks[l])
                        d += 4
                    else:
                        total += _popcount(_block(tb, c, d))
                        d += 1
        return total
