# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled walk kernels; same results as ``_fallback`` bit for bit."""
import numpy as np

cimport numpy as cnp
from libc.math cimport fabs
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

cdef extern from *:
    int __builtin_parityll(unsigned long long) nogil

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL

cdef enum:
    MAXN = 64


cdef struct Gen:
    int kind  # 0 constant, 1 uniform, 2 kwise, 3 smallbias
    int n
    int m
    int t
    uint64_t poly
    uint64_t value_mask
    int64_t order
    const int64_t* exp
    const int64_t* log


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t gf_mul(const Gen* g, uint64_t a, uint64_t b) noexcept nogil:
    cdef uint64_t r = 0
    cdef uint64_t top
    if g.exp != NULL:
        # log[0] points past the cyclic part of exp, where the table is zero
        return <uint64_t>g.exp[g.log[a] + g.log[b]]
    if a == 0 or b == 0:
        return 0
    top = (<uint64_t>1) << g.m
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= g.poly
    return r


cdef inline uint64_t gen_mask(const Gen* g, uint64_t seed) noexcept nogil:
    cdef uint64_t out = 0, v, fmask, x, y, p
    cdef uint64_t coef[64]
    cdef int e, j, i
    cdef int64_t lx, idx
    if g.kind == 0:
        return g.value_mask
    if g.kind == 1:
        return seed
    fmask = ((<uint64_t>1) << g.m) - 1
    if g.kind == 2:
        for j in range(g.t):
            coef[j] = (seed >> (j * g.m)) & fmask
        for e in range(g.n):
            v = 0
            for j in range(g.t - 1, -1, -1):
                v = gf_mul(g, v, <uint64_t>e) ^ coef[j]
            out |= (v & 1) << e
        return out
    x = seed & fmask
    y = (seed >> g.m) & fmask
    if x == 0:
        return 0
    if g.exp != NULL:
        # x^i = exp[i log x mod order]: independent lookups instead of a product chain
        lx = g.log[x]
        idx = lx
        for i in range(g.n):
            out |= (<uint64_t>__builtin_parityll(<uint64_t>g.exp[idx] & y)) << i
            idx += lx
            if idx >= g.order:
                idx -= g.order
        return out
    p = x
    for i in range(g.n):
        out |= (<uint64_t>__builtin_parityll(p & y)) << i
        p = gf_mul(g, p, x)
    return out


cdef class _GenHolder:
    cdef Gen g
    cdef object exp_arr
    cdef object log_arr

    def __init__(self, dict params):
        cdef const int64_t[::1] ev
        cdef const int64_t[::1] lv
        self.g.kind = params["kind"]
        self.g.n = params["n"]
        self.g.m = params.get("m", 0)
        self.g.t = params.get("t", 0)
        self.g.poly = params.get("poly", 0)
        self.g.value_mask = params.get("value_mask", 0)
        self.g.order = (1 << self.g.m) - 1
        self.g.exp = NULL
        self.g.log = NULL
        if params.get("exp") is not None:
            self.exp_arr = np.ascontiguousarray(params["exp"], dtype=np.int64)
            self.log_arr = np.ascontiguousarray(params["log"], dtype=np.int64)
            ev = self.exp_arr
            lv = self.log_arr
            self.g.exp = &ev[0]
            self.g.log = &lv[0]


cdef inline void walk_path(const Gen* g, double c, int64_t T, int n, uint64_t s, int mode,
                           int seed_len, uint64_t smask, double* pos,
                           int64_t* out, double* resid, int64_t* viol) noexcept nogil:
    # mode 0: splitmix stream from state s; mode 1: s is the composed seed
    cdef int64_t t
    cdef int i
    cdef uint64_t r, msk, o = 0
    cdef double y, a, acc = 0.0
    cdef double ys[2]
    ys[0] = c
    ys[1] = -c
    for i in range(n):
        pos[i] = 0.0
    for t in range(T):
        if mode == 0:
            s = s + GOLDEN
            r = mix64(s) & smask
        else:
            r = (s >> (t * seed_len)) & smask
        msk = gen_mask(g, r)
        for i in range(n):
            y = ys[(msk >> i) & 1]  # table lookup: random bits make a branch mispredict
            a = pos[i]
            a = a + (1.0 - fabs(a)) * y
            pos[i] = a
            if fabs(a) > 1.0:
                viol[0] += 1
    for i in range(n):
        if pos[i] < 0:
            o |= (<uint64_t>1) << i
        acc = acc + (1.0 - fabs(pos[i]))
    out[0] = <int64_t>o
    resid[0] = acc


def gen_masks(dict params, seeds):
    cdef _GenHolder h = _GenHolder(params)
    cdef const uint64_t[::1] sv = np.ascontiguousarray(seeds, dtype=np.uint64)
    cdef Py_ssize_t N = sv.shape[0], j
    out = np.empty(N, dtype=np.int64)
    cdef int64_t[::1] ov = out
    with nogil:
        for j in range(N):
            ov[j] = <int64_t>gen_mask(&h.g, sv[j])
    return out


def walk_mc(dict params, double c, int64_t T, int seed_len, uint64_t master, int64_t start,
            int64_t count):
    cdef _GenHolder h = _GenHolder(params)
    cdef int n = h.g.n
    cdef uint64_t smask = ((<uint64_t>1) << seed_len) - 1 if seed_len < 64 else <uint64_t>0xFFFFFFFFFFFFFFFFULL
    out = np.empty(count, dtype=np.int64)
    resid = np.empty(count, dtype=np.float64)
    cdef int64_t[::1] ov = out
    cdef double[::1] rv = resid
    cdef double pos[MAXN]
    cdef int64_t viol = 0, j
    cdef uint64_t s
    with nogil:
        for j in range(count):
            s = mix64(master + (<uint64_t>(start + j) + 1) * GOLDEN)
            walk_path(&h.g, c, T, n, s, 0, seed_len, smask, pos, &ov[j], &rv[j], &viol)
    return out, resid, int(viol)


def walk_exact(dict params, double c, int64_t T, int seed_len):
    cdef _GenHolder h = _GenHolder(params)
    cdef int n = h.g.n
    cdef int64_t total = (<int64_t>1) << (T * seed_len), u
    cdef uint64_t smask = ((<uint64_t>1) << seed_len) - 1
    out = np.empty(total, dtype=np.int64)
    resid = np.empty(total, dtype=np.float64)
    cdef int64_t[::1] ov = out
    cdef double[::1] rv = resid
    cdef double pos[MAXN]
    cdef int64_t viol = 0
    with nogil:
        for u in range(total):
            walk_path(&h.g, c, T, n, <uint64_t>u, 1, seed_len, smask, pos, &ov[u], &rv[u], &viol)
    return out, resid, int(viol)
