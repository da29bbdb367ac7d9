# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; same contract as ``omegaramsey._pycore``."""
from math import comb

import numpy as np

from libc.stdint cimport uint64_t, int64_t, int32_t

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_clzll(unsigned long long) nogil

cdef uint64_t MASK64 = 0xFFFFFFFFFFFFFFFFULL
cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef int MAX_LABEL = 63

BACKEND = "cython"


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline int64_t _label(uint64_t h) noexcept nogil:
    if h == 0:
        return MAX_LABEL
    cdef int lz = __builtin_clzll(h)
    return lz if lz < MAX_LABEL else MAX_LABEL


def mix64(z):
    return _mix64(<uint64_t>(z & 0xFFFFFFFFFFFFFFFF))


def label_from_hash(h):
    return _label(<uint64_t>h)


def edge_hash(seed, vertices):
    cdef uint64_t h = _mix64(<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF))
    cdef uint64_t x
    for v in vertices:
        x = <uint64_t>v
        h = _mix64((h ^ x) + GOLDEN)
    return h


def edge_label(seed, vertices):
    return _label(edge_hash(seed, vertices))


def fill_labels(seed, int u, Py_ssize_t n):
    total = comb(n, u)
    out = np.empty(total, dtype=np.int64)
    if total == 0:
        return out
    cdef int64_t[::1] view = out
    cdef uint64_t key = _mix64(<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF))
    cdef Py_ssize_t idx, count = total
    cdef int j, i
    cdef uint64_t h
    cdef int64_t c[64]
    if u > 64:
        raise ValueError("uniformity above 64 is not supported by the compiled kernel")
    for j in range(u):
        c[j] = j
    with nogil:
        for idx in range(count):
            h = key
            for j in range(u):
                h = _mix64((h ^ <uint64_t>c[j]) + GOLDEN)
            view[idx] = _label(h)
            # colex successor
            j = 0
            while j < u - 1 and c[j] + 1 == c[j + 1]:
                j += 1
            c[j] += 1
            for i in range(j):
                c[i] = i
    return out


def entry_caps(int u, Py_ssize_t n, caps):
    counts = [comb(i, u - 2) for i in range(n)]
    return np.repeat(np.asarray(caps[:n], dtype=np.int64), counts)


def truncate_labels(raw, int u, Py_ssize_t n, caps):
    cdef const int64_t[::1] r = np.ascontiguousarray(raw, dtype=np.int64)
    cdef const int64_t[::1] cap = np.ascontiguousarray(caps, dtype=np.int64)
    out = np.empty(r.shape[0], dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef Py_ssize_t idx, count = r.shape[0]
    cdef int j, i
    cdef int64_t c[64]
    if count == 0:
        return out
    for j in range(u):
        c[j] = j
    with nogil:
        for idx in range(count):
            o[idx] = r[idx] if r[idx] < cap[c[u - 2]] else -1
            j = 0
            while j < u - 1 and c[j] + 1 == c[j + 1]:
                j += 1
            c[j] += 1
            for i in range(j):
                c[i] = i
    return out


cdef inline Py_ssize_t _lcp(const int64_t[::1] t, const int64_t[::1] offsets,
                            const int64_t[::1] ls, Py_ssize_t a, Py_ssize_t b,
                            Py_ssize_t limit) noexcept nogil:
    cdef Py_ssize_t end = ls[limit]
    cdef Py_ssize_t oa = offsets[a], ob = offsets[b]
    cdef Py_ssize_t j = 0
    while j < end and t[oa + j] == t[ob + j]:
        j += 1
    if j == end:
        return limit
    cdef Py_ssize_t lo = 0, hi = limit, mid
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if ls[mid] <= j:
            lo = mid
        else:
            hi = mid - 1
    return lo


def lcp_letters(trunc, offsets, letter_start, Py_ssize_t a, Py_ssize_t b, Py_ssize_t limit):
    return _lcp(trunc, offsets, letter_start, a, b, limit)


def heights(trunc, offsets, letter_start, pairs, out, Py_ssize_t lo=0, hi=None):
    cdef const int64_t[::1] t = trunc
    cdef const int64_t[::1] off = offsets
    cdef const int64_t[::1] ls = letter_start
    cdef const int64_t[:, ::1] p = pairs
    cdef int64_t[::1] o = out
    cdef Py_ssize_t stop = p.shape[0] if hi is None else hi
    cdef Py_ssize_t idx, v, w, level, c
    cdef int64_t h
    with nogil:
        for idx in range(lo, stop):
            v = p[idx, 0]
            w = p[idx, 1]
            level = _lcp(t, off, ls, v, w, v if v < w else w)
            h = 1
            while level > 0:
                c = _lcp(t, off, ls, level, v, level)
                if c >= level:
                    break
                level = c
                h += 1
            o[idx] = h


def arrow_search(Py_ssize_t m, int k, int budget, bint symmetric, members, copy_ptr, by_pos, pos_ptr):
    if m == 0:
        return [], 1
    if k > 63:
        raise ValueError("the compiled arrow kernel supports at most 63 colors")
    cdef const int32_t[::1] mem = np.ascontiguousarray(members, dtype=np.int32)
    cdef const int32_t[::1] cptr = np.ascontiguousarray(copy_ptr, dtype=np.int32)
    cdef const int32_t[::1] bp = np.ascontiguousarray(by_pos, dtype=np.int32)
    cdef const int32_t[::1] pptr = np.ascontiguousarray(pos_ptr, dtype=np.int32)
    colors_arr = np.zeros(m, dtype=np.int32)
    cdef int32_t[::1] colors = colors_arr
    cdef Py_ssize_t pos = 0, first_free = 1 if symmetric else 0
    cdef Py_ssize_t t, s, c
    cdef long long visited = 0
    cdef unsigned long long mask
    cdef bint ok, found = False
    with nogil:
        while True:
            visited += 1
            ok = True
            for t in range(pptr[pos], pptr[pos + 1]):
                c = bp[t]
                mask = 0
                for s in range(cptr[c], cptr[c + 1]):
                    mask |= 1ULL << colors[mem[s]]
                if __builtin_popcountll(mask) <= budget:
                    ok = False
                    break
            if ok:
                if pos == m - 1:
                    found = True
                    break
                pos += 1
                colors[pos] = 0
                continue
            while True:
                if pos >= first_free and colors[pos] + 1 < k:
                    colors[pos] += 1
                    break
                colors[pos] = 0
                pos -= 1
                if pos < first_free:
                    break
            if pos < first_free:
                break
    if found:
        return [int(x) for x in colors_arr], int(visited)
    return None, int(visited)
