"""Pure-Python kernels.

Reference implementation of every hot loop in the package; the compiled
``_core`` module exposes the same functions with identical results.
numpy is used for bulk label generation, everything else is plain loops.
"""
from __future__ import annotations

from math import comb

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MAX_LABEL = 63

BACKEND = "python"


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def label_from_hash(h: int) -> int:
    """Number of leading zero bits of a 64-bit word, capped at 63."""
    if h == 0:
        return MAX_LABEL
    return min(MAX_LABEL, 64 - h.bit_length())


def edge_hash(seed: int, vertices) -> int:
    h = mix64(seed & MASK64)
    for v in vertices:
        h = mix64(((h ^ v) + GOLDEN) & MASK64)
    return h


def edge_label(seed: int, vertices) -> int:
    return label_from_hash(edge_hash(seed, vertices))


def colex_combinations(n: int, k: int) -> np.ndarray:
    """All k-subsets of range(n) as rows, in colexicographic order."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if n < k:
        return np.zeros((0, k), dtype=np.int64)
    if k == 1:
        return np.arange(n, dtype=np.int64)[:, None]
    blocks = []
    for top in range(k - 1, n):
        head = colex_combinations(top, k - 1)
        tail = np.full((head.shape[0], 1), top, dtype=np.int64)
        blocks.append(np.hstack([head, tail]))
    return np.vstack(blocks)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def _labels_from_hashes(h: np.ndarray) -> np.ndarray:
    # leading-zero count by binary search on the bit position
    lz = np.zeros(h.shape, dtype=np.int64)
    x = h.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        top_clear = (x >> np.uint64(64 - shift)) == 0
        lz += np.where(top_clear, shift, 0)
        x = np.where(top_clear, x << np.uint64(shift), x)
    lz += ((x >> np.uint64(63)) == 0).astype(np.int64)
    return np.minimum(lz, MAX_LABEL)


def fill_labels(seed: int, u: int, n: int) -> np.ndarray:
    """Hashed labels of every u-subset of range(n), colex order."""
    total = comb(n, u)
    out = np.empty(total, dtype=np.int64)
    if total == 0:
        return out
    start = 0
    key = np.uint64(mix64(seed & MASK64))
    golden = np.uint64(GOLDEN)
    with np.errstate(over="ignore"):
        for top in range(u - 1, n):
            rest = colex_combinations(top, u - 1).astype(np.uint64)
            cols = [rest[:, j] for j in range(u - 1)]
            cols.append(np.full(rest.shape[0], top, dtype=np.uint64))
            h = np.full(rest.shape[0], key, dtype=np.uint64)
            for col in cols:
                h = _mix64_array((h ^ col) + golden)
            out[start:start + rest.shape[0]] = _labels_from_hashes(h)
            start += rest.shape[0]
    return out


def entry_caps(u: int, n: int, caps: np.ndarray) -> np.ndarray:
    """Per-entry thresholds for a type of level n, in flat entry order."""
    counts = [comb(i, u - 2) for i in range(n)]
    return np.repeat(np.asarray(caps[:n], dtype=np.int64), counts)


def truncate_labels(raw: np.ndarray, u: int, n: int, caps: np.ndarray) -> np.ndarray:
    """Replace labels that reach the level bound by -1 (the missing marker)."""
    out = np.empty_like(raw)
    thresholds = entry_caps(u, n, caps)
    for v in range(u - 1, n):
        lo, hi = comb(v, u), comb(v + 1, u)
        block = raw[lo:hi]
        out[lo:hi] = np.where(block < thresholds[: hi - lo], block, -1)
    return out


def _letter_of(letter_start, j: int, limit: int) -> int:
    lo, hi = 0, limit
    # largest i < limit with letter_start[i] <= j
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if letter_start[mid] <= j:
            lo = mid
        else:
            hi = mid - 1
    return lo


def lcp_letters(trunc, offsets, letter_start, a: int, b: int, limit: int) -> int:
    """Number of leading letters on which the types of a and b agree (<= limit)."""
    end = int(letter_start[limit])
    oa, ob = int(offsets[a]), int(offsets[b])
    j = 0
    while j < end and trunc[oa + j] == trunc[ob + j]:
        j += 1
    if j == end:
        return limit
    return _letter_of(letter_start, j, limit)


def heights(trunc, offsets, letter_start, pairs, out, lo: int = 0, hi: int | None = None) -> None:
    """Fill out[lo:hi] with the height of each vertex pair."""
    trunc = trunc.tolist() if isinstance(trunc, np.ndarray) else trunc
    offsets = [int(x) for x in offsets]
    letter_start = [int(x) for x in letter_start]
    if hi is None:
        hi = len(pairs)
    for idx in range(lo, hi):
        v, w = int(pairs[idx][0]), int(pairs[idx][1])
        level = lcp_letters(trunc, offsets, letter_start, v, w, min(v, w))
        h = 1
        while level > 0:
            c = lcp_letters(trunc, offsets, letter_start, level, v, level)
            if c >= level:
                break
            level = c
            h += 1
        out[idx] = h


def arrow_search(m, k, budget, symmetric, members, copy_ptr, by_pos, pos_ptr):
    """Search colorings of m items with k colors for one that defeats every copy.

    Colorings are visited as a base-k counter, most significant digit first.
    When the digit at position p completes a copy using at most ``budget``
    colors, the whole subtree below that prefix is skipped.

    Returns ``(coloring or None, visited)``.
    """
    colors = [0] * m
    visited = 0
    if m == 0:
        return [], 1
    first_free = 1 if symmetric else 0
    pos = 0
    while True:
        visited += 1
        ok = True
        for t in range(pos_ptr[pos], pos_ptr[pos + 1]):
            c = by_pos[t]
            mask = 0
            for s in range(copy_ptr[c], copy_ptr[c + 1]):
                mask |= 1 << colors[members[s]]
            if bin(mask).count("1") <= budget:
                ok = False
                break
        if ok:
            if pos == m - 1:
                return colors, visited
            pos += 1
            colors[pos] = 0
            continue
        # advance the counter at pos, carrying leftwards
        while True:
            if pos >= first_free and colors[pos] + 1 < k:
                colors[pos] += 1
                break
            colors[pos] = 0
            pos -= 1
            if pos < first_free:
                return None, visited
