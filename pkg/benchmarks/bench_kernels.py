"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--n 2000]

Each row runs the same inputs through both backends, checks the outputs
agree, and reports the best wall time of ``--repeat`` runs.
"""
from __future__ import annotations

import argparse
import time
from itertools import combinations

import numpy as np

from omegaramsey._backend import available, load
from omegaramsey.arrow import _csr
from omegaramsey.typetree import minimal_growth


def best_of(repeat, fn):
    times = []
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def workloads(n: int, pairs: int):
    f = minimal_growth(2, n)
    caps = np.array([f.cap(i, 1 << 62) for i in range(n)], dtype=np.int64)
    offsets = np.array([i * (i - 1) // 2 for i in range(n + 1)], dtype=np.int64)
    letter_start = np.arange(n + 1, dtype=np.int64)
    rng = np.random.default_rng(0)
    pp = rng.integers(0, n, size=(pairs, 2))
    pp = np.ascontiguousarray(pp[pp[:, 0] != pp[:, 1]])

    # arrow search over synthetic copy systems: every s-subset of m items is a
    # copy, so the search has to exhaust the pruned coloring tree
    systems = {}
    for m, size, colors, budget in ((18, 7, 3, 2), (13, 7, 4, 3), (20, 4, 3, 1)):
        members = [list(c) for c in combinations(range(m), size)]
        systems[(m, size, colors, budget)] = _csr(members, m)

    def fill(k):
        return lambda: k.fill_labels(12345, 2, n)

    def trunc(k):
        raw = k.fill_labels(12345, 2, n)
        return lambda: k.truncate_labels(raw, 2, n, caps)

    def heights(k):
        raw = k.fill_labels(12345, 2, n)
        tr = k.truncate_labels(raw, 2, n, caps)

        def run():
            out = np.zeros(len(pp), dtype=np.int64)
            k.heights(tr, offsets, letter_start, pp, out, 0, len(pp))
            return out

        return run

    def arrow_factory(m, colors, budget, packed):
        return lambda k: lambda: k.arrow_search(m, colors, budget, True, *packed)

    return [
        (f"fill_labels u=2 N={n}", fill),
        (f"truncate_labels u=2 N={n}", trunc),
        (f"heights {len(pp)} pairs", heights),
    ] + [
        (f"arrow_search m={m} |copy|={size} k={c} b={b}", arrow_factory(m, c, b, systems[(m, size, c, b)]))
        for (m, size, c, b) in systems
    ]


def same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if a is None or b is None:
        return a is b
    return np.array_equal(np.asarray(a), np.asarray(b))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--pairs", type=int, default=100_000)
    args = ap.parse_args()
    if "cython" not in available():
        raise SystemExit("compiled core not built; run `pip install -e . --no-build-isolation` first")
    py, cy = load("python"), load("cython")
    print(f"{'kernel':<40}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for name, make in workloads(args.n, args.pairs):
        tp, rp = best_of(args.repeat, make(py))
        tc, rc = best_of(args.repeat, make(cy))
        if not same(rp, rc):
            raise SystemExit(f"backends disagree on {name}")
        print(f"{name:<40}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
