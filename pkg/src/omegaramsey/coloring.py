"""Heights of vertex pairs in T_f and the colorings built from them.

Height convention: the count includes the first meet, so the least height
is 1. Reports carry this as ``"convention": "min-height-1"``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .typetree import FType, GrowthFunction, TypeTable, meet, type_of_vertex

CONVENTION = "min-height-1"
FINITE_PREFIX_NOTE = (
    "finite prefixes of a seeded labeling approximate the countable universal "
    "structure only in the limit"
)


@dataclass(frozen=True)
class TraceStep:
    x: FType
    y: FType
    z: FType
    level: int
    terminated: bool


@dataclass(frozen=True)
class HeightTrace:
    steps: tuple[TraceStep, ...]

    @property
    def height(self) -> int:
        return len(self.steps)

    @property
    def levels(self) -> list[int]:
        return [s.level for s in self.steps]

    def replay(self, oracle, f: GrowthFunction) -> bool:
        """Recompute every meet and termination test; True iff all agree."""
        for i, s in enumerate(self.steps):
            if meet(s.x, s.y) != s.z or s.z.level != s.level:
                return False
            tp = type_of_vertex(oracle, f, s.level)
            if (tp == s.z) != s.terminated:
                return False
            if i + 1 < len(self.steps):
                nxt = self.steps[i + 1]
                if nxt.x != tp or nxt.y != s.z:
                    return False
        return bool(self.steps) and self.steps[-1].terminated


def _vertex_types(oracle, f: GrowthFunction):
    cache: dict[int, FType] = {}

    def tp(v: int) -> FType:
        if v not in cache:
            cache[v] = type_of_vertex(oracle, f, v)
        return cache[v]

    return tp


def f_height_types(oracle, f: GrowthFunction, X: FType, Y: FType, tp=None) -> tuple[int, HeightTrace]:
    """Run the meet-and-compare procedure on two nodes of T_f.

    ``tp`` maps a level to the type of that vertex; by default it queries
    the oracle.
    """
    if X.f.key != f.key or Y.f.key != f.key:
        raise ValueError("f-types over a different growth function")
    if X.level == 0 and Y.level == 0:
        raise ValueError("height is undefined for the root paired with itself")
    if tp is None:
        tp = _vertex_types(oracle, f)
    steps: list[TraceStep] = []
    while True:
        Z = meet(X, Y)
        if steps:
            assert Z.level < steps[-1].level, "meet levels must strictly decrease"
        T = tp(Z.level)
        done = T == Z
        steps.append(TraceStep(X, Y, Z, Z.level, done))
        if done:
            return len(steps), HeightTrace(tuple(steps))
        X, Y = T, Z


def vertex_height(oracle, f: GrowthFunction, v: int, w: int, tp=None) -> int:
    if v == w:
        raise ValueError("height needs two distinct vertices")
    if tp is None:
        tp = _vertex_types(oracle, f)
    h, _ = f_height_types(oracle, f, tp(v), tp(w), tp)
    return h


def chi_n(oracle, f: GrowthFunction, n: int, pair: tuple[int, int], tp=None) -> int:
    """Color of the pair: its height modulo n."""
    if n < 1:
        raise ValueError("modulus must be at least 1")
    v, w = pair
    return vertex_height(oracle, f, v, w, tp) % n


@dataclass(frozen=True)
class PairFilter:
    kind: str = "all"
    label: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("all", "label"):
            raise ValueError(f"unknown pair filter {self.kind!r}")
        if self.kind == "label" and (self.label is None or self.label < 0):
            raise ValueError("label filter needs a nonnegative label")

    @classmethod
    def parse(cls, text: str) -> PairFilter:
        if text == "all":
            return cls()
        if text.startswith("label:"):
            return cls("label", int(text.split(":", 1)[1]))
        raise ValueError(f"bad pair filter {text!r}; use 'all' or 'label:<c>'")

    def __str__(self) -> str:
        return "all" if self.kind == "all" else f"label:{self.label}"


def max_consecutive(realized: Iterable[int]) -> int:
    """Largest H with every height 1..H realized (0 if height 1 is missing)."""
    realized = set(realized)
    h = 0
    while h + 1 in realized:
        h += 1
    return h


@dataclass
class Spectrum:
    histogram: dict[int, int]
    pairs_total: int
    pairs_used: int
    sampled: bool
    heights: np.ndarray = field(repr=False)
    pairs: np.ndarray = field(repr=False)

    @property
    def realized(self) -> list[int]:
        return sorted(self.histogram)

    @property
    def max_consecutive(self) -> int:
        return max_consecutive(self.histogram)

    @property
    def empty(self) -> bool:
        return self.pairs_used == 0

    def color_classes(self, n: int) -> list[int]:
        if n < 1:
            raise ValueError("modulus must be at least 1")
        counts = [0] * n
        for h, c in self.histogram.items():
            counts[h % n] += c
        return counts


def candidate_pairs(table: TypeTable, S: Sequence[int], filt: PairFilter) -> np.ndarray:
    """All pairs v < w of S passing the filter, as an (m, 2) array."""
    S = np.asarray(sorted(set(int(x) for x in S)), dtype=np.int64)
    if len(S) < 2:
        return np.zeros((0, 2), dtype=np.int64)
    i, j = np.triu_indices(len(S), 1)
    pairs = np.stack([S[i], S[j]], axis=1)
    if filt.kind == "label":
        if table.u != 2:
            raise ValueError("label filters apply only to u = 2")
        v, w = pairs[:, 0], pairs[:, 1]
        labels = table.raw[w * (w - 1) // 2 + v]
        pairs = pairs[labels == filt.label]
    return np.ascontiguousarray(pairs)


def height_spectrum(
    oracle,
    f: GrowthFunction,
    S: Sequence[int],
    filt: PairFilter = PairFilter(),
    sample_cap: int = 10**5,
    workers: int = 1,
    table: TypeTable | None = None,
    seed: int | None = None,
) -> Spectrum:
    """Histogram of heights over the (sampled) pairs of S passing the filter.

    Sampling is uniform without replacement, driven only by ``seed`` (the
    oracle seed by default), so the result does not depend on ``workers``.
    """
    if sample_cap < 1:
        raise ValueError("sample cap must be positive")
    S = sorted(set(int(x) for x in S))
    if S and S[0] < 0:
        raise ValueError("negative vertex id")
    if table is None:
        table = TypeTable(oracle, f, (S[-1] + 1) if S else 0)
    elif S and S[-1] >= table.n:
        raise IndexError("vertex set exceeds the type table")
    pairs = candidate_pairs(table, S, filt)
    total = len(pairs)
    sampled = total > sample_cap
    if sampled:
        rng = np.random.default_rng(oracle.seed if seed is None else seed)
        pick = np.sort(rng.choice(total, size=sample_cap, replace=False))
        pairs = np.ascontiguousarray(pairs[pick])
    heights = table.heights(pairs, workers=workers)
    values, counts = np.unique(heights, return_counts=True)
    histogram = {int(h): int(c) for h, c in zip(values, counts)}
    return Spectrum(histogram, total, len(pairs), sampled, heights, pairs)


@dataclass(frozen=True)
class Witness:
    v: int
    pair: tuple[int, int] | None
    strict: bool
    candidates: int


def _prefix_groups(table: TypeTable, v: int, S: Sequence[int]):
    lo, hi = int(table.letter_start[v]), int(table.letter_start[v + 1])
    groups: dict[bytes, list[tuple[int, bytes]]] = {}
    for x in S:
        off = int(table.offsets[x])
        block = table.trunc[off:off + hi]
        groups.setdefault(block[:lo].tobytes(), []).append((x, block[lo:hi].tobytes()))
    return groups


def first_split_pair(members: list[tuple[int, bytes]]) -> tuple[int, int] | None:
    """Lexicographically first (a, b), a < b, whose letters differ."""
    best = None
    for idx, (a, la) in enumerate(members):
        if best is not None and a >= best[0]:
            break
        for b, lb in members[idx + 1:]:
            if lb != la:
                best = (a, b)
                break
    return best


def meet_witness_search(
    oracle,
    f: GrowthFunction,
    v: int,
    S: Sequence[int],
    strict: bool = False,
    table: TypeTable | None = None,
) -> Witness:
    """First pair in S whose types meet exactly at level v.

    The strict variant also requires the meet to equal the type of v.
    """
    S = sorted(set(int(x) for x in S))
    if any(x <= v for x in S):
        raise ValueError(f"candidates must all be above {v}")
    if table is None:
        table = TypeTable(oracle, f, max(S[-1] + 1 if S else 0, v + 1))
    groups = _prefix_groups(table, v, S)
    if strict:
        own = table.trunc[int(table.offsets[v]):int(table.offsets[v + 1])].tobytes()
        groups = {own: groups[own]} if own in groups else {}
    best = None
    for members in groups.values():
        pair = first_split_pair(members)
        if pair is not None and (best is None or pair < best):
            best = pair
    return Witness(v, best, strict, len(S))


def planted_support(oracle, v: int, S: Sequence[int]) -> bool:
    """Whether two plants in S have planted types meeting exactly at level v."""
    sched = getattr(oracle, "schedule", None)
    if sched is None:
        return False
    groups: dict[tuple, list[tuple[int, tuple]]] = {}
    for x in sorted(S):
        loc = sched.locate(x)
        if loc is None or loc[0] <= v:
            continue
        X = sched.planted_type(x)
        groups.setdefault(X.letters[:v], []).append((x, X.letters[v]))
    return any(first_split_pair(m) is not None for m in groups.values())


def witness_statistics(
    oracle,
    f: GrowthFunction,
    vertices: Sequence[int],
    S: Sequence[int],
    table: TypeTable | None = None,
) -> dict:
    """Run both witness variants for every v and count the exceptions.

    The candidate set for v is the part of S above v. An exception is a v
    without a level-only witness.
    """
    S = sorted(set(int(x) for x in S))
    vertices = sorted(set(int(v) for v in vertices))
    if table is None:
        n = max([*S, *vertices], default=-1) + 1
        table = TypeTable(oracle, f, n)
    rows = []
    for v in vertices:
        cand = [x for x in S if x > v]
        lvl = meet_witness_search(oracle, f, v, cand, strict=False, table=table)
        st = meet_witness_search(oracle, f, v, cand, strict=True, table=table)
        rows.append(
            {
                "v": v,
                "level_only": list(lvl.pair) if lvl.pair else None,
                "strict": list(st.pair) if st.pair else None,
                "planted_support": planted_support(oracle, v, cand),
            }
        )
    exceptions = [r["v"] for r in rows if r["level_only"] is None]
    return {
        "rows": rows,
        "admitting": len(rows) - len(exceptions),
        "exceptions": exceptions,
        "exception_count": len(exceptions),
        "supported_without_witness": [
            r["v"] for r in rows if r["planted_support"] and r["level_only"] is None
        ],
    }


def literal_heights(oracle, f: GrowthFunction, pairs: Iterable[tuple[int, int]]) -> list[int]:
    """Heights computed straight from the definition, one pair at a time."""
    tp = _vertex_types(oracle, f)
    return [vertex_height(oracle, f, v, w, tp) for v, w in pairs]
