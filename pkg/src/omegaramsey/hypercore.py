"""Edge-labeled uniform hypergraphs, embeddings and the seeded oracle.

A finite structure stores one label per u-subset of ``{0..n-1}``, kept in
colexicographic order of the subsets so that the labels of all edges whose
largest vertex is ``v`` form one contiguous block starting at ``C(v, u)``.
"""
from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

from ._backend import kernels
from .errors import GuardExceeded

MAX_VERTEX = (1 << 63) - 1
TABLE_CEILING = 1 << 62
EMBEDDING_GUARD = 8


class _Star:
    """The missing-label marker; equal only to itself."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "*"

    def __reduce__(self):
        return (_Star, ())


STAR = _Star()


def is_star(x) -> bool:
    return x is STAR


def label_key(x) -> int:
    """Sort key that places the missing marker before every integer."""
    return -1 if x is STAR else x


def edge_set(vertices: Iterable[int], u: int | None = None) -> tuple[int, ...]:
    """Canonical form of a set of vertices: a strictly increasing tuple."""
    vs = tuple(sorted(int(v) for v in vertices))
    if u is not None and len(vs) != u:
        raise ValueError(f"edge set {vs} has {len(vs)} vertices, expected {u}")
    for a, b in zip(vs, vs[1:]):
        if a == b:
            raise ValueError(f"repeated vertex {a} in edge set")
    if vs and vs[0] < 0:
        raise ValueError(f"negative vertex id {vs[0]}")
    return vs


def colex_rank(vertices: Sequence[int]) -> int:
    """Position of a strictly increasing tuple among same-size subsets in colex order."""
    return sum(comb(v, j + 1) for j, v in enumerate(vertices))


def colex_subsets(n: int, k: int) -> list[tuple[int, ...]]:
    """k-subsets of range(n) as increasing tuples, in colex order."""
    subsets = [tuple(reversed(s)) for s in combinations(range(n - 1, -1, -1), k)]
    subsets.reverse()
    return subsets


@dataclass(frozen=True)
class FiniteHypergraph:
    """A complete ω-labeling of the u-subsets of ``{0..n-1}``."""

    u: int
    n: int
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.u < 1:
            raise ValueError("uniformity must be positive")
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        if len(self.labels) != comb(self.n, self.u):
            raise ValueError(
                f"expected {comb(self.n, self.u)} labels for n={self.n}, u={self.u}, "
                f"got {len(self.labels)}"
            )
        for x in self.labels:
            if isinstance(x, bool) or not isinstance(x, int) or x < 0:
                raise ValueError(f"labels must be nonnegative integers, got {x!r}")

    @classmethod
    def from_edges(cls, u: int, n: int, edges: dict) -> FiniteHypergraph:
        """Build from a mapping edge set -> label; every u-subset must appear."""
        labels: list[int | None] = [None] * comb(n, u)
        for verts, lab in edges.items():
            e = edge_set(verts, u)
            if e[-1] >= n:
                raise ValueError(f"edge {e} leaves the vertex range 0..{n - 1}")
            idx = colex_rank(e)
            if labels[idx] is not None:
                raise ValueError(f"edge {e} given twice")
            labels[idx] = lab
        missing = [i for i, x in enumerate(labels) if x is None]
        if missing:
            raise ValueError(f"{len(missing)} edge sets have no label")
        return cls(u, n, tuple(labels))

    @classmethod
    def constant(cls, u: int, n: int, label: int = 0) -> FiniteHypergraph:
        return cls(u, n, (label,) * comb(n, u))

    def edge_label(self, vertices: Iterable[int]) -> int:
        e = edge_set(vertices, self.u)
        if e and e[-1] >= self.n:
            raise ValueError(f"vertex {e[-1]} outside 0..{self.n - 1}")
        return self.labels[colex_rank(e)]

    def edges(self) -> Iterator[tuple[tuple[int, ...], int]]:
        for e, lab in zip(colex_subsets(self.n, self.u), self.labels):
            yield e, lab

    def to_json(self) -> dict:
        return {
            "u": self.u,
            "n": self.n,
            "edges": [[*e, str(lab)] for e, lab in self.edges()],
        }

    @classmethod
    def from_json(cls, data: dict) -> FiniteHypergraph:
        u, n = int(data["u"]), int(data["n"])
        edges = {}
        for row in data["edges"]:
            if len(row) != u + 1:
                raise ValueError(f"edge row {row!r} should have {u} vertices and a label")
            verts = [int(v) for v in row[:-1]]
            if verts != sorted(set(verts)):
                raise ValueError(f"edge row {row!r} is not strictly increasing")
            key = tuple(verts)
            if key in edges:
                raise ValueError(f"edge {key} given twice")
            edges[key] = int(row[-1])
        return cls.from_edges(u, n, edges)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":")) + "\n"


@dataclass(frozen=True)
class VertexMap:
    """An injective map from ``{0..len(image)-1}``; ``image[i]`` is the image of i."""

    image: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(set(self.image)) != len(self.image):
            raise ValueError(f"vertex map {self.image} is not injective")

    def __len__(self) -> int:
        return len(self.image)

    def __getitem__(self, i: int) -> int:
        return self.image[i]

    def compose(self, other: VertexMap) -> VertexMap:
        """``other`` after ``self``: i -> other[self[i]]."""
        return VertexMap(tuple(other.image[x] for x in self.image))


def _as_image(m) -> tuple[int, ...]:
    return m.image if isinstance(m, VertexMap) else tuple(m)


def induced(H: FiniteHypergraph, S: Sequence[int]) -> FiniteHypergraph:
    """Substructure on the listed vertices, relabeled 0..|S|-1 in list order."""
    S = tuple(S)
    if len(set(S)) != len(S):
        raise ValueError(f"duplicated vertex in {S}")
    for v in S:
        if not 0 <= v < H.n:
            raise ValueError(f"vertex {v} outside 0..{H.n - 1}")
    labels = tuple(H.edge_label(S[i] for i in e) for e in colex_subsets(len(S), H.u))
    return FiniteHypergraph(H.u, len(S), labels)


def is_embedding(A: FiniteHypergraph, B: FiniteHypergraph, m) -> bool:
    if A.u != B.u:
        raise ValueError(f"uniformity mismatch: {A.u} vs {B.u}")
    image = _as_image(m)
    if len(image) != A.n:
        raise ValueError(f"map has {len(image)} points, structure has {A.n} vertices")
    if len(set(image)) != len(image):
        return False
    if any(not 0 <= x < B.n for x in image):
        return False
    return all(B.edge_label(image[i] for i in e) == lab for e, lab in A.edges())


def enumerate_embeddings(
    A: FiniteHypergraph, B: FiniteHypergraph, guard: int = EMBEDDING_GUARD
) -> list[VertexMap]:
    """Every embedding of A into B, in lexicographic order of image tuples."""
    if A.u != B.u:
        raise ValueError(f"uniformity mismatch: {A.u} vs {B.u}")
    if A.n > guard:
        raise GuardExceeded("embedding search source size", A.n, guard)
    u = A.u
    # edge sets of A grouped by their largest vertex
    checks: list[list[tuple[tuple[int, ...], int]]] = [[] for _ in range(A.n)]
    for e, lab in A.edges():
        checks[e[-1]].append((e, lab))
    out: list[VertexMap] = []
    image: list[int] = []
    used = [False] * B.n

    def extend(i: int) -> None:
        if i == A.n:
            out.append(VertexMap(tuple(image)))
            return
        for x in range(B.n):
            if used[x]:
                continue
            image.append(x)
            if all(B.edge_label(image[j] for j in e) == lab for e, lab in checks[i]):
                used[x] = True
                extend(i + 1)
                used[x] = False
            image.pop()

    extend(0)
    return out


def brute_force_embeddings(A: FiniteHypergraph, B: FiniteHypergraph) -> list[VertexMap]:
    """Scan every injective map; for cross-checking on tiny structures."""
    return [
        VertexMap(p) for p in permutations(range(B.n), A.n) if is_embedding(A, B, p)
    ]


def canonical_form(H: FiniteHypergraph) -> tuple[int, ...]:
    """Lexicographically least label vector over all vertex orders (n <= 6)."""
    if H.n > 6:
        raise GuardExceeded("brute-force isomorphism size", H.n, 6)
    return min(induced(H, p).labels for p in permutations(range(H.n)))


class PlantSchedule:
    """Vertices that realize every f-type up to a given level.

    Vertex r realizes the r-th type in level-major, lexicographic order; the
    types below level l number at least l, so every plant of level l sits at
    a vertex id >= l and its planted edges only reach earlier vertices.
    A missing entry at letter i is realized by the label f(i), the least
    label that truncates to the marker.
    """

    def __init__(self, growth, depth: int) -> None:
        from .typetree import level_count

        if depth < 0:
            raise ValueError("plant depth must be nonnegative")
        if growth.lmax < depth:
            raise ValueError(f"growth function defined up to {growth.lmax}, plant depth {depth}")
        self.growth = growth
        self.depth = depth
        self.offset = 0
        self.starts = [0]
        for level in range(depth + 1):
            self.starts.append(self.starts[-1] + level_count(growth, level))
        self.total = self.starts[-1]
        self._labels = lru_cache(maxsize=1 << 14)(self._planted_labels)

    def level_range(self, level: int) -> range:
        """Vertex ids of the plants realizing types of the given level."""
        return range(self.offset + self.starts[level], self.offset + self.starts[level + 1])

    def locate(self, v: int) -> tuple[int, int] | None:
        """(level, rank within level) of plant v, or None for non-plants."""
        r = v - self.offset
        if r < 0 or r >= self.total:
            return None
        level = bisect_right(self.starts, r) - 1
        return level, r - self.starts[level]

    def planted_type(self, v: int):
        from .typetree import unrank_type

        loc = self.locate(v)
        if loc is None:
            return None
        return unrank_type(self.growth, *loc)

    def _planted_labels(self, v: int) -> tuple[int, ...] | None:
        X = self.planted_type(v)
        if X is None:
            return None
        out = []
        for i, letter in enumerate(X.letters):
            for entry in letter:
                out.append(self.growth.value(i) if entry is STAR else entry)
        return tuple(out)

    def planted_labels(self, v: int) -> tuple[int, ...] | None:
        """Concrete labels of the edges joining v to its planted level, flat order."""
        return self._labels(v)


@dataclass(frozen=True)
class HypergraphOracle:
    """Seeded labeling of the u-subsets of ω.

    ``random`` mode draws every label from the geometric(1/2) law via a
    keyed 64-bit hash. ``generic`` mode additionally plants one vertex per
    f-type of level at most ``plant_depth``.
    """

    u: int
    seed: int
    mode: str = "random"
    plant_depth: int = 0
    growth: object = None
    schedule: PlantSchedule | None = field(default=None, init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.u < 2:
            raise ValueError("uniformity must be at least 2")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.mode not in ("random", "generic"):
            raise ValueError(f"unknown oracle mode {self.mode!r}")
        if self.mode == "generic":
            from .typetree import minimal_growth

            growth = self.growth
            if growth is None:
                growth = minimal_growth(self.u, max(self.plant_depth, 1))
                object.__setattr__(self, "growth", growth)
            if growth.u != self.u:
                raise ValueError("growth function and oracle disagree on uniformity")
            object.__setattr__(self, "schedule", PlantSchedule(growth, self.plant_depth))

    n_limit = None

    def random_label(self, e: tuple[int, ...]) -> int:
        return kernels.edge_label(self.seed, e)

    def edge_label(self, vertices: Iterable[int]) -> int:
        e = edge_set(vertices, self.u)
        if e[-1] > MAX_VERTEX:
            raise ValueError(f"vertex ids must stay below 2**63, got {e[-1]}")
        if self.schedule is not None:
            planted = self.schedule.planted_labels(e[-1])
            if planted is not None:
                j = colex_rank(e[:-1])
                if j < len(planted):
                    return planted[j]
        return self.random_label(e)

    def raw_table(self, n: int) -> np.ndarray:
        """Labels of all u-subsets of range(n) in colex order (int64)."""
        raw = kernels.fill_labels(self.seed, self.u, n)
        if self.schedule is not None:
            sched = self.schedule
            stop = min(n, sched.offset + sched.total)
            for v in range(sched.offset, stop):
                planted = sched.planted_labels(v)
                if not planted:
                    continue
                if max(planted) >= TABLE_CEILING:
                    raise GuardExceeded("planted label size for the label table", max(planted), TABLE_CEILING)
                base = comb(v, self.u)
                raw[base:base + len(planted)] = planted
        return raw

    def describe(self) -> dict:
        return {"u": self.u, "seed": self.seed, "mode": self.mode, "lambda": self.plant_depth}

    @classmethod
    def from_descriptor(cls, data: dict, growth=None) -> HypergraphOracle:
        return cls(
            u=int(data["u"]),
            seed=int(data["seed"]),
            mode=data.get("mode", "random"),
            plant_depth=int(data.get("lambda", 0)),
            growth=growth,
        )


class StructureOracle:
    """Oracle interface over a finite structure, for fixtures loaded from files."""

    mode = "structure"

    def __init__(self, H: FiniteHypergraph, seed: int = 0) -> None:
        self.H = H
        self.u = H.u
        self.seed = seed
        self.n_limit = H.n
        self.schedule = None

    def edge_label(self, vertices: Iterable[int]) -> int:
        return self.H.edge_label(vertices)

    def raw_table(self, n: int) -> np.ndarray:
        if n > self.H.n:
            raise ValueError(f"structure has only {self.H.n} vertices, {n} requested")
        labels = self.H.labels[: comb(n, self.u)]
        if labels and max(labels) >= TABLE_CEILING:
            raise GuardExceeded("label size for the label table", max(labels), TABLE_CEILING)
        return np.array(labels, dtype=np.int64)

    def describe(self) -> dict:
        return {"u": self.u, "seed": self.seed, "mode": "structure", "n": self.H.n}


def materialize_prefix(oracle, N: int) -> FiniteHypergraph:
    """The finite substructure of the oracle on ``{0..N-1}``."""
    if N < 0:
        raise ValueError("prefix size must be nonnegative")
    raw = oracle.raw_table(N)
    labels = [int(x) for x in raw]
    # planted labels may exceed the int64 table; recover them exactly
    schedule = getattr(oracle, "schedule", None)
    if schedule is not None:
        for v in range(schedule.offset, min(N, schedule.offset + schedule.total)):
            planted = schedule.planted_labels(v)
            base = comb(v, oracle.u)
            labels[base:base + len(planted)] = planted
    return FiniteHypergraph(oracle.u, N, tuple(labels))
