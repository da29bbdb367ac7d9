"""Exhaustive check of the finite arrow relation C -> (B)^A_{k, budget}.

Colorings of Emb(A, C) are base-k counters over the embeddings in
``enumerate_embeddings`` order, most significant digit first; colors are
0-based internally and 1-based in everything returned to callers. With the
symmetry reduction the first embedding always gets color 1, which is sound
because permuting colors maps counterexamples to counterexamples.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from ._backend import kernels, load
from .errors import GuardExceeded
from .hypercore import FiniteHypergraph, VertexMap, enumerate_embeddings, is_embedding

COLORING_GUARD = 1 << 24


@dataclass(frozen=True)
class ArrowInstance:
    C: FiniteHypergraph
    B: FiniteHypergraph
    A: FiniteHypergraph
    k: int
    budget: int

    def __post_init__(self) -> None:
        if not self.C.u == self.B.u == self.A.u:
            raise ValueError("C, B and A must share the uniformity")
        if self.k < 1:
            raise ValueError("color count must be at least 1")
        if self.budget < 1:
            raise ValueError("value budget must be at least 1")
        if not self.A.n <= self.B.n <= self.C.n:
            raise ValueError("need |A| <= |B| <= |C|")

    def to_json(self) -> dict:
        return {
            "C": self.C.to_json(),
            "B": self.B.to_json(),
            "A": self.A.to_json(),
            "k": self.k,
            "budget": self.budget,
        }

    @classmethod
    def from_json(cls, data: dict) -> ArrowInstance:
        return cls(
            C=FiniteHypergraph.from_json(data["C"]),
            B=FiniteHypergraph.from_json(data["B"]),
            A=FiniteHypergraph.from_json(data["A"]),
            k=int(data["k"]),
            budget=int(data["budget"]),
        )


def _color_of(chi, emb: VertexMap) -> int:
    if callable(chi):
        return chi(emb)
    if emb.image in chi:
        return chi[emb.image]
    return chi[emb]


def copy_value_count(
    chi: Mapping | Callable,
    C: FiniteHypergraph,
    A: FiniteHypergraph,
    g,
    B: FiniteHypergraph | None = None,
) -> int:
    """Distinct colors on the embeddings of A whose image lies inside g's image.

    ``chi`` maps an embedding (or its image tuple) to a color. When B is
    given, g is checked to be an embedding of B.
    """
    image = g.image if isinstance(g, VertexMap) else tuple(g)
    if B is not None and not is_embedding(B, C, image):
        raise ValueError(f"{image} is not an embedding of B into C")
    if len(set(image)) != len(image) or any(not 0 <= x < C.n for x in image):
        raise ValueError(f"{image} is not an injective map into C")
    inside = set(image)
    return len(
        {_color_of(chi, e) for e in enumerate_embeddings(A, C) if inside.issuperset(e.image)}
    )


@dataclass
class ArrowVerdict:
    instance: ArrowInstance
    holds: bool
    embeddings: list[VertexMap]
    copies: list[VertexMap]
    members: list[list[int]] = field(repr=False)
    counterexample: tuple[int, ...] | None = None
    visited: int = 0
    symmetric: bool = True

    def copy_values(self, coloring) -> list[int]:
        return [len({coloring[j] for j in mem}) for mem in self.members]

    def witness_for(self, coloring) -> VertexMap | None:
        """First copy of B on which the coloring uses at most ``budget`` values."""
        if len(coloring) != len(self.embeddings):
            raise ValueError("coloring length differs from the number of embeddings")
        for g, count in zip(self.copies, self.copy_values(coloring)):
            if count <= self.instance.budget:
                return g
        return None

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "k": self.instance.k,
            "budget": self.instance.budget,
            "embedding_order": [list(e.image) for e in self.embeddings],
            "copies": len(self.copies),
            "counterexample": list(self.counterexample) if self.counterexample else None,
            "visited": self.visited,
            "symmetry_reduction": self.symmetric,
        }


def _copy_members(embs: list[VertexMap], copies: list[VertexMap]) -> list[list[int]]:
    out = []
    for g in copies:
        inside = set(g.image)
        out.append([j for j, e in enumerate(embs) if inside.issuperset(e.image)])
    return out


def _csr(members: list[list[int]], m: int):
    """Pack deduplicated copies and group them by their last member."""
    distinct = sorted({tuple(mem) for mem in members})
    flat, copy_ptr = [], [0]
    for mem in distinct:
        flat.extend(mem)
        copy_ptr.append(len(flat))
    by_pos: list[list[int]] = [[] for _ in range(m)]
    for c, mem in enumerate(distinct):
        by_pos[mem[-1]].append(c)
    order, pos_ptr = [], [0]
    for lst in by_pos:
        order.extend(lst)
        pos_ptr.append(len(order))
    as32 = lambda xs: np.asarray(xs, dtype=np.int32)
    return as32(flat), as32(copy_ptr), as32(order), as32(pos_ptr)


def arrow_check(
    inst: ArrowInstance,
    guard: int = COLORING_GUARD,
    symmetric: bool = True,
    backend: str | None = None,
) -> ArrowVerdict:
    """Decide C -> (B)^A_{k,budget} by searching for a defeating coloring."""
    embs = enumerate_embeddings(inst.A, inst.C)
    copies = enumerate_embeddings(inst.B, inst.C)
    m, k = len(embs), inst.k
    required = k**m
    if required > guard:
        raise GuardExceeded(f"colorings of {m} embeddings with {k} colors", required, guard)
    members = _copy_members(embs, copies)
    verdict = ArrowVerdict(inst, True, embs, copies, members, symmetric=symmetric)
    if not copies:
        # no copy of B at all: every coloring defeats, the first is constant
        verdict.holds = False
        verdict.counterexample = (1,) * m
        verdict.visited = 1
        return verdict
    if any(not mem for mem in members) or m == 0 or inst.budget >= k:
        # some copy sees no embedding of A, or no coloring can exceed the budget
        verdict.visited = 1
        return verdict
    kern = load(backend) if backend else kernels
    if k > 63:
        kern = load("python")
    flat, copy_ptr, by_pos, pos_ptr = _csr(members, m)
    coloring, visited = kern.arrow_search(m, k, inst.budget, symmetric, flat, copy_ptr, by_pos, pos_ptr)
    verdict.visited = visited
    if coloring is not None:
        colors = tuple(int(c) + 1 for c in coloring)
        if verdict.witness_for(colors) is not None:
            raise AssertionError("search returned a coloring that some copy survives")
        verdict.holds = False
        verdict.counterexample = colors
    return verdict


def min_budget(
    C: FiniteHypergraph,
    B: FiniteHypergraph,
    A: FiniteHypergraph,
    k: int,
    guard: int = COLORING_GUARD,
) -> int:
    """Least budget for which the arrow relation holds."""
    top = min(k, max(1, len(enumerate_embeddings(A, B))))
    for budget in range(1, top + 1):
        if arrow_check(ArrowInstance(C, B, A, k, budget), guard=guard).holds:
            return budget
    raise ValueError("B does not embed into C, so no budget works")
