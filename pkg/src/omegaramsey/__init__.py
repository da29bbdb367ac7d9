"""Compressed trees of types for ω-edge-labeled uniform hypergraphs.

Modules:

``hypercore``  labeled hypergraphs, embeddings, the seeded oracle
``typetree``   growth functions, f-types, the tree T_f
``coloring``   f-heights, the modular height coloring, witness search
``arrow``      exhaustive finite arrow-relation oracle
``cli``        experiment runner
"""
from ._backend import BACKEND
from .errors import GrowthError, GuardExceeded
from .hypercore import (
    STAR,
    FiniteHypergraph,
    HypergraphOracle,
    StructureOracle,
    VertexMap,
    enumerate_embeddings,
    induced,
    is_embedding,
    materialize_prefix,
)
from .typetree import (
    FType,
    GrowthFunction,
    TypeTable,
    enumerate_level,
    immediate_successors,
    is_prefix,
    level_count,
    meet,
    minimal_growth,
    restrict,
    successor_count,
    type_of_vertex,
)
from .coloring import PairFilter, chi_n, f_height_types, height_spectrum, meet_witness_search, vertex_height
from .arrow import ArrowInstance, arrow_check, copy_value_count, min_budget

__version__ = "0.1.0"
