from __future__ import annotations

import json
import random
from itertools import permutations
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omegaramsey import _pycore
from omegaramsey.errors import GuardExceeded
from omegaramsey.hypercore import (
    STAR,
    FiniteHypergraph,
    HypergraphOracle,
    VertexMap,
    brute_force_embeddings,
    colex_rank,
    colex_subsets,
    edge_set,
    enumerate_embeddings,
    induced,
    is_embedding,
    label_key,
    materialize_prefix,
)


def random_structure(rng: random.Random, u: int, n: int, labels: int = 2) -> FiniteHypergraph:
    return FiniteHypergraph(u, n, tuple(rng.randrange(labels) for _ in range(comb(n, u))))


def test_star_is_not_an_integer():
    assert STAR == STAR
    assert all(STAR != i for i in range(5))
    assert repr(STAR) == "*"
    assert sorted([3, STAR, 0], key=label_key) == [STAR, 0, 3]


def test_edge_set_canonical():
    assert edge_set([3, 1], 2) == (1, 3)
    with pytest.raises(ValueError):
        edge_set([1, 1], 2)
    with pytest.raises(ValueError):
        edge_set([1, 2, 3], 2)


def test_colex_rank_matches_enumeration():
    for k in (1, 2, 3):
        subsets = colex_subsets(7, k)
        assert len(subsets) == comb(7, k)
        assert [colex_rank(s) for s in subsets] == list(range(len(subsets)))


# edge_label


def test_label_is_pure():
    o = HypergraphOracle(2, 99)
    assert o.edge_label((4, 17)) == o.edge_label((17, 4)) == o.edge_label([4, 17])


def test_first_set_bit_rule():
    assert _pycore.label_from_hash(1 << 63) == 0
    assert _pycore.label_from_hash((1 << 62) | 5) == 1
    assert _pycore.label_from_hash(1) == 63
    assert _pycore.label_from_hash(0) == 63


def test_label_zero_frequency():
    # geometric(1/2): label 0 has mass 1/2; 10^5 distinct edge sets
    o = HypergraphOracle(2, 2024)
    raw = o.raw_table(448)  # C(448, 2) = 100128
    sample = raw[:100_000]
    freq = float((sample == 0).mean())
    assert 0.49 <= freq <= 0.51


def test_edge_label_arity_checked():
    o = HypergraphOracle(3, 1)
    with pytest.raises(ValueError):
        o.edge_label((1, 2))


def test_oracle_rejects_bad_parameters():
    with pytest.raises(ValueError):
        HypergraphOracle(1, 0)
    with pytest.raises(ValueError):
        HypergraphOracle(2, -1)
    with pytest.raises(ValueError):
        HypergraphOracle(2, 0, mode="other")


# materialize_prefix


def test_prefix_small_cases():
    o = HypergraphOracle(3, 5)
    assert materialize_prefix(o, 0).labels == ()
    H = materialize_prefix(o, 3)
    assert len(H.labels) == 1
    assert H.labels[0] == o.edge_label((0, 1, 2))


@pytest.mark.parametrize("mode", ["random", "generic"])
@pytest.mark.parametrize("u", [2, 3])
def test_prefix_agrees_with_edge_label(u, mode):
    o = HypergraphOracle(u, 11, mode, 3)
    H = materialize_prefix(o, 12)
    for e, lab in H.edges():
        assert o.edge_label(e) == lab


@pytest.mark.parametrize("u", [2, 3])
def test_prefix_coherence(u):
    o = HypergraphOracle(u, 8)
    big = materialize_prefix(o, 9)
    for n in range(10):
        assert induced(big, range(n)) == materialize_prefix(o, n)


# induced


def test_induced_identity_and_small(six):
    assert induced(six, range(6)) == six
    assert induced(six, [3]).labels == ()


def test_induced_hand_relabeling():
    H = FiniteHypergraph.from_edges(2, 3, {(0, 1): 0, (0, 2): 0, (1, 2): 1})
    sub = induced(H, (1, 2))
    assert sub.n == 2 and sub.labels == (1,)


def test_induced_errors(six):
    with pytest.raises(ValueError):
        induced(six, [1, 1])
    with pytest.raises(ValueError):
        induced(six, [7])


# embeddings


def test_is_embedding_examples():
    A0 = FiniteHypergraph.constant(2, 2, 0)
    B1 = FiniteHypergraph.constant(2, 2, 1)
    assert is_embedding(A0, A0, (0, 1))
    assert not any(is_embedding(A0, B1, p) for p in permutations(range(2)))
    C0 = FiniteHypergraph.constant(2, 3, 0)
    maps = list(permutations(range(3), 2))
    assert len(maps) == 6
    assert all(is_embedding(A0, C0, p) for p in maps)


def test_is_embedding_arity_mismatch():
    with pytest.raises(ValueError):
        is_embedding(FiniteHypergraph.constant(2, 2), FiniteHypergraph.constant(3, 3), (0, 1))


def test_enumerate_examples():
    A1 = FiniteHypergraph.constant(2, 1)
    assert len(enumerate_embeddings(A1, FiniteHypergraph.constant(2, 7))) == 7
    A0 = FiniteHypergraph.constant(2, 2, 0)
    assert [m.image for m in enumerate_embeddings(A0, A0)] == [(0, 1), (1, 0)]
    C0 = FiniteHypergraph.constant(2, 3, 0)
    assert [m.image for m in enumerate_embeddings(A0, C0)] == sorted(permutations(range(3), 2))


def test_enumerate_guard():
    with pytest.raises(GuardExceeded):
        enumerate_embeddings(FiniteHypergraph.constant(2, 9), FiniteHypergraph.constant(2, 9))


def test_enumerate_matches_brute_force():
    rng = random.Random(3)
    for _ in range(150):
        u = rng.choice([2, 3])
        nb = rng.randint(0, 5)
        na = rng.randint(0, nb)
        B = random_structure(rng, u, nb)
        A = induced(B, rng.sample(range(nb), na)) if rng.random() < 0.5 else random_structure(rng, u, na)
        got = enumerate_embeddings(A, B)
        assert got == brute_force_embeddings(A, B)
        assert [m.image for m in got] == sorted(m.image for m in got)
        assert all(is_embedding(A, B, m) for m in got)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([2, 3]))
def test_embedding_composition(seed, u):
    rng = random.Random(seed)
    C = random_structure(rng, u, 6)
    B = induced(C, rng.sample(range(6), 4))
    A = induced(B, rng.sample(range(4), 3))
    for m in enumerate_embeddings(A, B)[:5]:
        for m2 in enumerate_embeddings(B, C)[:5]:
            assert is_embedding(A, C, m.compose(m2))


def test_vertex_map_injective():
    with pytest.raises(ValueError):
        VertexMap((1, 1))


# file format


def test_json_round_trip(six):
    data = json.loads(six.dumps())
    assert data["edges"][0] == [0, 1, "0"]
    assert FiniteHypergraph.from_json(data) == six


def test_json_big_labels():
    H = FiniteHypergraph(2, 2, (2**80,))
    text = H.dumps()
    assert str(2**80) in text
    assert FiniteHypergraph.from_json(json.loads(text)) == H


def test_json_rejects_incomplete_or_duplicate():
    with pytest.raises(ValueError):
        FiniteHypergraph.from_json({"u": 2, "n": 3, "edges": [[0, 1, "0"]]})
    with pytest.raises(ValueError):
        FiniteHypergraph.from_json({"u": 2, "n": 2, "edges": [[0, 1, "0"], [0, 1, "1"]]})
    with pytest.raises(ValueError):
        FiniteHypergraph.from_json({"u": 2, "n": 2, "edges": [[1, 0, "0"]]})


def test_oracle_descriptor_round_trip():
    o = HypergraphOracle(3, 2**63 + 5, "generic", 2)
    assert o.describe() == {"u": 3, "seed": 2**63 + 5, "mode": "generic", "lambda": 2}
    o2 = HypergraphOracle.from_descriptor(o.describe())
    assert o2.edge_label((0, 1, 9)) == o.edge_label((0, 1, 9))
