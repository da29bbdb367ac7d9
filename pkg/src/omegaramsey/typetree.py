"""Growth functions, f-types and the tree T_f.

An f-type of level l is stored as a tuple of l letters. Letter i holds one
entry per (u-2)-subset S of ``{0..i-1}`` (colex order): the extended label of
the edge ``S + {i, t}`` where t is the type vertex. Every other edge set of
the type is labeled by the marker, so the letters carry all information,
the order on T_f becomes prefix order and the meet becomes the longest
common prefix.

Flattening the letters of a vertex type gives the labels of the edges
``R + {v}`` for the (u-1)-subsets R of ``{0..v-1}`` in colex order, which is
exactly the block of the colex label table that ends at v. ``TypeTable``
relies on this.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from math import comb
from typing import Iterator, Sequence

import numpy as np

from ._backend import kernels
from .errors import GrowthError, GuardExceeded
from .hypercore import STAR, TABLE_CEILING, colex_subsets

ENUMERATION_GUARD = 10**7
TABLE_GUARD = 10**7
SATURATION_BITS = 1 << 14


class GrowthFunction:
    """Values f(0), ..., f(lmax) of a finite-valued growth function.

    Minimal growth functions are evaluated exactly until a value passes
    ``SATURATION_BITS`` bits. Later values are larger still (the minimal
    sequence is nondecreasing), so a label comparison against them is decided
    by bit length alone.
    """

    def __init__(
        self,
        u: int,
        values: Sequence[int],
        *,
        lmax: int | None = None,
        kind: str = "custom",
        allow_invalid: bool = False,
    ) -> None:
        if u < 2:
            raise ValueError("uniformity must be at least 2")
        values = tuple(int(x) for x in values)
        if not values:
            raise ValueError("a growth function needs at least f(0)")
        for i, x in enumerate(values):
            if x < 1:
                raise ValueError(f"f({i}) = {x} is not a positive integer")
        self.u = u
        self.kind = kind
        self._exact = values
        self.lmax = len(values) - 1 if lmax is None else lmax
        if self.lmax < len(values) - 1:
            raise ValueError("lmax is shorter than the given values")
        if kind != "minimal" and self.lmax != len(values) - 1:
            raise ValueError("custom growth functions are fully explicit")
        self.allow_invalid = allow_invalid
        if not allow_invalid:
            bad = self.violations()
            if bad:
                raise GrowthError(
                    f"growth function violates the branching inequality at levels {bad}"
                )

    @property
    def exact_upto(self) -> int:
        """Largest index whose value is stored exactly."""
        return len(self._exact) - 1

    @property
    def saturated(self) -> bool:
        return self.exact_upto < self.lmax

    @property
    def key(self) -> tuple:
        if self.kind == "minimal":
            return ("minimal", self.u)
        return ("custom", self.u, self._exact)

    def __eq__(self, other) -> bool:
        return isinstance(other, GrowthFunction) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        head = ", ".join(str(x) for x in self._exact[:6])
        more = ", ..." if self.lmax > 5 else ""
        return f"GrowthFunction(u={self.u}, kind={self.kind}, lmax={self.lmax}, [{head}{more}])"

    def _check_index(self, i: int) -> None:
        if not 0 <= i <= self.lmax:
            raise IndexError(f"growth function is defined on 0..{self.lmax}, asked for {i}")

    def value(self, i: int) -> int:
        self._check_index(i)
        if i <= self.exact_upto:
            return self._exact[i]
        raise GuardExceeded(f"exact value of f({i})", f"more than {SATURATION_BITS} bits", SATURATION_BITS)

    def __getitem__(self, i: int) -> int:
        return self.value(i)

    @property
    def values(self) -> tuple[int, ...]:
        if self.saturated:
            raise GuardExceeded("exact growth values", self.lmax + 1, self.exact_upto + 1)
        return self._exact

    def admits(self, label: int, i: int) -> bool:
        """True iff label < f(i), i.e. the label survives truncation at letter i."""
        self._check_index(i)
        if i <= self.exact_upto:
            return label < self._exact[i]
        if label.bit_length() <= SATURATION_BITS:
            return True
        raise GuardExceeded(f"comparison with saturated f({i})", label.bit_length(), SATURATION_BITS)

    def cap(self, i: int, ceiling: int) -> int:
        """min(f(i), ceiling) for ceilings below 2**SATURATION_BITS."""
        self._check_index(i)
        if i <= self.exact_upto:
            return min(self._exact[i], ceiling)
        return ceiling

    def violations(self) -> list[int]:
        """Levels at which f(l) is below the product bound."""
        bad = []
        for level in range(self.exact_upto + 1):
            bound = 1
            for i in range(self.u - 2, level):
                bound *= (self._exact[i] + 1) ** comb(i, self.u - 2)
                if bound > self._exact[level]:
                    break
            if self._exact[level] < bound:
                bad.append(level)
        return bad

    def to_json(self) -> dict:
        return {"u": self.u, "values": [str(x) for x in self.values]}

    @classmethod
    def from_json(cls, data: dict, allow_invalid: bool = False) -> GrowthFunction:
        return cls(int(data["u"]), [int(x) for x in data["values"]], allow_invalid=allow_invalid)


def minimal_growth(u: int, lmax: int) -> GrowthFunction:
    """The least growth function: the branching inequality taken with equality."""
    if u < 2:
        raise ValueError("uniformity must be at least 2")
    if lmax < 0:
        raise ValueError("lmax must be nonnegative")
    values = [1]
    for level in range(1, lmax + 1):
        prev = values[-1]
        i = level - 1
        # f(l) = f(l-1) * (f(l-1)+1)^C(l-1, u-2)
        values.append(prev * (prev + 1) ** comb(i, u - 2) if i >= u - 2 else 1)
        if values[-1].bit_length() > SATURATION_BITS:
            break
    return GrowthFunction(u, values, lmax=lmax, kind="minimal")


def level_count(f: GrowthFunction, level: int) -> int:
    """Number of f-types of the given level."""
    if level < 0:
        raise ValueError("level must be nonnegative")
    total = 1
    for i in range(f.u - 2, level):
        total *= (f.value(i) + 1) ** comb(i, f.u - 2)
    return total


def successor_count(f: GrowthFunction, level: int) -> int:
    """Number of immediate successors of any node of the given level."""
    return (f.value(level) + 1) ** comb(level, f.u - 2)


def letter_size(u: int, i: int) -> int:
    return comb(i, u - 2)


def _format_entry(x) -> str:
    return "*" if x is STAR else str(x)


def _parse_entry(s: str):
    s = s.strip()
    if s == "*":
        return STAR
    if not s.isdigit():
        raise ValueError(f"bad type entry {s!r}")
    return int(s)


class FType:
    """A node of T_f: a sequence of letters over a fixed growth function."""

    __slots__ = ("f", "letters", "_hash")

    def __init__(self, f: GrowthFunction, letters: Sequence[Sequence], *, check: bool = True) -> None:
        self.f = f
        self.letters = tuple(tuple(letter) for letter in letters)
        self._hash = None
        if check:
            self.validate()

    def validate(self) -> None:
        f = self.f
        for i, letter in enumerate(self.letters):
            if len(letter) != comb(i, f.u - 2):
                raise ValueError(
                    f"letter {i} has {len(letter)} entries, expected {comb(i, f.u - 2)}"
                )
            for x in letter:
                if x is STAR:
                    continue
                if isinstance(x, bool) or not isinstance(x, int) or x < 0:
                    raise ValueError(f"letter {i} carries an invalid entry {x!r}")
                if not f.admits(x, i):
                    raise ValueError(f"entry {x} at letter {i} is not below f({i})")

    @property
    def level(self) -> int:
        return len(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FType):
            return NotImplemented
        return self.f.key == other.f.key and self.letters == other.letters

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.f.key, self.letters))
        return self._hash

    def __repr__(self) -> str:
        return f"FType({str(self)!r}, level={self.level})"

    def __str__(self) -> str:
        return "|".join(",".join(_format_entry(x) for x in letter) for letter in self.letters)

    def entries(self) -> tuple:
        return tuple(x for letter in self.letters for x in letter)

    @classmethod
    def parse(cls, text: str, f: GrowthFunction, level: int | None = None) -> FType:
        """Read the ``|``/``,`` text format.

        The empty string is the root unless ``level`` says otherwise (for
        u >= 3 the unique level-1 type also renders as the empty string).
        """
        if text == "" and not level:
            return root(f)
        letters = [[_parse_entry(s) for s in part.split(",")] if part else [] for part in text.split("|")]
        X = cls(f, letters)
        if level is not None and X.level != level:
            raise ValueError(f"text {text!r} has level {X.level}, expected {level}")
        return X


def root(f: GrowthFunction) -> FType:
    return FType(f, (), check=False)


def _same_tree(X: FType, Y: FType) -> None:
    if X.f.key != Y.f.key:
        raise ValueError("f-types over different growth functions")


def restrict(X: FType, level: int) -> FType:
    if not 0 <= level <= X.level:
        raise ValueError(f"cannot restrict a level-{X.level} type to level {level}")
    if level == X.level:
        return X
    return FType(X.f, X.letters[:level], check=False)


def common_prefix_length(a: Sequence, b: Sequence) -> int:
    n = min(len(a), len(b))
    for i in range(n):
        if a[i] != b[i]:
            return i
    return n


def meet(X: FType, Y: FType) -> FType:
    """Longest common prefix of two f-types."""
    _same_tree(X, Y)
    return restrict(X, common_prefix_length(X.letters, Y.letters))


def is_prefix(X: FType, Y: FType) -> bool:
    _same_tree(X, Y)
    return X.level <= Y.level and Y.letters[: X.level] == X.letters


def _letter_choices(f: GrowthFunction, i: int) -> tuple:
    return (STAR, *range(f.value(i)))


def letters_at(f: GrowthFunction, i: int, guard: int = ENUMERATION_GUARD) -> Iterator[tuple]:
    """All letters at position i, ⋆ first, then in increasing label order."""
    n = successor_count(f, i)
    if n > guard:
        raise GuardExceeded(f"letters at position {i}", n, guard)
    choices = _letter_choices(f, i)
    return product(choices, repeat=comb(i, f.u - 2))


def enumerate_level(f: GrowthFunction, level: int, guard: int = ENUMERATION_GUARD) -> Iterator[FType]:
    """Every f-type of the level once, lexicographically with ⋆ before 0."""
    n = level_count(f, level)
    if n > guard:
        raise GuardExceeded(f"enumeration of level {level}", n, guard)
    per_letter = [list(product(_letter_choices(f, i), repeat=comb(i, f.u - 2))) for i in range(level)]
    for letters in product(*per_letter):
        yield FType(f, letters, check=False)


def immediate_successors(X: FType, guard: int = ENUMERATION_GUARD) -> list[FType]:
    return [FType(X.f, X.letters + (letter,), check=False) for letter in letters_at(X.f, X.level, guard)]


def unrank_type(f: GrowthFunction, level: int, rank: int) -> FType:
    """The rank-th type of the level in ``enumerate_level`` order."""
    if not 0 <= rank < level_count(f, level):
        raise IndexError(f"rank {rank} outside level {level}")
    letters = []
    for i in reversed(range(level)):
        base = f.value(i) + 1
        entries = []
        for _ in range(comb(i, f.u - 2)):
            rank, d = divmod(rank, base)
            entries.append(STAR if d == 0 else d - 1)
        entries.reverse()
        letters.append(tuple(entries))
    letters.reverse()
    return FType(f, letters, check=False)


def rank_type(X: FType) -> int:
    rank = 0
    for i, letter in enumerate(X.letters):
        base = X.f.value(i) + 1
        for x in letter:
            rank = rank * base + (0 if x is STAR else x + 1)
    return rank


def type_of_vertex(oracle, f: GrowthFunction, v: int) -> FType:
    """The f-type of vertex v, queried edge by edge from the oracle."""
    if f.u != oracle.u:
        raise ValueError("growth function and oracle disagree on uniformity")
    if v > f.lmax:
        raise IndexError(f"vertex {v} is beyond the growth function range 0..{f.lmax}")
    letters = []
    for i in range(v):
        letter = []
        for S in colex_subsets(i, f.u - 2):
            lab = oracle.edge_label((*S, i, v))
            letter.append(lab if f.admits(lab, i) else STAR)
        letters.append(tuple(letter))
    return FType(f, letters, check=False)


class TypeTable:
    """Types of all vertices of a prefix ``{0..n-1}``, stored flat.

    ``raw`` holds the oracle labels of every u-subset in colex order and
    ``trunc`` the same labels after truncation (-1 for the marker); the type
    of v is ``trunc[C(v,u):C(v+1,u)]``.
    """

    def __init__(self, oracle, f: GrowthFunction, n: int, guard: int = TABLE_GUARD, backend=None) -> None:
        if f.u != oracle.u:
            raise ValueError("growth function and oracle disagree on uniformity")
        if n - 1 > f.lmax:
            raise IndexError(f"prefix of {n} vertices needs f up to {n - 1}, have {f.lmax}")
        u = oracle.u
        size = comb(n, u)
        if size > guard:
            raise GuardExceeded(f"type table for {n} vertices", size, guard)
        self.kernels = backend or kernels
        self.oracle = oracle
        self.f = f
        self.u = u
        self.n = n
        self.raw = np.ascontiguousarray(oracle.raw_table(n), dtype=np.int64)
        caps = np.array([f.cap(i, TABLE_CEILING) for i in range(n)], dtype=np.int64)
        self.trunc = np.ascontiguousarray(self.kernels.truncate_labels(self.raw, u, n, caps), dtype=np.int64)
        self.offsets = np.array([comb(v, u) for v in range(n + 1)], dtype=np.int64)
        self.letter_start = np.array([comb(i, u - 1) for i in range(n + 1)], dtype=np.int64)

    def type_of(self, v: int) -> FType:
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} outside the table 0..{self.n - 1}")
        block = self.trunc[self.offsets[v]:self.offsets[v + 1]].tolist()
        letters = []
        for i in range(v):
            lo, hi = self.letter_start[i], self.letter_start[i + 1]
            letters.append(tuple(STAR if x < 0 else x for x in block[lo:hi]))
        return FType(self.f, letters, check=False)

    def pair_label(self, v: int, w: int) -> int:
        """Label of the edge {v, w} (u = 2 only)."""
        if self.u != 2:
            raise ValueError("pair labels exist only for u = 2")
        a, b = min(v, w), max(v, w)
        return int(self.raw[comb(b, 2) + a])

    def lcp(self, a: int, b: int, limit: int | None = None) -> int:
        """Number of leading letters shared by the types of a and b."""
        if limit is None:
            limit = min(a, b)
        return self.kernels.lcp_letters(self.trunc, self.offsets, self.letter_start, a, b, limit)

    def heights(self, pairs, workers: int = 1) -> np.ndarray:
        """Height of every (v, w) row of ``pairs``; order of rows preserved."""
        pairs = np.ascontiguousarray(np.asarray(pairs, dtype=np.int64).reshape(-1, 2))
        if len(pairs) and (pairs.min() < 0 or pairs.max() >= self.n):
            raise IndexError("pair outside the type table")
        if len(pairs) and np.any(pairs[:, 0] == pairs[:, 1]):
            raise ValueError("height needs two distinct vertices")
        out = np.zeros(len(pairs), dtype=np.int64)
        run = self.kernels.heights
        if workers <= 1 or len(pairs) < 2 * workers:
            run(self.trunc, self.offsets, self.letter_start, pairs, out, 0, len(pairs))
            return out
        bounds = np.linspace(0, len(pairs), workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            jobs = [
                pool.submit(run, self.trunc, self.offsets, self.letter_start, pairs, out, int(lo), int(hi))
                for lo, hi in zip(bounds[:-1], bounds[1:])
            ]
            for job in jobs:
                job.result()
        return out


def dumps_growth(f: GrowthFunction) -> str:
    return json.dumps(f.to_json()) + "\n"
