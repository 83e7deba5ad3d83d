"""Minimal sets, N-patterns, pattern-count bounds and small Ramsey/expansion checks."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    FiniteStructure,
    OrderedFamily,
    composition_table,
    disjoint_union,
    embedding_index,
    iter_embedding_maps,
    pure_set,
)
from .errors import CostCapExceeded, FlavorMismatch, FraisseError, max_cost
from .orders import LinearOrder


def pullback_order(order: LinearOrder, f: Sequence[int]) -> tuple[int, ...]:
    """Ranking of the source vertices induced by ``order`` along ``f``."""
    pos = order.positions
    return tuple(sorted(range(len(f)), key=lambda i: pos[f[i]]))


@dataclass(frozen=True)
class MinimalSetSpec:
    source: FiniteStructure  # A_m
    expansions: frozenset  # rankings of A_m's vertices, each a permutation tuple
    order: LinearOrder  # K' on the universe

    def __post_init__(self):
        object.__setattr__(self, "expansions", frozenset(tuple(e) for e in self.expansions))
        m = self.source.n
        for e in self.expansions:
            if sorted(e) != list(range(m)):
                raise ValueError(f"{e} is not a linear order on {m} points")

    @property
    def level(self) -> int:
        return self.source.n


def all_orders(m: int) -> frozenset:
    return frozenset(itertools.permutations(range(m)))


def minimal_set(spec: MinimalSetSpec, universe: FiniteStructure) -> OrderedFamily:
    """Embeddings along which the order on the universe pulls back into the chosen set."""
    if spec.order.n != universe.n:
        raise ValueError("the witness order must order the universe")
    index = embedding_index(spec.source, universe)
    if not index.maps or not spec.expansions:
        return OrderedFamily.empty(spec.source, universe)
    ranks = np.asarray(spec.order.positions)[index.array()]
    codes = np.argsort(ranks, axis=1, kind="stable")
    wanted = np.array(sorted(spec.expansions))
    hit = (codes[:, None, :] == wanted[None, :, :]).all(axis=2).any(axis=1)
    members = [index.maps[i] for i in np.flatnonzero(hit)]
    return OrderedFamily(spec.source, universe, frozenset(members))


# Boolean combinations of minimal sets, evaluated leaf-wise.

@dataclass(frozen=True)
class Leaf:
    spec: MinimalSetSpec


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Not:
    child: object


def leaves(formula) -> list[MinimalSetSpec]:
    if isinstance(formula, Leaf):
        return [formula.spec]
    if isinstance(formula, Not):
        return leaves(formula.child)
    return leaves(formula.left) + leaves(formula.right)


def evaluate(formula, universe: FiniteStructure) -> OrderedFamily:
    if isinstance(formula, Leaf):
        return minimal_set(formula.spec, universe)
    if isinstance(formula, Not):
        return evaluate(formula.child, universe).complement()
    left, right = evaluate(formula.left, universe), evaluate(formula.right, universe)
    return left & right if isinstance(formula, And) else left | right


def _combine_bits(formula, values: dict, full: int) -> int:
    if isinstance(formula, Leaf):
        return values[formula.spec]
    if isinstance(formula, Not):
        return full ^ _combine_bits(formula.child, values, full)
    a = _combine_bits(formula.left, values, full)
    b = _combine_bits(formula.right, values, full)
    return a & b if isinstance(formula, And) else a | b


@dataclass(frozen=True)
class PatternSet:
    source: FiniteStructure  # A_m
    stage: FiniteStructure  # A_N
    patterns: dict = field(default_factory=dict)  # bitmask over Emb(A_m, A_N) -> first realizing y

    def __len__(self) -> int:
        return len(self.patterns)

    def __contains__(self, pattern) -> bool:
        return pattern in self.patterns

    def as_sets(self) -> set[frozenset]:
        inner = embedding_index(self.source, self.stage).maps
        return {frozenset(f for i, f in enumerate(inner) if mask >> i & 1) for mask in self.patterns}


def _pattern_codes(family: OrderedFamily, stage: FiniteStructure) -> tuple[np.ndarray, list]:
    """Per ``y in Emb(A_N, U)``, the bitmask of ``{f : y o f in family}``."""
    table = composition_table(family.source, stage, family.universe)
    outer = embedding_index(stage, family.universe).maps
    if table.shape[0] == 0:
        return np.zeros(0, dtype=object), outer
    bits = family.mask()[table]
    if bits.shape[1] <= 62:
        weights = (1 << np.arange(bits.shape[1], dtype=np.int64))
        codes = bits.astype(np.int64) @ weights
    else:
        codes = np.array([sum(1 << i for i in np.flatnonzero(row)) for row in bits], dtype=object)
    return codes, outer


def n_patterns(family: OrderedFamily, stage: FiniteStructure) -> PatternSet:
    """All traces ``{f in Emb(A_m, A_N) : y o f in family}`` over ``y in Emb(A_N, U)``."""
    codes, outer = _pattern_codes(family, stage)
    patterns: dict = {}
    if len(codes) and codes.dtype != object:
        uniq, first = np.unique(codes, return_index=True)
        for code, yi in sorted(zip(uniq.tolist(), first.tolist()), key=lambda p: p[1]):
            patterns[int(code)] = outer[yi]
    else:
        for code, y in zip(codes, outer):
            patterns.setdefault(int(code), y)
    return PatternSet(family.source, stage, patterns)


def simultaneous_patterns(families: Sequence[OrderedFamily], stage: FiniteStructure) -> dict:
    """Map each tuple of patterns realized by one common ``y`` to that ``y``."""
    columns = [_pattern_codes(fam, stage) for fam in families]
    outer = columns[0][1]
    out: dict = {}
    for yi, y in enumerate(outer):
        out.setdefault(tuple(int(c[0][yi]) for c in columns), y)
    return out


def combination_patterns(formula, universe: FiniteStructure, stage: FiniteStructure) -> PatternSet:
    """Patterns of a Boolean combination, evaluated leaf-wise on one pass over ``y``."""
    specs = list(dict.fromkeys(leaves(formula)))
    families = [minimal_set(s, universe) for s in specs]
    source = specs[0].source
    full = (1 << len(embedding_index(source, stage))) - 1
    patterns: dict = {}
    for combo, y in simultaneous_patterns(families, stage).items():
        code = _combine_bits(formula, dict(zip(specs, combo)), full)
        patterns.setdefault(code, y)
    return PatternSet(source, stage, patterns)


def minimal_pattern_bound(n: int, N: int, k: int) -> int:
    """``2^(2^k) * (2^(n!) * N!)^k``, the pattern count of any combination of ``k`` minimal sets."""
    if n < 1 or N < n or k < 0:
        raise ValueError("need n >= 1, N >= n, k >= 0")
    return 2 ** (2**k) * (2 ** math.factorial(n) * math.factorial(N)) ** k


def dense_pattern_lower_bound(flavor: str, m_or_r: int, N: int) -> int:
    base = 2 if flavor == "krfree" else m_or_r
    if N < base:
        raise ValueError("N must be at least the base level")
    if flavor == "set":
        return 2 ** (math.factorial(m_or_r) * math.comb(N, m_or_r))
    if flavor == "hypergraph":
        return 2 ** -(-math.comb(N, m_or_r) // 2)
    if flavor == "krfree":
        return 2 ** -(-math.comb(N, 2) // m_or_r)
    raise FlavorMismatch(f"no dense pattern bound for flavor {flavor!r}")


@dataclass(frozen=True)
class Crossing:
    N: int
    minimal_bound: int
    dense_bound: int


class NoCrossing(FraisseError):
    pass


def separation_crossing(flavor: str, n: int, k: int, r: int | None = None, cap: int = 64) -> Crossing:
    """Smallest ``N`` at which the dense lower bound beats the minimal-set upper bound.

    ``r`` is the edge arity for hypergraphs and the forbidden clique size for
    K_r-free graphs.
    """
    if flavor == "set":
        base, param = 2, 2
    elif flavor == "hypergraph":
        base, param = r, r
    elif flavor == "krfree":
        base, param = 2, r
    else:
        raise FlavorMismatch(f"no dense pattern bound for flavor {flavor!r}")
    if param is None:
        raise ValueError(f"{flavor} needs r")
    for N in range(max(base, n), cap + 1):
        upper = minimal_pattern_bound(n, N, k)
        dense = dense_pattern_lower_bound(flavor, param, N)
        if dense > upper:
            return Crossing(N, upper, dense)
    raise NoCrossing(f"no crossing in range N <= {cap}")


@dataclass(frozen=True)
class FullPatternWitness:
    stage: FiniteStructure
    universe: FiniteStructure
    family: OrderedFamily
    targets: list  # bitmasks over Emb(A_m, A_N), one per block
    offsets: list

    def canonical_embedding(self, block: int) -> tuple:
        off = self.offsets[block]
        return tuple(range(off, off + self.stage.n))

    def realized(self) -> list[int]:
        """The pattern realized by each block's canonical embedding."""
        inner = embedding_index(self.family.source, self.stage).maps
        members = self.family.members
        out = []
        for b in range(len(self.targets)):
            y = self.canonical_embedding(b)
            out.append(sum(1 << i for i, f in enumerate(inner) if tuple(y[v] for v in f) in members))
        return out

    def verify(self) -> bool:
        return self.realized() == list(self.targets)


def build_full_pattern_witness(m: int, stage: FiniteStructure, cap: int = 2**20) -> FullPatternWitness:
    """A universe of disjoint ``A_N`` copies whose family realizes every pattern.

    Block ``b`` realizes the subset of ``Emb(A_m, A_N)`` whose bitmask is ``b``.
    """
    source = pure_set(m) if stage.flavor == "set" else stage.induced(range(m))
    inner = embedding_index(source, stage).maps
    count = 2 ** len(inner)
    if count > max_cost(cap):
        raise CostCapExceeded("full pattern witness", count, max_cost(cap))
    universe, offsets = disjoint_union([stage] * count)
    members = []
    for target, off in enumerate(offsets):
        for i, f in enumerate(inner):
            if target >> i & 1:
                members.append(tuple(off + v for v in f))
    family = OrderedFamily(source, universe, frozenset(members))
    return FullPatternWitness(stage, universe, family, list(range(count)), offsets)


# Ramsey and expansion properties at micro scale


@dataclass(frozen=True)
class RamseyVerdict:
    holds: bool
    bad_coloring: dict | None = None  # map tuple of Emb(A, C) -> color

    def __bool__(self) -> bool:
        return self.holds


def is_ramsey_witness(a: FiniteStructure, b: FiniteStructure, c: FiniteStructure, r: int,
                      cap: int = 2**32) -> RamseyVerdict:
    """Is every ``r``-coloring of ``Emb(A, C)`` constant on some ``h o Emb(A, B)``?

    Complete backtracking search for a bad coloring; colors are interchangeable
    so the first embedding is pinned to color 0.
    """
    if r < 2:
        raise ValueError("need at least two colors")
    points = embedding_index(a, c).maps
    cost = r ** len(points)
    if cost > max_cost(cap):
        raise CostCapExceeded("Ramsey witness search", cost, max_cost(cap))
    pos = {f: i for i, f in enumerate(points)}
    inner = embedding_index(a, b).maps
    copies = []
    for h in iter_embedding_maps(b, c):
        copies.append(sorted({pos[tuple(h[v] for v in f)] for f in inner}))
    if not inner or not copies:
        # no copy can be monochromatic, so any coloring is bad
        return RamseyVerdict(False, {f: 0 for f in points})
    # constraints checked when their largest member gets colored
    closing: list[list[list[int]]] = [[] for _ in points]
    for members in copies:
        closing[members[-1]].append(members)
    color = [-1] * len(points)

    def assign(i: int) -> bool:
        if i == len(points):
            return True
        for col in range(1 if i == 0 else r):
            color[i] = col
            if all(any(color[j] != col for j in members) for members in closing[i]):
                if assign(i + 1):
                    return True
        color[i] = -1
        return False

    if assign(0):
        return RamseyVerdict(False, {f: color[i] for i, f in enumerate(points)})
    return RamseyVerdict(True)


def expansion_property_witness(a_star: tuple[FiniteStructure, LinearOrder], b: FiniteStructure,
                               cap: int = 40320) -> bool:
    """Does every linear order on ``B`` admit an order-embedding of the ordered ``A*``?"""
    a, order = a_star
    maps = embedding_index(a, b).maps
    if not maps:
        return False
    orders = math.factorial(b.n)
    if orders > max_cost(cap):
        raise CostCapExceeded("expansion property scan", orders, max_cost(cap))
    a_rank = order.ranking
    for ranking in itertools.permutations(range(b.n)):
        b_pos = LinearOrder(b.n, ranking).positions
        if not any(all(b_pos[f[a_rank[i]]] < b_pos[f[a_rank[i + 1]]] for i in range(a.n - 1)) for f in maps):
            return False
    return True
