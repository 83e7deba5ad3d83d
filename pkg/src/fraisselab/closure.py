"""Shadows, the clique-completion operator, closed families, and near-closedness.

For a family ``T`` of ``n``-sets and ``m < n``:

* ``shadow(T, m)`` is every ``m``-subset of a member of ``T``;
* ``lambda_op(G, n)`` is every ``n``-set whose ``m``-subsets all lie in ``G``;
* ``psi(T) = lambda_op(shadow(T, m), n)`` is a closure operator whose fixed
  points ("closed" families) are exactly the images of ``lambda_op``.

A family is near-closed (at clique bound ``l``) when it differs from a union
of ``k`` closed families by a family with no ``l``-clique.  Exhaustive work
runs on integer bitmasks over the lexicographic list of ``[N]^n``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import TupleFamily, combo_index
from .errors import CostCapExceeded, guard


@dataclass(frozen=True)
class ClosurePair:
    n: int  # upper arity
    m: int  # lower arity
    universe: int

    def __post_init__(self):
        if not 1 <= self.m < self.n <= self.universe:
            raise ValueError("need 1 <= m < n <= universe")


def shadow(family: TupleFamily, m: int) -> TupleFamily:
    if m >= family.m:
        raise ValueError("shadow arity must be below the family's arity")
    members = {s for t in family.members for s in itertools.combinations(t, m)}
    return TupleFamily(m, family.n, frozenset(members))


def lambda_op(family: TupleFamily, n: int, universe: int | None = None) -> TupleFamily:
    """Every ``n``-set whose ``m``-subsets all belong to ``family``."""
    universe = family.n if universe is None else universe
    if n <= family.m:
        raise ValueError("lambda needs a higher arity")
    members = [
        s for s in itertools.combinations(range(universe), n)
        if all(t in family.members for t in itertools.combinations(s, family.m))
    ]
    return TupleFamily(n, universe, frozenset(members))


def psi(family: TupleFamily, m: int) -> TupleFamily:
    return lambda_op(shadow(family, m), family.m, family.n)


def is_closed(family: TupleFamily, m: int) -> bool:
    return psi(family, m) == family


# ---------------------------------------------------------------------------
# bitmask engine


@lru_cache(maxsize=64)
def _subset_masks(universe: int, n: int, m: int) -> tuple[int, ...]:
    """For each ``n``-set (lexicographic), the bitmask of its ``m``-subsets."""
    upper = combo_index(universe, n)[0]
    lower = combo_index(universe, m)[1]
    out = []
    for s in upper:
        mask = 0
        for t in itertools.combinations(s, m):
            mask |= 1 << lower[t]
        out.append(mask)
    return tuple(out)


def lambda_mask(g: int, universe: int, n: int, m: int) -> int:
    out = 0
    for i, need in enumerate(_subset_masks(universe, n, m)):
        if g & need == need:
            out |= 1 << i
    return out


def shadow_mask(t: int, universe: int, n: int, m: int) -> int:
    out = 0
    for i, sub in enumerate(_subset_masks(universe, n, m)):
        if t >> i & 1:
            out |= sub
    return out


def closed_masks(universe: int, pair: ClosurePair) -> list[int]:
    n, m = pair.n, pair.m
    lower = math.comb(universe, m)
    guard("closed-set enumeration", 2**lower)
    return sorted({lambda_mask(g, universe, n, m) for g in range(1 << lower)})


def enumerate_closed_sets(universe: int, pair: ClosurePair) -> list[TupleFamily]:
    """All distinct ``lambda_op`` images of ``m``-families, ordered by bitmask."""
    return [TupleFamily.from_mask(pair.n, universe, t) for t in closed_masks(universe, pair)]


@lru_cache(maxsize=64)
def clique_masks(universe: int, n: int, ell: int) -> tuple[int, ...]:
    """For each ``ell``-set, the bitmask of its ``n``-subsets."""
    return _subset_masks(universe, ell, n)


def find_clique(family: TupleFamily, ell: int) -> tuple | None:
    """Lexicographically first ``X`` with ``|X| = ell`` and ``[X]^n`` inside the family."""
    n = family.m
    if ell < n:
        raise ValueError("clique size must be at least the arity")
    for xs in itertools.combinations(range(family.n), ell):
        if all(t in family.members for t in itertools.combinations(xs, n)):
            return xs
    return None


has_clique = find_clique


def _clique_free(mask: int, cliques: tuple[int, ...]) -> bool:
    return all(mask & c != c for c in cliques)


def sparse_ell_family(universe: int, n: int, ell: int) -> list[tuple]:
    """Greedy ``ell``-sets in colex order, pairwise sharing fewer than ``n`` points."""
    colex = sorted(itertools.combinations(range(universe), ell), key=lambda s: s[::-1])
    kept: list[tuple] = []
    for s in colex:
        if all(len(set(s) & set(k)) < n for k in kept):
            kept.append(s)
    return kept


@dataclass(frozen=True)
class CliqueFreeCount:
    universe: int
    n: int
    ell: int
    count: int
    total: int
    inclusion_exclusion: int | None
    family_size: int
    bound: Fraction  # (1 - 2^-C(ell, n))^family_size

    @property
    def proportion(self) -> Fraction:
        return Fraction(self.count, self.total)

    @property
    def within_bound(self) -> bool:
        return self.proportion <= self.bound


def count_clique_free_exhaustive(universe: int, n: int, ell: int) -> int:
    edges = math.comb(universe, n)
    guard("clique-free count", 2**edges)
    cliques = clique_masks(universe, n, ell)
    if not cliques:
        return 1 << edges
    # vectorised over all families at once
    fams = np.arange(1 << edges, dtype=np.int64)
    free = np.ones(fams.shape, dtype=bool)
    for c in cliques:
        free &= (fams & c) != c
    return int(free.sum())


def count_clique_free_inclusion_exclusion(universe: int, n: int, ell: int, cap: int = 20) -> int:
    """Families minus those containing at least one ``ell``-clique, by inclusion-exclusion."""
    edges = math.comb(universe, n)
    cliques = clique_masks(universe, n, ell)
    if len(cliques) > cap:
        raise CostCapExceeded("inclusion-exclusion over cliques", len(cliques), cap)
    containing = 0
    for size in range(1, len(cliques) + 1):
        sign = 1 if size % 2 else -1
        for chosen in itertools.combinations(cliques, size):
            union = 0
            for c in chosen:
                union |= c
            containing += sign * (1 << (edges - bin(union).count("1")))
    return (1 << edges) - containing


def count_clique_free(universe: int, n: int, ell: int) -> CliqueFreeCount:
    count = count_clique_free_exhaustive(universe, n, ell)
    try:
        ie = count_clique_free_inclusion_exclusion(universe, n, ell)
    except CostCapExceeded:
        ie = None
    family = sparse_ell_family(universe, n, ell)
    bound = (1 - Fraction(1, 2 ** math.comb(ell, n))) ** len(family)
    return CliqueFreeCount(universe, n, ell, count, 2 ** math.comb(universe, n), ie, len(family), bound)


# ---------------------------------------------------------------------------
# near-closedness


@dataclass(frozen=True)
class NearClosedQuery:
    family: TupleFamily  # S, arity n
    ell: int
    k: int = 1
    m: int = 2

    def __post_init__(self):
        if self.ell <= self.family.m:
            raise ValueError("need ell > n")
        if self.k < 1:
            raise ValueError("need k >= 1")


@dataclass(frozen=True)
class NearClosedVerdict:
    near_closed: bool
    closed_parts: tuple = ()  # T_1..T_k as TupleFamily
    difference: TupleFamily | None = None

    def __bool__(self) -> bool:
        return self.near_closed


def is_near_closed(query: NearClosedQuery) -> NearClosedVerdict:
    """Search closed ``T_1..T_k`` with ``S ^ (T_1 | ... | T_k)`` free of ``ell``-cliques."""
    s = query.family
    universe, n, m = s.n, s.m, query.m
    if query.k > 2:
        raise CostCapExceeded("near-closed union search", query.k, 2)
    closed = closed_masks(universe, ClosurePair(n, m, universe))
    guard("near-closed union search", len(closed) ** query.k)
    cliques = clique_masks(universe, n, query.ell)
    target = s.to_mask()
    # the closure of S itself is the natural first guess
    own = psi(s, m).to_mask()
    closed = [own] + [t for t in closed if t != own]
    for parts in itertools.combinations_with_replacement(closed, query.k):
        union = 0
        for t in parts:
            union |= t
        if _clique_free(target ^ union, cliques):
            return NearClosedVerdict(
                True,
                tuple(TupleFamily.from_mask(n, universe, t) for t in parts),
                TupleFamily.from_mask(n, universe, target ^ union),
            )
    return NearClosedVerdict(False)


def random_hypergraph(universe: int, n: int, p: float, seed: int) -> TupleFamily:
    """Each ``n``-set kept independently with probability ``p``; deterministic per seed."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    combos = combo_index(universe, n)[0]
    rng = np.random.Generator(np.random.Philox(seed))
    keep = rng.random(len(combos)) < p
    return TupleFamily(n, universe, frozenset(c for c, k in zip(combos, keep) if k))


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class CensusResult:
    universe: int
    n: int
    m: int
    ell: int
    k: int
    total: int
    near_closed: int
    closed_count: int
    clique_free_count: int
    sampled: bool = False
    trials: int = 0
    interval: tuple | None = None  # Wilson interval on the near-closed proportion
    near_closed_masks: frozenset = field(default=frozenset(), repr=False, compare=False)

    @property
    def bound_lhs(self) -> int:
        return self.near_closed

    @property
    def bound_rhs(self) -> int:
        return self.closed_count**self.k * self.clique_free_count

    @property
    def bound_holds(self) -> bool:
        return self.bound_lhs <= self.bound_rhs

    def row(self) -> dict:
        return {
            "universe": self.universe, "n": self.n, "m": self.m, "ell": self.ell, "k": self.k,
            "total": self.total, "near_closed": self.near_closed, "closed_count": self.closed_count,
            "clique_free_count": self.clique_free_count, "bound_lhs": self.bound_lhs,
            "bound_rhs": self.bound_rhs,
        }


CENSUS_COLUMNS = (
    "universe", "n", "m", "ell", "k", "total", "near_closed", "closed_count",
    "clique_free_count", "bound_lhs", "bound_rhs",
)


def _near_closed_space(universe: int, n: int, m: int, ell: int, k: int) -> tuple[set[int], list[int], list[int]]:
    closed = closed_masks(universe, ClosurePair(n, m, universe))
    edges = math.comb(universe, n)
    cliques = clique_masks(universe, n, ell)
    fams = np.arange(1 << edges, dtype=np.int64)
    free = np.ones(fams.shape, dtype=bool)
    for c in cliques:
        free &= (fams & c) != c
    clique_free = fams[free].tolist()
    unions = {0}
    for _ in range(k):
        unions = {u | t for u in unions for t in closed}
    near = set()
    for u in unions:
        near.update(u ^ g for g in clique_free)
    return near, closed, clique_free


def near_closed_census(universe: int, n: int, m: int, ell: int, k: int = 1, *,
                       sample: bool = False, trials: int = 1000, seed: int = 0) -> CensusResult:
    """Count the ``k``-near-closed ``n``-families on ``universe`` vertices.

    Exhaustive mode enumerates every family; ``sample=True`` draws ``trials``
    uniform families with per-trial seeds ``seed + i`` and reports a Wilson
    interval instead.
    """
    edges = math.comb(universe, n)
    total = 1 << edges
    if not sample:
        guard("near-closed census", total)
        near, closed, clique_free = _near_closed_space(universe, n, m, ell, k)
        return CensusResult(universe, n, m, ell, k, total, len(near), len(closed), len(clique_free),
                            near_closed_masks=frozenset(near))
    hits = 0
    for i in range(trials):
        s = random_hypergraph(universe, n, 0.5, seed + i)
        if is_near_closed(NearClosedQuery(s, ell, k, m)):
            hits += 1
    lo, hi = wilson_interval(hits, trials)
    closed = closed_masks(universe, ClosurePair(n, m, universe))
    clique_free = count_clique_free_exhaustive(universe, n, ell)
    estimate = round(total * hits / trials)
    return CensusResult(universe, n, m, ell, k, total, estimate, len(closed), clique_free,
                        sampled=True, trials=trials, interval=(lo, hi))
