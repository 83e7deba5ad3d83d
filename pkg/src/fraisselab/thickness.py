"""Thick and thin families at a finite truncation.

A family is *thick up to N* when it contains a full copy at level ``N``:
``[X]^m`` for some ``N``-set ``X`` in the unordered case, or
``s o Emb(A_m, A_N)`` for some ``s`` in the ordered case.  All searches are
exhaustive and return the lexicographically smallest witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (
    FiniteStructure,
    OrderedFamily,
    TupleFamily,
    combo_index,
    embedding_index,
    pure_set,
)
from .errors import FraisseError, guard


@dataclass(frozen=True)
class ThicknessWitness:
    level: int
    witness: tuple  # a vertex set, or the map of an embedding A_N -> U
    ordered: bool = False


def forget_order(family: OrderedFamily) -> TupleFamily:
    """Send each embedding to its (unordered) range."""
    return TupleFamily(
        family.level,
        family.universe.n,
        frozenset(tuple(sorted(f)) for f in family.members),
    )


def saturate(family: OrderedFamily) -> OrderedFamily:
    """Smallest permutation-closed superset: every embedding whose range is hit."""
    ranges = forget_order(family).members
    members = [
        f for f in embedding_index(family.source, family.universe).maps
        if tuple(sorted(f)) in ranges
    ]
    return OrderedFamily(family.source, family.universe, frozenset(members))


def is_saturated(family: OrderedFamily) -> bool:
    return saturate(family) == family


def preimage(family: TupleFamily, source: FiniteStructure | None = None,
             universe: FiniteStructure | None = None) -> OrderedFamily:
    """All embeddings ``A_m -> U`` whose range lies in ``family``."""
    source = source or pure_set(family.m)
    universe = universe or pure_set(family.n)
    members = [f for f in embedding_index(source, universe).maps if tuple(sorted(f)) in family.members]
    return OrderedFamily(source, universe, frozenset(members))


def _thick_unordered(family: TupleFamily, level: int) -> ThicknessWitness | None:
    for xs in itertools.combinations(range(family.n), level):
        if all(t in family.members for t in itertools.combinations(xs, family.m)):
            return ThicknessWitness(level, xs)
    return None


def _thick_ordered(family: OrderedFamily, level: int) -> ThicknessWitness | None:
    source, universe = family.source, family.universe
    # A_N is taken to be the universe's own initial segment when the flavor
    # has a relation; for pure sets it is the set [N].
    if source.flavor == "set":
        stage = pure_set(level)
    else:
        stage = universe.induced(range(level))
        if stage.induced(range(source.n)) != source:
            raise FraisseError("the first m vertices of U do not form A_m")
    inner = embedding_index(source, stage).maps
    for s in embedding_index(stage, universe).maps:
        if all(tuple(s[v] for v in f) in family.members for f in inner):
            return ThicknessWitness(level, s, ordered=True)
    return None


def is_thick_upto(family: TupleFamily | OrderedFamily, level: int) -> ThicknessWitness | None:
    """Smallest witness that ``family`` contains a full copy at ``level``.

    Returns ``None`` when no witness exists, including when ``level`` exceeds
    the universe (see :func:`thickness_reason`).
    """
    m = family.m if isinstance(family, TupleFamily) else family.level
    if level < m:
        raise ValueError(f"level {level} is below the family's arity {m}")
    n = family.n if isinstance(family, TupleFamily) else family.universe.n
    if level > n:
        return None
    if isinstance(family, TupleFamily):
        return _thick_unordered(family, level)
    return _thick_ordered(family, level)


def thickness_reason(family: TupleFamily | OrderedFamily, level: int) -> str:
    n = family.n if isinstance(family, TupleFamily) else family.universe.n
    if level > n:
        return "exhausted"
    return "found" if is_thick_upto(family, level) else "no witness"


@dataclass(frozen=True)
class PartitionVerdict:
    holds: bool
    coloring: tuple | None = None  # color of each pair of [host]^2, lexicographic

    def __bool__(self) -> bool:
        return self.holds

    def color_classes(self, host: int) -> tuple[TupleFamily, TupleFamily]:
        pairs = combo_index(host, 2)[0]
        cells = (
            [p for p, c in zip(pairs, self.coloring) if c == 0],
            [p for p, c in zip(pairs, self.coloring) if c == 1],
        )
        return TupleFamily(2, host, frozenset(cells[0])), TupleFamily(2, host, frozenset(cells[1]))


def _clique_masks(host: int, size: int, arity: int = 2) -> list[int]:
    pos = combo_index(host, arity)[1]
    masks = []
    for xs in itertools.combinations(range(host), size):
        mask = 0
        for t in itertools.combinations(xs, arity):
            mask |= 1 << pos[t]
        masks.append(mask)
    return masks


def ramsey_partition_check(target: int, host: int) -> PartitionVerdict:
    """Does every 2-partition of ``[host]^2`` have a cell containing some ``[X]^2``, ``|X| = target``?

    Exhaustive over all ``2^C(host, 2)`` partitions; the first bad coloring in
    counting order is returned as the counterexample.
    """
    if target < 2 or host < target:
        raise ValueError("need 2 <= target <= host")
    if host > 8:
        raise FraisseError(f"host {host} > 8: exhaustive partition scan refused")
    pairs = host * (host - 1) // 2
    full = (1 << pairs) - 1
    masks = _clique_masks(host, target)
    for coloring in range(1 << pairs):
        other = full ^ coloring
        if not any((coloring & cm) == cm or (other & cm) == cm for cm in masks):
            return PartitionVerdict(False, tuple(coloring >> i & 1 for i in range(pairs)))
    return PartitionVerdict(True)


@dataclass(frozen=True)
class ThinCertificate:
    thin: bool
    mixed: TupleFamily  # n-sets meeting both the family and its complement
    largest: tuple  # largest X with [X]^n inside the mixed family
    obstruction: tuple | None = None  # an n-set inside a monochromatic cell


def mixed_set_is_thin(family: TupleFamily, n: int) -> ThinCertificate:
    """Certify that the family of "mixed" ``n``-sets contains no large full copy.

    An ``n``-set is mixed when its ``m``-subsets meet both ``family`` and the
    complement of ``family``.
    """
    m, size = family.m, family.n
    if n <= m:
        raise ValueError("need n > m")
    guard("mixed-set clique scan", 2**size)
    mixed = []
    for a in itertools.combinations(range(size), n):
        inside = [t in family.members for t in itertools.combinations(a, m)]
        if any(inside) and not all(inside):
            mixed.append(a)
    mixed_family = TupleFamily(n, size, frozenset(mixed))
    largest: tuple = ()
    if mixed:
        for k in range(size, n - 1, -1):
            w = _thick_unordered(mixed_family, k)
            if w is not None:
                largest = w.witness
                break
    obstruction = None
    if len(largest) < size:
        probe = tuple(range(len(largest) + 1)) if len(largest) + 1 >= n else tuple(range(n))
        for a in itertools.combinations(probe, n):
            if a not in mixed_family.members:
                obstruction = a
                break
    return ThinCertificate(len(largest) < size and obstruction is not None, mixed_family, largest, obstruction)
