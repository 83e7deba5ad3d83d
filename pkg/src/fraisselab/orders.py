"""Linear orders, agreement sets, and the block construction of two orders
whose pair-agreement set is a prescribed union of block cliques."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .core import TupleFamily
from .errors import FraisseError, StructureError


@dataclass(frozen=True)
class LinearOrder:
    n: int
    ranking: tuple  # vertices listed in increasing order

    def __post_init__(self):
        object.__setattr__(self, "ranking", tuple(int(v) for v in self.ranking))
        if sorted(self.ranking) != list(range(self.n)):
            raise StructureError(f"{list(self.ranking)} is not a permutation of range({self.n})")

    @classmethod
    def natural(cls, n: int) -> "LinearOrder":
        return cls(n, tuple(range(n)))

    @property
    def positions(self) -> tuple:
        pos = [0] * self.n
        for i, v in enumerate(self.ranking):
            pos[v] = i
        return tuple(pos)

    def less(self, a: int, b: int) -> bool:
        pos = self.positions
        return pos[a] < pos[b]

    def reverse(self) -> "LinearOrder":
        return LinearOrder(self.n, self.ranking[::-1])

    def restrict(self, vertices: Iterable[int]) -> tuple:
        keep = set(vertices)
        return tuple(v for v in self.ranking if v in keep)

    def to_json(self) -> dict:
        return {"n": self.n, "ranking": list(self.ranking)}

    @classmethod
    def from_json(cls, data: Mapping) -> "LinearOrder":
        return cls(int(data["n"]), tuple(data["ranking"]))


def reverse(order: LinearOrder) -> LinearOrder:
    return order.reverse()


def all_linear_orders(n: int) -> Iterable[LinearOrder]:
    for ranking in itertools.permutations(range(n)):
        yield LinearOrder(n, ranking)


def agreement_set(o0: LinearOrder, o1: LinearOrder, m: int) -> TupleFamily:
    """``m``-sets on which the two orders induce the same ranking."""
    if o0.n != o1.n:
        raise StructureError("orders live on different universes")
    n = o0.n
    if m > n:
        return TupleFamily.empty(m, n)
    p0, p1 = o0.positions, o1.positions
    members = []
    for s in itertools.combinations(range(n), m):
        if sorted(s, key=p0.__getitem__) == sorted(s, key=p1.__getitem__):
            members.append(s)
    return TupleFamily(m, n, frozenset(members))


def anti_agreement_set(o0: LinearOrder, o1: LinearOrder, m: int) -> TupleFamily:
    return agreement_set(o0, o1.reverse(), m)


def pull_agreement_to_m(pairs: TupleFamily, m: int) -> TupleFamily:
    """``m``-sets all of whose pairs lie in ``pairs``."""
    if pairs.m != 2:
        raise ValueError("expected a family of pairs")
    if m < 2:
        raise ValueError("need m >= 2")
    members = [
        s for s in itertools.combinations(range(pairs.n), m)
        if all(p in pairs.members for p in itertools.combinations(s, 2))
    ]
    return TupleFamily(m, pairs.n, frozenset(members))


@dataclass(frozen=True)
class BlockPartition:
    n: int
    blocks: tuple  # disjoint sorted vertex tuples

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(v) for v in b)) for b in self.blocks)
        seen: set[int] = set()
        for b in blocks:
            for v in b:
                if v < 0 or v >= self.n:
                    raise StructureError(f"block {list(b)} leaves the universe", b)
                if v in seen:
                    raise StructureError(f"vertex {v} lies in two blocks", b)
                seen.add(v)
        object.__setattr__(self, "blocks", blocks)

    @property
    def residue(self) -> tuple:
        covered = {v for b in self.blocks for v in b}
        return tuple(v for v in range(self.n) if v not in covered)

    def to_json(self) -> dict:
        return {"n": self.n, "blocks": [list(b) for b in self.blocks]}

    @classmethod
    def from_json(cls, data: Mapping) -> "BlockPartition":
        return cls(int(data["n"]), tuple(tuple(b) for b in data["blocks"]))


def tilde(a: Iterable[int], blocks: BlockPartition) -> TupleFamily:
    """Union over blocks ``E`` of all pairs inside ``A & E``."""
    a = set(a)
    if any(v < 0 or v >= blocks.n for v in a):
        raise StructureError("vertex set leaves the universe")
    members = []
    for block in blocks.blocks:
        members.extend(itertools.combinations(sorted(a.intersection(block)), 2))
    return TupleFamily(2, blocks.n, frozenset(members))


def build_block_orders(a: Iterable[int], blocks: BlockPartition) -> tuple[LinearOrder, LinearOrder]:
    """Two orders agreeing on a pair exactly when it lies inside some ``A & E``.

    The residue (everything outside the pieces ``A & E``) is ordered naturally
    by the first order and in reverse by the second.  Each nonempty piece is
    then ordered naturally by both, placed below everything so far in the
    first order and above everything so far in the second.
    """
    a = set(a)
    if any(v < 0 or v >= blocks.n for v in a):
        raise StructureError("vertex set leaves the universe")
    pieces = []
    for block in blocks.blocks:
        piece = sorted(a.intersection(block))
        if len(piece) == 1:
            raise StructureError(
                f"A meets block {list(block)} in the single vertex {piece[0]}; "
                "drop that vertex from A or merge the block so each nonempty piece has >= 2 vertices",
                tuple(block),
            )
        if piece:
            pieces.append(piece)
    placed = {v for p in pieces for v in p}
    residue = [v for v in range(blocks.n) if v not in placed]
    first, second = list(residue), residue[::-1]
    for piece in pieces:
        first = piece + first
        second = second + piece
    o0, o1 = LinearOrder(blocks.n, first), LinearOrder(blocks.n, second)
    if agreement_set(o0, o1, 2) != tilde(a, blocks):
        raise FraisseError("block construction failed its agreement check")
    return o0, o1


# Ramsey refinement inside blocks


@lru_cache(maxsize=None)
def guaranteed_clique(k: int) -> int:
    """b(2, k): clique size every 2-coloring of ``[k]^2`` is forced to contain.

    Exact by exhaustion for ``k <= 6``; above that the bound
    ``max(3, ceil(log2(k) / 2))`` keeps the function non-decreasing.
    """
    if k <= 1:
        return k
    if k <= 6:
        from .thickness import ramsey_partition_check

        best = 2
        for s in range(3, k + 1):
            if ramsey_partition_check(s, k):
                best = s
        return best
    return max(3, math.ceil(math.log2(k) / 2))


@dataclass(frozen=True)
class BlockVote:
    block: tuple
    subset: tuple
    color: int | None  # None for blocks too small to vote


def _max_monochromatic(block: Sequence[int], color_of) -> tuple[tuple, int | None]:
    for size in range(len(block), 1, -1):
        for xs in itertools.combinations(block, size):
            for col in (0, 1):
                if all(color_of(p) == col for p in itertools.combinations(xs, 2)):
                    return xs, col
    return tuple(block[:1]), None


def ramsey_refine_blocks(blocks: BlockPartition, coloring: Mapping | Callable) -> list[BlockVote]:
    """Largest monochromatic subset of each block, with its color.

    ``coloring`` maps sorted pairs (or is a function of a sorted pair) to 0/1.
    Ties go to the smallest subset in lexicographic order, then to color 0.
    """
    color_of = coloring if callable(coloring) else (lambda p: coloring[tuple(sorted(p))])
    votes = []
    for block in blocks.blocks:
        if len(block) <= 1:
            votes.append(BlockVote(block, block, None))
            continue
        subset, col = _max_monochromatic(block, color_of)
        if len(subset) < guaranteed_clique(len(block)):
            raise FraisseError(f"block {list(block)} beat the Ramsey guarantee")
        votes.append(BlockVote(block, subset, col))
    return votes
