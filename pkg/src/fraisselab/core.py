"""Finite structures, embeddings between them, and families of embeddings.

Universes are always initial segments ``{0, ..., n-1}``.  A structure carries
one relation of sorted vertex tuples whose arity is fixed by its flavor:

``set``
    no relation at all;
``graph``
    edges (pairs);
``hypergraph``
    ``r``-uniform edges;
``krfree``
    a graph promised to contain no clique on ``r`` vertices.

Embeddings are injective maps that preserve and reflect the relation.  The
sets ``Emb(A, B)`` are always produced in lexicographic order of the maps,
which gives every embedding a stable integer index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import FlavorMismatch, StructureError

FLAVORS = ("set", "graph", "hypergraph", "krfree")

Map = tuple  # a vertex map, stored as the tuple (f(0), ..., f(k-1))


@dataclass(frozen=True)
class FiniteStructure:
    flavor: str
    n: int
    edges: frozenset = frozenset()
    r: int | None = None

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise StructureError(f"unknown flavor {self.flavor!r}")
        if self.n < 0:
            raise StructureError("universe size must be non-negative")
        if self.flavor in ("hypergraph", "krfree") and (self.r is None or self.r < 2):
            raise StructureError(f"{self.flavor} needs r >= 2")
        if self.flavor in ("set", "graph") and self.r is not None:
            object.__setattr__(self, "r", None)
        arity = self.arity
        edges = set()
        for raw in self.edges:
            t = tuple(sorted(int(v) for v in raw))
            if self.flavor == "set":
                raise StructureError("pure sets carry no relation", raw)
            if len(t) != arity or len(set(t)) != arity:
                raise StructureError(f"edge {list(raw)} does not have {arity} distinct vertices", tuple(raw))
            if t[0] < 0 or t[-1] >= self.n:
                raise StructureError(f"edge {list(raw)} leaves the universe [0, {self.n})", tuple(raw))
            edges.add(t)
        object.__setattr__(self, "edges", frozenset(edges))
        if self.flavor == "krfree":
            clique = find_clique(self, self.r)
            if clique is not None:
                raise StructureError(f"krfree({self.r}) structure contains the clique {list(clique)}", clique)

    @property
    def arity(self) -> int:
        if self.flavor == "set":
            return 0
        if self.flavor == "hypergraph":
            return self.r
        return 2

    def __len__(self) -> int:
        return self.n

    def has_edge(self, vertices: Iterable[int]) -> bool:
        return tuple(sorted(vertices)) in self.edges

    def sorted_edges(self) -> list[tuple[int, ...]]:
        return sorted(self.edges)

    def induced(self, vertices: Sequence[int]) -> "FiniteStructure":
        """Substructure on ``vertices``, relabelled so ``vertices[i]`` becomes ``i``."""
        pos = {v: i for i, v in enumerate(vertices)}
        if len(pos) != len(vertices):
            raise StructureError("induced substructure needs distinct vertices")
        edges = [tuple(pos[v] for v in e) for e in self.edges if all(v in pos for v in e)]
        return FiniteStructure(self.flavor, len(vertices), frozenset(edges), self.r)

    def relabel(self, mapping: Sequence[int], n: int | None = None) -> "FiniteStructure":
        """Push the structure forward along an injective vertex map."""
        n = self.n if n is None else n
        edges = [tuple(mapping[v] for v in e) for e in self.edges]
        return FiniteStructure(self.flavor, n, frozenset(edges), self.r)

    def neighbors(self, v: int) -> set[int]:
        return {u for e in self.edges if v in e for u in e if u != v}

    def to_json(self) -> dict:
        out: dict = {"flavor": self.flavor}
        if self.flavor == "hypergraph":
            out["arity"] = self.r
        elif self.flavor == "krfree":
            out["r"] = self.r
        out["n"] = self.n
        out["edges"] = [list(e) for e in self.sorted_edges()]
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "FiniteStructure":
        try:
            flavor = data["flavor"]
            n = int(data["n"])
        except (KeyError, TypeError, ValueError) as exc:
            raise StructureError(f"malformed structure: {exc}") from exc
        r = data.get("arity", data.get("r"))
        edges = data.get("edges", [])
        seen = set()
        for raw in edges:
            key = tuple(sorted(raw))
            if key in seen:
                raise StructureError(f"duplicate edge {list(raw)}", tuple(raw))
            seen.add(key)
        return cls(flavor, n, frozenset(tuple(e) for e in edges), None if r is None else int(r))


def pure_set(n: int) -> FiniteStructure:
    return FiniteStructure("set", n)


def graph(n: int, edges: Iterable[Iterable[int]] = ()) -> FiniteStructure:
    return FiniteStructure("graph", n, frozenset(tuple(e) for e in edges))


def hypergraph(n: int, r: int, edges: Iterable[Iterable[int]] = ()) -> FiniteStructure:
    return FiniteStructure("hypergraph", n, frozenset(tuple(e) for e in edges), r)


def krfree(n: int, r: int, edges: Iterable[Iterable[int]] = ()) -> FiniteStructure:
    return FiniteStructure("krfree", n, frozenset(tuple(e) for e in edges), r)


def cycle(n: int) -> FiniteStructure:
    return graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> FiniteStructure:
    return graph(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int, r: int = 2) -> FiniteStructure:
    edges = itertools.combinations(range(n), r)
    return graph(n, edges) if r == 2 else hypergraph(n, r, edges)


def as_flavor(structure: FiniteStructure, flavor: str, r: int | None = None) -> FiniteStructure:
    return FiniteStructure(flavor, structure.n, structure.edges, r)


def find_clique(structure: FiniteStructure, size: int) -> tuple[int, ...] | None:
    """Lexicographically first vertex set of ``size`` whose every pair is an edge."""
    if structure.arity != 2:
        raise FlavorMismatch("clique search needs a graph relation")
    adj = [0] * structure.n
    for a, b in structure.edges:
        adj[a] |= 1 << b
        adj[b] |= 1 << a

    def extend(chosen: list[int], candidates: int) -> tuple[int, ...] | None:
        if len(chosen) == size:
            return tuple(chosen)
        while candidates:
            if bin(candidates).count("1") + len(chosen) < size:
                return None
            v = (candidates & -candidates).bit_length() - 1
            candidates &= candidates - 1
            found = extend(chosen + [v], candidates & adj[v])
            if found:
                return found
        return None

    if size <= 0:
        return ()
    return extend([], (1 << structure.n) - 1)


def disjoint_union(parts: Sequence[FiniteStructure]) -> tuple[FiniteStructure, list[int]]:
    """Disjoint union of same-flavor structures plus each part's vertex offset."""
    if not parts:
        raise StructureError("disjoint union of nothing")
    flavor, r = parts[0].flavor, parts[0].r
    offsets, edges, total = [], [], 0
    for part in parts:
        if (part.flavor, part.r) != (flavor, r):
            raise FlavorMismatch("disjoint union needs a single flavor")
        offsets.append(total)
        edges.extend(tuple(v + total for v in e) for e in part.edges)
        total += part.n
    return FiniteStructure(flavor, total, frozenset(edges), r), offsets


def _compatible(a: FiniteStructure, b: FiniteStructure) -> bool:
    if a.flavor == "set" or b.flavor == "set":
        return a.flavor == b.flavor
    return a.arity == b.arity


def iter_embedding_maps(
    source: FiniteStructure,
    target: FiniteStructure,
    fixed: Mapping[int, int] | None = None,
) -> Iterator[Map]:
    """Yield the maps of ``Emb(source, target)`` in lexicographic order.

    ``fixed`` pins some source vertices to given target vertices.
    """
    if not _compatible(source, target):
        raise FlavorMismatch(f"cannot embed {source.flavor} into {target.flavor}")
    m, k = source.n, source.arity
    fixed = dict(fixed or {})
    if len(set(fixed.values())) != len(fixed):
        return
    # tuples of source vertices ending at v, grouped by v so each is checked once
    checks: list[list[tuple[tuple[int, ...], bool]]] = [[] for _ in range(m)]
    if k:
        for t in itertools.combinations(range(m), k):
            checks[t[-1]].append((t, t in source.edges))
    tedges = target.edges
    image = [0] * m
    used = [False] * target.n

    def place(v: int) -> Iterator[Map]:
        if v == m:
            yield tuple(image)
            return
        candidates = (fixed[v],) if v in fixed else range(target.n)
        for w in candidates:
            if used[w]:
                continue
            image[v] = w
            ok = True
            for t, is_edge in checks[v]:
                if (tuple(sorted(image[u] for u in t)) in tedges) != is_edge:
                    ok = False
                    break
            if not ok:
                continue
            used[w] = True
            yield from place(v + 1)
            used[w] = False

    if any(w < 0 or w >= target.n for w in fixed.values()):
        return
    yield from place(0)


@dataclass(frozen=True)
class Embedding:
    source: FiniteStructure
    target: FiniteStructure
    map: tuple

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(int(v) for v in self.map))
        if not is_embedding(self.source, self.target, self.map):
            raise StructureError(f"{list(self.map)} is not an embedding", self.map)

    def __call__(self, v: int) -> int:
        return self.map[v]

    def __iter__(self):
        return iter(self.map)

    def __len__(self):
        return len(self.map)


def is_embedding(source: FiniteStructure, target: FiniteStructure, mapping: Sequence[int]) -> bool:
    if not _compatible(source, target) or len(mapping) != source.n:
        return False
    if len(set(mapping)) != len(mapping) or any(w < 0 or w >= target.n for w in mapping):
        return False
    for t in itertools.combinations(range(source.n), source.arity) if source.arity else ():
        if (t in source.edges) != target.has_edge(mapping[v] for v in t):
            return False
    return True


def identity(structure: FiniteStructure) -> Embedding:
    return Embedding(structure, structure, tuple(range(structure.n)))


def inclusion(small: int | FiniteStructure, big: FiniteStructure) -> Embedding:
    m = small if isinstance(small, int) else small.n
    return Embedding(big.induced(range(m)), big, tuple(range(m)))


class EmbeddingIndex:
    """``Emb(source, target)`` in lexicographic order with a reverse lookup."""

    def __init__(self, source: FiniteStructure, target: FiniteStructure):
        self.source = source
        self.target = target
        self.maps: list[Map] = list(iter_embedding_maps(source, target))
        self.position: dict[Map, int] = {f: i for i, f in enumerate(self.maps)}
        self._array: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)

    def array(self) -> np.ndarray:
        if self._array is None:
            self._array = np.array(self.maps, dtype=np.int64).reshape(len(self.maps), self.source.n)
            self._array.setflags(write=False)
        return self._array

    def index(self, f: Map) -> int:
        return self.position[tuple(f)]


@lru_cache(maxsize=256)
def embedding_index(source: FiniteStructure, target: FiniteStructure) -> EmbeddingIndex:
    return EmbeddingIndex(source, target)


@lru_cache(maxsize=64)
def composition_table(source: FiniteStructure, middle: FiniteStructure, target: FiniteStructure) -> np.ndarray:
    """``table[y, f]`` is the index of ``y o f`` in ``Emb(source, target)``.

    Rows index ``Emb(middle, target)``, columns index ``Emb(source, middle)``.
    """
    inner = embedding_index(source, middle)
    outer = embedding_index(middle, target)
    lookup = embedding_index(source, target).position
    table = np.empty((len(outer), len(inner)), dtype=np.int64)
    for yi, y in enumerate(outer.maps):
        for fi, f in enumerate(inner.maps):
            table[yi, fi] = lookup[tuple(y[v] for v in f)]
    return table


def enumerate_embeddings(source: FiniteStructure, target: FiniteStructure) -> list[Embedding]:
    """All embeddings ``source -> target`` in lexicographic order of their maps."""
    return [Embedding(source, target, f) for f in iter_embedding_maps(source, target)]


def compose(f: Embedding, g: Embedding) -> Embedding:
    """``g o f`` for ``f: A -> B`` and ``g: B -> C``."""
    if f.target != g.source:
        raise StructureError("cannot compose: target of f is not the source of g")
    return Embedding(f.source, g.target, tuple(g.map[v] for v in f.map))


@dataclass(frozen=True)
class OrderedFamily:
    """A subset of ``Emb(source, universe)``, members stored as map tuples."""

    source: FiniteStructure
    universe: FiniteStructure
    members: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(tuple(f) for f in self.members))

    @property
    def level(self) -> int:
        return self.source.n

    @classmethod
    def full(cls, source: FiniteStructure, universe: FiniteStructure) -> "OrderedFamily":
        return cls(source, universe, frozenset(embedding_index(source, universe).maps))

    @classmethod
    def empty(cls, source: FiniteStructure, universe: FiniteStructure) -> "OrderedFamily":
        return cls(source, universe, frozenset())

    def __contains__(self, f) -> bool:
        return tuple(f) in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def mask(self) -> np.ndarray:
        """Membership as a boolean vector over the lexicographic index."""
        index = embedding_index(self.source, self.universe)
        out = np.zeros(len(index), dtype=bool)
        for f in self.members:
            out[index.position[f]] = True
        return out

    def _same_space(self, other: "OrderedFamily") -> None:
        if (self.source, self.universe) != (other.source, other.universe):
            raise StructureError("families live over different embedding sets")

    def __and__(self, other: "OrderedFamily") -> "OrderedFamily":
        self._same_space(other)
        return OrderedFamily(self.source, self.universe, self.members & other.members)

    def __or__(self, other: "OrderedFamily") -> "OrderedFamily":
        self._same_space(other)
        return OrderedFamily(self.source, self.universe, self.members | other.members)

    def complement(self) -> "OrderedFamily":
        everything = frozenset(embedding_index(self.source, self.universe).maps)
        return OrderedFamily(self.source, self.universe, everything - self.members)


def lift_along(f: Embedding, family: OrderedFamily) -> OrderedFamily:
    """``{s in Emb(f.target, U) : s o f in family}``."""
    if f.source != family.source:
        raise StructureError(
            f"level mismatch: family lives at level {family.level}, f starts at level {f.source.n}"
        )
    members = [
        s for s in embedding_index(f.target, family.universe).maps
        if tuple(s[v] for v in f.map) in family.members
    ]
    return OrderedFamily(f.target, family.universe, frozenset(members))


@dataclass(frozen=True)
class DualResult:
    surjective: bool
    sections: dict  # x -> one s with s o f == x
    unhit: tuple | None = None

    def __bool__(self) -> bool:
        return self.surjective


def dual_surjective(f: Embedding, universe: FiniteStructure) -> DualResult:
    """Is ``s -> s o f`` from ``Emb(f.target, U)`` onto ``Emb(f.source, U)``?"""
    sections: dict = {}
    for s in embedding_index(f.target, universe).maps:
        x = tuple(s[v] for v in f.map)
        sections.setdefault(x, s)
    for x in embedding_index(f.source, universe).maps:
        if x not in sections:
            return DualResult(False, sections, x)
    return DualResult(True, sections)


def left_inverse_extension(f: Embedding, max_extra: int = 4) -> tuple[int, Embedding]:
    """Find ``h: f.target -> A_N`` with ``h o f`` the inclusion of ``f.source``.

    ``A_N`` is built on ``N = n, n+1, ...`` vertices as a copy of ``f.target``
    plus isolated fresh vertices; the first ``N`` and the lexicographically
    first ``h`` that work are returned.
    """
    small, big = f.source, f.target
    n = big.n
    for extra in range(max_extra + 1):
        total = n + extra
        pinned = {f.map[i]: i for i in range(small.n)}
        free_sources = [v for v in range(n) if v not in pinned]
        free_targets = [w for w in range(total) if w >= small.n]
        for choice in itertools.permutations(free_targets, len(free_sources)):
            h = [0] * n
            for v, w in pinned.items():
                h[v] = w
            for v, w in zip(free_sources, choice):
                h[v] = w
            host = big.relabel(h, total)
            if host.induced(range(small.n)) != small:
                continue
            return total, Embedding(big, host, tuple(h))
    raise StructureError("no left-inverse extension in the searched range")


# ---------------------------------------------------------------------------
# unordered m-subsets


@lru_cache(maxsize=128)
def combo_index(n: int, m: int) -> tuple[tuple[tuple[int, ...], ...], dict]:
    """Lexicographic list of ``[n]^m`` and its reverse lookup."""
    combos = tuple(itertools.combinations(range(n), m))
    return combos, {c: i for i, c in enumerate(combos)}


@dataclass(frozen=True)
class TupleFamily:
    """A family of sorted ``m``-subsets of ``{0, ..., n-1}``."""

    m: int
    n: int
    members: frozenset = frozenset()

    def __post_init__(self):
        members = set()
        for raw in self.members:
            t = tuple(sorted(int(v) for v in raw))
            if len(t) != self.m or len(set(t)) != self.m:
                raise StructureError(f"{list(raw)} is not a {self.m}-set", tuple(raw))
            if t and (t[0] < 0 or t[-1] >= self.n):
                raise StructureError(f"{list(raw)} leaves the universe [0, {self.n})", tuple(raw))
            members.add(t)
        object.__setattr__(self, "members", frozenset(members))

    @classmethod
    def full(cls, m: int, n: int) -> "TupleFamily":
        return cls(m, n, frozenset(combo_index(n, m)[0]))

    @classmethod
    def empty(cls, m: int, n: int) -> "TupleFamily":
        return cls(m, n, frozenset())

    @classmethod
    def from_mask(cls, m: int, n: int, mask: int) -> "TupleFamily":
        combos = combo_index(n, m)[0]
        return cls(m, n, frozenset(c for i, c in enumerate(combos) if mask >> i & 1))

    def to_mask(self) -> int:
        pos = combo_index(self.n, self.m)[1]
        out = 0
        for t in self.members:
            out |= 1 << pos[t]
        return out

    def __contains__(self, t) -> bool:
        return tuple(sorted(t)) in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def _check(self, other: "TupleFamily") -> None:
        if (self.m, self.n) != (other.m, other.n):
            raise StructureError("families have different arity or universe")

    def __and__(self, other):
        self._check(other)
        return TupleFamily(self.m, self.n, self.members & other.members)

    def __or__(self, other):
        self._check(other)
        return TupleFamily(self.m, self.n, self.members | other.members)

    def __xor__(self, other):
        self._check(other)
        return TupleFamily(self.m, self.n, self.members ^ other.members)

    def __sub__(self, other):
        self._check(other)
        return TupleFamily(self.m, self.n, self.members - other.members)

    def __le__(self, other):
        self._check(other)
        return self.members <= other.members

    def complement(self) -> "TupleFamily":
        return TupleFamily.full(self.m, self.n) - self

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "members": [list(t) for t in sorted(self.members)]}

    @classmethod
    def from_json(cls, data: Mapping) -> "TupleFamily":
        try:
            members = [tuple(t) for t in data["members"]]
            m, n = int(data["m"]), int(data["n"])
        except (KeyError, TypeError, ValueError) as exc:
            raise StructureError(f"malformed family: {exc}") from exc
        if len({tuple(sorted(t)) for t in members}) != len(members):
            raise StructureError("duplicate member in family")
        return cls(m, n, frozenset(members))
