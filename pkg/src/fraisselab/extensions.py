"""Constructive one-point extension lemmas.

Given a host ``C``, a template ``B`` and a designated edge ``e`` of ``B``, build
``D`` containing ``C`` as an induced substructure such that every embedding of
``e`` into ``C`` extends to an embedding of ``B`` into ``D``.

Two constructions are provided.  For ``r``-uniform hypergraphs the edges of
``C`` are split into matchings ``M_1..M_l``; each pair (matching ``i``,
ordering ``j`` of an edge) gets one fresh copy of ``B - e`` shared by all
edges of ``M_i``.  For K_r-free graphs the vertices of ``C`` are split into
independent classes ``C_1..C_l``; each ordered pair of distinct classes gets
one fresh copy of ``B - e``.  The second construction keeps ``D`` K_r-free.

Sizes are exact: ``|C| + l r! (|B|-r)`` for hypergraphs and
``|C| + l(l-1)(|B|-2)`` for the K_r-free case.  No asymptotic bound is checked.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import FiniteStructure, find_clique, iter_embedding_maps
from .errors import StructureError, guard


@dataclass(frozen=True)
class ExtensionTask:
    host: FiniteStructure  # C
    template: FiniteStructure  # B
    edge: tuple  # e, as a vertex list inside B
    r: int

    def __post_init__(self):
        object.__setattr__(self, "edge", tuple(self.edge))
        arity = self.template.arity
        if len(self.edge) != arity or len(set(self.edge)) != arity:
            raise StructureError(f"designated copy {list(self.edge)} is not a single {arity}-edge", self.edge)
        if not self.template.has_edge(self.edge):
            raise StructureError(f"{list(self.edge)} is not an edge of the template", self.edge)

    @property
    def rest(self) -> tuple:
        """Vertices of ``B`` outside ``e``, in increasing order."""
        return tuple(v for v in range(self.template.n) if v not in self.edge)


@dataclass(frozen=True)
class Attachment:
    i: int
    j: int
    vertices: tuple

    def to_json(self) -> dict:
        return {"i": self.i, "j": self.j, "vertices": list(self.vertices)}


@dataclass(frozen=True)
class ExtensionResult:
    structure: FiniteStructure  # D
    host_map: tuple  # C -> D
    attachments: tuple = ()
    parts: int = 0  # l: matchings or color classes

    def to_json(self) -> dict:
        out = self.structure.to_json()
        out["attachments"] = [a.to_json() for a in self.attachments]
        return out


def _first_fit_matchings(edges: list[tuple]) -> list[list[tuple]]:
    matchings: list[list[tuple]] = []
    covered: list[set[int]] = []
    for e in edges:
        for group, used in zip(matchings, covered):
            if used.isdisjoint(e):
                group.append(e)
                used.update(e)
                break
        else:
            matchings.append([e])
            covered.append(set(e))
    return matchings


def _all_matchings(edges: list[tuple], cap: int) -> list[int] | None:
    """Every nonempty matching as a bitmask over ``edges``; None past ``cap``."""
    vmask = [sum(1 << v for v in e) for e in edges]
    out: list[int] = []

    def grow(start: int, used: int, chosen: int) -> bool:
        for i in range(start, len(edges)):
            if not used & vmask[i]:
                out.append(chosen | 1 << i)
                if len(out) > cap or not grow(i + 1, used | vmask[i], chosen | 1 << i):
                    return False
        return True

    return out if grow(0, 0, 0) else None


def _cover_by_matchings(edges: list[tuple], rows: list[int], slots: int, budget: int) -> list[int] | None:
    """Partition the edges into at most ``slots`` matchings (exact cover search)."""
    by_edge = [sorted((r for r in rows if r >> i & 1), key=lambda r: -r.bit_count()) for i in range(len(edges))]
    widest = max(r.bit_count() for r in rows)
    chosen: list[int] = []
    nodes = 0

    def go(left: int, slots: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise TimeoutError
        if not left:
            return True
        if slots * widest < left.bit_count():
            return False
        # branch on the uncovered edge with the fewest usable matchings
        cands = None
        rest = left
        while rest:
            i = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            usable = [r for r in by_edge[i] if r & left == r]
            if cands is None or len(usable) < len(cands):
                cands = usable
                if len(usable) <= 1:
                    break
        for r in cands:
            chosen.append(r)
            if go(left & ~r, slots - 1):
                return True
            chosen.pop()
        return False

    try:
        return list(chosen) if go((1 << len(edges)) - 1, slots) else None
    except TimeoutError:
        return None


def matching_decomposition(c: FiniteStructure, budget: int = 200_000) -> list[list[tuple]]:
    """Split the edges into matchings.

    Greedy first-fit over the sorted edges gives a starting split.  On small
    hosts an exact-cover search then looks for fewer matchings (first at the
    degree/size lower bound, then one below the best found), each attempt
    limited to ``budget`` search nodes.  First-fit alone can overshoot badly:
    on the complete graph on 5 vertices it uses 7 matchings where 5 suffice.
    """
    edges = c.sorted_edges()
    best = _first_fit_matchings(edges)
    if not edges or c.n > 12:
        return best
    rows = _all_matchings(edges, cap=200_000)
    if rows is None:
        return best
    degree = max(sum(v in e for e in edges) for v in range(c.n))
    widest = max(r.bit_count() for r in rows)
    floor = max(degree, -(-len(edges) // widest))

    def as_lists(cover: list[int]) -> list[list[tuple]]:
        return [[edges[i] for i in range(len(edges)) if r >> i & 1] for r in cover]

    if len(best) > floor:
        cover = _cover_by_matchings(edges, rows, floor, budget)
        if cover is not None:
            return sorted(as_lists(cover))
    while len(best) - 1 > floor:
        cover = _cover_by_matchings(edges, rows, len(best) - 1, budget)
        if cover is None:
            break
        best = as_lists(cover)
    return sorted(best)


def _template_edges_off_e(task: ExtensionTask) -> list[tuple]:
    inside = set(task.edge)
    return [t for t in task.template.sorted_edges() if not inside.issuperset(t)]


def extend_hypergraph(task: ExtensionTask) -> ExtensionResult:
    c, b, e = task.host, task.template, task.edge
    if c.arity != task.r or b.arity != task.r:
        raise StructureError(f"host and template must be {task.r}-uniform")
    rest = task.rest
    matchings = matching_decomposition(c)
    orderings = list(itertools.permutations(range(task.r)))
    edges = set(c.edges)
    attachments = []
    n = c.n
    template_edges = _template_edges_off_e(task)
    for i, matching in enumerate(matchings):
        for j, order in enumerate(orderings):
            block = tuple(range(n, n + len(rest)))
            n += len(rest)
            attachments.append(Attachment(i, j, block))
            for target in matching:
                h = dict(zip(rest, block))
                # f_j sends e[t] to the order[t]-th vertex of the target edge
                h.update({e[t]: target[order[t]] for t in range(task.r)})
                edges.update(tuple(sorted(h[v] for v in t)) for t in template_edges)
    d = FiniteStructure(c.flavor, n, frozenset(edges), c.r)
    return ExtensionResult(d, tuple(range(c.n)), tuple(attachments), len(matchings))


def maximum_independent_set(g: FiniteStructure, vertices: list[int] | None = None) -> tuple[int, ...]:
    """Largest independent set, smallest in lexicographic order among ties.

    Branch and bound over bitmasks; refuses graphs above 32 vertices.
    """
    vertices = list(range(g.n)) if vertices is None else sorted(vertices)
    if len(vertices) > 32:
        raise StructureError("maximum independent set search is limited to 32 vertices")
    pos = {v: i for i, v in enumerate(vertices)}
    adj = [0] * len(vertices)
    for a, b in g.edges:
        if a in pos and b in pos:
            adj[pos[a]] |= 1 << pos[b]
            adj[pos[b]] |= 1 << pos[a]
    best: list[int] = []

    def search(chosen: list[int], candidates: int) -> None:
        nonlocal best
        if len(chosen) + bin(candidates).count("1") <= len(best):
            return
        if not candidates:
            best = list(chosen)
            return
        v = (candidates & -candidates).bit_length() - 1
        search(chosen + [v], candidates & ~adj[v] & ~(1 << v))
        search(chosen, candidates & ~(1 << v))

    search([], (1 << len(vertices)) - 1)
    return tuple(vertices[i] for i in best)


def _maximal_independent_sets(adj: dict[int, set[int]], pool: list[int], v: int) -> list[tuple[int, ...]]:
    """Maximal independent subsets of ``pool`` containing ``v``, largest first."""
    found = []

    def grow(chosen: list[int], candidates: list[int], excluded: list[int]) -> None:
        if not candidates and not excluded:
            found.append(tuple(sorted(chosen)))
            return
        for i, w in enumerate(candidates):
            grow(chosen + [w],
                 [x for x in candidates[i + 1:] if x not in adj[w]],
                 [x for x in excluded + candidates[:i] if x not in adj[w]])

    grow([v], [w for w in pool if w != v and w not in adj[v]], [])
    return sorted(set(found), key=lambda s: (-len(s), s))


def proper_coloring(g: FiniteStructure) -> list[tuple[int, ...]]:
    """Color classes obtained by repeatedly removing independent sets.

    Removing a maximum independent set each round is tried first; the search
    then backtracks over other (maximal) independent sets until it reaches the
    fewest possible classes, so the class count is the chromatic number and
    can only grow when edges are added.
    """
    adj = {v: g.neighbors(v) for v in range(g.n)}
    greedy, remaining = [], list(range(g.n))
    while remaining:
        chosen = maximum_independent_set(g, remaining)
        greedy.append(chosen)
        remaining = [v for v in remaining if v not in set(chosen)]

    def split(pool: list[int], budget: int) -> list[tuple[int, ...]] | None:
        if not pool:
            return []
        if budget == 0:
            return None
        for cls in _maximal_independent_sets(adj, pool, pool[0]):
            taken = set(cls)
            rest = split([v for v in pool if v not in taken], budget - 1)
            if rest is not None:
                return [cls] + rest
        return None

    best = greedy
    for budget in range(1, len(greedy)):
        found = split(list(range(g.n)), budget)
        if found is not None:
            best = found
            break
    # keep maximum-first class order for a stable block layout
    return sorted(best, key=lambda c: (-len(c), c))


def extend_kr_free(task: ExtensionTask) -> ExtensionResult:
    c, b, r = task.host, task.template, task.r
    if c.arity != 2 or b.arity != 2:
        raise StructureError("K_r-free extension needs graphs")
    for name, g in (("host", c), ("template", b)):
        clique = find_clique(g, r)
        if clique is not None:
            raise StructureError(f"{name} contains the {r}-clique {list(clique)}", clique)
    classes = proper_coloring(c)
    color = {v: k for k, cls in enumerate(classes) for v in cls}
    rest = task.rest
    a_vertex, b_vertex = task.edge
    n = c.n
    blocks: dict[tuple[int, int], dict] = {}
    attachments = []
    for i, j in itertools.permutations(range(len(classes)), 2):
        block = tuple(range(n, n + len(rest)))
        n += len(rest)
        blocks[(i, j)] = dict(zip(rest, block))
        attachments.append(Attachment(i, j, block))
    edges = set(c.edges)
    template_edges = _template_edges_off_e(task)
    for (i, j), h_rest in blocks.items():
        edges.update(tuple(sorted(h_rest[v] for v in t)) for t in template_edges if a_vertex not in t and b_vertex not in t)
    for x, y in c.sorted_edges():
        for fa, fb in ((x, y), (y, x)):
            h = dict(blocks[(color[fa], color[fb])])
            h[a_vertex], h[b_vertex] = fa, fb
            edges.update(tuple(sorted(h[v] for v in t)) for t in template_edges)
    flavor = "krfree" if c.flavor == "krfree" else "graph"
    d = FiniteStructure(flavor, n, frozenset(edges), r if flavor == "krfree" else None)
    return ExtensionResult(d, tuple(range(c.n)), tuple(attachments), len(classes))


@dataclass(frozen=True)
class ExtensionCheck:
    ok: bool
    failing: tuple | None = None  # f in Emb(e, C) with no extension
    reason: str = ""
    extensions: dict = field(default_factory=dict, compare=False)

    def __bool__(self) -> bool:
        return self.ok


def verify_extension(result: ExtensionResult, task: ExtensionTask, kr_free: bool | None = None) -> ExtensionCheck:
    """Exhaustively check that every ``f: e -> C`` extends to some ``h: B -> D``.

    Also re-checks that ``C`` sits induced inside ``D`` and that ``D`` keeps the
    class constraint (uniformity, and K_r-freeness when ``kr_free``).
    """
    c, b, d = task.host, task.template, result.structure
    if kr_free is None:
        kr_free = c.flavor == "krfree" or d.flavor == "krfree"
    if d.arity != c.arity:
        return ExtensionCheck(False, reason="D has the wrong relation arity")
    guard("extension verification", d.n ** b.n, default=2**40)
    if d.induced(result.host_map).edges != c.edges:
        return ExtensionCheck(False, reason="C is not induced in D")
    if kr_free:
        clique = find_clique(d, task.r)
        if clique is not None:
            return ExtensionCheck(False, clique, reason=f"D contains the {task.r}-clique {list(clique)}")
    e_structure = b.induced(task.edge)
    extensions = {}
    for f in iter_embedding_maps(e_structure, c):
        pinned = {task.edge[t]: result.host_map[f[t]] for t in range(len(f))}
        h = next(iter_embedding_maps(b, d, pinned), None)
        if h is None:
            return ExtensionCheck(False, f, reason="no extension", extensions=extensions)
        extensions[f] = h
    return ExtensionCheck(True, extensions=extensions)
