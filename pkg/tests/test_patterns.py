import itertools
import math
import random

import pytest

from fraisselab.core import OrderedFamily, embedding_index, graph, pure_set
from fraisselab.errors import CostCapExceeded, FlavorMismatch
from fraisselab.orders import LinearOrder
from fraisselab.patterns import (
    And,
    Leaf,
    MinimalSetSpec,
    Not,
    NoCrossing,
    Or,
    all_orders,
    build_full_pattern_witness,
    combination_patterns,
    dense_pattern_lower_bound,
    evaluate,
    expansion_property_witness,
    is_ramsey_witness,
    minimal_pattern_bound,
    minimal_set,
    n_patterns,
    separation_crossing,
    simultaneous_patterns,
)

A2 = pure_set(2)
UP, DOWN = (0, 1), (1, 0)


def brute_minimal_set(spec, universe):
    pos = spec.order.positions
    out = set()
    for f in itertools.permutations(range(universe.n), spec.level):
        pulled = tuple(sorted(range(spec.level), key=lambda i: pos[f[i]]))
        if pulled in spec.expansions:
            out.add(f)
    return out


def brute_patterns(family, big_n):
    """Distinct traces over every injection of [N] into the universe."""
    inner = list(itertools.permutations(range(big_n), family.level))
    found = set()
    for y in itertools.permutations(range(family.universe.n), big_n):
        found.add(frozenset(f for f in inner if tuple(y[v] for v in f) in family.members))
    return found


def test_minimal_set_examples():
    u = pure_set(4)
    natural = LinearOrder.natural(4)
    up = minimal_set(MinimalSetSpec(A2, {UP}, natural), u)
    assert up.members == {(a, b) for a, b in itertools.permutations(range(4), 2) if a < b}
    assert len(up) == 6
    assert minimal_set(MinimalSetSpec(A2, all_orders(2), natural), u) == OrderedFamily.full(A2, u)
    assert minimal_set(MinimalSetSpec(A2, set(), natural), u) == OrderedFamily.empty(A2, u)


def test_minimal_set_matches_brute_force():
    rng = random.Random(4)
    for _ in range(40):
        m, n = rng.randint(1, 3), rng.randint(3, 6)
        order = LinearOrder(n, rng.sample(range(n), n))
        expansions = {e for e in all_orders(m) if rng.random() < 0.5}
        spec = MinimalSetSpec(pure_set(m), expansions, order)
        assert minimal_set(spec, pure_set(n)).members == brute_minimal_set(spec, pure_set(n))


def test_minimal_set_is_equivariant_under_relabelling_the_source():
    rng = random.Random(8)
    for _ in range(30):
        m, n = 3, rng.randint(3, 6)
        order = LinearOrder(n, rng.sample(range(n), n))
        expansions = {e for e in all_orders(m) if rng.random() < 0.5}
        sigma = tuple(rng.sample(range(m), m))
        inverse = [0] * m
        for i, s in enumerate(sigma):
            inverse[s] = i
        base = minimal_set(MinimalSetSpec(pure_set(m), expansions, order), pure_set(n))
        moved_e = {tuple(inverse[v] for v in e) for e in expansions}
        moved = minimal_set(MinimalSetSpec(pure_set(m), moved_e, order), pure_set(n))
        assert moved.members == {tuple(f[sigma[i]] for i in range(m)) for f in base.members}


def test_n_patterns_examples():
    u = pure_set(4)
    up = minimal_set(MinimalSetSpec(A2, {UP}, LinearOrder.natural(4)), u)
    found = n_patterns(up, pure_set(3))
    assert len(found) == 6
    assert found.as_sets() == brute_patterns(up, 3)
    for mask, y in found.patterns.items():
        inner = embedding_index(A2, pure_set(3)).maps
        assert mask == sum(1 << i for i, f in enumerate(inner) if (y[f[0]], y[f[1]]) in up.members)
    full = n_patterns(OrderedFamily.full(A2, u), pure_set(3))
    assert list(full.patterns) == [2**6 - 1]
    assert list(n_patterns(OrderedFamily.empty(A2, u), pure_set(3)).patterns) == [0]


def test_n_patterns_without_embeddings_is_empty():
    assert len(n_patterns(OrderedFamily.full(A2, pure_set(3)), pure_set(4))) == 0


def test_n_patterns_matches_brute_force_on_random_families():
    rng = random.Random(12)
    u = pure_set(5)
    maps = embedding_index(A2, u).maps
    for _ in range(10):
        family = OrderedFamily(A2, u, {f for f in maps if rng.random() < 0.5})
        assert n_patterns(family, pure_set(3)).as_sets() == brute_patterns(family, 3)


@pytest.mark.parametrize("big_n", [2, 3, 4])
def test_minimal_sets_respect_per_set_bound(big_n):
    bound = 2 ** math.factorial(2) * math.factorial(big_n)
    u = pure_set(6)
    for order in (LinearOrder.natural(6), LinearOrder(6, (3, 1, 5, 0, 2, 4))):
        for size in range(3):
            for chosen in itertools.combinations(sorted(all_orders(2)), size):
                family = minimal_set(MinimalSetSpec(A2, chosen, order), u)
                assert len(n_patterns(family, pure_set(big_n))) <= bound


def test_patterns_of_intersections_are_simultaneous_intersections():
    rng = random.Random(21)
    u = pure_set(6)
    for _ in range(10):
        o1 = LinearOrder(6, rng.sample(range(6), 6))
        o2 = LinearOrder(6, rng.sample(range(6), 6))
        s1 = MinimalSetSpec(A2, {UP}, o1)
        s2 = MinimalSetSpec(A2, {rng.choice([UP, DOWN])}, o2)
        t1, t2 = minimal_set(s1, u), minimal_set(s2, u)
        joint = simultaneous_patterns([t1, t2], pure_set(3))
        meet = set(n_patterns(t1 & t2, pure_set(3)).patterns)
        assert meet == {a & b for a, b in joint}
        formula = And(Leaf(s1), Leaf(s2))
        assert set(combination_patterns(formula, u, pure_set(3)).patterns) == meet


def test_combination_patterns_match_evaluated_formula():
    u = pure_set(6)
    s1 = MinimalSetSpec(A2, {UP}, LinearOrder.natural(6))
    s2 = MinimalSetSpec(A2, {DOWN}, LinearOrder(6, (2, 0, 4, 1, 5, 3)))
    for formula in (Or(Leaf(s1), Leaf(s2)), Not(Leaf(s1)), And(Not(Leaf(s1)), Or(Leaf(s2), Leaf(s1)))):
        direct = n_patterns(evaluate(formula, u), pure_set(3))
        assert set(combination_patterns(formula, u, pure_set(3)).patterns) == set(direct.patterns)
        assert len(direct) <= minimal_pattern_bound(2, 3, 2)


def test_minimal_pattern_bound_examples():
    assert minimal_pattern_bound(2, 4, 1) == 384
    assert minimal_pattern_bound(2, 3, 1) == 96
    assert minimal_pattern_bound(1, 1, 1) == 8
    assert minimal_pattern_bound(5, 30, 6) == 2**64 * (2**120 * math.factorial(30)) ** 6


def test_dense_lower_bound_examples():
    assert dense_pattern_lower_bound("set", 2, 4) == 4096
    assert dense_pattern_lower_bound("set", 2, 3) == 64
    assert dense_pattern_lower_bound("hypergraph", 3, 4) == 4
    assert dense_pattern_lower_bound("krfree", 3, 4) == 4
    with pytest.raises(FlavorMismatch):
        dense_pattern_lower_bound("graph", 2, 4)


def test_separation_crossing():
    c = separation_crossing("set", 2, 1)
    assert (c.N, c.minimal_bound, c.dense_bound) == (4, 384, 4096)
    c2 = separation_crossing("set", 2, 2)
    # recomputed by scanning both formulas directly
    scan = next(
        big_n for big_n in range(2, 65)
        if 2 ** (2 * math.comb(big_n, 2)) > 2**4 * (2**2 * math.factorial(big_n)) ** 2
    )
    assert c2.N == scan
    c0 = separation_crossing("set", 2, 0)
    assert (c0.N, c0.minimal_bound) == (2, 2)
    assert separation_crossing("hypergraph", 3, 1, r=3).N > 3
    with pytest.raises(NoCrossing):
        separation_crossing("set", 2, 4, cap=12)


def test_full_pattern_witness_small():
    w = build_full_pattern_witness(2, pure_set(2))
    assert w.universe.n == 8 and len(w.targets) == 4
    assert w.verify()


def test_full_pattern_witness_attains_all_patterns_for_three_points():
    w = build_full_pattern_witness(2, pure_set(3))
    assert len(w.targets) == 2 ** (math.factorial(2) * math.comb(3, 2)) == 64
    assert w.verify()
    assert len(set(w.realized())) == 64


def test_full_pattern_witness_four_points():
    w = build_full_pattern_witness(2, pure_set(4))
    assert len(w.targets) == 4096 and w.universe.n == 4 * 4096
    realized = w.realized()
    assert len(set(realized)) == 2 ** (2 * math.comb(4, 2))
    rng = random.Random(1)
    for block in rng.sample(range(4096), 50):
        assert realized[block] == w.targets[block]


def test_full_pattern_witness_empty_embedding_set():
    w = build_full_pattern_witness(2, graph(2, []).induced([0]))
    assert len(w.targets) == 1 and w.universe.n == 1 and len(w.family) == 0


def test_full_pattern_witness_cap(monkeypatch):
    monkeypatch.setenv("FORGE_MAX_COST", "50")
    with pytest.raises(CostCapExceeded):
        build_full_pattern_witness(2, pure_set(3))


def test_ramsey_witness_examples():
    assert is_ramsey_witness(pure_set(1), pure_set(2), pure_set(3), 2).holds
    verdict = is_ramsey_witness(A2, A2, pure_set(6), 2)
    assert not verdict.holds
    coloring = verdict.bad_coloring
    for h in itertools.permutations(range(6), 2):
        assert coloring[h] != coloring[(h[1], h[0])]
    assert is_ramsey_witness(pure_set(1), pure_set(1), pure_set(1), 2).holds
    assert not is_ramsey_witness(A2, A2, A2, 2).holds


def test_ramsey_witness_agrees_with_enumeration():
    """Small cases re-checked by enumerating every coloring."""
    cases = [(pure_set(1), pure_set(2), pure_set(2)), (pure_set(1), pure_set(3), pure_set(5)),
             (pure_set(1), pure_set(2), pure_set(4)), (A2, A2, pure_set(3))]
    for a, b, c in cases:
        points = embedding_index(a, c).maps
        copies = [{tuple(h[v] for v in f) for f in embedding_index(a, b).maps}
                  for h in embedding_index(b, c).maps]
        expected = all(
            any(len({col[points.index(p)] for p in copy}) == 1 for copy in copies)
            for col in itertools.product(range(2), repeat=len(points))
        )
        assert is_ramsey_witness(a, b, c, 2).holds == expected


def test_ramsey_witness_cost_cap():
    with pytest.raises(CostCapExceeded):
        is_ramsey_witness(A2, pure_set(3), pure_set(8), 2, cap=2**20)


def test_expansion_property_examples():
    two = (A2, LinearOrder.natural(2))
    assert expansion_property_witness(two, pure_set(2))
    assert not expansion_property_witness(two, pure_set(1))
    assert expansion_property_witness((pure_set(3), LinearOrder(3, (2, 0, 1))), pure_set(3))
    path = graph(3, [(0, 1), (1, 2)])
    # an ordered path with the middle vertex first cannot sit in every ordering of a path
    assert not expansion_property_witness((path, LinearOrder(3, (1, 0, 2))), path)
