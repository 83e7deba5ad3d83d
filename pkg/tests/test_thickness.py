import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from fraisselab.core import OrderedFamily, TupleFamily, embedding_index, pure_set
from fraisselab.errors import FraisseError
from fraisselab.thickness import (
    forget_order,
    is_saturated,
    is_thick_upto,
    mixed_set_is_thin,
    preimage,
    ramsey_partition_check,
    saturate,
    thickness_reason,
)

A2, U4 = pure_set(2), pure_set(4)


def fam(members, source=A2, universe=U4):
    return OrderedFamily(source, universe, members)


def random_pairs(rng, n, p=0.5):
    return TupleFamily(2, n, {t for t in itertools.combinations(range(n), 2) if rng.random() < p})


def test_forget_order_examples():
    assert forget_order(fam({(0, 1), (1, 0)})).members == {(0, 1)}
    assert forget_order(fam(set())).members == frozenset()
    assert forget_order(fam({(0, 1), (2, 3), (3, 2)})).members == {(0, 1), (2, 3)}


def test_saturate_examples():
    assert saturate(fam({(0, 1)})).members == {(0, 1), (1, 0)}
    already = fam({(0, 1), (1, 0)})
    assert saturate(already) == already and is_saturated(already)
    three = OrderedFamily(pure_set(3), U4, {(0, 1, 2)})
    assert saturate(three).members == set(itertools.permutations((0, 1, 2)))


@given(st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_saturate_is_a_closure_operator(seed):
    rng = random.Random(seed)
    maps = embedding_index(A2, U4).maps
    s = fam({f for f in maps if rng.random() < 0.3})
    t = fam(s.members | {f for f in maps if rng.random() < 0.3})
    assert s.members <= saturate(s).members
    assert saturate(saturate(s)) == saturate(s)
    assert saturate(s).members <= saturate(t).members
    assert saturate(s) == preimage(forget_order(s))
    assert len(forget_order(s)) <= len(s)


def test_thick_examples():
    full = TupleFamily.full(2, 6)
    assert is_thick_upto(full, 6).witness == (0, 1, 2, 3, 4, 5)
    parity = TupleFamily(2, 6, {(a, b) for a, b in itertools.combinations(range(6), 2) if (a - b) % 2 == 0})
    assert is_thick_upto(parity, 3).witness == (0, 2, 4)
    matching = TupleFamily(2, 6, {(0, 1), (2, 3), (4, 5)})
    assert is_thick_upto(matching, 3) is None
    assert thickness_reason(matching, 3) == "no witness"


def test_thick_above_universe_is_exhausted():
    full = TupleFamily.full(2, 4)
    assert is_thick_upto(full, 5) is None
    assert thickness_reason(full, 5) == "exhausted"
    with pytest.raises(ValueError):
        is_thick_upto(full, 1)


def brute_thick(family, level):
    return any(
        all(t in family.members for t in itertools.combinations(xs, family.m))
        for xs in itertools.combinations(range(family.n), level)
    )


@given(st.integers(0, 10_000), st.integers(2, 5))
@settings(max_examples=60, deadline=None)
def test_ordered_and_unordered_thickness_agree(seed, level):
    rng = random.Random(seed)
    family = random_pairs(rng, 6, 0.7)
    unordered = is_thick_upto(family, level)
    ordered = is_thick_upto(preimage(family), level)
    assert (unordered is None) == (ordered is None) == (not brute_thick(family, level))
    if ordered is not None:
        assert tuple(sorted(ordered.witness)) == unordered.witness
        assert ordered.ordered


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_thickness_is_antitone_in_level(seed):
    family = random_pairs(random.Random(seed), 7, 0.75)
    for level in range(2, 8):
        w = is_thick_upto(family, level)
        if w is not None:
            for lower in range(2, level):
                assert is_thick_upto(family, lower) is not None


def test_ramsey_partition_examples():
    assert ramsey_partition_check(3, 6).holds
    assert ramsey_partition_check(2, 2).holds
    verdict = ramsey_partition_check(3, 5)
    assert not verdict.holds
    for cell in verdict.color_classes(5):
        # each cell of the witness is a 5-cycle: 2-regular, connected, triangle-free
        degree = {v: sum(v in t for t in cell.members) for v in range(5)}
        assert set(degree.values()) == {2}
        assert is_thick_upto(cell, 3) is None
        reach, frontier = {0}, [0]
        while frontier:
            v = frontier.pop()
            for a, b in cell.members:
                for x, y in ((a, b), (b, a)):
                    if x == v and y not in reach:
                        reach.add(y)
                        frontier.append(y)
        assert reach == set(range(5))


def test_ramsey_partition_guards():
    with pytest.raises(FraisseError):
        ramsey_partition_check(3, 9)
    with pytest.raises(ValueError):
        ramsey_partition_check(4, 3)


def test_partition_corollary_on_six_points():
    rng = random.Random(11)
    pairs = list(itertools.combinations(range(6), 2))
    for _ in range(200):
        t0 = TupleFamily(2, 6, {p for p in pairs if rng.random() < 0.5})
        t1 = TupleFamily.full(2, 6) - t0
        assert is_thick_upto(t0, 3) or is_thick_upto(t1, 3)


def test_mixed_set_trivial_cases():
    empty = mixed_set_is_thin(TupleFamily.empty(2, 6), 3)
    assert empty.mixed.members == frozenset() and empty.largest == ()
    full = mixed_set_is_thin(TupleFamily.full(2, 6), 3)
    assert full.mixed.members == frozenset()


def test_mixed_set_is_thin_on_six_points():
    rng = random.Random(5)
    for _ in range(40):
        cert = mixed_set_is_thin(random_pairs(rng, 6), 3)
        assert len(cert.largest) <= 5
        assert cert.thin
        assert cert.obstruction is not None and cert.obstruction not in cert.mixed.members
        # brute-force recomputation of the largest clique in the mixed family
        best = max((k for k in range(3, 7) if brute_thick(cert.mixed, k)), default=0)
        assert len(cert.largest) == best
