"""Finite pointed posets, monotone maps, and the constructions on them."""

from __future__ import annotations

from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relfix.config import Caps
from relfix.errors import (
    NoLeastElement,
    NotAPartialOrder,
    NotMonotone,
    SizeCapExceeded,
)
from relfix.poset import (
    FinPoset,
    MonotoneMap,
    chain_poset,
    const_map,
    enumerate_monotone_maps,
    hom_element_map,
    hom_poset,
    identity_map,
    lift,
    monotone_map,
    one,
    product,
    sum_sep,
    validate_poset,
)


@st.composite
def pointed_posets(draw) -> FinPoset:
    """A random pointed poset: a DAG on 1..n-1 plus bottom edges from 0."""
    n = draw(st.integers(min_value=1, max_value=5))
    pairs = [(0, k) for k in range(1, n)]
    for i in range(1, n):
        for j in range(i + 1, n):
            if draw(st.booleans()):
                pairs.append((i, j))
    return validate_poset(n, pairs, 0)


def test_one_is_a_single_point():
    p = one()
    assert p.n == 1
    assert p.bottom == 0
    assert p.le(0, 0)


def test_chain_poset_is_totally_ordered():
    c = chain_poset(4)
    assert c.n == 4
    assert c.bottom == 0
    for i in range(4):
        for j in range(4):
            assert c.le(i, j) == (i <= j)


def test_validate_poset_takes_transitive_closure():
    p = validate_poset(3, [(0, 1), (1, 2)], 0)
    assert p.le(0, 2)


def test_validate_poset_rejects_cycles():
    with pytest.raises(NotAPartialOrder):
        validate_poset(2, [(0, 1), (1, 0)], 0)


def test_validate_poset_rejects_wrong_bottom():
    with pytest.raises(NoLeastElement):
        validate_poset(2, [], 0)  # 0 and 1 incomparable, so no least element


def test_canonical_form_of_a_relabelled_chain():
    # In a chain all heights differ, so canonicalization sorts the
    # elements back into chain order no matter how the input labels them.
    shuffled = validate_poset(3, [(2, 0), (0, 1)], 2)
    straight = chain_poset(3)
    assert np.array_equal(shuffled.leq, straight.leq)
    assert shuffled.bottom == 0


@given(pointed_posets())
def test_random_posets_satisfy_the_axioms(p: FinPoset):
    for i in range(p.n):
        assert p.le(i, i)
        assert p.le(p.bottom, i)
        for j in range(p.n):
            if p.le(i, j) and p.le(j, i):
                assert i == j
            for k in range(p.n):
                if p.le(i, j) and p.le(j, k):
                    assert p.le(i, k)


@given(pointed_posets())
def test_canonicalization_sorts_by_height(p: FinPoset):
    def height(x: int) -> int:
        below = [y for y in range(p.n) if p.le(y, x) and y != x]
        return 1 + max((height(y) for y in below), default=-1)

    heights = [height(x) for x in range(p.n)]
    assert heights == sorted(heights)
    assert p.bottom == 0


def test_monotone_map_rejects_order_violations():
    c3, c2 = chain_poset(3), chain_poset(2)
    with pytest.raises(NotMonotone):
        monotone_map(c3, c2, (1, 0, 0))


def test_monotone_map_composition_and_identity():
    c3, c2 = chain_poset(3), chain_poset(2)
    f = monotone_map(c3, c2, (0, 0, 1))
    g = monotone_map(c2, c3, (0, 2))
    assert (f @ g).table == (0, 1)
    assert (g @ f).table == (0, 0, 2)
    assert (f @ identity_map(c3)) == f
    assert (identity_map(c2) @ f) == f
    assert identity_map(c3).is_identity()
    assert not f.is_identity()


def test_pointwise_leq_on_maps():
    c3 = chain_poset(3)
    low = const_map(c3, c3, 0)
    assert low.pointwise_leq(identity_map(c3))
    assert not identity_map(c3).pointwise_leq(low)


def test_monotone_map_count_between_chains_matches_binomial():
    # Monotone maps m-chain -> n-chain are multisets: C(m + n - 1, m).
    for m, n in [(2, 2), (3, 3), (2, 3), (4, 2)]:
        got = sum(1 for _ in enumerate_monotone_maps(chain_poset(m), chain_poset(n)))
        assert got == comb(m + n - 1, m)


def test_enumerate_monotone_maps_is_lexicographic():
    tables = list(enumerate_monotone_maps(chain_poset(2), chain_poset(2)))
    assert tables == [(0, 0), (0, 1), (1, 1)]


def test_enumerate_monotone_maps_respects_the_cap():
    c4 = chain_poset(4)
    with pytest.raises(SizeCapExceeded):
        list(enumerate_monotone_maps(c4, c4, max_count=3))


def test_lift_adds_a_new_bottom():
    c2 = chain_poset(2)
    l = lift(c2)
    assert l.n == 3
    assert l.bottom == 0
    tops = [x for x in range(l.n) if not any(l.le(y, x) for y in range(l.n) if y != x)]
    assert tops == [0]  # only the new bottom has nothing strictly below


def test_product_order_is_componentwise():
    c2 = chain_poset(2)
    p = product(c2, c2)
    assert p.n == 4
    # exactly one pair of incomparable elements: (0,1) vs (1,0)
    incomparable = sum(
        1
        for i in range(p.n)
        for j in range(i + 1, p.n)
        if not p.le(i, j) and not p.le(j, i)
    )
    assert incomparable == 1


def test_sum_sep_glues_below_a_fresh_bottom():
    c2 = chain_poset(2)
    s = sum_sep(c2, c2)
    assert s.n == 5
    others = [x for x in range(s.n) if x != s.bottom]
    # the two summands stay incomparable except through the new bottom
    maximal = [x for x in others if not any(s.le(x, y) and x != y for y in others)]
    assert len(maximal) == 2


def test_hom_poset_is_ordered_pointwise():
    c2 = chain_poset(2)
    h = hom_poset(c2, c2)
    assert h.n == 3
    for i in range(h.n):
        for j in range(h.n):
            fi = hom_element_map(h, c2, c2, i)
            fj = hom_element_map(h, c2, c2, j)
            assert h.le(i, j) == fi.pointwise_leq(fj)


def test_hom_poset_respects_the_element_cap():
    c6 = chain_poset(6)
    with pytest.raises(SizeCapExceeded):
        hom_poset(c6, c6, Caps(max_elements=10, max_pairs=1000))


def test_to_dot_emits_covering_edges_only():
    c4 = chain_poset(4)
    dot = c4.to_dot(name="X")
    assert dot.startswith("digraph")
    assert dot.count("->") == 3  # chain of 4 has 3 covering edges
    assert dot.count("label") == 4
