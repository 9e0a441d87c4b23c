from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_tuple, tuples
from soficperm.convexity import (amplification_base, conjugacy_search, convex_combine, cut,
                                 is_orbit_union, orbit_subsets, pullback, verify_decomposition)
from soficperm.expansion import boundary_sum
from soficperm.perm import GenTuple, Perm, Subset, cycle, direct_sum, tensor_id


def test_orbits_of_direct_sum():
    t = GenTuple([direct_sum(cycle(3), cycle(2))])
    assert [o.members for o in orbit_subsets(t)] == [[0, 1, 2], [3, 4]]


@given(tuples(max_n=9), st.data())
@settings(max_examples=60)
def test_orbit_union_iff_zero_boundary(t, data):
    members = data.draw(st.sets(st.integers(0, t.n - 1)))
    S = Subset(t.n, members)
    assert is_orbit_union(t, S) == (boundary_sum(t, S) == 0)


@given(tuples(min_n=2, max_n=9), st.data())
@settings(max_examples=60)
def test_cut_by_invariant_set_is_exact(t, data):
    orbits = orbit_subsets(t)
    chosen = data.draw(st.lists(st.sampled_from(orbits), min_size=1, unique_by=lambda o: tuple(o.members)))
    S = Subset(t.n, [i for o in chosen for i in o.members])
    res = cut(t, S)
    assert res.exact and res.patched == 0
    assert verify_decomposition(t, S)


def test_cut_reports_defect_off_orbits():
    t = GenTuple([cycle(6)])
    res = cut(t, Subset(6, [0, 1, 2]))
    assert res.defect == Fraction(2, 6)
    assert res.patched == 1
    assert res.restricted.perms[0].to_list() == [1, 2, 0]
    with pytest.raises(ValueError):
        verify_decomposition(t, Subset(6, [0, 1, 2]))


def test_pullback():
    S = Subset(6, [1, 3, 5])
    assert pullback(S, Subset(3, [0, 2])).members == [1, 5]


def test_convex_combine_traces_and_round_trip():
    rng = np.random.default_rng(0)
    x, y = random_tuple(rng, 4, 2), random_tuple(rng, 6, 2)
    comb = convex_combine([x, y], [Fraction(1, 3), Fraction(2, 3)], 3)
    assert comb.tuple.n == 36
    assert comb.block_traces() == [Fraction(1, 3), Fraction(2, 3)]
    assert comb.multiplicity == [3, 4]
    for t, blk, copies in zip([x, y], comb.blocks, comb.copies):
        assert verify_decomposition(comb.tuple, blk)
        inner = cut(comb.tuple, blk).restricted
        assert amplification_base(inner, len(copies)) == t
        for c in copies:
            assert cut(comb.tuple, c).restricted == t


def test_convex_combine_validation():
    t = GenTuple([cycle(2)])
    with pytest.raises(ValueError):
        convex_combine([t, t], [Fraction(1, 2), Fraction(1, 3)], 6)
    with pytest.raises(ValueError):
        convex_combine([t, t], [Fraction(1, 3), Fraction(2, 3)], 2)


def test_amplification_base_rejects():
    assert amplification_base(GenTuple([cycle(6)]), 2) is None
    assert amplification_base(GenTuple([tensor_id(cycle(3), 2)]), 2) == GenTuple([cycle(3)])


def test_conjugacy_search_modes():
    rng = np.random.default_rng(4)
    x = random_tuple(rng, 6, 2)
    q = Perm(rng.permutation(6))
    assert conjugacy_search(x, x.conjugate(q)).value == 0
    big = random_tuple(rng, 20, 2)
    res = conjugacy_search(big, big.conjugate(Perm(rng.permutation(20))), budget=40_000)
    assert res.mode.value == "HEURISTIC"
