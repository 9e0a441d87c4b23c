from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import comp, mismatch, perms
from soficperm.census import (Satisfied, compare, count_cycle_commuting, count_hamming_ball, count_K,
                              count_L, count_near_commuting, count_s_ball, count_T, in_K, in_L, in_T,
                              k_depth, k_mask, k_mask_direct, l_chain_mask, l_mask, l_mask_direct,
                              rational_power, s_ball, t_mask, _bound)
from soficperm.enumeration import DegreeOverLimit, all_perms, lex_rank
from soficperm.perm import Perm, cycle, power

F = Fraction


def near(n, b, eps):
    """Brute force ``|{c : d_H(bc, cb) < eps}|``."""
    return sum(1 for c in permutations(range(n)) if F(mismatch(comp(b, c), comp(c, b)), n) < eps)


def test_enumeration_order_is_lexicographic():
    P = all_perms(4)
    assert [tuple(r) for r in P] == sorted(permutations(range(4)))
    assert lex_rank([3, 2, 1, 0]) == 23


def test_rational_power_exact_and_irrational():
    assert rational_power(4, F(3, 2)) == 8
    assert rational_power(2, F(1, 2)) != int(rational_power(2, F(1, 2)))


def test_compare_labels():
    assert compare(4, _bound(F(16), "x"), "upper") is Satisfied.STRICT
    assert compare(16, _bound(F(16), "x"), "upper") is Satisfied.EQUAL
    assert compare(17, _bound(F(16), "x"), "upper") is Satisfied.VIOLATED
    assert compare(17, _bound(F(16), "x"), "lower") is Satisfied.STRICT


def test_hamming_ball_pinned():
    assert count_hamming_ball(Perm.identity(4), F(3, 10)).count == 1
    r = count_hamming_ball(Perm.identity(4), F(6, 10))
    assert (r.count, r.bound.exact, r.satisfied) == (7, 16, Satisfied.STRICT)


@given(perms(min_n=2, max_n=6), st.sampled_from([F(1, 10), F(3, 10), F(1, 2), F(6, 10), F(1)]))
@settings(max_examples=40, deadline=None)
def test_hamming_ball_matches_brute_force(x, eps):
    n = x.n
    brute = sum(1 for y in permutations(range(n)) if F(mismatch(x.to_list(), y), n) < eps)
    assert count_hamming_ball(x, eps).count == brute


@pytest.mark.parametrize("n", range(2, 8))
def test_two_over_n_ball_is_singleton(n):
    assert count_hamming_ball(Perm.identity(n), F(2, n)).count == 1


def test_cycle_commuting_pinned():
    r = count_cycle_commuting(4, F(3, 10))
    assert (r.count, r.bound.exact, r.satisfied) == (4, 16, Satisfied.STRICT)


def test_cycle_commuting_formula_example():
    # n=5, eps=1/5: strict threshold admits 0 mismatches, so only the centraliser (5 elements)
    # and the bound is n^(floor(n eps)+1) = 25
    r = count_cycle_commuting(5, F(1, 5))
    assert (r.count, r.bound.exact, r.satisfied) == (5, 25, Satisfied.STRICT)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_cycle_commuting_brute(n):
    a = tuple(cycle(n).to_list())
    for eps in (F(3, 10), F(1, 2)):
        assert count_cycle_commuting(n, eps).count == near(n, a, eps)


@given(perms(min_n=3, max_n=6), st.sampled_from([F(1, 12), F(1, 8), F(1, 3)]))
@settings(max_examples=25, deadline=None)
def test_counts_are_conjugation_invariant(b, delta):
    q = Perm(np.random.default_rng(b.n).permutation(b.n))
    from soficperm.perm import conjugate
    assert count_near_commuting(b, delta).count == count_near_commuting(conjugate(b, q), delta).count
    assert count_hamming_ball(b, delta).count == count_hamming_ball(Perm.identity(b.n), delta).count


def test_near_commuting_flags():
    r = count_near_commuting(cycle(6), F(1, 12))
    assert r.count == 6
    assert r.satisfied is Satisfied.ASYMPTOTIC_REGIME_ONLY
    assert r.comparison in (Satisfied.STRICT, Satisfied.EQUAL, Satisfied.VIOLATED)
    assert r.hypothesis is True
    assert count_near_commuting(cycle(6), F(1, 8)).hypothesis is False


def test_limits():
    with pytest.raises(DegreeOverLimit):
        count_hamming_ball(Perm.identity(10), F(1, 2))
    with pytest.raises(DegreeOverLimit):
        in_K(cycle(8), F(1, 44))


def brute_s_ball(b, lam):
    n = b.n
    a = tuple(cycle(n).to_list())
    bl = tuple(b.to_list())
    members = 0
    for c in permutations(range(n)):
        best = None
        for p in permutations(range(n)):
            pinv = [0] * n
            for i, v in enumerate(p):
                pinv[v] = i
            cost = mismatch(a, comp(comp(p, a), pinv)) + mismatch(bl, comp(comp(p, c), pinv))
            best = cost if best is None else min(best, cost)
        members += F(best, n) < lam
    return members


@pytest.mark.parametrize("b_exp,lam", [(1, F(1, 2)), (2, F(2, 3)), (0, F(1, 2))])
def test_s_ball_brute_n4(b_exp, lam):
    b = power(cycle(4), b_exp)
    assert count_s_ball(b, lam).count == brute_s_ball(b, lam)


def test_s_ball_witnesses_below_lambda():
    for c, p, v in s_ball(power(cycle(4), 2), F(3, 4)):
        assert v < F(3, 4)


# -- L, K, T ------------------------------------------------------------------

def test_in_L_examples():
    assert in_L(Perm.identity(5), F(1, 11)).member
    m = in_L(Perm.identity(5), F(1, 100))
    assert not m.member and m.witness is not None


def test_in_K_examples():
    assert in_K(Perm.identity(5), F(1, 22)).member
    m = in_K(Perm.identity(5), F(1, 100))
    assert not m.member
    b = m.witness.images
    moved = int(np.count_nonzero(b != np.arange(5)))
    assert F(moved, 5) > 22 * max(F(0), F(1, 100))


@pytest.mark.parametrize("n", [4, 5])
def test_K_and_L_fast_paths_match_definition(n):
    for delta in (F(1, 44), F(1, 100), F(1, 30)):
        assert np.array_equal(k_mask(n, delta), k_mask_direct(n, delta))
        assert np.array_equal(l_mask(n, delta), l_mask_direct(n, delta))


@pytest.mark.parametrize("n", [5, 6])
def test_K_contains_L_chain(n):
    delta = F(1, 44)
    assert k_depth(delta) == 4
    chain = l_chain_mask(n, delta)
    assert np.all(k_mask(n, delta)[chain])


def test_L_monotone_in_delta():
    a = l_mask(5, F(1, 100))
    b = l_mask(5, F(1, 30))
    assert np.all(b[a])


def test_k_depth():
    assert k_depth(F(1, 2)) == 0
    assert k_depth(F(1, 4)) == 1
    assert k_depth(F(1, 44)) == 4


def test_in_T_examples():
    assert not in_T(Perm.identity(8), F(1, 3)).member
    m = in_T(Perm.reversal(8), F(1, 3))
    assert not m.member and m.coxeter == 1 and not m.coxeter_ok


@pytest.mark.parametrize("n,delta", [(5, F(1, 2)), (6, F(1, 2)), (6, F(1, 3))])
def test_t_mask_matches_in_T(n, delta):
    mask = t_mask(n, delta)
    P = all_perms(n)
    direct = np.array([in_T(Perm(r), delta).member for r in P])
    assert np.array_equal(mask, direct)


def test_reports_serialise():
    r = count_K(5, F(1, 44))
    d = r.to_json()
    assert d["satisfied"] in {s.value for s in Satisfied}
    assert set(r.csv_row()) == {"n", "parameter", "count", "bound", "verdict", "seconds"}
    assert count_L(5, F(1, 44)).to_json()["prop"] == "L"
    assert count_T(5, F(1, 2)).count >= 0
