from fractions import Fraction

import numpy as np
import pytest

from soficperm.census import in_K
from soficperm.conjugacy import s_distance_exact
from soficperm.expansion import recheck
from soficperm.perm import GenTuple, coxeter, cycle
from soficperm.strange import (TriesExhausted, almost_disjoint_family, almost_disjoint_set,
                               block_sizes, build_strange_candidate, build_T_candidate,
                               coxeter_block_bound, is_block_diagonal, k_evaluate, k_sample,
                               level_index, pick_far_expanders)
from soficperm.words import freeness_defect

F = Fraction


def test_almost_disjoint_examples():
    assert almost_disjoint_set(F(1, 10), 4) == [1, 10, 100, 1000]
    assert almost_disjoint_set(F(1, 4), 4) == [2, 25, 250, 2500]
    with pytest.raises(ValueError):
        almost_disjoint_set(F(1), 3)


def test_almost_disjoint_family_intersections():
    fam = almost_disjoint_family(20, seed=3, length=10, digits=6)
    ts = [t for t, _ in fam]
    assert len(set(ts)) == 20
    for i in range(20):
        for j in range(i + 1, 20):
            (t1, s1), (t2, s2) = fam[i], fam[j]
            if abs(t1 - t2) > F(1, 1000):
                assert not set(s1[3:]) & set(s2[3:])


def test_level_index():
    F_t = [2, 25, 250]
    assert level_index(F_t, 1) is None
    assert level_index(F_t, 30) == 25
    assert level_index(F_t, 250) == 250


def test_block_sizes():
    assert block_sizes(10, F(1, 3)) == [3, 3, 4]
    assert block_sizes(8, F(1, 2)) == [4, 4]
    with pytest.raises(ValueError):
        block_sizes(2, F(1, 3))


@pytest.mark.parametrize("seed", range(5))
def test_T_candidate_structure(seed):
    c = build_T_candidate(60, F(1, 3), seed=seed)
    assert is_block_diagonal(c.p, c.sizes)
    assert coxeter(c.p) <= coxeter_block_bound(60, c.sizes) == F(19, 59)
    assert c.membership.member and coxeter(c.p) < F(2, 3)


def test_T_candidate_exhaustion():
    with pytest.raises(TriesExhausted):
        build_T_candidate(6, F(1, 3), tries=20)


def test_strange_small_uses_exhaustive_K():
    c = build_strange_candidate(6, F(1, 2), seed=0)
    assert c.k_refutation.mode == "exhaustive"
    assert c.k_refutation.verdict == ("MEMBER" if in_K(c.p, F(1, 2)).member else "NON_MEMBER")


def test_strange_sampled_record():
    c = build_strange_candidate(60, F(1, 3), seed=2, k_trials=2000)
    kr = c.k_refutation
    assert kr.mode == "sampled" and kr.trials == 2000
    assert kr.verdict == "NO_REFUTATION"
    assert sum(kr.categories.values()) == 2000
    assert kr.probe_failures == 0
    assert c.accepted


def test_k_evaluate_detects_planted_violation():
    # small delta: b = a itself commutes with a, and with p = a, so K fails
    n = 30
    a = cycle(n)
    B = np.stack([a.images, np.arange(n)])
    violate, probe, fail = k_evaluate(B, a, F(1, 1000))
    assert violate.tolist() == [True, False]
    assert fail.tolist() == [True, False]


def test_k_sample_deterministic():
    c = build_T_candidate(30, F(1, 3), seed=1)
    B1, l1 = k_sample(30, c.p, c.sizes, 500, 9)
    B2, l2 = k_sample(30, c.p, c.sizes, 500, 9)
    assert np.array_equal(B1, B2) and l1 == l2


def test_far_expanders_exact():
    fam = pick_far_expanders(7, 2, F(1, 10), radius=2, seed=0)
    assert fam.complete and len(fam.members) == 2
    a = cycle(7)
    x, y = GenTuple([a, fam.members[0]]), GenTuple([a, fam.members[1]])
    ev = fam.pairwise_evidence[0][1]
    assert ev["mode"] == "EXACT"
    assert ev["value"] == s_distance_exact(x, y).value > F(1, 10)
    for m, cert, fd in zip(fam.members, fam.expander_certs, fam.freeness):
        t = GenTuple([a, m])
        assert recheck(t, cert)
        assert fd == freeness_defect(t, 2) < F(1, 2)


def test_far_expanders_single_member_and_budget():
    fam = pick_far_expanders(9, 1, seed=1)
    assert fam.complete and fam.pairwise_evidence == [[None]]
    short = pick_far_expanders(5, 6, seed=0, budget=5)
    assert not short.complete and short.attempts == 5
