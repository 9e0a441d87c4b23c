from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import tuples
from soficperm.enumeration import DegreeOverLimit
from soficperm.expansion import (ExpansionCertificate, SamplingExhausted, Verdict, boundary_sum,
                                 check_expander, check_expander_exact, recheck, refute_expander_sampled,
                                 sample_expander_pair, violates)
from soficperm.perm import GenTuple, Perm, Subset, cycle


def brute_expander(t, lam):
    """Plain subset enumeration: the first violating subset by bitmask order, or None."""
    n = t.n
    for mask in range(1, 1 << n):
        S = [i for i in range(n) if mask >> i & 1]
        if 2 * len(S) > n:
            continue
        bnd = sum(len(set(S) ^ {p.images[i] for i in S}) for p in t.perms)
        if lam * len(S) >= bnd:
            return S
    return None


@given(tuples(min_n=1, max_n=9), st.sampled_from([Fraction(1, 10), Fraction(1, 2), Fraction(1), Fraction(2)]))
@settings(max_examples=60, deadline=None)
def test_exact_matches_brute_force(t, lam):
    cert = check_expander_exact(t, lam)
    witness = brute_expander(t, lam)
    if witness is None:
        assert cert.verdict is Verdict.EXACT_PASS
    else:
        assert cert.verdict is Verdict.REFUTED
        assert cert.witness.members == witness
    assert recheck(t, cert)


def test_cycle_threshold_at_forty():
    # boundary of any proper arc of the cycle is 2 points
    for n in (8, 20):
        assert check_expander_exact(GenTuple([cycle(n)]), Fraction(1, 10)).verdict is Verdict.EXACT_PASS
    half = Subset(40, range(20))
    assert boundary_sum(GenTuple([cycle(40)]), half) == Fraction(2, 40)
    assert violates(GenTuple([cycle(40)]), half, Fraction(1, 10))
    assert not violates(GenTuple([cycle(39)]), Subset(39, range(19)), Fraction(1, 10))


def test_exact_limit_enforced():
    with pytest.raises(DegreeOverLimit):
        check_expander_exact(GenTuple([cycle(21)]), Fraction(1, 10))


def test_sampled_refutes_large_cycle():
    t = GenTuple([cycle(80)])
    cert = refute_expander_sampled(t, Fraction(1, 10), trials=16, seed=3)
    assert cert.verdict is Verdict.REFUTED
    assert violates(t, cert.witness, Fraction(1, 10))
    assert recheck(t, cert)


def test_sampled_is_seeded():
    rng = np.random.default_rng(0)
    t = GenTuple([Perm(rng.permutation(50)), Perm(rng.permutation(50))])
    c1 = refute_expander_sampled(t, Fraction(1, 10), trials=8, seed=5)
    c2 = refute_expander_sampled(t, Fraction(1, 10), trials=8, seed=5)
    assert c1.to_json() == c2.to_json()


def test_certificate_json_round_trip():
    t = GenTuple([cycle(6)])
    cert = check_expander_exact(t, Fraction(1, 10))
    again = ExpansionCertificate.from_json(cert.to_json())
    assert again == cert


def test_tampered_certificate_fails_recheck():
    t = GenTuple([cycle(6)])
    cert = check_expander_exact(t, Fraction(1, 10))
    cert.min_ratio = Fraction(1, 3)
    assert not recheck(t, cert)
    other = GenTuple([Perm.identity(6)])
    assert not recheck(other, check_expander_exact(t, Fraction(1, 10)))


def test_sample_pair_and_exhaustion():
    s = sample_expander_pair(10, seed=1)
    assert s.certificate.verdict is Verdict.EXACT_PASS
    assert s.freeness < Fraction(1, 2)
    with pytest.raises(SamplingExhausted):
        sample_expander_pair(4, lam=Fraction(10), max_tries=3)


def test_check_expander_dispatch():
    assert check_expander(GenTuple([cycle(64)]), Fraction(1, 10)).mode == "sampled"
    assert check_expander(GenTuple([cycle(6)]), Fraction(1, 10)).mode == "exact"
