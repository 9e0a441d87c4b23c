from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import brute_inversions, perm_pairs, perms
from soficperm.perm import (PartialPerm, Perm, Subset, block, complete, compose, conjugate, coxeter,
                            cycle, direct_sum, fix_trace, hamming, hamming_rows, inversion_count,
                            power, range_projection, relabel_perm, tensor_id)


def test_perm_rejects_non_bijections():
    with pytest.raises(ValueError):
        Perm([0, 0, 1])
    with pytest.raises(ValueError):
        Perm([0, 3, 1])
    with pytest.raises(ValueError):
        Perm([])


def test_compose_convention():
    p, q = Perm([1, 2, 0]), Perm([0, 2, 1])
    # q acts first
    assert compose(p, q).to_list() == [1, 0, 2]
    assert (p * q) == compose(p, q)


def test_cycle_and_power():
    a = cycle(5)
    assert a.to_list() == [1, 2, 3, 4, 0]
    assert power(a, 5).is_identity()
    assert power(a, -1) == a.inverse()


def test_hamming_basic():
    assert hamming(Perm.identity(4), Perm([1, 0, 2, 3])) == Fraction(1, 2)
    assert fix_trace(Perm([1, 0, 2, 3])) == Fraction(1, 2)


@given(perm_pairs(), st.data())
def test_hamming_bi_invariant(pq, data):
    p, q = pq
    r = data.draw(perms(n=p.n))
    assert hamming(compose(r, p), compose(r, q)) == hamming(p, q)
    assert hamming(compose(p, r), compose(q, r)) == hamming(p, q)
    assert hamming(p, q) == 1 - fix_trace(compose(p.inverse(), q))


@given(perms(max_n=40))
def test_inversions_match_brute_force(p):
    assert inversion_count(p.images) == brute_inversions(p.to_list())


@given(st.lists(st.integers(0, 500), min_size=0, max_size=300).map(lambda xs: list(dict.fromkeys(xs))))
@settings(max_examples=200)
def test_inversions_on_distinct_values(xs):
    assert inversion_count(np.array(xs, dtype=np.int64)) == brute_inversions(xs)


@pytest.mark.parametrize("n", [1, 2, 3, 10, 997])
def test_coxeter_examples(n):
    if n == 1:
        assert coxeter(cycle(1)) == 0
        return
    assert coxeter(cycle(n)) == Fraction(2, n)
    assert coxeter(Perm.reversal(n)) == 1
    assert coxeter(Perm.identity(n)) == 0


@given(perms(min_n=2))
def test_coxeter_of_inverse(p):
    assert coxeter(p) == coxeter(p.inverse())
    assert 0 <= coxeter(p) <= 1


def test_tensor_id_layout():
    p = Perm([1, 0])
    assert tensor_id(p, 3).to_list() == [1, 0, 3, 2, 5, 4]
    assert direct_sum(p, Perm([0])).to_list() == [1, 0, 2]


@given(perm_pairs(max_n=8), st.integers(1, 4))
def test_tensor_id_is_homomorphism(pq, r):
    p, q = pq
    assert tensor_id(compose(p, q), r) == compose(tensor_id(p, r), tensor_id(q, r))
    assert hamming(tensor_id(p, r), tensor_id(q, r)) == hamming(p, q)


@given(perm_pairs(max_n=10))
def test_conjugate(pq):
    p, q = pq
    assert conjugate(p, q) == compose(compose(q, p), q.inverse())


@given(perms(min_n=2, max_n=24), st.data())
def test_blocks_partition_and_adjoint(u, data):
    n = data.draw(st.sampled_from([d for d in range(1, u.n + 1) if u.n % d == 0]))
    r = u.n // n
    for i in range(r):
        covered = np.zeros(n, dtype=int)
        for j in range(r):
            q = block(u, i, j, n, r)
            covered += range_projection(q).mask
            # adjoint of the (i, j) piece is the (j, i) piece of u^-1
            assert q.adjoint() == block(u.inverse(), j, i, n, r)
        assert np.all(covered == 1)


def test_complete_fills_ascending():
    q = PartialPerm([2, -1, 0, -1])
    assert complete(q).to_list() == [2, 1, 0, 3]
    assert complete(Perm([1, 0]).as_partial()) == Perm([1, 0])


def test_hamming_rows_counts_definedness():
    x = PartialPerm([0, -1, 2])
    y = PartialPerm([0, 1, -1])
    assert hamming_rows(x, y) == Fraction(2, 3)


def test_partial_compose():
    q = PartialPerm([1, -1, 0])
    x = Perm([2, 0, 1])
    assert compose(q, x).images.tolist() == [0, 1, -1]
    assert compose(x, q).images.tolist() == [0, -1, 2]


def test_subset_ops():
    S = Subset(5, [0, 3])
    assert S.trace() == Fraction(2, 5)
    assert S.complement().members == [1, 2, 4]
    assert (S | Subset(5, [1])).members == [0, 1, 3]
    assert len(S & Subset(5, [3, 4])) == 1
    assert relabel_perm(S).to_list() == [0, 2, 3, 1, 4]
