import random

import pytest

from ffcomb.decompose import (
    MaxCliqueResult,
    canonical_sum_pair,
    max_ratio_closed_set,
    ratio_decompositions,
    small_subgroup_dilate_check,
    sumset_decomposable_bruteforce,
    sumset_decompositions,
)
from ffcomb.field import PrimeField
from ffcomb.groups import subgroup
from ffcomb.sets import FpSet, diffset, dilate, ratioset, sumset, translate

from conftest import random_fpset


def witness_keys(result):
    return {(b.elements, c.elements) for b, c in result.witnesses}


def test_trivial_ap(f7):
    res = sumset_decompositions(FpSet(f7, [0, 1, 2]), find_all=True)
    assert ((0, 1), (0, 1)) in witness_keys(res)
    assert res.exhaustive


def test_two_element_sets_irreducible(f13):
    for a, b in [(0, 1), (3, 7)]:
        res = sumset_decompositions(FpSet(f13, [a, b]))
        assert not res.decomposable and res.exhaustive
        assert not sumset_decomposable_bruteforce(
            FpSet(f13, [a, b])).decomposable


def test_full_field_decomposable():
    f5 = PrimeField.of(5)
    full = FpSet(f5, range(5))
    assert sumset_decompositions(full).decomposable
    assert sumset_decomposable_bruteforce(full).decomposable


def test_order4_subgroup_witness(f13):
    g4 = subgroup(f13, 4).elements
    assert g4.elements == (1, 5, 8, 12)
    res = sumset_decompositions(g4, find_all=True)
    assert res.exhaustive
    expected = canonical_sum_pair(FpSet(f13, [0, 4]), FpSet(f13, [1, 8]))
    assert expected in {
        (b.elements, c.elements) for b, c in res.witnesses} | set()
    # also agrees with the oracle exactly
    assert witness_keys(res) == witness_keys(sumset_decomposable_bruteforce(g4))


def test_exhaustive_oracle_agreement_f7():
    f7 = PrimeField.of(7)
    for bits in range(1 << 7):
        els = [i for i in range(7) if bits >> i & 1]
        if not 3 <= len(els) <= 6:
            continue
        A = FpSet(f7, els)
        fast = sumset_decompositions(A, find_all=True)
        slow = sumset_decomposable_bruteforce(A)
        assert fast.exhaustive
        assert witness_keys(fast) == witness_keys(slow), els


@pytest.mark.parametrize("seed", range(60))
def test_random_oracle_agreement(seed):
    rng = random.Random(f"dec:{seed}")
    p = rng.choice([7, 11, 13, 17, 23, 31])
    fld = PrimeField.of(p)
    A = random_fpset(rng, fld, rng.randint(3, min(10, p - 1)))
    fast = sumset_decompositions(A, find_all=True)
    slow = sumset_decomposable_bruteforce(A)
    assert fast.exhaustive
    assert witness_keys(fast) == witness_keys(slow)


@pytest.mark.parametrize("seed", range(15))
def test_decomposability_invariance(seed):
    rng = random.Random(f"inv:{seed}")
    p = rng.choice([11, 13, 17])
    fld = PrimeField.of(p)
    A = random_fpset(rng, fld, rng.randint(3, 8))
    status = sumset_decompositions(A).decomposable
    t = rng.randrange(1, p)
    xi = rng.randrange(1, p)
    assert sumset_decompositions(translate(A, t)).decomposable == status
    assert sumset_decompositions(dilate(A, xi)).decomposable == status


def test_witnesses_verify(f13):
    g4 = subgroup(f13, 4).elements
    for b, c in sumset_decompositions(g4, find_all=True).witnesses:
        assert sumset(b, c) == g4
        assert len(b) > 1 and len(c) > 1


def test_budget_degrades_gracefully():
    f31 = PrimeField.of(31)
    A = FpSet(f31, range(0, 24, 2))
    res = sumset_decompositions(A, find_all=True, budget=5)
    assert not res.exhaustive


def test_ratio_decomposition_examples(f7):
    s = FpSet(f7, [2, 4])
    res = ratio_decompositions(s)
    assert res.exhaustive
    keys = {b.elements for b, _ in res.witnesses}
    assert (1, 2) in keys
    for b, _ in res.witnesses:
        assert ratioset(b, b, exclude_diagonal=True) == s


def test_ratio_rejects_asymmetric(f7):
    # {2} is not inversion-symmetric (1/2 = 4 not in S)
    res = ratio_decompositions(FpSet(f7, [2]))
    assert not res.decomposable and res.exhaustive
    # S containing 1 is impossible under the distinct-pair convention
    res = ratio_decompositions(FpSet(f7, [1, 2, 4]))
    assert not res.decomposable


def test_ratio_zero_handling(f7):
    # 0 in S forces 0 in B; B = {0,1,2} gives ratios {0,2,4}
    s = FpSet(f7, [0, 2, 4])
    res = ratio_decompositions(s)
    assert res.decomposable
    for b, _ in res.witnesses:
        assert 0 in b
        assert ratioset(b, b, exclude_diagonal=True) == s


def test_ratio_grid_oracle(f13):
    # every subgroup coset shift xi*G + 1 over p = 13: any witness must
    # re-verify; irreducibility claims are exhaustive
    for d in (2, 3, 4, 6):
        g = subgroup(f13, d)
        for xi in (1, 2):
            s = FpSet(f13, ((xi * x + 1) % 13 for x in g.elements))
            res = ratio_decompositions(s)
            assert res.exhaustive
            for b, _ in res.witnesses:
                assert ratioset(b, b, exclude_diagonal=True) == s


def test_max_ratio_closed_trivial_subgroup(f13):
    one = subgroup(f13, 1)
    # xi = -2: shift set is {-1}, self-inverse, so pairs {a, -a} qualify
    res = max_ratio_closed_set(f13, one, 11)
    assert len(res.best) == 2
    # any other xi with (xi+1)^2 != 1 allows only singletons
    res = max_ratio_closed_set(f13, one, 1)
    assert len(res.best) == 1


def test_max_ratio_closed_verifies(f13):
    sub = subgroup(f13, 6)
    res = max_ratio_closed_set(f13, sub, 1)
    assert isinstance(res, MaxCliqueResult)
    shift = {(g + 1) % 13 for g in sub.elements}
    A = res.best
    for u in A:
        for v in A:
            if u != v:
                assert u * f13.inv(v) % 13 in shift
    assert res.exhaustive


def brute_max_ratio(fld, sub, xi):
    p = fld.p
    shift = {(xi * g + 1) % p for g in sub.elements}
    best = 1
    import itertools

    residues = range(1, p)
    for size in range(2, p):
        found = False
        for combo in itertools.combinations(residues, size):
            ok = all(
                u * fld.inv(v) % p in shift
                for u in combo
                for v in combo
                if u != v
            )
            if ok:
                best = size
                found = True
                break
        if not found:
            break
    return best


@pytest.mark.parametrize("d,xi", [(2, 1), (3, 1), (4, 1), (6, 1), (6, 2),
                                  (4, 3), (12, 1)])
def test_max_ratio_closed_against_bruteforce(f13, d, xi):
    sub = subgroup(f13, d)
    res = max_ratio_closed_set(f13, sub, xi)
    assert len(res.best) == brute_max_ratio(f13, sub, xi)


def test_dilate_check_reference_example(f13):
    sub = subgroup(f13, 6)
    got = small_subgroup_dilate_check(sub)
    assert got is not None
    A, xi = got
    d_set = diffset(A, A)
    assert dilate(d_set.difference(FpSet(f13, [0])), xi) == sub.elements
    # the arbitrary-set mode finds a witness too (e.g. the one formed by
    # dilating a coset)
    got2 = small_subgroup_dilate_check(sub, arbitrary_sets=True)
    assert got2 is not None
    A2, xi2 = got2
    assert dilate(diffset(A2, A2).difference(FpSet(f13, [0])), xi2) \
        == sub.elements


def test_dilate_check_trivial_subgroup(f13):
    # G cup {0} = {0,1} is not symmetric, so no difference set matches
    assert small_subgroup_dilate_check(subgroup(f13, 1)) is None
    assert small_subgroup_dilate_check(subgroup(f13, 1),
                                       arbitrary_sets=True) is None


def test_dilate_check_hand_verified_set(f13):
    # the known explicit instance: {2,5,6} - {2,5,6} = G6 with 0
    sub = subgroup(f13, 6)
    A = FpSet(f13, [2, 5, 6])
    assert diffset(A, A) == sub.elements.union(FpSet(f13, [0]))
