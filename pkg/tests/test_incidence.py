import random

import pytest

from ffcomb.field import PrimeField
from ffcomb.groups import subgroup
from ffcomb.incidence import (
    line_histogram,
    q_fn,
    q_fn_bruteforce,
    quad_count_Q,
    quad_count_detail,
    quad_count_geometric,
    sigma_quantities,
    t_fn,
    triple_count,
    triple_support,
)
from ffcomb.sets import FpSet

from conftest import random_fpset


def brute_t_fn(A, B, C):
    p = A.p
    fld = A.field
    counts = {}
    inf = 0
    for a in A:
        for c in C:
            if c == a:
                inf += len(B)
                continue
            inv = fld.inv(c - a)
            for b in B:
                x = (b - a) * inv % p
                counts[x] = counts.get(x, 0) + 1
    return counts, inf


def brute_triple_geometric(A, B, C):
    """All (pa, pb, pc) from A x A, B x B, C x C on a common line; every point
    pair lies on exactly one line, so collinearity of a triple is the
    condition that pc is on the line through pa, pb (or all three equal)."""
    p = A.p

    def collinear(p1, p2, p3):
        (x1, y1), (x2, y2), (x3, y3) = p1, p2, p3
        return ((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)) % p == 0

    pts_a = [(x, y) for x in A for y in A]
    pts_b = [(x, y) for x in B for y in B]
    pts_c = [(x, y) for x in C for y in C]
    return sum(
        1
        for pa in pts_a
        for pb in pts_b
        for pc in pts_c
        if collinear(pa, pb, pc)
    )


@pytest.mark.parametrize("seed", range(20))
def test_t_fn_matches_bruteforce(seed):
    rng = random.Random(f"tfn:{seed}")
    p = rng.choice([5, 7, 11, 13])
    fld = PrimeField.of(p)
    A = random_fpset(rng, fld, rng.randint(1, 5))
    B = random_fpset(rng, fld, rng.randint(1, 5))
    C = random_fpset(rng, fld, rng.randint(1, 5))
    table = t_fn(A, B, C)
    counts, inf = brute_t_fn(A, B, C)
    assert {x: table[x] for x in range(p) if table[x]} == counts
    assert table.infinity_count == inf
    assert table.total_mass == len(A) * len(B) * len(C)


@pytest.mark.parametrize("seed", range(10))
def test_t_support_symmetry(seed):
    # x is realized by (a,b,c) iff 1-x is realized by (c,b,a), so the support
    # of t_{A,B,A} is closed under x -> 1-x
    rng = random.Random(f"tsym:{seed}")
    p = rng.choice([7, 11, 13, 17])
    fld = PrimeField.of(p)
    A = random_fpset(rng, fld, rng.randint(2, 6))
    B = random_fpset(rng, fld, rng.randint(1, 6))
    supp = triple_support(A, B, A)
    assert FpSet(fld, ((1 - x) % p for x in supp)) == supp


@pytest.mark.parametrize("seed", range(15))
def test_triple_geometric_oracle(seed):
    rng = random.Random(f"tgeom:{seed}")
    p = rng.choice([5, 7, 11])
    fld = PrimeField.of(p)
    A = random_fpset(rng, fld, rng.randint(1, 4))
    B = random_fpset(rng, fld, rng.randint(1, 4))
    C = random_fpset(rng, fld, rng.randint(1, 4))
    assert triple_count(A, B, C).geometric == brute_triple_geometric(A, B, C)


@pytest.mark.parametrize("seed", range(25))
def test_q_fn_matches_bruteforce(seed):
    rng = random.Random(f"qfn:{seed}")
    p = rng.choice([5, 7, 11, 13])
    fld = PrimeField.of(p)
    sets = [random_fpset(rng, fld, rng.randint(1, 5)) for _ in range(4)]
    fast = q_fn(*sets)
    slow = q_fn_bruteforce(*sets)
    assert fast.entries == slow.entries
    assert fast.infinity_mass == slow.infinity_mass


def test_q_marginal_is_t(f13):
    # summing q_{A,B,C,D}(x, y) over y recovers t_{A,B,C}(x) * |D| ... for
    # the finite part, since d ranges freely given (a,b,c)
    rng = random.Random("qmarg")
    A = random_fpset(rng, f13, 4)
    B = random_fpset(rng, f13, 3)
    C = random_fpset(rng, f13, 4)
    D = random_fpset(rng, f13, 3)
    qt = q_fn(A, B, C, D)
    marg = {}
    for (x, _y), v in qt.entries.items():
        marg[x] = marg.get(x, 0) + v
    tt = t_fn(A, B, C)
    assert marg == {x: tt[x] * len(D) for x in range(13) if tt[x]}


@pytest.mark.parametrize("seed", range(30))
def test_quad_count_oracle(seed):
    rng = random.Random(f"qc:{seed}")
    p = rng.choice([5, 7, 11, 13, 17])
    fld = PrimeField.of(p)
    sets = [random_fpset(rng, fld, rng.randint(1, min(8, p - 1)))
            for _ in range(4)]
    assert quad_count_Q(*sets) == quad_count_geometric(*sets)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_quad_count_two_point_set(p):
    fld = PrimeField.of(p)
    s = FpSet(fld, [0, 1])
    assert quad_count_Q(s, s, s, s) == 88
    assert quad_count_geometric(s, s, s, s) == 88


def test_quad_count_singleton_b(f13):
    # with B = D = {0}, collinearity of ((a,a'),(0,0),(c,c'),(0,0)) forces
    # a'c = ac', and for subgroup points the count collapses to |G|^3
    g = subgroup(f13, 4).elements
    zero = FpSet(f13, [0])
    assert quad_count_Q(g, zero, g, zero) == len(g) ** 3


def test_quad_detail_parts(f13):
    rng = random.Random("qd")
    sets = [random_fpset(rng, f13, rng.randint(2, 6)) for _ in range(4)]
    d = quad_count_detail(*sets)
    assert d.total == d.finite_sq_sum + d.degenerate_mass
    assert d.finite_sq_sum == q_fn(*sets).sum_of_squares()
    assert d.total == quad_count_geometric(*sets)


def test_oracle_limit():
    fld = PrimeField.of(101)
    big = FpSet(fld, range(40))
    with pytest.raises(ValueError):
        quad_count_geometric(big, big, big, big)


@pytest.mark.parametrize("seed", range(10))
def test_histogram_identities(seed):
    rng = random.Random(f"hist:{seed}")
    p = rng.choice([5, 7, 11, 13])
    fld = PrimeField.of(p)
    A = random_fpset(rng, fld, rng.randint(1, 6))
    B = random_fpset(rng, fld, rng.randint(1, 6))
    h = line_histogram(A, B)
    # sum over lines of n_A^2 n_B^2 equals Q(A,B,A,B) plus the i4^2 correction
    i4 = len(A.intersection(B))
    assert h.sum_exact == quad_count_Q(A, B, A, B) + p * i4 * i4
    assert h.sum_dyadic_lower <= h.sum_exact
    assert sum(h.buckets.values()) == h.lines_counted
    assert h.lines_counted <= p * p + p


def test_sigma_reference_instance(f13):
    sub = subgroup(f13, 6)
    A = FpSet(f13, [2, 5, 6])
    omega = FpSet(f13, [0])
    rep = sigma_quantities(A, A, sub, 1, 1, omega, omega)
    assert rep.hypotheses_ok
    assert rep.sigma == rep.sigma_prime + rep.sigma_double_prime
    assert rep.sigma_prime <= rep.shifted_ratio_triples
    assert rep.shifted_ratio_triples * sub.order <= rep.subgroup_energy
    assert rep.sigma_double_prime <= 12 * rep.omega * sub.order + 6 * sub.order
    # Cauchy-Schwarz over the finite support
    assert rep.sum_q_finite**2 <= rep.sigma * rep.q_square_sum


def test_sigma_reports_hypothesis_failure(f13):
    sub = subgroup(f13, 2)
    A = FpSet(f13, [1, 2, 3, 7])
    omega = FpSet(f13, [0])
    rep = sigma_quantities(A, A, sub, 1, 1, omega, omega)
    assert not rep.hypotheses_ok
    assert rep.failed_hypotheses
