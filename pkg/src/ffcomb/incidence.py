"""Collinear triple/quadruple counting over F_p^2 for product point sets.

Counts are organized around the slope-ratio functions t (one coordinate) and
q (two coordinates): squares of their fibers give the collinear triple and
quadruple totals for tuples whose base pair differs in both coordinates.
The remaining degenerate mass (vertical lines, horizontal lines, coincident
base points) is tracked in closed form and added separately, so that the
grand total agrees exactly with the line-enumeration oracle.

Everything here is exact integer arithmetic; no floats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import PrimeField
from .groups import Subgroup, coset
from .sets import CountTable, FpSet, additive_energy, _same_field

# Dense p*p scratch tables are refused above this modulus to bound memory.
DENSE_Q_MAX_P = 2048

# quad_count_geometric refuses sets with |X|^2 above this (per set).
DEFAULT_ORACLE_LIMIT = 256

_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class TripleCounts:
    """Collinear triple totals: 'finite' is sum_x t^2(x) over finite slopes
    (the headline quantity T); 'geometric' additionally includes the
    degenerate mass and equals the line-enumeration count."""

    finite: int
    geometric: int


@dataclass(frozen=True)
class QuadCounts:
    finite_sq_sum: int  # sum over finite (x,y) of q^2
    degenerate_mass: int  # same-abscissa / same-ordinate / coincident-base tuples
    total: int


@dataclass(frozen=True)
class QTable:
    """Sparse exact counts of the two-ratio fiber function q_{A,B,C,D}."""

    field: PrimeField
    entries: dict  # (x, y) -> positive count
    infinity_mass: int  # tuples with c = a

    @property
    def total_mass(self) -> int:
        return sum(self.entries.values()) + self.infinity_mass

    def support_size(self) -> int:
        return len(self.entries)

    def sum_of_squares(self) -> int:
        return sum(v * v for v in self.entries.values())

    def to_json(self) -> dict:
        return {
            "p": self.field.p,
            "entries": [[x, y, v] for (x, y), v in sorted(self.entries.items())],
            "infinity_mass": self.infinity_mass,
        }


def t_fn(A: FpSet, B: FpSet, C: FpSet) -> CountTable:
    """t_{A,B,C}(x) = #{(a,b,c) : c != a, b - a = x (c - a)}.

    Triples with c = a sit in the infinity slot; total mass is |A||B||C|.
    """
    _same_field(A, B)
    _same_field(A, C)
    p = A.p
    fld = A.field
    counts = np.zeros(p, dtype=np.int64)
    b = B.to_array()
    c = C.to_array()
    if len(A) and len(B) and len(C):
        for a0 in A.elements:
            dc = (c - a0) % p
            dc = dc[dc != 0]
            if len(dc) == 0:
                continue
            inv = fld.inv_array(dc)
            vals = (((b - a0) % p)[:, None] * inv[None, :]) % p
            counts += np.bincount(vals.ravel(), minlength=p)
    infinity = len(A.intersection(C)) * len(B)
    table = CountTable(fld, counts, infinity)
    assert table.total_mass == len(A) * len(B) * len(C)
    return table


def triple_support(A: FpSet, B: FpSet, C: FpSet) -> FpSet:
    """T[A,B,C]: the set of realized finite ratios."""
    return t_fn(A, B, C).support()


def _triple_geometric_total(finite_sq: int, X: FpSet, Y: FpSet, Z: FpSet) -> int:
    xyz = len(X.intersection(Y).intersection(Z))
    xz = len(X.intersection(Z))
    vertical_and_horizontal = 2 * xyz * (len(X) * len(Z) - xz) * len(Y)
    coincident_base = xz * xz * len(Y) * len(Y)
    return finite_sq + vertical_and_horizontal + coincident_base


def triple_count(A: FpSet, B: FpSet, C: FpSet) -> TripleCounts:
    """T(A,B,C) = sum_x t^2(x) plus the geometric grand total."""
    finite_sq = t_fn(A, B, C).sum_of_squares()
    return TripleCounts(finite_sq, _triple_geometric_total(finite_sq, A, B, C))


def _q_accumulate(A: FpSet, B: FpSet, C: FpSet, D: FpSet):
    """Yield (keys_chunk,) of packed x*p + y values over tuples with c != a."""
    p = A.p
    fld = A.field
    b = B.to_array()
    c = C.to_array()
    d = D.to_array()
    for a0 in A.elements:
        dc = (c - a0) % p
        dc = dc[dc != 0]
        if len(dc) == 0:
            continue
        inv = fld.inv_array(dc)
        xs = (((b - a0) % p)[:, None] * inv[None, :]) % p  # (|B|, nc)
        ys = (((d - a0) % p)[:, None] * inv[None, :]) % p  # (|D|, nc)
        yield (xs[:, None, :] * p + ys[None, :, :]).ravel()


def q_fn(A: FpSet, B: FpSet, C: FpSet, D: FpSet) -> QTable:
    """q_{A,B,C,D}(x, y) = #{(a,b,c,d) : c != a, b-a = x(c-a), d-a = y(c-a)}."""
    _same_field(A, B)
    _same_field(A, C)
    _same_field(A, D)
    p = A.p
    entries: dict = {}
    if p <= DENSE_Q_MAX_P:
        dense = np.zeros(p * p, dtype=np.int64)
        for keys in _q_accumulate(A, B, C, D):
            dense += np.bincount(keys, minlength=p * p)
        nz = np.flatnonzero(dense)
        entries = {(int(k) // p, int(k) % p): int(dense[k]) for k in nz}
    else:
        from collections import Counter

        acc: Counter = Counter()
        for keys in _q_accumulate(A, B, C, D):
            uniq, cnt = np.unique(keys, return_counts=True)
            for k, v in zip(uniq.tolist(), cnt.tolist()):
                acc[k] += v
        entries = {(k // p, k % p): v for k, v in acc.items()}
    infinity = len(A.intersection(C)) * len(B) * len(D)
    table = QTable(A.field, entries, infinity)
    assert table.total_mass == len(A) * len(B) * len(C) * len(D)
    return table


def q_fn_bruteforce(A: FpSet, B: FpSet, C: FpSet, D: FpSet) -> QTable:
    """Naive 4-fold loop; the test oracle for q_fn."""
    if len(A) * len(B) * len(C) * len(D) > 10**5:
        raise ValueError("oracle limited to |A||B||C||D| <= 1e5")
    p = A.p
    fld = A.field
    entries: dict = {}
    infinity = 0
    for a in A:
        for c in C:
            if c == a:
                infinity += len(B) * len(D)
                continue
            inv = fld.inv(c - a)
            for b in B:
                x = (b - a) * inv % p
                for d in D:
                    y = (d - a) * inv % p
                    entries[(x, y)] = entries.get((x, y), 0) + 1
    return QTable(fld, entries, infinity)


def _mass_sq_sum(dense_counts: np.ndarray, mass: int) -> int:
    """Sum of squared counts, falling back to Python ints if int64 could
    overflow (overflow safety is asserted, not assumed)."""
    if mass * mass < _INT64_SAFE:
        return int((dense_counts * dense_counts).sum())
    return sum(int(v) ** 2 for v in dense_counts[dense_counts > 0])


def quad_count_detail(A: FpSet, B: FpSet, C: FpSet, D: FpSet) -> QuadCounts:
    """Collinear quadruples: sum of q^2 over finite ratio pairs, plus the
    exactly-bookkept degenerate mass (vertical/horizontal lines via the
    intersection counts, coincident base points via a triple count)."""
    _same_field(A, B)
    _same_field(A, C)
    _same_field(A, D)
    p = A.p
    mass = len(A) * len(B) * len(C) * len(D)
    if p <= DENSE_Q_MAX_P:
        dense = np.zeros(p * p, dtype=np.int64)
        for keys in _q_accumulate(A, B, C, D):
            dense += np.bincount(keys, minlength=p * p)
        finite_sq = _mass_sq_sum(dense, mass)
    else:
        finite_sq = q_fn(A, B, C, D).sum_of_squares()
    i4 = len(A.intersection(B).intersection(C).intersection(D))
    ac = A.intersection(C)
    cross = 2 * i4 * (len(A) * len(C) - len(ac)) * len(B) * len(D)
    base_triples = triple_count(ac, B, D).geometric
    total = finite_sq + cross + base_triples
    return QuadCounts(finite_sq, cross + base_triples, total)


def quad_count_Q(A: FpSet, B: FpSet, C: FpSet, D: FpSet) -> int:
    """Q(A,B,C,D): ordered quadruples of points from A x A, ..., D x D on a
    common line of F_p^2 (vertical lines included)."""
    return quad_count_detail(A, B, C, D).total


def _line_counts_for_slope(X: FpSet, m: int) -> np.ndarray:
    """n_{X x X}(line y = m x + b) for every intercept b, as a length-p array."""
    p = X.p
    x = X.to_array()
    return np.bincount(((x[:, None] - m * x[None, :]) % p).ravel(), minlength=p)


def quad_count_geometric(
    A: FpSet, B: FpSet, C: FpSet, D: FpSet, oracle_limit: int = DEFAULT_ORACLE_LIMIT
) -> int:
    """Independent oracle: enumerate all p^2 + p lines and apply
    inclusion-exclusion for all-four-points-equal quadruples (the only
    quadruples lying on more than one line)."""
    _same_field(A, B)
    _same_field(A, C)
    _same_field(A, D)
    for X in (A, B, C, D):
        if len(X) ** 2 > oracle_limit:
            raise ValueError(
                f"oracle limit exceeded: |X|^2 = {len(X) ** 2} > {oracle_limit}"
            )
    p = A.p
    total = 0
    for m in range(p):
        prod = (
            _line_counts_for_slope(A, m)
            * _line_counts_for_slope(B, m)
            * _line_counts_for_slope(C, m)
            * _line_counts_for_slope(D, m)
        )
        total += int(prod.sum())
    # vertical lines x = const
    for t in range(p):
        na = len(A) if t in A else 0
        nb = len(B) if t in B else 0
        nc = len(C) if t in C else 0
        nd = len(D) if t in D else 0
        total += na * nb * nc * nd
    i4 = len(A.intersection(B).intersection(C).intersection(D))
    return total - p * i4 * i4


@dataclass(frozen=True)
class LineHistogram:
    """Dyadic histogram of lines by |l cap (A x A)| and |l cap (B x B)|.

    Only lines incident to both product sets are bucketed. sum_exact is
    sum_l n_A(l)^2 n_B(l)^2; sum_dyadic_lower replaces each factor by the
    squared lower dyadic endpoint.
    """

    buckets: dict  # (i, j) -> number of lines
    sum_exact: int
    sum_dyadic_lower: int
    lines_counted: int

    def to_json(self) -> dict:
        return {
            "buckets": [[i, j, v] for (i, j), v in sorted(self.buckets.items())],
            "sum_exact": self.sum_exact,
            "sum_dyadic_lower": self.sum_dyadic_lower,
            "lines_counted": self.lines_counted,
        }


def line_histogram(A: FpSet, B: FpSet) -> LineHistogram:
    if len(A) == 0 or len(B) == 0:
        raise ValueError("line_histogram requires nonempty sets")
    p = A.p
    _same_field(A, B)
    buckets: dict = {}
    sum_exact = 0
    sum_lower = 0
    lines = 0
    for m in range(p):
        na = _line_counts_for_slope(A, m)
        nb = _line_counts_for_slope(B, m)
        both = (na > 0) & (nb > 0)
        for bi in np.flatnonzero(both):
            ka, kb = int(na[bi]), int(nb[bi])
            i, j = ka.bit_length() - 1, kb.bit_length() - 1
            buckets[(i, j)] = buckets.get((i, j), 0) + 1
            sum_exact += ka * ka * kb * kb
            sum_lower += (1 << (2 * i)) * (1 << (2 * j))
            lines += 1
    shared = A.intersection(B)
    if len(shared):
        ka, kb = len(A), len(B)
        i, j = ka.bit_length() - 1, kb.bit_length() - 1
        buckets[(i, j)] = buckets.get((i, j), 0) + len(shared)
        sum_exact += len(shared) * ka * ka * kb * kb
        sum_lower += len(shared) * (1 << (2 * i)) * (1 << (2 * j))
        lines += len(shared)
    return LineHistogram(buckets, sum_exact, sum_lower, lines)


@dataclass(frozen=True)
class SigmaReport:
    """Support-size split of q_{A,B,A,B} together with the exact quantities
    needed to verify the supporting inequality chain."""

    hypotheses_ok: bool
    failed_hypotheses: tuple[str, ...]
    sigma: int
    sigma_prime: int
    sigma_double_prime: int
    shifted_ratio_triples: int  # #{(g1,g2,g): 1 - eta1 g1 = eta2 g (1 - eta1 g2)}
    subgroup_energy: int
    infinity_mass: int
    sum_q_finite: int
    q_square_sum: int
    omega: int

    def to_json(self) -> dict:
        d = self.__dict__.copy()
        d["failed_hypotheses"] = list(self.failed_hypotheses)
        return d


def sigma_quantities(
    A: FpSet,
    B: FpSet,
    sub: Subgroup,
    eta1: int,
    eta2: int,
    Omega1: FpSet,
    Omega2: FpSet,
) -> SigmaReport:
    """sigma / sigma' / sigma'' for q_{A,B,A,B} under coset-inclusion
    hypotheses on the ratio supports.

    A hypothesis violation is reported, not raised; the split is computed
    regardless so callers can inspect the instance.
    """
    p = A.p
    fld = A.field
    if eta1 % p == 0 or eta2 % p == 0:
        raise ValueError("eta shifts must be nonzero")
    gamma = sub.elements

    failed = []
    if not triple_support(B, A, A).issubset(coset(sub, eta1).union(Omega1)):
        failed.append("T[B,A,A] not contained in eta1*Gamma cup Omega1")
    if not triple_support(A, B, B).issubset(coset(sub, eta2).union(Omega2)):
        failed.append("T[A,B,B] not contained in eta2*Gamma cup Omega2")

    qt = q_fn(A, B, A, B)
    sigma = qt.support_size()

    bad = {0}
    for w in Omega2:
        bad.add(w)
    for w in Omega1:
        if (1 - w) % p != 0:
            bad.add(fld.inv(1 - w))

    sigma_prime = 0
    for (x, y), _ in qt.entries.items():
        if x in bad or y in bad:
            continue
        if x * fld.inv(y) % p in bad:
            continue
        sigma_prime += 1

    # exact count of (g1, g2, g) with 1 - eta1 g1 = eta2 g (1 - eta1 g2)
    gset = set(gamma.elements)
    triples = 0
    for g2 in gamma:
        t = eta2 * (1 - eta1 * g2) % p
        if t == 0:
            # equation degenerates to 1 - eta1 g1 = 0 with g free
            g1 = fld.inv(eta1)
            if g1 in gset:
                triples += len(gamma)
            continue
        it = fld.inv(t)
        for g1 in gamma:
            if (1 - eta1 * g1) * it % p in gset:
                triples += 1

    mass = len(A) * len(B) ** 2  # tuples of q_{A,B,A,B} with c = a
    return SigmaReport(
        hypotheses_ok=not failed,
        failed_hypotheses=tuple(failed),
        sigma=sigma,
        sigma_prime=sigma_prime,
        sigma_double_prime=sigma - sigma_prime,
        shifted_ratio_triples=triples,
        subgroup_energy=additive_energy(gamma),
        infinity_mass=mass,
        sum_q_finite=len(A) ** 2 * len(B) ** 2 - mass,
        q_square_sum=qt.sum_of_squares(),
        omega=max(len(Omega1), len(Omega2)),
    )
