"""Complete searches for additive and ratio-set decompositions, the extremal
ratio-closed set search, and the small-subgroup dilate identity.

All searches are exact but budgeted: exceeding the node budget degrades to an
incomplete result (exhaustive=False) instead of raising, so long surveys can
finish. Every witness is re-verified by direct recomputation before emission.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .field import PrimeField
from .groups import Subgroup, subgroup
from .sets import FpSet, format_fpset, ratioset, sumset, sumset_mask

DEFAULT_BUDGET = 10**8


@dataclass(frozen=True)
class DecompositionResult:
    target: FpSet
    witnesses: tuple  # of (FpSet, FpSet) pairs, canonical and sorted
    exhaustive: bool
    nodes_explored: int
    wall_time: float

    @property
    def decomposable(self) -> bool:
        return bool(self.witnesses)

    def to_json(self) -> dict:
        return {
            "target": format_fpset(self.target),
            "p": self.target.p,
            "witnesses": [
                {"B": format_fpset(b), "C": format_fpset(c)}
                for b, c in self.witnesses
            ],
            "exhaustive": self.exhaustive,
            "nodes": self.nodes_explored,
            "ms": round(self.wall_time * 1000, 3),
        }


class _Budget:
    __slots__ = ("left", "nodes")

    def __init__(self, budget: int):
        self.left = budget
        self.nodes = 0

    def spend(self) -> bool:
        """Count a node; False when the budget is gone."""
        self.nodes += 1
        self.left -= 1
        return self.left >= 0


def _mask_elems(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def canonical_sum_pair(B: FpSet, C: FpSet) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Canonical representative of (B, C) under (B, C) -> (B + t, C - t):
    the translate with 0 in C minimizing the sorted element tuples."""
    p = B.p
    best = None
    for t in C.elements:
        bt = tuple(sorted((b + t) % p for b in B))
        ct = tuple(sorted((c - t) % p for c in C))
        cand = (bt, ct)
        if best is None or cand < best:
            best = cand
    assert best is not None
    return best


def _cofactor_mask(A_mask: int, B_mask: int, p: int) -> int:
    """C_max(B) = intersection over b in B of (A - b)."""
    full = (1 << p) - 1
    acc = full
    m = B_mask
    while m:
        low = m & -m
        b = low.bit_length() - 1
        # A - b as a mask is A rotated by -b
        acc &= ((A_mask >> b) | (A_mask << (p - b))) & full if b else A_mask
        if acc == 0:
            return 0
        m ^= low
    return acc


def _min_nonzero_bit(mask: int) -> int:
    m = mask & ~1
    return (m & -m).bit_length() - 1 if m else -1


def cauchy_davenport_reducible_sizes(n: int, p: int) -> bool:
    """True iff some size pair (|B|, |C|) with both >= 2 is compatible with
    min(p, |B|+|C|-1) <= n <= |B||C|."""
    for nb in range(2, n + 1):
        for nc in range(2, n + 1):
            if min(p, nb + nc - 1) <= n <= nb * nc:
                return True
    return False


def _verify_sum_witness(A: FpSet, b_mask: int, c_mask: int) -> None:
    got = sumset_mask(b_mask, c_mask, A.p)
    assert got == A.mask, "witness failed re-verification"


def sumset_decompositions(
    A: FpSet, find_all: bool = False, budget: int = DEFAULT_BUDGET
) -> DecompositionResult:
    """Complete search for A = B + C with |B|, |C| > 1, canonical up to the
    translate symmetry.

    Normalizing 0 in C forces B inside A; for each candidate second element d
    of C the B-side lives in A cap (A - d), and backtracking over those
    memberships is pruned by the closure C_max(B) = cap_{b in B} (A - b): a
    partial B can only extend to a witness if (B cup remaining) + C_max(B)
    still covers A. Accepted witnesses take C = C_max(B), the maximal
    co-factor.
    """
    t0 = time.perf_counter()
    p = A.p
    n = len(A)
    bud = _Budget(budget)
    found: set = set()

    if n >= 3 and cauchy_davenport_reducible_sizes(n, p):
        full = (1 << p) - 1
        diff_mask = 0
        for a in A.elements:  # candidate d values live in (A - A) \ {0}
            diff_mask |= ((A.mask >> a) | (A.mask << (p - a))) & full if a else A.mask
        exhausted = True
        for d in _mask_elems(diff_mask & ~1):
            dom_mask = A.mask & (
                ((A.mask >> d) | (A.mask << (p - d))) & full
            )
            dom = _mask_elems(dom_mask)
            if len(dom) < 2:
                continue
            if not _search_sum(A, d, dom, bud, found, find_all):
                exhausted = False
                break
            if found and not find_all:
                break
        result_exhaustive = exhausted or (bool(found) and not find_all)
    else:
        result_exhaustive = True

    witnesses = _materialize_sum_witnesses(A, found)
    return DecompositionResult(
        A, witnesses, result_exhaustive, bud.nodes, time.perf_counter() - t0
    )


def _search_sum(A: FpSet, d: int, dom: list[int], bud: _Budget,
                found: set, find_all: bool) -> bool:
    """Backtrack over B-memberships within dom; returns False on budget end."""
    p = A.p
    a_mask = A.mask
    n_dom = len(dom)

    def rest_mask(idx: int) -> int:
        m = 0
        for v in dom[idx:]:
            m |= 1 << v
        return m

    rests = [rest_mask(i) for i in range(n_dom + 1)]

    def recurse(idx: int, b_mask: int, b_size: int, c_mask: int) -> bool:
        if not bud.spend():
            return False
        if b_size >= 1 and c_mask.bit_count() < 2:
            return True  # closure too small already; cannot qualify deeper
        if b_size >= 1:
            # coverage prune: even taking every remaining candidate and the
            # current (largest possible) closure, A must still be covered
            if sumset_mask(b_mask | rests[idx], c_mask, p) & a_mask != a_mask:
                return True
        if idx == n_dom:
            if b_size >= 2 and _min_nonzero_bit(c_mask) == d:
                if sumset_mask(b_mask, c_mask, p) == a_mask:
                    _verify_sum_witness(A, b_mask, c_mask)
                    found.add(canonical_sum_pair(
                        FpSet.from_mask(A.field, b_mask),
                        FpSet.from_mask(A.field, c_mask),
                    ))
            return True
        v = dom[idx]
        # include v
        new_c = c_mask & (
            ((a_mask >> v) | (a_mask << (p - v))) & ((1 << p) - 1) if v else a_mask
        )
        if not recurse(idx + 1, b_mask | (1 << v), b_size + 1, new_c):
            return False
        if found and not find_all:
            return True
        # exclude v
        return recurse(idx + 1, b_mask, b_size, c_mask)

    return recurse(0, 0, 0, (1 << p) - 1)


def _materialize_sum_witnesses(A: FpSet, found: set) -> tuple:
    out = []
    for bt, ct in sorted(found):
        b = FpSet(A.field, bt)
        c = FpSet(A.field, ct)
        assert sumset(b, c) == A
        out.append((b, c))
    return tuple(out)


def sumset_decomposable_bruteforce(A: FpSet) -> DecompositionResult:
    """Exhaustive subset-pair oracle: every B inside A (after normalizing
    0 in C) with its maximal co-factor. Guaranteed exhaustive; |A| <= 12."""
    if len(A) > 12:
        raise ValueError("oracle limited to |A| <= 12")
    t0 = time.perf_counter()
    p = A.p
    els = A.elements
    n = len(els)
    found: set = set()
    nodes = 0
    for bits in range(1, 1 << n):
        if bits.bit_count() < 2:
            continue
        nodes += 1
        b_mask = 0
        for i in range(n):
            if bits >> i & 1:
                b_mask |= 1 << els[i]
        c_mask = _cofactor_mask(A.mask, b_mask, p)
        if c_mask.bit_count() < 2:
            continue
        if sumset_mask(b_mask, c_mask, p) == A.mask:
            found.add(canonical_sum_pair(
                FpSet.from_mask(A.field, b_mask),
                FpSet.from_mask(A.field, c_mask),
            ))
    witnesses = _materialize_sum_witnesses(A, found)
    return DecompositionResult(A, witnesses, True, nodes, time.perf_counter() - t0)


def canonical_ratio_set(B: FpSet) -> tuple[int, ...]:
    """Canonical representative of B under dilation: the lexicographically
    smallest sorted tuple among b^{-1} B over nonzero b in B."""
    p = B.p
    fld = B.field
    best = None
    for b in B:
        if b == 0:
            continue
        ib = fld.inv(b)
        cand = tuple(sorted(x * ib % p for x in B))
        if best is None or cand < best:
            best = cand
    assert best is not None
    return best


def _ratios_of(chosen: list[int], p: int, fld) -> set:
    out = set()
    for i, u in enumerate(chosen):
        for j, v in enumerate(chosen):
            if i != j and v != 0:
                out.add(u * fld.inv(v) % p)
    return out


def ratio_decompositions(S: FpSet, budget: int = DEFAULT_BUDGET) -> DecompositionResult:
    """Complete search for B with B/B = S under the distinct-pair convention
    and |B \\ {0}| > 1, canonical up to dilation (1 in B).

    Quick rejections: S empty, S containing 1 (distinct pairs never realize
    1), or S not inversion-symmetric. Candidates for B \\ {0} form a clique
    in the compatibility graph u ~ v iff u/v in S, with the exact-cover side
    condition that every element of S is realized.
    """
    t0 = time.perf_counter()
    p = S.p
    fld = S.field
    bud = _Budget(budget)
    found: set = set()

    s_nonzero = [x for x in S if x != 0]
    symmetric = all(fld.inv(x) in S for x in s_nonzero)
    want_zero = 0 in S
    viable = len(S) > 0 and symmetric and 1 not in S

    exhaustive = True
    if viable:
        s_set = set(s_nonzero)
        cands = sorted(s_set)  # everything compatible with the normalized 1

        def recurse(idx: int, chosen: list[int], realized: set) -> bool:
            if not bud.spend():
                return False
            if realized == s_set and len(chosen) >= 2:
                b_els = chosen + ([0] if want_zero else [])
                b = FpSet(fld, b_els)
                assert ratioset(b, b, exclude_diagonal=True) == S
                found.add(canonical_ratio_set(b))
            if idx == len(cands):
                return True
            # cover prune: remaining candidates must be able to supply the
            # still-missing ratios
            pool = chosen + cands[idx:]
            possible = _ratios_of(pool, p, fld)
            if not s_set <= possible:
                return True
            v = cands[idx]
            if all(u * fld.inv(v) % p in s_set and v * fld.inv(u) % p in s_set
                   for u in chosen):
                new_real = realized | {u * fld.inv(v) % p for u in chosen}
                new_real |= {v * fld.inv(u) % p for u in chosen}
                if not recurse(idx + 1, chosen + [v], new_real):
                    return False
            return recurse(idx + 1, chosen, realized)

        exhaustive = recurse(0, [1], set())

    witnesses = []
    for bt in sorted(found):
        b = FpSet(fld, bt)
        witnesses.append((b, S))
    return DecompositionResult(
        S, tuple(witnesses), exhaustive, bud.nodes, time.perf_counter() - t0
    )


@dataclass(frozen=True)
class MaxCliqueResult:
    best: FpSet
    exhaustive: bool
    nodes_explored: int


def max_ratio_closed_set(
    fld: PrimeField, sub: Subgroup, xi: int, budget: int = DEFAULT_BUDGET
) -> MaxCliqueResult:
    """Maximum-cardinality A in F_p \\ {0} with a/a' in xi*Gamma + 1 for all
    ordered distinct pairs; exact branch-and-bound maximum clique on the
    dilation-invariant compatibility graph, ties broken lexicographically."""
    p = fld.p
    xi %= p
    if xi == 0:
        raise ValueError("xi must be nonzero")
    shift = {(xi * g + 1) % p for g in sub.elements}
    conn = sorted(r for r in shift if r != 0 and fld.inv(r) in shift)
    bud = _Budget(budget)
    if not conn:
        return MaxCliqueResult(FpSet(fld, [1]), True, bud.nodes)

    # The graph is a Cayley graph on F_p^* (adjacency depends on u/v only),
    # so some maximum clique contains 1; its size is 1 + the clique number
    # of the subgraph induced on the connection set.
    idx = {r: i for i, r in enumerate(conn)}
    nv = len(conn)
    adj = [0] * nv
    conn_set = set(conn)
    for i, u in enumerate(conn):
        for j in range(i + 1, nv):
            v = conn[j]
            if u * fld.inv(v) % p in conn_set:
                adj[i] |= 1 << j
                adj[j] |= 1 << i

    size, exhaustive = _max_clique_size(nv, adj, bud)
    target = size + 1  # plus the vertex 1

    # lexicographically smallest witness of the known maximum size
    chosen: list[int] = []
    cand_residues = list(range(1, p))
    cur_allowed = set(cand_residues)
    for v in range(1, p):
        if v not in cur_allowed:
            continue
        rest = [u for u in cur_allowed if u != v and _compat(u, v, conn_set, fld, p)]
        if 1 + len(chosen) + _clique_upper(v, rest, conn_set, fld, p,
                                           target - len(chosen) - 1, bud) >= target:
            chosen.append(v)
            cur_allowed = set(rest)
            if len(chosen) == target:
                break
    a = FpSet(fld, chosen)
    # re-verify
    for u in chosen:
        for v in chosen:
            if u != v:
                assert u * fld.inv(v) % p in shift
    return MaxCliqueResult(a, exhaustive, bud.nodes)


def _compat(u: int, v: int, conn_set: set, fld, p: int) -> bool:
    return u * fld.inv(v) % p in conn_set and v * fld.inv(u) % p in conn_set


def _clique_upper(_v: int, residues: list[int], conn_set: set, fld, p: int,
                  needed: int, bud: _Budget) -> int:
    """Exact maximum clique size within residues, early-exiting at needed."""
    if needed <= 0:
        return 0
    nv = len(residues)
    if nv == 0:
        return 0
    adj = [0] * nv
    for i, u in enumerate(residues):
        for j in range(i + 1, nv):
            if _compat(u, residues[j], conn_set, fld, p):
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    size, _ = _max_clique_size(nv, adj, bud, stop_at=needed)
    return size


def _max_clique_size(nv: int, adj: list[int], bud: _Budget,
                     stop_at: int | None = None) -> tuple[int, bool]:
    """Tomita-style branch and bound with greedy coloring; bitset sets."""
    best = 0
    exhausted = True

    def color_sort(cand: int) -> list[tuple[int, int]]:
        order = []
        color = 0
        rest = cand
        while rest:
            color += 1
            avail = rest
            while avail:
                low = avail & -avail
                v = low.bit_length() - 1
                order.append((v, color))
                rest ^= low
                avail &= ~(adj[v] | low)
        return order

    def expand(cand: int, depth: int) -> bool:
        nonlocal best, exhausted
        if not bud.spend():
            exhausted = False
            return False
        order = color_sort(cand)
        for v, c in reversed(order):
            if stop_at is not None and best >= stop_at:
                return True
            if depth + c <= best:
                return True
            new_cand = cand & adj[v]
            if depth + 1 > best:
                best = depth + 1
            if new_cand:
                if not expand(new_cand, depth + 1):
                    return False
            cand &= ~(1 << v)
        return True

    full = (1 << nv) - 1
    ok = expand(full, 0) if nv else True
    return best, exhausted and ok


def small_subgroup_dilate_check(
    sub: Subgroup, arbitrary_sets: bool = False
) -> tuple[FpSet, int] | None:
    """Search for A with |A| in {2, 3} and xi != 0 such that
    xi (A - A) = Gamma cup {0}.

    Default mode restricts A to cosets of subgroups of order 2 or 3;
    arbitrary_sets=True scans all translate-normalized 2- and 3-element sets.
    Returns the first witness in deterministic scan order, or None.
    """
    fld = sub.field
    p = fld.p
    gamma = set(sub.elements.elements)

    def test(a_els: tuple[int, ...]) -> tuple[FpSet, int] | None:
        d_set = {(x - y) % p for x in a_els for y in a_els if x != y}
        if len(d_set) != sub.order:
            return None
        d0 = min(d_set)
        i0 = fld.inv(d0)
        if {i0 * v % p for v in d_set} == gamma:
            xi = 1 if d_set == gamma else i0
            if {xi * v % p for v in d_set} == gamma:
                return FpSet(fld, a_els), xi
        return None

    if arbitrary_sets:
        for u in range(1, p):
            w = test((0, u))
            if w:
                return w
        for u in range(1, p):
            for v in range(u + 1, p):
                w = test((0, u, v))
                if w:
                    return w
        return None

    for order in (2, 3):
        if (p - 1) % order != 0:
            continue
        h = subgroup(fld, order)
        base = h.elements.elements
        for eta in range(1, p):
            w = test(tuple(sorted(eta * x % p for x in base)))
            if w:
                return w
    return None
