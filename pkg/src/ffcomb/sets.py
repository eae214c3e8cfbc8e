"""Subsets of F_p with arithmetic set operations, representation functions
and additive energies.

FpSet is an immutable bit-vector over [0, p); all operations here are pure
functions, so values can be shared freely between workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import PrimeField


class FpSet:
    """Immutable subset of F_p backed by an integer bitmask."""

    __slots__ = ("field", "_mask", "_elems", "_arr")

    def __init__(self, fld: PrimeField, elements=()):
        mask = 0
        p = fld.p
        for x in elements:
            x = int(x)
            if not 0 <= x < p:
                raise ValueError(f"element {x} outside [0, {p})")
            mask |= 1 << x
        object.__setattr__(self, "field", fld)
        object.__setattr__(self, "_mask", mask)
        object.__setattr__(self, "_elems", None)
        object.__setattr__(self, "_arr", None)

    def __setattr__(self, *a):  # immutability guard
        raise AttributeError("FpSet is immutable")

    @classmethod
    def from_mask(cls, fld: PrimeField, mask: int) -> "FpSet":
        if mask < 0 or mask >> fld.p:
            raise ValueError("mask has bits outside [0, p)")
        s = cls.__new__(cls)
        object.__setattr__(s, "field", fld)
        object.__setattr__(s, "_mask", mask)
        object.__setattr__(s, "_elems", None)
        object.__setattr__(s, "_arr", None)
        return s

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def mask(self) -> int:
        return self._mask

    @property
    def elements(self) -> tuple[int, ...]:
        if self._elems is None:
            m = self._mask
            out = []
            while m:
                low = m & -m
                out.append(low.bit_length() - 1)
                m ^= low
            object.__setattr__(self, "_elems", tuple(out))
        return self._elems

    def to_array(self) -> np.ndarray:
        if self._arr is None:
            object.__setattr__(self, "_arr", np.array(self.elements, dtype=np.int64))
        return self._arr

    def __len__(self) -> int:
        return self._mask.bit_count()

    def __contains__(self, x: int) -> bool:
        return 0 <= x < self.p and (self._mask >> x) & 1 == 1

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FpSet)
            and self.p == other.p
            and self._mask == other._mask
        )

    def __hash__(self) -> int:
        return hash((self.p, self._mask))

    def __repr__(self) -> str:
        return f"FpSet({format_fpset(self)!r})"

    def union(self, other: "FpSet") -> "FpSet":
        _same_field(self, other)
        return FpSet.from_mask(self.field, self._mask | other._mask)

    def intersection(self, other: "FpSet") -> "FpSet":
        _same_field(self, other)
        return FpSet.from_mask(self.field, self._mask & other._mask)

    def difference(self, other: "FpSet") -> "FpSet":
        _same_field(self, other)
        return FpSet.from_mask(self.field, self._mask & ~other._mask)

    def issubset(self, other: "FpSet") -> bool:
        _same_field(self, other)
        return self._mask & ~other._mask == 0


def format_fpset(A: FpSet) -> str:
    """Serialize as modulus-prefixed element list, e.g. '13:{1,3,4,9,10,12}'."""
    return f"{A.p}:{{{','.join(map(str, A.elements))}}}"


def parse_fpset(text: str, fld: PrimeField | None = None) -> FpSet:
    """Inverse of format_fpset."""
    head, _, body = text.strip().partition(":")
    p = int(head)
    if fld is None:
        fld = PrimeField.of(p)
    elif fld.p != p:
        raise ValueError(f"modulus mismatch: {fld.p} vs {p}")
    body = body.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ValueError(f"malformed set literal: {text!r}")
    inner = body[1:-1].strip()
    elems = [int(t) for t in inner.split(",")] if inner else []
    return FpSet(fld, elems)


def _same_field(A: FpSet, B: FpSet) -> None:
    if A.p != B.p:
        raise ValueError(f"mismatched moduli: {A.p} vs {B.p}")


def _rot_mask(mask: int, k: int, p: int) -> int:
    """Bitmask of {x + k mod p : x in mask}."""
    k %= p
    full = (1 << p) - 1
    return ((mask << k) | (mask >> (p - k))) & full if k else mask


def sumset_mask(mask_a: int, mask_b: int, p: int) -> int:
    """Bitmask sumset; iterates over the sparser operand."""
    if mask_a.bit_count() > mask_b.bit_count():
        mask_a, mask_b = mask_b, mask_a
    acc = 0
    m = mask_a
    while m:
        low = m & -m
        acc |= _rot_mask(mask_b, low.bit_length() - 1, p)
        m ^= low
    return acc


def sumset(A: FpSet, B: FpSet) -> FpSet:
    _same_field(A, B)
    return FpSet.from_mask(A.field, sumset_mask(A.mask, B.mask, A.p))


def diffset(A: FpSet, B: FpSet) -> FpSet:
    _same_field(A, B)
    p = A.p
    neg_b = 0
    for b in B:
        neg_b |= 1 << ((-b) % p)
    return FpSet.from_mask(A.field, sumset_mask(A.mask, neg_b, p))


def productset(A: FpSet, B: FpSet) -> FpSet:
    _same_field(A, B)
    p = A.p
    out = set()
    for a in A:
        for b in B:
            out.add(a * b % p)
    return FpSet(A.field, out)


def ratioset(A: FpSet, B: FpSet, exclude_diagonal: bool) -> FpSet:
    """{a / b : a in A, b in B, b != 0}; with exclude_diagonal and A == B the
    pairs a == b are omitted, so 1 appears only if realized by distinct
    elements (which is impossible), matching the distinct-pair convention."""
    _same_field(A, B)
    p = A.p
    nonzero_b = [b for b in B if b != 0]
    if not nonzero_b:
        raise ValueError("B has no nonzero element; every ratio is undefined")
    same = A == B
    out = set()
    for b in nonzero_b:
        ib = A.field.inv(b)
        for a in A:
            if exclude_diagonal and same and a == b:
                continue
            out.add(a * ib % p)
    return FpSet(A.field, out)


def dilate(A: FpSet, xi: int) -> FpSet:
    p = A.p
    xi %= p
    if xi == 0:
        raise ValueError("dilation by 0")
    return FpSet(A.field, (a * xi % p for a in A))


def translate(A: FpSet, x: int) -> FpSet:
    return FpSet.from_mask(A.field, _rot_mask(A.mask, x % A.p, A.p))


def negate(A: FpSet) -> FpSet:
    p = A.p
    return FpSet(A.field, ((-a) % p for a in A))


def inverse_set(A: FpSet, drop_zero: bool = False) -> FpSet:
    if 0 in A and not drop_zero:
        raise ValueError("0 in A has no inverse (pass drop_zero=True to drop it)")
    return FpSet(A.field, (A.field.inv(a) for a in A if a != 0))


@dataclass(frozen=True)
class CountTable:
    """Exact counts indexed by F_p plus a distinguished infinity slot."""

    field: PrimeField
    counts: np.ndarray  # int64, length p
    infinity_count: int

    def __getitem__(self, x: int) -> int:
        return int(self.counts[x % self.field.p])

    @property
    def total_mass(self) -> int:
        return int(self.counts.sum()) + self.infinity_count

    def support(self) -> FpSet:
        return FpSet(self.field, np.flatnonzero(self.counts))

    def sum_of_squares(self) -> int:
        c = self.counts
        return int((c * c).sum())


REP_OPS = ("sum", "diff", "product", "ratio")


def rep_fn(A: FpSet, B: FpSet, op: str) -> CountTable:
    """Representation function r_{A o B}: counts[x] = #{(a,b) : a o b = x}.

    For op='ratio' pairs with b = 0 land in the infinity slot, so the total
    mass is exactly |A||B| for every op.
    """
    _same_field(A, B)
    if op not in REP_OPS:
        raise ValueError(f"unknown op {op!r}")
    p = A.p
    a = A.to_array()
    b = B.to_array()
    inf = 0
    if len(a) == 0 or len(b) == 0:
        return CountTable(A.field, np.zeros(p, dtype=np.int64), 0)
    if op == "sum":
        vals = (a[:, None] + b[None, :]) % p
    elif op == "diff":
        vals = (a[:, None] - b[None, :]) % p
    elif op == "product":
        vals = (a[:, None] * b[None, :]) % p
    else:
        nz = b[b != 0]
        inf = len(a) * (len(b) - len(nz))
        if len(nz) == 0:
            return CountTable(A.field, np.zeros(p, dtype=np.int64), inf)
        vals = (a[:, None] * A.field.inv_array(nz)[None, :]) % p
    counts = np.bincount(vals.ravel(), minlength=p).astype(np.int64)
    return CountTable(A.field, counts, inf)


def additive_energy(A: FpSet) -> int:
    """E+(A): quadruples a1 + a2 = a3 + a4.

    Computed twice (sum and difference representations) and asserted equal,
    per the identity sum_x r^2_{A+A}(x) = sum_x r^2_{A-A}(x).
    """
    es = rep_fn(A, A, "sum").sum_of_squares()
    ed = rep_fn(A, A, "diff").sum_of_squares()
    assert es == ed, f"energy identity violated: {es} != {ed}"
    return es


def energy4(A: FpSet, B: FpSet, C: FpSet, D: FpSet) -> int:
    """E+(A,B,C,D): tuples with a + b = c + d."""
    _same_field(A, B)
    _same_field(A, C)
    _same_field(A, D)
    r1 = rep_fn(A, B, "sum").counts
    r2 = rep_fn(C, D, "sum").counts
    return int((r1 * r2).sum())


def additive_energy_bruteforce(A: FpSet) -> int:
    """Quadruple-enumeration oracle, only for small sets."""
    if len(A) > 12:
        raise ValueError("oracle limited to |A| <= 12")
    p = A.p
    els = A.elements
    return sum(
        1
        for a1 in els
        for a2 in els
        for a3 in els
        for a4 in els
        if (a1 + a2) % p == (a3 + a4) % p
    )
