"""Multiplicative subgroups of F_p^* and their cosets."""

from __future__ import annotations

from dataclasses import dataclass

from .field import PrimeField
from .sets import FpSet


@dataclass(frozen=True)
class Subgroup:
    """The unique multiplicative subgroup of a given order d | p-1."""

    field: PrimeField
    order: int
    generator: int
    elements: FpSet

    def __post_init__(self) -> None:
        assert len(self.elements) == self.order

    @property
    def p(self) -> int:
        return self.field.p


def subgroup(fld: PrimeField, d: int) -> Subgroup:
    """Subgroup of order d, i.e. the powers of g^((p-1)/d)."""
    p = fld.p
    if d < 1 or (p - 1) % d != 0:
        raise ValueError(f"{d} does not divide p-1 = {p - 1}")
    gen = pow(fld.g, (p - 1) // d, p)
    els = []
    x = 1
    for _ in range(d):
        els.append(x)
        x = x * gen % p
    assert x == 1
    return Subgroup(fld, d, gen, FpSet(fld, els))


def coset(sub: Subgroup, xi: int) -> FpSet:
    """xi * Gamma."""
    p = sub.p
    xi %= p
    if xi == 0:
        raise ValueError("coset representative must be nonzero")
    return FpSet(sub.field, (xi * g % p for g in sub.elements))


def subgroup_orders(fld: PrimeField) -> list[int]:
    """All divisors of p-1, increasing."""
    n = fld.p - 1
    divs = [d for d in range(1, n + 1) if n % d == 0]
    return divs
