"""Exact computational toolkit for additive combinatorics over prime fields:
multiplicative subgroups, sumsets and representation functions, collinear
triple/quadruple counting, inequality verifiers, decomposition searches, and
a grid survey runner."""

from .field import PrimeField, is_prime, multiplicative_order, primitive_root
from .groups import Subgroup, coset, subgroup, subgroup_orders
from .sets import (
    FpSet,
    additive_energy,
    diffset,
    dilate,
    energy4,
    format_fpset,
    parse_fpset,
    productset,
    ratioset,
    rep_fn,
    sumset,
    translate,
)

__version__ = "0.1.0"

__all__ = [
    "PrimeField",
    "is_prime",
    "multiplicative_order",
    "primitive_root",
    "Subgroup",
    "coset",
    "subgroup",
    "subgroup_orders",
    "FpSet",
    "additive_energy",
    "diffset",
    "dilate",
    "energy4",
    "format_fpset",
    "parse_fpset",
    "productset",
    "ratioset",
    "rep_fn",
    "sumset",
    "translate",
    "__version__",
]
