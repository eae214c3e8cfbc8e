import random

import pytest

from ffcomb.field import PrimeField
from ffcomb.sets import FpSet

SMALL_PRIMES = (5, 7, 11, 13, 17, 19, 23, 29, 31)


def random_fpset(rng: random.Random, fld: PrimeField, size: int) -> FpSet:
    return FpSet(fld, rng.sample(range(fld.p), size))


@pytest.fixture
def f13() -> PrimeField:
    return PrimeField.of(13)


@pytest.fixture
def f7() -> PrimeField:
    return PrimeField.of(7)
