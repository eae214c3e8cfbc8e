"""Prime fields F_p: primality, factorization, primitive roots.

All arithmetic is exact over machine integers (Python ints, so no overflow).
Primality is deterministic trial division, which is the right tool for the
supported modulus range (p <= 2**20 by default).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

DEFAULT_MAX_MODULUS = 1 << 20
_WORD_MAX = (1 << 64) - 1

# Dense inverse tables are cached per modulus; above this bound inverses are
# computed on demand with pow().
_INV_TABLE_MAX = 1 << 16


def is_prime(n: int) -> bool:
    """Deterministic primality by trial division (no probabilistic step)."""
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError(f"expected int, got {type(n).__name__}")
    if n > _WORD_MAX:
        raise ValueError(f"n out of supported range (< 2^64): {n}")
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization as a list of (prime, exponent), primes increasing."""
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError(f"expected int, got {type(n).__name__}")
    if n < 1 or n > _WORD_MAX:
        raise ValueError(f"n out of supported range [1, 2^64): {n}")
    out: list[tuple[int, int]] = []
    for q in (2, 3):
        e = 0
        while n % q == 0:
            n //= q
            e += 1
        if e:
            out.append((q, e))
    f = 5
    while f * f <= n:
        for q in (f, f + 2):
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            if e:
                out.append((q, e))
        f += 6
    if n > 1:
        out.append((n, 1))
    return out


def multiplicative_order(a: int, p: int) -> int:
    """Order of a in F_p^*."""
    a %= p
    if a == 0:
        raise ValueError("0 has no multiplicative order")
    order = p - 1
    for q, _ in factorize(p - 1):
        while order % q == 0 and pow(a, order // q, p) == 1:
            order //= q
    return order


def primitive_root(p: int) -> int:
    """Smallest primitive root modulo prime p (deterministic)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return 1
    prime_divs = [q for q, _ in factorize(p - 1)]
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in prime_divs):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


@dataclass(frozen=True)
class PrimeField:
    """F_p together with its canonical (smallest) primitive root."""

    p: int
    g: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")
        if self.p > 2 and multiplicative_order(self.g, self.p) != self.p - 1:
            raise ValueError(f"{self.g} is not a primitive root mod {self.p}")

    @classmethod
    def of(cls, p: int, max_modulus: int = DEFAULT_MAX_MODULUS) -> "PrimeField":
        if p > max_modulus:
            raise ValueError(f"modulus {p} exceeds configured limit {max_modulus}")
        return _field_of(p)

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"0 is not invertible mod {self.p}")
        return pow(a, self.p - 2, self.p)

    def inv_array(self, a: np.ndarray) -> np.ndarray:
        """Elementwise inverses of a nonzero array (values in [1, p))."""
        if self.p <= _INV_TABLE_MAX:
            return _inverse_table(self.p)[a]
        # square-and-multiply on the whole array, log2(p) rounds
        e = self.p - 2
        base = a.astype(np.int64) % self.p
        acc = np.ones_like(base)
        while e:
            if e & 1:
                acc = (acc * base) % self.p
            base = (base * base) % self.p
            e >>= 1
        return acc

    def __repr__(self) -> str:
        return f"PrimeField(p={self.p}, g={self.g})"


@functools.lru_cache(maxsize=None)
def _field_of(p: int) -> PrimeField:
    return PrimeField(p, primitive_root(p))


@functools.lru_cache(maxsize=64)
def _inverse_table(p: int) -> np.ndarray:
    """inv[x] for x in [1, p); inv[0] = 0 as a sentinel."""
    inv = np.zeros(p, dtype=np.int64)
    inv[1] = 1
    for x in range(2, p):
        # p = (p // x) * x + p % x  =>  inv[x] = -(p // x) * inv[p % x]
        inv[x] = (-(p // x) * inv[p % x]) % p
    return inv
