"""Small integer helpers shared across modules: sieving and factorization."""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt

import numpy as np


@lru_cache(maxsize=8)
def _sieve(limit: int) -> np.ndarray:
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime)


def primes_upto(limit: int) -> list[int]:
    """All primes p <= limit, ascending."""
    if limit < 2:
        return []
    return _sieve(int(limit)).tolist()


def prime_pi(x: int) -> int:
    if x < 2:
        return 0
    return int(np.searchsorted(_sieve(max(int(x), 2)), x, side="right"))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_divisors(n: int) -> list[int]:
    return sorted(factorize(n)) if n > 1 else []


def smallest_prime_factors(limit: int) -> list[int]:
    """spf[n] for 0 <= n <= limit (spf[0] = spf[1] = 0)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in primes_upto(isqrt(limit)):
        block = spf[p * p :: p]
        block[block == 0] = p
    spf = spf.tolist()
    for n in range(2, limit + 1):
        if spf[n] == 0:
            spf[n] = n
    return spf


def euler_phi(n: int) -> int:
    out = n
    for p in factorize(n) if n > 1 else ():
        out = out // p * (p - 1)
    return out


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))
