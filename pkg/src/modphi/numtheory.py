"""Small arithmetic helpers: Moebius, Euler totient and a prime sieve."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["mobius", "totient", "smallest_prime_factor_sieve", "primes_up_to", "divisors"]

#: largest sieve bound accepted by :func:`smallest_prime_factor_sieve`
SIEVE_LIMIT = 10**7


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@lru_cache(maxsize=None)
def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius is defined for n >= 1")
    f = _factor(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


@lru_cache(maxsize=None)
def totient(n: int) -> int:
    if n < 1:
        raise ValueError("totient is defined for n >= 1")
    result = n
    for p in _factor(n):
        result = result // p * (p - 1)
    return result


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


@lru_cache(maxsize=4)
def smallest_prime_factor_sieve(limit: int) -> np.ndarray:
    """Array ``spf`` with ``spf[k]`` the least prime factor of ``k`` (``spf[0]=spf[1]=0``)."""
    if limit < 1 or limit > SIEVE_LIMIT:
        raise ValueError(f"sieve limit must lie in [1, {SIEVE_LIMIT}]")
    spf = np.zeros(limit + 1, dtype=np.uint32)
    for p in range(2, int(limit**0.5) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    rest = rest[rest >= 2]
    spf[rest] = rest
    spf.setflags(write=False)
    return spf


def primes_up_to(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    spf = smallest_prime_factor_sieve(limit)
    ks = np.arange(limit + 1)
    return ks[(spf == ks) & (ks >= 2)].astype(np.int64)
