"""Distinct prime divisors of a uniform integer in ``[1, n]``.

The laws here are exact counts over ``1..n`` obtained from a sieve, not
samples.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..lattice_measure import SignedLatticeMeasure
from ..numtheory import SIEVE_LIMIT, primes_up_to
from ..symfun import FormalAlphabet, alphabet_sum, prime_zeta_alphabet, zeta_alphabet
from .functional_graphs import EULER_GAMMA

__all__ = [
    "omega_counts",
    "prime_omega_law",
    "prime_omega_params",
    "residue_classes",
    "prime_residue_law",
]

RESIDUE_MODULI = (3, 4, 6)


def omega_counts(n: int) -> np.ndarray:
    """``omega(k)`` for ``k = 0..n`` (``omega(0)`` is set to 0)."""
    if not 1 <= n <= SIEVE_LIMIT:
        raise ValueError(f"n must lie in [1, {SIEVE_LIMIT}]")
    omega = np.zeros(n + 1, dtype=np.int8)
    for p in primes_up_to(n):
        omega[p::p] += 1
    return omega


@lru_cache(maxsize=8)
def prime_omega_law(n: int) -> SignedLatticeMeasure:
    omega = omega_counts(n)[1:]
    counts = np.bincount(omega)
    return SignedLatticeMeasure.from_weights(counts / n, 0)


def prime_omega_params(n: int, K: int = 6):
    """``lambda_n = log log n + gamma`` and ``p_k = zeta(k) + P(k)``."""
    if n < 3:
        raise ValueError("log log n needs n >= 3")
    lam = math.log(math.log(n)) + EULER_GAMMA
    alph = alphabet_sum(zeta_alphabet(K), prime_zeta_alphabet(K), label="integers + primes")
    return lam, alph


def residue_classes(a: int) -> tuple[int, int]:
    """The two reduced residues modulo ``a`` (for ``a`` with ``phi(a) = 2``)."""
    if a not in RESIDUE_MODULI:
        raise ValueError(f"a must be one of {RESIDUE_MODULI}")
    return 1, a - 1


@lru_cache(maxsize=8)
def prime_residue_law(n: int, a: int) -> SignedLatticeMeasure:
    """Joint law of the numbers of distinct prime divisors in each reduced class mod ``a``."""
    b1, b2 = residue_classes(a)
    if not 1 <= n <= SIEVE_LIMIT:
        raise ValueError(f"n must lie in [1, {SIEVE_LIMIT}]")
    w1 = np.zeros(n + 1, dtype=np.int8)
    w2 = np.zeros(n + 1, dtype=np.int8)
    for p in primes_up_to(n):
        if a % p == 0:
            continue
        if p % a == b1:
            w1[p::p] += 1
        elif p % a == b2:
            w2[p::p] += 1
    h = np.zeros((int(w1.max()) + 1, int(w2.max()) + 1))
    np.add.at(h, (w1[1:], w2[1:]), 1.0)
    return SignedLatticeMeasure.from_weights(h / n, (0, 0))
