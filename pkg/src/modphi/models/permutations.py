"""Cycle counts of Ewens-distributed permutations.

Under the Ewens measure with parameter ``theta`` the number of cycles of a
permutation of size ``n`` is distributed as ``sum_{j=1}^n B(theta/(theta+j-1))``
(Feller coupling), which gives the exact law.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..lattice_measure import SignedLatticeMeasure
from ..symfun import FormalAlphabet, hurwitz_zeta
from .bernoulli import bernoulli_exact_law

__all__ = [
    "ewens_probabilities",
    "ewens_cycle_law",
    "ewens_scheme_params",
    "ewens_alphabet",
    "stirling_first_kind",
    "harmonic_number",
]

MAX_N = 10**6


def ewens_probabilities(n: int, theta: float) -> np.ndarray:
    if theta <= 0:
        raise ValueError("theta must be positive")
    j = np.arange(1, n + 1, dtype=float)
    return theta / (theta + j - 1.0)


@lru_cache(maxsize=32)
def ewens_cycle_law(n: int, theta: float = 1.0) -> SignedLatticeMeasure:
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must lie in [1, {MAX_N}]")
    return bernoulli_exact_law(ewens_probabilities(n, theta))


def harmonic_number(n: int) -> float:
    return math.fsum(1.0 / np.arange(n, 0, -1, dtype=float))


@lru_cache(maxsize=None)
def ewens_alphabet(theta: float, K: int) -> FormalAlphabet:
    """``p_1 = 0`` and ``p_k = sum_{j>=1} (theta/(theta+j-1))^k = theta^k zeta(k, theta)``."""
    powers = [0.0, 0.0] + [theta**k * hurwitz_zeta(float(k), theta) for k in range(2, K + 1)]
    return FormalAlphabet(K, tuple(powers), f"Ewens theta={theta:g}")


def ewens_scheme_params(n: int, theta: float = 1.0, K_const: float = 0.0, K: int = 6):
    """``(lambda_n, alphabet)`` with ``lambda_n = theta H_n + K_const``."""
    lam = theta * harmonic_number(n) + K_const
    return lam, ewens_alphabet(float(theta), K)


@lru_cache(maxsize=None)
def _stirling_row(n: int) -> tuple[int, ...]:
    if n == 0:
        return (1,)
    prev = _stirling_row(n - 1)
    row = [0] * (n + 1)
    for k in range(1, n + 1):
        row[k] = (prev[k - 1] if k - 1 < len(prev) else 0) + (n - 1) * (prev[k] if k < len(prev) else 0)
    return tuple(row)


def stirling_first_kind(n: int, k: int) -> int:
    """Unsigned Stirling number of the first kind ``|s(n, k)|``."""
    if not 0 <= n <= 60:
        raise ValueError("n must lie in [0, 60]")
    if k < 0 or k > n:
        return 0
    return _stirling_row(n)[k]
