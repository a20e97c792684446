"""Number of connected components of a uniform random map ``[n] -> [n]``.

Counts come from exponential generating functions.  Rooted labelled trees
are counted by ``T_n = n^{n-1}``.  Connected functional graphs have EGF
``C = log(1 / (1 - T))``.  Maps with ``k`` components are then counted by
``n! [z^n] C^k / k!``.  All series arithmetic is exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from ..lattice_measure import SignedLatticeMeasure
from ..symfun import FormalAlphabet, zeta_value

__all__ = [
    "connected_counts",
    "component_counts",
    "functional_graph_law",
    "functional_graph_params",
]

MAX_N = 40
EULER_GAMMA = 0.57721566490153286061


def _mul(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * (n + 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j in range(0, n + 1 - i):
            if b[j]:
                out[i + j] += x * b[j]
    return out


@lru_cache(maxsize=None)
def connected_counts(n: int) -> tuple[int, ...]:
    """``conn_j`` for ``j = 0..n``: connected functional graphs on ``j`` labelled points."""
    if not 0 <= n <= MAX_N:
        raise ValueError(f"n must lie in [0, {MAX_N}]")
    T = [Fraction(0)] + [Fraction(j ** (j - 1), math.factorial(j)) for j in range(1, n + 1)]
    # C = sum_{m>=1} T^m / m ; T has no constant term so m <= n suffices
    C = [Fraction(0)] * (n + 1)
    power = T[:]
    for m in range(1, n + 1):
        for i in range(n + 1):
            C[i] += power[i] / m
        power = _mul(power, T, n)
    out = []
    for j, c in enumerate(C):
        v = c * math.factorial(j)
        if v.denominator != 1:
            raise ArithmeticError("non-integer connected count; series arithmetic is wrong")
        out.append(int(v))
    return tuple(out)


@lru_cache(maxsize=None)
def component_counts(n: int) -> tuple[int, ...]:
    """Number of maps ``[n] -> [n]`` with exactly ``k`` components, for ``k = 0..n``."""
    conn = connected_counts(n)
    # A[k][m]: structures with k components on m labelled points; the
    # component containing the smallest point has size j.
    A = [[0] * (n + 1) for _ in range(n + 1)]
    A[0][0] = 1
    for k in range(1, n + 1):
        for m in range(1, n + 1):
            A[k][m] = sum(
                math.comb(m - 1, j - 1) * conn[j] * A[k - 1][m - j] for j in range(1, m + 1)
            )
    counts = tuple(A[k][n] for k in range(n + 1))
    if sum(counts) != n**n:
        raise ArithmeticError("component counts do not add up to n^n")
    return counts


@lru_cache(maxsize=None)
def functional_graph_law(n: int) -> SignedLatticeMeasure:
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must lie in [1, {MAX_N}]")
    counts = component_counts(n)
    total = n**n
    return SignedLatticeMeasure.from_weights([Fraction(c, total) for c in counts], 0)


def functional_graph_params(n: int, K: int = 6):
    """``lambda_n = (log 2n + gamma)/2`` and ``p_k = (1 - 2^{-k}) zeta(k)`` (odd reciprocals)."""
    lam = 0.5 * (math.log(2 * n) + EULER_GAMMA)
    powers = [0.0, 0.0] + [(1.0 - 2.0 ** (-k)) * zeta_value(k) for k in range(2, K + 1)]
    return lam, FormalAlphabet(K, tuple(powers), "odd reciprocals 1/(2n-1)")
