"""Cycle counts per colour of uniform random 2-coloured permutations.

The vector of cycle counts is a sum of independent increments.  At step
``j`` the increment is ``0`` with probability ``1 - 1/j`` and each unit
vector with probability ``1/(2j)``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..lattice_measure import (
    ZERO_THRESHOLD,
    FactorizedExponent,
    LaurentResidue,
    LevyExponent,
    SignedLatticeMeasure,
)
from ..symfun import FormalAlphabet, elementary_from_powers
from .permutations import harmonic_number

__all__ = [
    "coloured_perm_law",
    "coloured_perm_params",
    "coloured_residue",
    "coloured_beta",
]

MAX_N = 3000


@lru_cache(maxsize=8)
def coloured_perm_law(n: int, d: int = 2) -> SignedLatticeMeasure:
    if d != 2:
        raise ValueError("only d = 2 colours are supported")
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must lie in [1, {MAX_N}]")
    w = np.ones((1, 1))
    off = [0, 0]
    dropped = 0.0
    for j in range(1, n + 1):
        stay, move = 1.0 - 1.0 / j, 1.0 / (2 * j)
        new = np.zeros((w.shape[0] + 1, w.shape[1] + 1))
        new[:-1, :-1] = stay * w
        new[1:, :-1] += move * w
        new[:-1, 1:] += move * w
        # trim boundary rows and columns that are numerically empty
        for axis in (0, 1):
            while new.shape[axis] > 1:
                edge = new.take(0, axis=axis)
                if edge.max() >= ZERO_THRESHOLD:
                    break
                dropped += edge.sum()
                new = new.take(range(1, new.shape[axis]), axis=axis)
                off[axis] += 1
            while new.shape[axis] > 1:
                edge = new.take(new.shape[axis] - 1, axis=axis)
                if edge.max() >= ZERO_THRESHOLD:
                    break
                dropped += edge.sum()
                new = new.take(range(new.shape[axis] - 1), axis=axis)
        w = new
    return SignedLatticeMeasure.from_weights(w, tuple(off), dropped)


def _alphabet(n: int | None, K: int) -> FormalAlphabet:
    if n is None:
        from ..symfun import zeta_alphabet

        return zeta_alphabet(K)
    j = np.arange(n, 0, -1, dtype=float)
    powers = [0.0, 0.0] + [math.fsum(j ** (-float(k))) for k in range(2, K + 1)]
    return FormalAlphabet(K, tuple(powers), f"sum_(j<={n}) j^-k")


def _expand(k: int, coef: float) -> dict[tuple[int, int], float]:
    """``coef * ((u + v)/2)^k`` in the monomial basis ``u^i v^(k-i)``."""
    return {(i, k - i): coef * math.comb(k, i) / 2**k for i in range(k + 1)}


def coloured_residue(alphabet: FormalAlphabet, order: int) -> LaurentResidue:
    """``sum_{k<=order} e_k (w - 1)^k`` with ``w - 1 = ((e^{i xi}-1) + (e^{i zeta}-1))/2``."""
    coeffs: dict[tuple[int, int], float] = {(0, 0): 1.0}
    for k in range(1, order + 1):
        for key, v in _expand(k, elementary_from_powers(alphabet, k)).items():
            coeffs[key] = coeffs.get(key, 0.0) + v
    return LaurentResidue.multi(coeffs)


def coloured_beta(alphabet: FormalAlphabet, k: int) -> dict[tuple[int, int], float]:
    """Coefficients of the degree-``k`` part of the residue, ``e_k ((u+v)/2)^k``."""
    return _expand(k, elementary_from_powers(alphabet, k))


def coloured_perm_params(n: int, d: int = 2, K: int = 6, finite: bool = True):
    """``(lambda, exponent, alphabet, beta)`` for the order-1 (Poisson) scheme.

    ``beta`` maps multi-indices of size 2 to the leading coefficients:
    ``(2,0), (0,2) -> -p_2/8`` and ``(1,1) -> -p_2/4``.
    """
    if d != 2:
        raise ValueError("only d = 2 colours are supported")
    lam = harmonic_number(n)
    half = LevyExponent({1: 0.5})
    exponent = FactorizedExponent((half, half))
    alph = _alphabet(n if finite else None, K)
    return lam, exponent, alph, coloured_beta(alph, 2)
