"""Sums of independent Bernoulli variables.

The exact law is built by iterated two-atom convolution.  Weights below
``ZERO_THRESHOLD`` at either end of the window are dropped as the sum
grows, and their total is recorded as truncated mass.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from ..lattice_measure import ZERO_THRESHOLD, SignedLatticeMeasure
from ..symfun import FormalAlphabet, hurwitz_zeta

__all__ = [
    "bernoulli_exact_law",
    "bernoulli_alphabet",
    "power_rule",
    "uniform_rule",
    "finite_alphabet",
    "bernoulli_residue",
]


def bernoulli_exact_law(p: Sequence[float]) -> SignedLatticeMeasure:
    """Law of ``sum_i B(p_i)``."""
    ps = np.asarray(p, dtype=float)
    if ((ps < 0) | (ps > 1)).any():
        raise ValueError("Bernoulli parameters must lie in [0, 1]")
    w = np.ones(1)
    offset = 0
    dropped = 0.0
    for pj in ps:
        if pj == 0.0:
            continue
        if pj == 1.0:
            offset += 1
            continue
        new = np.empty(w.size + 1)
        new[:-1] = w * (1.0 - pj)
        new[-1] = 0.0
        new[1:] += w * pj
        lo, hi = 0, new.size
        while hi - lo > 1 and new[lo] < ZERO_THRESHOLD:
            dropped += new[lo]
            lo += 1
        while hi - lo > 1 and new[hi - 1] < ZERO_THRESHOLD:
            dropped += new[hi - 1]
            hi -= 1
        offset += lo
        w = new[lo:hi]
    return SignedLatticeMeasure.from_weights(w, offset, dropped)


# ----------------------------------------------------------------------
# parameter rules
# ----------------------------------------------------------------------


def power_rule(a: float) -> Callable[[int], np.ndarray]:
    """``p_j = j^{-a}`` for ``j = 1..n``."""
    if a <= 0:
        raise ValueError("the exponent a must be positive")
    return lambda n: np.arange(1, n + 1, dtype=float) ** (-a)


def uniform_rule(lam: float) -> Callable[[int], np.ndarray]:
    """``p_j = lam / n`` for ``j = 1..n``."""
    return lambda n: np.full(n, lam / n)


def finite_alphabet(p: Sequence[float], lam: float | None, K: int, label: str = "") -> FormalAlphabet:
    """Alphabet ``p_k = sum_j p_j^k`` with ``p_1 = sum_j p_j - lam``.

    With ``lam = sum_j p_j`` (the default) the first power sum vanishes.
    """
    ps = np.asarray(p, dtype=float)
    powers = [0.0] * (K + 1)
    total = math.fsum(ps)
    powers[1] = 0.0 if lam is None else total - lam
    for k in range(2, K + 1):
        powers[k] = math.fsum(ps**k)
    return FormalAlphabet(K, tuple(powers), label)


def bernoulli_alphabet(rule: str, K: int, *, a: float | None = None,
                       values: Sequence[float] | None = None) -> FormalAlphabet:
    """Limit alphabet ``p_k = sum_{j>=1} p_j^k`` with ``p_1 := 0``.

    ``rule`` is ``"power"`` (``p_j = j^{-a}``, giving ``zeta(a k)``; requires
    ``2a > 1``) or ``"finite"`` (explicit list ``values``).
    """
    powers = [0.0] * (K + 1)
    if rule == "power":
        if a is None or 2 * a <= 1:
            raise ValueError("the power rule needs 2a > 1 for sum p_j^2 to converge")
        for k in range(2, K + 1):
            powers[k] = hurwitz_zeta(a * k, 1.0)
        label = f"sum_j j^(-{a}k)"
    elif rule == "finite":
        ps = np.asarray(values, dtype=float)
        for k in range(2, K + 1):
            powers[k] = math.fsum(ps**k)
        label = "finite Bernoulli parameters"
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return FormalAlphabet(K, tuple(powers), label)


#: parameters at or below this size are summed through their power sums
SERIES_CUTOFF = 0.25
SERIES_TERMS = 60


def bernoulli_residue(p: Sequence[float], lam: float) -> Callable[[np.ndarray], np.ndarray]:
    """``xi -> E[exp(i xi X)] * exp(-lam (e^{i xi} - 1))`` for ``X = sum B(p_j)``.

    Large parameters are handled factor by factor.  Small ones go through
    ``log(1 + p u) = sum_k (-1)^{k-1} p^k u^k / k``, which converges
    geometrically since ``|p u| <= 1/2``.
    """
    ps = np.asarray(p, dtype=float)
    big = ps[ps > SERIES_CUTOFF]
    small = ps[ps <= SERIES_CUTOFF]
    sums = [math.fsum(small**k) for k in range(SERIES_TERMS + 1)]

    def psi(xi):
        u = np.exp(1j * np.asarray(xi, dtype=float)) - 1.0
        logv = np.zeros(u.shape, dtype=complex)
        for pj in big:
            logv += np.log1p(pj * u)
        upow = u.copy()
        for k in range(1, SERIES_TERMS + 1):
            logv += (-1) ** (k - 1) * sums[k] * upow / k
            upow = upow * u
        logv -= lam * u
        return np.exp(logv)

    return psi
