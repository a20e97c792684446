"""Integer partitions, power sums and elementary symmetric functions.

A :class:`FormalAlphabet` assigns numbers to the power sums ``p_k``.  The
residue of a mod-Poisson sequence is ``sum_k e_k (e^{i xi} - 1)^k`` where the
``e_k`` are obtained from the ``p_k`` through

    e_k = sum over partitions L of k of (-1)^{|L| - len(L)} / z_L * p_L.

This module also provides the zeta-type constants that feed the built-in
alphabets.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .numtheory import mobius

__all__ = [
    "IntegerPartition",
    "FormalAlphabet",
    "partitions",
    "partition_count",
    "z_of_partition",
    "elementary_from_powers",
    "elementary_sequence",
    "alphabet_sum",
    "alphabet_epsilon",
    "zeta_value",
    "zeta_minus_one",
    "hurwitz_zeta",
    "prime_zeta_value",
    "zeta_alphabet",
    "prime_zeta_alphabet",
]

MAX_PARTITION_SIZE = 40


@dataclass(frozen=True, order=True)
class IntegerPartition:
    parts: tuple[int, ...]

    def __post_init__(self):
        if any(p < 1 for p in self.parts):
            raise ValueError("parts must be positive")
        if any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError("parts must be non-increasing")

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self.parts))

    def __repr__(self) -> str:
        return f"IntegerPartition{self.parts}"


def _gen(k: int, largest: int):
    if k == 0:
        yield ()
        return
    for first in range(min(k, largest), 0, -1):
        for rest in _gen(k - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def partitions(k: int) -> tuple[IntegerPartition, ...]:
    """All partitions of ``k`` in reverse-lexicographic order."""
    if not 0 <= k <= MAX_PARTITION_SIZE:
        raise ValueError(f"k must lie in [0, {MAX_PARTITION_SIZE}]")
    return tuple(IntegerPartition(p) for p in _gen(k, k))


def partition_count(k: int) -> int:
    return len(partitions(k))


def z_of_partition(L: IntegerPartition) -> int:
    """``z_L = prod_k k^{m_k} m_k!``."""
    out = 1
    for part, mult in L.multiplicities.items():
        out *= part**mult * math.factorial(mult)
    return out


@lru_cache(maxsize=None)
def _signed_class_weights(k: int) -> tuple[tuple[tuple[int, ...], Fraction], ...]:
    """Pairs ``(parts, (-1)^{|L|-len(L)} / z_L)`` for the partitions of ``k``."""
    return tuple(
        (L.parts, Fraction((-1) ** (L.size - L.length), z_of_partition(L))) for L in partitions(k)
    )


# ----------------------------------------------------------------------
# Alphabets
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class FormalAlphabet:
    """Values of the power sums ``p_1..p_K`` (``p[0]`` is an unused slot)."""

    K: int
    p: tuple[float, ...]
    label: str = ""

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if len(self.p) != self.K + 1:
            raise ValueError("p must have K+1 entries (index 0 unused)")
        if not all(math.isfinite(x) for x in self.p):
            raise ValueError("power sums must be finite")

    @classmethod
    def from_powers(cls, values: dict[int, float] | Sequence[float], K: int | None = None,
                    label: str = "") -> "FormalAlphabet":
        """Build from ``{k: p_k}`` or from the list ``[p_1, p_2, ...]``."""
        if isinstance(values, dict):
            K = K if K is not None else max(values)
            p = [0.0] * (K + 1)
            for k, v in values.items():
                if 1 <= k <= K:
                    p[k] = float(v)
        else:
            vals = [float(v) for v in values]
            K = K if K is not None else len(vals)
            p = [0.0] + (vals + [0.0] * K)[:K]
        return cls(K, tuple(p), label)

    @classmethod
    def zero(cls, K: int, label: str = "zero") -> "FormalAlphabet":
        return cls(K, (0.0,) * (K + 1), label)

    def power(self, k: int) -> float:
        if not 1 <= k <= self.K:
            raise ValueError(f"p_{k} is outside the truncation order K={self.K}")
        return self.p[k]

    def truncated(self, K: int) -> "FormalAlphabet":
        if K > self.K:
            raise ValueError("cannot extend an alphabet")
        return FormalAlphabet(K, self.p[: K + 1], self.label)

    def to_text(self) -> str:
        lines = [f"label={self.label}", f"K={self.K}"]
        lines += [f"p{k}={self.p[k]:.17g}" for k in range(1, self.K + 1)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FormalAlphabet":
        fields = {}
        for line in text.splitlines():
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            key, _, value = line.partition("=")
            fields[key.strip()] = value.strip()
        K = int(fields["K"])
        p = [0.0] * (K + 1)
        for k in range(1, K + 1):
            p[k] = float(fields.get(f"p{k}", 0.0))
        return cls(K, tuple(p), fields.get("label", ""))


def elementary_from_powers(a: FormalAlphabet, k: int) -> float:
    """The value of ``e_k`` under the specialisation ``a``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return 1.0
    if k > a.K:
        raise ValueError(f"e_{k} needs p_k beyond the truncation order K={a.K}")
    skip_ones = a.p[1] == 0.0
    terms = []
    for parts, coef in _signed_class_weights(k):
        if skip_ones and parts[-1] == 1:
            continue
        prod = 1.0
        for part in parts:
            prod *= a.p[part]
        terms.append(float(coef) * prod)
    return math.fsum(terms)


def elementary_sequence(a: FormalAlphabet, kmax: int | None = None) -> list[float]:
    kmax = a.K if kmax is None else kmax
    return [elementary_from_powers(a, k) for k in range(kmax + 1)]


def alphabet_sum(a: FormalAlphabet, b: FormalAlphabet, label: str | None = None) -> FormalAlphabet:
    K = min(a.K, b.K)
    p = tuple(x + y for x, y in zip(a.p[: K + 1], b.p[: K + 1]))
    return FormalAlphabet(K, p, label if label is not None else f"({a.label})+({b.label})")


def alphabet_epsilon(a: FormalAlphabet, label: str | None = None) -> FormalAlphabet:
    """Sign flip ``p_k -> (-1)^{k-1} p_k``."""
    p = (0.0,) + tuple((-1) ** (k - 1) * a.p[k] for k in range(1, a.K + 1))
    if label is None:
        label = a.label[4:-1] if a.label.startswith("eps(") else f"eps({a.label})"
    return FormalAlphabet(a.K, p, label)


# ----------------------------------------------------------------------
# Zeta-type constants
# ----------------------------------------------------------------------

#: number of terms summed directly before the Euler-Maclaurin tail
DIRECT_TERMS = 100_000


def _em_tail(s: float, x: float) -> float:
    """Euler-Maclaurin estimate of ``sum_{j>=0} (x + j)^{-s}``."""
    # integral, endpoint and the first three Bernoulli corrections
    f = x ** (-s)
    out = x ** (1.0 - s) / (s - 1.0) + f / 2.0
    out += s / 12.0 * x ** (-s - 1.0)
    out -= s * (s + 1) * (s + 2) / 720.0 * x ** (-s - 3.0)
    out += s * (s + 1) * (s + 2) * (s + 3) * (s + 4) / 30240.0 * x ** (-s - 5.0)
    return out


@lru_cache(maxsize=None)
def hurwitz_zeta(s: float, a: float = 1.0) -> float:
    """``sum_{j>=0} (j + a)^{-s}`` for real ``s > 1`` and ``a > 0``."""
    if s <= 1.0:
        raise ValueError("the series diverges for s <= 1")
    if a <= 0:
        raise ValueError("a must be positive")
    j = np.arange(DIRECT_TERMS, dtype=float) + a
    terms = j ** (-s)
    # sum from the smallest terms up for accuracy
    head = math.fsum(terms[::-1])
    return head + _em_tail(s, DIRECT_TERMS + a)


def zeta_value(k: float) -> float:
    """Riemann zeta at ``k`` (integer ``2 <= k <= 40`` or any real ``k > 1``)."""
    if isinstance(k, (int, np.integer)) and not 2 <= k <= 40:
        raise ValueError("integer arguments must lie in [2, 40]")
    return hurwitz_zeta(float(k), 1.0)


def zeta_minus_one(s: float) -> float:
    """``zeta(s) - 1`` without cancellation."""
    return hurwitz_zeta(float(s), 2.0)


@lru_cache(maxsize=None)
def _prime_zeta_moebius(k: int) -> float:
    terms = []
    n = 1
    while True:
        mu = mobius(n)
        if mu:
            term = mu / n * math.log1p(zeta_minus_one(n * k))
            terms.append(term)
        if 2.0 ** (-n * k) / n < 1e-17:
            break
        n += 1
    return math.fsum(terms)


def prime_zeta_value(k: int, primes=None) -> float:
    """``P(k) = sum over primes p of p^{-k}``.

    Without ``primes`` this uses ``P(k) = sum_n mu(n)/n log zeta(n k)``.
    With an array of primes the direct (finite) sum over them is returned.
    """
    if not 2 <= k <= 40:
        raise ValueError("k must lie in [2, 40]")
    if primes is not None:
        ps = np.asarray(primes, dtype=float)
        return math.fsum((ps ** (-float(k)))[::-1])
    return _prime_zeta_moebius(int(k))


# ----------------------------------------------------------------------
# Built-in alphabets (p_1 is set to 0 throughout)
# ----------------------------------------------------------------------


@lru_cache(maxsize=None)
def zeta_alphabet(K: int) -> FormalAlphabet:
    """Reciprocals of the positive integers: ``p_k = zeta(k)``."""
    return FormalAlphabet(K, (0.0, 0.0) + tuple(zeta_value(k) for k in range(2, K + 1)),
                          "reciprocals of positive integers")


@lru_cache(maxsize=None)
def prime_zeta_alphabet(K: int) -> FormalAlphabet:
    """Reciprocals of the primes: ``p_k = P(k)``."""
    return FormalAlphabet(K, (0.0, 0.0) + tuple(prime_zeta_value(k) for k in range(2, K + 1)),
                          "reciprocals of primes")
