"""Number of irreducible factors of a uniform random monic polynomial over F_q.

Two statistics are supported: the number of distinct irreducible factors
(``distinct``) and the number counted with multiplicity
(``with_multiplicity``).  The exact law comes from a big-integer dynamic
programme over factor degrees.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from ..lattice_measure import SignedLatticeMeasure
from ..numtheory import divisors, mobius, totient
from ..symfun import FormalAlphabet, alphabet_epsilon, alphabet_sum, zeta_alphabet, zeta_value
from .functional_graphs import EULER_GAMMA

__all__ = [
    "irreducible_counts",
    "fq_factor_table",
    "fq_factor_law",
    "fq_series_R",
    "fq_series_S",
    "fq_series_I",
    "fq_scheme_params",
    "multiplicity_alphabet",
]

COUNTINGS = ("distinct", "with_multiplicity")
ALLOWED_Q = (2, 3, 4, 5)


@lru_cache(maxsize=None)
def irreducible_counts(q: int, n_max: int) -> tuple[int, ...]:
    """``|I_n|`` for ``n = 0..n_max`` (``|I_0| = 0``) by Gauss' formula."""
    if not (2 <= q <= 16 and 1 <= n_max <= 64):
        raise ValueError("need 2 <= q <= 16 and 1 <= n_max <= 64")
    out = [0]
    for n in range(1, n_max + 1):
        s = sum(mobius(n // d) * q**d for d in divisors(n))
        if s % n:
            raise ArithmeticError("Gauss' formula gave a non-integer")
        out.append(s // n)
    return tuple(out)


@lru_cache(maxsize=None)
def fq_factor_table(q: int, n: int, counted: str) -> tuple[int, ...]:
    """Number of monic degree-``n`` polynomials with ``k`` factors, ``k = 0..n``."""
    if counted not in COUNTINGS:
        raise ValueError(f"counted must be one of {COUNTINGS}")
    I = irreducible_counts(q, n)
    # table[deg][k]
    table = [[0] * (n + 1) for _ in range(n + 1)]
    table[0][0] = 1
    for d in range(1, n + 1):
        # factor polynomial in (z^d, w): list of (degree, k, coefficient)
        factor = []
        top = n // d
        if counted == "distinct":
            # (1 + w z^d / (1 - z^d))^{I_d} = sum_i C(I_d, i) w^i sum_{m>=i} C(m-1, i-1) z^{dm}
            for i in range(0, top + 1):
                ci = math.comb(I[d], i)
                if ci == 0:
                    break
                if i == 0:
                    factor.append((0, 0, 1))
                    continue
                for m in range(i, top + 1):
                    factor.append((d * m, i, ci * math.comb(m - 1, i - 1)))
        else:
            # (1 - w z^d)^{-I_d} = sum_i C(I_d + i - 1, i) w^i z^{d i}
            for i in range(0, top + 1):
                factor.append((d * i, i, math.comb(I[d] + i - 1, i)))
        new = [[0] * (n + 1) for _ in range(n + 1)]
        for deg in range(n + 1):
            row = table[deg]
            for k in range(n + 1):
                c = row[k]
                if not c:
                    continue
                for fd, fk, fc in factor:
                    if deg + fd <= n and k + fk <= n:
                        new[deg + fd][k + fk] += c * fc
        table = new
    counts = tuple(table[n])
    if sum(counts) != q**n:
        raise ArithmeticError("factor counts do not add up to q^n")
    return counts


@lru_cache(maxsize=None)
def fq_factor_law(q: int, n: int, counted: str = "distinct") -> SignedLatticeMeasure:
    if q not in ALLOWED_Q:
        raise ValueError(f"q must be one of {ALLOWED_Q}")
    if not 1 <= n <= 40:
        raise ValueError("n must lie in [1, 40]")
    counts = fq_factor_table(q, n, counted)
    return SignedLatticeMeasure.from_weights([Fraction(c, q**n) for c in counts], 0)


def _log_series(q: int, weight) -> float:
    """``sum_{k>=2} weight(k)/k * log(1/(1 - q^{1-k}))``."""
    terms = []
    k = 2
    while True:
        x = float(q) ** (1 - k)
        terms.append(weight(k) / k * -math.log1p(-x))
        if x / k < 1e-18:
            break
        k += 1
    return math.fsum(terms)


def fq_series_R(q: int) -> float:
    """``R(1/q) = sum_{k>=2} mu(k)/k log(1/(1 - q (1/q)^k))``."""
    return _log_series(q, mobius)


def fq_series_S(q: int) -> float:
    """``S(1/q) = sum_{k>=2} phi(k)/k log(1/(1 - q (1/q)^k))``."""
    return _log_series(q, totient)


def fq_series_I(q: int, z: float) -> float:
    """``I(z) = sum_n |I_n| z^n`` for ``0 < z <= q^{-2}``."""
    terms = []
    n = 1
    I = irreducible_counts(q, 64)
    while n <= 64:
        t = I[n] * z**n
        terms.append(t)
        # |I_m| <= q^m / m, so the tail is below a geometric series
        if (q * z) ** (n + 1) / (1 - q * z) < 1e-18:
            break
        n += 1
    return math.fsum(terms)


def multiplicity_alphabet(q: int, K: int) -> FormalAlphabet:
    """Alphabet ``p_k = sum_n |I_n| / (q^n - 1)^k`` (one letter per irreducible)."""
    powers = [0.0, 0.0] + [_mult_sum(q, k) for k in range(2, K + 1)]
    return FormalAlphabet(K, tuple(powers), f"1/(q^deg - 1), q={q}")


def _mult_sum(q: int, k: int) -> float:
    """``sum_n |I_n| / (q^n - 1)^k``."""
    I = irreducible_counts(q, 64)
    terms = []
    for n in range(1, 65):
        t = I[n] / (q**n - 1) ** k
        terms.append(t)
        if t < 1e-20:
            break
    return math.fsum(terms)


def fq_scheme_params(q: int, n: int, counted: str = "distinct", K: int = 6):
    """``(lambda_n, alphabet)`` for the factor-count statistic."""
    if counted == "distinct":
        lam = math.log(n) + fq_series_R(q) + EULER_GAMMA
        powers = [0.0, 0.0] + [zeta_value(k) + fq_series_I(q, float(q) ** (-k)) for k in range(2, K + 1)]
        label = f"zeta(k) + I(q^-k), q={q}"
    elif counted == "with_multiplicity":
        lam = math.log(n) + fq_series_S(q) + EULER_GAMMA
        alph = alphabet_sum(
            zeta_alphabet(K),
            alphabet_epsilon(multiplicity_alphabet(q, K)),
            label=f"zeta(k) + eps(1/(q^deg - 1)), q={q}",
        )
        return lam, alph
    else:
        raise ValueError(f"counted must be one of {COUNTINGS}")
    return lam, FormalAlphabet(K, tuple(powers), label)
