"""Concrete mod-Poisson sequences behind one interface.

Every model exposes ``exact_law(n)``, ``lam(n)``, ``alphabet(n)``,
``exponent``, ``residue(n, order)`` and ``leading_term(n, order)``.
:func:`get_model` builds one from its registered name and ``key=value``
parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..lattice_measure import (
    FactorizedExponent,
    LaurentResidue,
    LevyExponent,
    SignedLatticeMeasure,
)
from ..symfun import FormalAlphabet, elementary_from_powers
from .bernoulli import (
    bernoulli_alphabet,
    bernoulli_exact_law,
    bernoulli_residue,
    finite_alphabet,
    power_rule,
    uniform_rule,
)
from .coloured import coloured_beta, coloured_perm_law, coloured_perm_params, coloured_residue
from .fq_polynomials import fq_factor_law, fq_scheme_params, irreducible_counts
from .functional_graphs import functional_graph_law, functional_graph_params
from .permutations import (
    ewens_cycle_law,
    ewens_probabilities,
    ewens_scheme_params,
    harmonic_number,
    stirling_first_kind,
)
from .primes import prime_omega_law, prime_omega_params, prime_residue_law, residue_classes

__all__ = [
    "ModelDescriptor",
    "Model",
    "MODEL_NAMES",
    "get_model",
    "parse_params",
    "bernoulli_exact_law",
    "bernoulli_alphabet",
    "ewens_cycle_law",
    "ewens_scheme_params",
    "stirling_first_kind",
    "irreducible_counts",
    "fq_factor_law",
    "fq_scheme_params",
    "functional_graph_law",
    "functional_graph_params",
    "prime_omega_law",
    "prime_omega_params",
    "coloured_perm_law",
    "coloured_perm_params",
    "prime_residue_law",
]

#: coefficients smaller than this (relative to 1) count as zero when the
#: leading term of a residue is located
LEADING_ZERO = 1e-13


@dataclass(frozen=True)
class ModelDescriptor:
    name: str
    dimension: int
    params: tuple[tuple[str, object], ...]
    n_range: tuple[int, int]
    exponent: LevyExponent | FactorizedExponent
    lambda_rule: str
    alphabet_rule: str


class Model:
    """Base class; subclasses fill in the model-specific pieces."""

    name = ""
    dimension = 1
    n_range = (1, 10**9)
    lambda_rule = ""
    alphabet_rule = ""
    #: whether the alphabet depends on n (finite power sums) or is the limit
    finite_alphabet = False

    def __init__(self, **params):
        self.params = params
        self._law_cache: dict[int, SignedLatticeMeasure] = {}

    # required pieces ----------------------------------------------------

    def _exact_law(self, n: int) -> SignedLatticeMeasure:
        raise NotImplementedError

    def theorem_lambda(self, n: int) -> float:
        raise NotImplementedError

    def alphabet(self, n: int, K: int) -> FormalAlphabet | None:
        return None

    @property
    def exponent(self):
        return LevyExponent.poisson()

    # derived behaviour --------------------------------------------------

    def check_n(self, n: int):
        lo, hi = self.n_range
        if not lo <= n <= hi:
            raise ValueError(f"model {self.name}: n={n} outside [{lo}, {hi}]")

    def exact_law(self, n: int) -> SignedLatticeMeasure:
        self.check_n(n)
        if n not in self._law_cache:
            self._law_cache[n] = self._exact_law(n)
        return self._law_cache[n]

    def lam(self, n: int, convention: str = "theorem") -> float:
        if convention == "theorem":
            return self.theorem_lambda(n)
        if convention == "exact-sum":
            law = self.exact_law(n)
            m = law.mean()
            if self.dimension == 1:
                return m / self.exponent.m
            return float(np.mean(np.asarray(m) / np.asarray(self.exponent.m)))
        raise ValueError(f"unknown lambda convention {convention!r}")

    def residue(self, n: int, order: int) -> LaurentResidue:
        """Scheme residue truncated at degree ``order`` in ``(e^{i xi} - 1)``."""
        if order == 0:
            return LaurentResidue.one(self.dimension)
        alph = self.alphabet(n, order + 3)
        if alph is None:
            raise ValueError(f"model {self.name} has no residue beyond order 0")
        e = [elementary_from_powers(alph, k) for k in range(order + 1)]
        return LaurentResidue.polynomial(e)

    def leading_term(self, n: int, order: int):
        """``(r, beta)``: first non-zero residue coefficient beyond ``order``.

        ``r + 1`` is the degree of that coefficient, so the scheme matches the
        residue to order ``r``.  Returns ``None`` when the model has no alphabet.
        """
        alph = self.alphabet(n, order + 4)
        if alph is None:
            return None
        for k in range(order + 1, order + 5):
            e = elementary_from_powers(alph, k)
            if abs(e) > LEADING_ZERO:
                return k - 1, e
        return None

    def psi(self, n: int, lam: float) -> Callable | None:
        """Deconvolution residue of the exact law, when available in closed form."""
        return None

    def psi_vanishing_order(self, n: int, lam: float, residue: LaurentResidue) -> int | None:
        """Largest ``r`` with ``psi_n - chi = O(xi^{r+1})``; ``None`` if unknown."""
        return None

    @property
    def descriptor(self) -> ModelDescriptor:
        return ModelDescriptor(
            self.name,
            self.dimension,
            tuple(sorted(self.params.items())),
            self.n_range,
            self.exponent,
            self.lambda_rule,
            self.alphabet_rule,
        )


class _BernoulliType(Model):
    """Models whose law is a sum of independent Bernoulli variables."""

    def probabilities(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def _exact_law(self, n):
        return bernoulli_exact_law(self.probabilities(n))

    def psi(self, n, lam):
        return bernoulli_residue(self.probabilities(n), lam)

    def psi_vanishing_order(self, n, lam, residue):
        # psi_n = sum_k e_{k,n} (e^{i xi}-1)^k with the finite-n alphabet
        order = len(residue.b) - 1
        K = order + 4
        fin = finite_alphabet(self.probabilities(n), lam, K)
        for k in range(0, K + 1):
            bk = residue.b[k] if k < len(residue.b) else 0.0
            ek = elementary_from_powers(fin, k)
            if abs(ek - bk) > LEADING_ZERO * max(1.0, abs(ek)):
                return k - 1
        return K


class BernoulliModel(_BernoulliType):
    """``sum_{j<=n} B(p_j)`` with ``p_j = j^{-a}`` or ``p_j = lam/n``."""

    name = "bernoulli"
    n_range = (1, 10**6)
    finite_alphabet = True
    lambda_rule = "sum_j p_j"
    alphabet_rule = "p_k = sum_{j<=n} p_j^k, p_1 = 0"

    def __init__(self, a: float | None = None, lam: float | None = None):
        if (a is None) == (lam is None):
            raise ValueError("give exactly one of a (p_j = j^-a) or lam (p_j = lam/n)")
        super().__init__(**({"a": a} if a is not None else {"lam": lam}))
        self._rule = power_rule(a) if a is not None else uniform_rule(lam)

    def probabilities(self, n):
        return np.minimum(self._rule(n), 1.0)

    def theorem_lambda(self, n):
        return math.fsum(self.probabilities(n))

    def alphabet(self, n, K):
        return finite_alphabet(self.probabilities(n), None, K, f"Bernoulli n={n}")


class EwensModel(_BernoulliType):
    name = "ewens"
    n_range = (1, 10**6)
    lambda_rule = "theta H_n + K"
    alphabet_rule = "p_k = sum_j (theta/(theta+j-1))^k, p_1 = 0"

    def __init__(self, theta: float = 1.0, K: float = 0.0):
        super().__init__(theta=float(theta), K=float(K))

    def probabilities(self, n):
        return ewens_probabilities(n, self.params["theta"])

    def _exact_law(self, n):
        return ewens_cycle_law(n, self.params["theta"])

    def theorem_lambda(self, n):
        return self.params["theta"] * harmonic_number(n) + self.params["K"]

    def alphabet(self, n, K):
        return ewens_scheme_params(n, self.params["theta"], self.params["K"], K)[1]


class FunctionalGraphModel(Model):
    name = "fgraph"
    n_range = (1, 40)
    lambda_rule = "(log 2n + gamma)/2"
    alphabet_rule = "p_k = (1 - 2^-k) zeta(k)"

    def _exact_law(self, n):
        return functional_graph_law(n)

    def theorem_lambda(self, n):
        return functional_graph_params(n)[0]

    def alphabet(self, n, K):
        return functional_graph_params(n, K)[1]


class FqPolynomialModel(Model):
    n_range = (1, 40)

    def __init__(self, q: int = 2, counted: str = "distinct"):
        super().__init__(q=int(q))
        self.counted = counted
        self.name = "fqpoly-distinct" if counted == "distinct" else "fqpoly-mult"
        self.lambda_rule = "log n + " + ("R(1/q)" if counted == "distinct" else "S(1/q)") + " + gamma"
        self.alphabet_rule = (
            "zeta(k) + I(q^-k)" if counted == "distinct" else "zeta(k) + (-1)^(k-1) sum |I_n|/(q^n-1)^k"
        )

    def _exact_law(self, n):
        return fq_factor_law(self.params["q"], n, self.counted)

    def theorem_lambda(self, n):
        return fq_scheme_params(self.params["q"], n, self.counted)[0]

    def alphabet(self, n, K):
        return fq_scheme_params(self.params["q"], n, self.counted, K)[1]


class PrimeOmegaModel(Model):
    name = "omega"
    n_range = (3, 10**7)
    lambda_rule = "log log n + gamma"
    alphabet_rule = "p_k = zeta(k) + P(k)"

    def _exact_law(self, n):
        return prime_omega_law(n)

    def theorem_lambda(self, n):
        return prime_omega_params(n)[0]

    def alphabet(self, n, K):
        return prime_omega_params(n, K)[1]


class ColouredPermutationModel(Model):
    name = "coloured-perm"
    dimension = 2
    n_range = (1, 3000)
    finite_alphabet = True
    lambda_rule = "H_n"
    alphabet_rule = "p_k = sum_{j<=n} j^-k, p_1 = 0"

    def __init__(self, d: int = 2):
        if int(d) != 2:
            raise ValueError("only d = 2 is supported")
        super().__init__(d=2)

    def _exact_law(self, n):
        return coloured_perm_law(n, 2)

    def theorem_lambda(self, n):
        return harmonic_number(n)

    @property
    def exponent(self):
        half = LevyExponent({1: 0.5})
        return FactorizedExponent((half, half))

    def alphabet(self, n, K):
        return coloured_perm_params(n, 2, K)[2]

    def residue(self, n, order):
        if order == 0:
            return LaurentResidue.one(2)
        return coloured_residue(self.alphabet(n, order + 3), order)

    def leading_term(self, n, order):
        alph = self.alphabet(n, order + 4)
        for k in range(order + 1, order + 5):
            beta = coloured_beta(alph, k)
            if max(abs(v) for v in beta.values()) > LEADING_ZERO:
                return k - 1, beta
        return None


class PrimeResidueModel(Model):
    name = "omega-residue"
    dimension = 2
    n_range = (16, 10**7)
    lambda_rule = "log log n"
    alphabet_rule = "not available (limit residue has no closed form)"

    def __init__(self, a: int = 4):
        super().__init__(a=int(a))
        residue_classes(int(a))

    def _exact_law(self, n):
        return prime_residue_law(n, self.params["a"])

    def theorem_lambda(self, n):
        return math.log(math.log(n))

    @property
    def exponent(self):
        half = LevyExponent({1: 0.5})
        return FactorizedExponent((half, half))

    def residue(self, n, order):
        if order != 0:
            raise ValueError("only the basic Poisson scheme is available for omega-residue")
        return LaurentResidue.one(2)

    def leading_term(self, n, order):
        return None


_REGISTRY: dict[str, Callable[..., Model]] = {
    "bernoulli": BernoulliModel,
    "ewens": EwensModel,
    "fgraph": FunctionalGraphModel,
    "fqpoly-distinct": lambda **kw: FqPolynomialModel(counted="distinct", **kw),
    "fqpoly-mult": lambda **kw: FqPolynomialModel(counted="with_multiplicity", **kw),
    "omega": PrimeOmegaModel,
    "coloured-perm": ColouredPermutationModel,
    "omega-residue": PrimeResidueModel,
}

MODEL_NAMES = tuple(_REGISTRY)


def _coerce(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def parse_params(items) -> dict[str, object]:
    """Turn ``["a=0.6", "theta=2"]`` into ``{"a": 0.6, "theta": 2}``."""
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"parameter {item!r} is not of the form key=value")
        out[key.strip()] = _coerce(value.strip())
    return out


def get_model(name: str, **params) -> Model:
    if name not in _REGISTRY:
        raise ValueError(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}")
    return _REGISTRY[name](**params)
