"""Non-asymptotic upper bounds on the total variation distance.

Two families are provided: the classical Poisson bounds for sums of
independent Bernoulli variables, and the Wiener-algebra norm estimate that
controls ``d_TV(mu, nu)`` through the deconvolution residue ``psi`` of
``mu`` and the polynomial ``chi`` defining the scheme ``nu``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import special

from .lattice_measure import LaurentResidue, LevyExponent, wiener_norm

__all__ = [
    "C_H",
    "ClassicalBounds",
    "BoundInputs",
    "BoundPreconditionError",
    "classical_tv_bounds",
    "remainder_constant",
    "tv_norm_bound_1d",
    "beta_sup_estimate",
    "estimate_bound_inputs",
    "best_norm_bound",
]

#: constant relating the Wiener norm to Sobolev-type norms
C_H = math.pi / math.sqrt(3.0)


class ClassicalBounds(NamedTuple):
    prohorov: float | None
    le_cam: float
    chen_steele: float


def classical_tv_bounds(p: Sequence[float]) -> ClassicalBounds:
    """Prohorov, Le Cam and Chen-Steele bounds for ``d_TV(sum B(p_i), Poisson(sum p_i))``.

    Prohorov's bound ``2 lam / n`` only applies to identical parameters, so it
    is ``None`` otherwise.
    """
    ps = np.asarray(p, dtype=float)
    if ps.size == 0:
        raise ValueError("at least one parameter is needed")
    if ((ps < 0) | (ps > 1)).any():
        raise ValueError("Bernoulli parameters must lie in [0, 1]")
    lam = math.fsum(ps)
    sq = math.fsum(ps * ps)
    le_cam = 2.0 * sq
    chen_steele = 0.0 if lam == 0 else 2.0 * (-math.expm1(-lam)) * sq / lam
    prohorov = 2.0 * lam / ps.size if np.all(ps == ps[0]) else None
    return ClassicalBounds(prohorov, le_cam, chen_steele)


class BoundPreconditionError(ValueError):
    """The hypotheses of the norm estimate are not met; no bound is returned."""


@dataclass(frozen=True)
class BoundInputs:
    lam: float
    r: int
    eps: float
    norm_psi_minus_chi_A: float
    beta_r1_eps: float
    gamma_eps: float
    M: float
    sigma2: float
    phi_prime_sup: float

    def check(self):
        for name in ("lam", "eps", "norm_psi_minus_chi_A", "beta_r1_eps", "gamma_eps",
                     "M", "sigma2", "phi_prime_sup"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise BoundPreconditionError(f"{name} must be finite and non-negative")
        if self.r < 0:
            raise BoundPreconditionError("r must be non-negative")
        if not 0 < self.eps < math.pi:
            raise BoundPreconditionError("eps must lie in (0, pi)")
        if self.M <= 0 or self.sigma2 <= 0:
            raise BoundPreconditionError("M and sigma2 must be positive")
        if self.gamma_eps > self.sigma2 / 2:
            raise BoundPreconditionError("gamma(eps) exceeds sigma2/2; take a smaller eps")
        if self.lam < 2.0 / self.sigma2:
            raise BoundPreconditionError("lambda must be at least 2/sigma2")


def remainder_constant(r: int) -> float:
    """``C_{r+1} = sqrt(2 pi / 3 * Gamma(r + 3/2)) / (r+1)!``."""
    return math.sqrt(2 * math.pi / 3 * special.gamma(r + 1.5)) / math.factorial(r + 1)


def tv_norm_bound_1d(inp: BoundInputs) -> float:
    """Upper bound on ``d_TV(mu, nu)`` from the Wiener-algebra norm estimate."""
    inp.check()
    lam, eps, r = inp.lam, inp.eps, inp.r
    first = inp.norm_psi_minus_chi_A * (
        1.0 + C_H * (math.sqrt(2.0 / (math.pi * eps)) + lam * inp.phi_prime_sup)
    ) * math.exp(-lam * inp.M * eps * eps / 4.0)
    second = (
        remainder_constant(r)
        * inp.beta_r1_eps
        * (1.0 / eps + math.sqrt(5.0 * (r + 1)))
        / (inp.sigma2 * lam / 2.0) ** (r / 2 + 0.25)
    )
    return first + second


def beta_sup_estimate(xi: Sequence[float], values: Sequence[complex], r: int) -> float:
    """Conservative ``sup |f^{(r+1)}|`` from samples of ``f`` on a uniform grid.

    Uses ``(r+1)``-th forward divided differences and inflates their largest
    magnitude by 5 percent.
    """
    x = np.asarray(xi, dtype=float)
    f = np.asarray(values, dtype=complex)
    if x.size != f.size or x.size < 4 * (r + 2):
        raise ValueError("need at least 4(r+2) samples matching the grid")
    h = np.diff(x)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValueError("samples must lie on a uniform grid")
    d = np.diff(f, n=r + 1) / h[0] ** (r + 1)
    return 1.05 * float(np.abs(d).max())


#: points used to sample psi - chi on [-eps, eps]
LOCAL_SAMPLES = 801
#: grid size for the Wiener norm of psi - chi
NORM_GRID = 1024


def estimate_bound_inputs(
    psi: Callable[[np.ndarray], np.ndarray],
    residue: LaurentResidue,
    exponent: LevyExponent,
    lam: float,
    r: int,
    eps: float,
    norm_grid: int = NORM_GRID,
) -> BoundInputs:
    """Measure every ingredient of the norm estimate numerically.

    ``psi`` evaluates the deconvolution residue ``mu_hat * exp(-lam phi)``
    on arrays of frequencies.
    """
    theta = 2 * math.pi * np.arange(norm_grid) / norm_grid
    norm = wiener_norm(psi(theta) - residue(theta))
    xs = np.linspace(-eps, eps, LOCAL_SAMPLES)
    diff = psi(xs) - residue(xs)
    beta = beta_sup_estimate(xs, diff, r)
    gamma = float(np.abs(exponent.derivative(xs, 2) + exponent.sigma2).max())
    return BoundInputs(
        lam=lam,
        r=r,
        eps=eps,
        norm_psi_minus_chi_A=norm,
        beta_r1_eps=beta,
        gamma_eps=gamma,
        M=exponent.M,
        sigma2=exponent.sigma2,
        phi_prime_sup=exponent.phi_prime_sup,
    )


def best_norm_bound(psi, residue, exponent, lam, r, eps_grid=None):
    """Smallest valid bound over a grid of ``eps``; ``None`` if no ``eps`` qualifies."""
    if eps_grid is None:
        eps_grid = np.linspace(0.05, 1.5, 30)
    best = None
    for eps in eps_grid:
        inp = estimate_bound_inputs(psi, residue, exponent, lam, r, float(eps))
        try:
            val = tv_norm_bound_1d(inp)
        except BoundPreconditionError:
            continue
        if best is None or val < best[0]:
            best = (val, inp)
    return best
