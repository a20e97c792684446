"""Hermite constants and leading-order distance predictions.

``H_r`` are the probabilists' Hermite polynomials (``H_{r+1} = x H_r - H_r'``)
and ``G_r(a) = (-1)^r H_r(a) exp(-a^2/2)`` is the ``r``-th derivative of the
Gaussian kernel, so ``G_r' = G_{r+1}``.  From them:

* ``z_r``  smallest absolute zero of ``H_r``;
* ``M_r = |G_r(z_{r+1})|``;
* ``V_r = int |G_{r+1}|``.

The prediction functions combine these constants with a scheme's leading
coefficient ``beta``, the variance ``sigma2`` and the parameter ``lambda``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from scipy import optimize, special, stats

__all__ = [
    "HermiteTable",
    "hermite_coeffs",
    "hermite_eval",
    "G_eval",
    "smallest_abs_zero",
    "real_zeros",
    "M_const",
    "V_const",
    "hermite_table",
    "predict_local",
    "predict_kolmogorov",
    "predict_tv",
    "md_local_sup",
    "md_tv_integral",
    "predict_local_md",
    "predict_tv_md",
    "gaussian_kolmogorov",
    "kolmogorov_to_gaussian",
]

MAX_ORDER = 20
QUAD_HALF_WIDTH = 12.0
SCAN_STEP = 1e-3
ROOT_TOL = 1e-13
GL_NODES_1D = 64
GL_NODES_2D = 400
QUAD_HALF_WIDTH_2D = 10.0
SUP_GRID_2D = 200
SUP_BOX_2D = 6.0


@lru_cache(maxsize=None)
def hermite_coeffs(r: int) -> tuple[int, ...]:
    """Integer coefficients of ``H_r``, constant term first."""
    if not 0 <= r <= MAX_ORDER + 2:
        raise ValueError(f"r must lie in [0, {MAX_ORDER}]")
    if r == 0:
        return (1,)
    prev = list(hermite_coeffs(r - 1))
    # x * H_{r-1}
    out = [0] + prev
    # - H_{r-1}'
    for k in range(1, len(prev)):
        out[k - 1] -= k * prev[k]
    return tuple(out)


def hermite_eval(r: int, x):
    coeffs = np.array(hermite_coeffs(r), dtype=float)
    return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), coeffs)


def G_eval(r: int, alpha):
    """``G_r(alpha) = (-1)^r H_r(alpha) exp(-alpha^2/2)``."""
    a = np.asarray(alpha, dtype=float)
    out = (-1) ** r * hermite_eval(r, a) * np.exp(-a * a / 2.0)
    return float(out) if np.ndim(alpha) == 0 else out


def _bisect(r: int, lo: float, hi: float) -> float:
    return optimize.brentq(lambda x: hermite_eval(r, x), lo, hi, xtol=ROOT_TOL, rtol=1e-15)


@lru_cache(maxsize=None)
def real_zeros(r: int) -> tuple[float, ...]:
    """All real zeros of ``H_r`` (sorted), by sign scan and bisection."""
    if r == 0:
        return ()
    xs = np.arange(0.0, QUAD_HALF_WIDTH + SCAN_STEP / 2, SCAN_STEP)
    vals = hermite_eval(r, xs)
    pos = []
    if r % 2 == 1:
        pos.append(0.0)
        start = 1
    else:
        start = 0
    for i in range(start, xs.size - 1):
        if vals[i] == 0.0 and i > 0:
            pos.append(float(xs[i]))
        elif vals[i] * vals[i + 1] < 0:
            pos.append(_bisect(r, float(xs[i]), float(xs[i + 1])))
    neg = [-x for x in pos if x > 0]
    return tuple(sorted(neg + pos))


def smallest_abs_zero(r: int) -> float:
    if not 1 <= r <= MAX_ORDER + 2:
        raise ValueError("r must lie in [1, 20]")
    if r % 2 == 1:
        return 0.0
    return min(z for z in real_zeros(r) if z > 0)


def M_const(r: int) -> float:
    """``M_r = |G_r(z_{r+1})|``."""
    return abs(G_eval(r, smallest_abs_zero(r + 1)))


@lru_cache(maxsize=None)
def V_const(r: int) -> float:
    """``V_r = int_R |G_{r+1}(a)| da`` by piecewise Gauss-Legendre quadrature."""
    nodes, weights = np.polynomial.legendre.leggauss(GL_NODES_1D)
    cuts = [-QUAD_HALF_WIDTH, *real_zeros(r + 1), QUAD_HALF_WIDTH]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid, half = (a + b) / 2, (b - a) / 2
        total += abs(half * float(np.dot(weights, G_eval(r + 1, mid + half * nodes))))
    return total


def V_tail_bound(r: int) -> float:
    """Upper bound for the mass of ``|G_{r+1}|`` outside the quadrature window."""
    # beyond the last zero G_r is monotone, so the tail integral is |G_r(12)|
    return 2.0 * abs(G_eval(r, QUAD_HALF_WIDTH))


@dataclass(frozen=True)
class HermiteTable:
    max_order: int
    coeffs: tuple[tuple[int, ...], ...]
    z: tuple[float, ...]
    M: tuple[float, ...]
    V: tuple[float, ...]


@lru_cache(maxsize=None)
def hermite_table(max_order: int = 10) -> HermiteTable:
    """Precomputed constants for ``r = 0..max_order``.

    ``z[r]`` is the smallest absolute zero of ``H_r`` (``z[0]`` is NaN since
    ``H_0`` has no zero).
    """
    if not 0 <= max_order <= MAX_ORDER - 1:
        raise ValueError("max_order out of range")
    R = max_order
    return HermiteTable(
        R,
        tuple(hermite_coeffs(r) for r in range(R + 2)),
        (math.nan,) + tuple(smallest_abs_zero(r) for r in range(1, R + 2)),
        tuple(M_const(r) for r in range(R + 1)),
        tuple(V_const(r) for r in range(R + 1)),
    )


# ----------------------------------------------------------------------
# one-dimensional predictions
# ----------------------------------------------------------------------


def _check(sigma2: float, lam: float, r: int):
    if lam <= 0 or sigma2 <= 0:
        raise ValueError("lambda and sigma2 must be positive")
    if r < 0:
        raise ValueError("r must be non-negative")


def predict_local(beta: float, sigma2: float, lam: float, r: int) -> float:
    """``|beta| M_{r+1} / (sqrt(2 pi) (sigma2 lam)^{r/2+1})``."""
    _check(sigma2, lam, r)
    return abs(beta) * M_const(r + 1) / (math.sqrt(2 * math.pi) * (sigma2 * lam) ** (r / 2 + 1))


def predict_kolmogorov(beta: float, sigma2: float, lam: float, r: int) -> float:
    """``|beta| M_r / (sqrt(2 pi) (sigma2 lam)^{(r+1)/2})``."""
    _check(sigma2, lam, r)
    return abs(beta) * M_const(r) / (math.sqrt(2 * math.pi) * (sigma2 * lam) ** ((r + 1) / 2))


def predict_tv(beta: float, sigma2: float, lam: float, r: int) -> float:
    """``|beta| V_r / (sqrt(2 pi) (sigma2 lam)^{(r+1)/2})``."""
    _check(sigma2, lam, r)
    return abs(beta) * V_const(r) / (math.sqrt(2 * math.pi) * (sigma2 * lam) ** ((r + 1) / 2))


# ----------------------------------------------------------------------
# two-dimensional predictions
# ----------------------------------------------------------------------


def _md_polynomial(beta: Mapping[tuple[int, ...], float], sigma: Sequence[float], x, y):
    total = np.zeros(np.broadcast(x, y).shape)
    for (a1, a2), b in beta.items():
        total = total + b * hermite_eval(a1, x) * hermite_eval(a2, y) / (
            sigma[0] ** a1 * sigma[1] ** a2
        )
    return total


def _md_integrand(beta, sigma, x, y):
    return np.exp(-(x * x + y * y) / 2) * np.abs(_md_polynomial(beta, sigma, x, y))


def _check_md(beta, sigma, dim):
    if dim != 2:
        raise ValueError("only dimension 2 is supported")
    if len(sigma) != 2 or any(s <= 0 for s in sigma):
        raise ValueError("sigma must hold two positive standard deviations")
    if any(len(k) != 2 for k in beta):
        raise ValueError("multi-indices must have length 2")


def md_local_sup(beta: Mapping[tuple[int, ...], float], sigma: Sequence[float]):
    """``sup_x exp(-|x|^2/2) |sum beta^a H_a(x) / sigma^a|`` and its argmax."""
    _check_md(beta, sigma, 2)
    if all(b == 0 for b in beta.values()):
        return 0.0, (0.0, 0.0)
    g = np.linspace(-SUP_BOX_2D, SUP_BOX_2D, SUP_GRID_2D + 1)  # includes the origin
    X, Y = np.meshgrid(g, g, indexing="ij")
    F = _md_integrand(beta, sigma, X, Y)
    best = None
    # refine from the few best grid points to avoid a spurious local max
    for flat in np.argsort(F.ravel())[::-1][:8]:
        x0 = (X.ravel()[flat], Y.ravel()[flat])
        res = optimize.minimize(
            lambda v: -float(_md_integrand(beta, sigma, v[0], v[1])),
            x0,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000},
        )
        cand = (-float(res.fun), (float(res.x[0]), float(res.x[1])))
        if best is None or cand[0] > best[0]:
            best = cand
    return best


def _poly_in_y(beta, sigma, x: float) -> np.ndarray:
    """Coefficients (constant first) of ``y -> sum beta^a H_a(x, y) / sigma^a``."""
    out = np.zeros(max(k[1] for k in beta) + 1)
    for (a1, a2), b in beta.items():
        c = b * float(hermite_eval(a1, x)) / (sigma[0] ** a1 * sigma[1] ** a2)
        out[: a2 + 1] += c * np.array(hermite_coeffs(a2), dtype=float)
    return out


def md_tv_integral(beta: Mapping[tuple[int, ...], float], sigma: Sequence[float]) -> float:
    """``int_{R^2} exp(-|x|^2/2) |sum beta^a H_a(x) / sigma^a| dx``.

    Gauss-Legendre with 400 nodes per axis on ``[-10, 10]^2``.  The inner
    integral is split at the real roots of the polynomial in ``y`` so that
    each piece has a smooth integrand.
    """
    _check_md(beta, sigma, 2)
    nodes, weights = np.polynomial.legendre.leggauss(GL_NODES_2D)
    L = QUAD_HALF_WIDTH_2D
    inner_nodes, inner_weights = np.polynomial.legendre.leggauss(GL_NODES_1D)
    total = 0.0
    for xk, wk in zip(L * nodes, L * weights):
        coeffs = _poly_in_y(beta, sigma, xk)
        cuts = [-L, L]
        nz = np.flatnonzero(np.abs(coeffs) > 0)
        if nz.size and nz[-1] > 0:
            roots = np.roots(coeffs[: nz[-1] + 1][::-1])
            cuts += [float(r.real) for r in roots if abs(r.imag) < 1e-9 and -L < r.real < L]
        cuts = sorted(cuts)
        row = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b - a <= 0:
                continue
            ys = (a + b) / 2 + (b - a) / 2 * inner_nodes
            vals = np.polynomial.polynomial.polyval(ys, coeffs)
            row += (b - a) / 2 * float(np.dot(inner_weights, np.exp(-ys * ys / 2) * np.abs(vals)))
        total += wk * math.exp(-xk * xk / 2) * row
    return total


def predict_local_md(beta, sigma, lam: float, r: int, dim: int = 2) -> float:
    """Multi-dimensional local prediction (sigma are per-coordinate standard deviations)."""
    _check_md(beta, sigma, dim)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    sup, _ = md_local_sup(beta, sigma)
    pref = math.prod(math.sqrt(2 * math.pi) * s for s in sigma) * lam ** ((r + dim + 1) / 2)
    return sup / pref


def predict_tv_md(beta, sigma, lam: float, r: int, dim: int = 2) -> float:
    _check_md(beta, sigma, dim)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if all(b == 0 for b in beta.values()):
        return 0.0
    return md_tv_integral(beta, sigma) / ((2 * math.pi) ** (dim / 2) * lam ** ((r + 1) / 2))


# ----------------------------------------------------------------------
# Gaussian comparison
# ----------------------------------------------------------------------


def gaussian_kolmogorov(lam: float, tol: float = 1e-14) -> float:
    """Kolmogorov distance between the standardized Poisson(lam) law and N(0,1).

    The Poisson CDF jumps at each integer, so the supremum is taken over
    both one-sided limits at every atom.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    hi = int(stats.poisson.isf(tol, lam)) + 2
    k = np.arange(0, hi + 1)
    cdf = stats.poisson.cdf(k, lam)
    left = np.concatenate([[0.0], cdf[:-1]])
    phi = special.ndtr((k - lam) / math.sqrt(lam))
    d = np.maximum(np.abs(cdf - phi), np.abs(left - phi))
    # below the support the Poisson CDF is 0, and above it is 1
    return float(max(d.max(), special.ndtr(-lam / math.sqrt(lam))))


def kolmogorov_to_gaussian(weights, offset: int, center: float, scale: float) -> float:
    """Kolmogorov distance between ``(X - center)/scale`` and N(0,1).

    ``weights`` is the law of an integer variable ``X`` starting at ``offset``.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    w = np.asarray(weights, dtype=float)
    k = offset + np.arange(w.size)
    cdf = np.cumsum(w)
    left = cdf - w
    phi = special.ndtr((k - center) / scale)
    d = np.maximum(np.abs(cdf - phi), np.abs(left - phi))
    # beyond the last atom the distance tends to |1 - total mass|
    return float(max(d.max(), abs(1.0 - cdf[-1])))
