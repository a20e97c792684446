"""Signed measures on the lattices Z and Z^2.

A :class:`SignedLatticeMeasure` stores a dense window of real weights
together with the integer coordinates of the lowest corner of the window
and the amount of mass that was thrown away when the object was produced
by a truncation.  Every law, approximation scheme and residue atom in the
package is represented this way.

Fourier conventions: the transform of ``m`` is
``m_hat(xi) = sum_k m({k}) exp(i <xi, k>)``.  Distances use the doubled
total variation ``sum_k |a({k}) - b({k})|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

__all__ = [
    "ZERO_THRESHOLD",
    "SignedLatticeMeasure",
    "LevyExponent",
    "FactorizedExponent",
    "LaurentResidue",
    "convolve",
    "compound_poisson_measure",
    "residue_atoms",
    "scheme_measure",
    "charlier_scheme_values",
    "distance_local",
    "distance_kolmogorov",
    "distance_tv",
    "error_bar",
    "fourier_sample",
    "wiener_norm",
    "default_grid_size",
    "dirac",
    "poisson_measure",
]

#: weights whose absolute value falls below this are treated as zero when
#: the support window is trimmed.
ZERO_THRESHOLD = 1e-300


class DimensionError(ValueError):
    """Raised when two measures of different dimension are combined."""


# ----------------------------------------------------------------------
# Signed measures
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SignedLatticeMeasure:
    """Finitely supported real-weighted measure on Z or Z^2.

    Use :meth:`from_weights` rather than the raw constructor: it trims the
    window, freezes the array and validates the fields.
    """

    dimension: int
    offset: tuple[int, ...]
    weights: np.ndarray
    truncated_mass: float = 0.0

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if self.weights.ndim != self.dimension or len(self.offset) != self.dimension:
            raise ValueError("weights/offset do not match the dimension")
        if not self.truncated_mass >= 0.0:
            raise ValueError("truncated_mass must be non-negative")

    # construction -----------------------------------------------------

    @classmethod
    def from_weights(
        cls,
        weights,
        offset: int | Sequence[int] = 0,
        truncated_mass: float = 0.0,
    ) -> "SignedLatticeMeasure":
        arr = np.array(weights, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        if isinstance(offset, (int, np.integer)):
            offset = (int(offset),) * arr.ndim
        offset = tuple(int(o) for o in offset)
        arr, offset = _trim(arr, offset)
        arr.setflags(write=False)
        return cls(arr.ndim, offset, arr, float(truncated_mass))

    @classmethod
    def from_dict(cls, atoms: Mapping, truncated_mass: float = 0.0) -> "SignedLatticeMeasure":
        """Build a measure from ``{point: weight}``; points are ints or tuples."""
        if not atoms:
            raise ValueError("at least one atom is required")
        keys = list(atoms)
        if isinstance(keys[0], tuple):
            pts = np.array(keys, dtype=np.int64)
        else:
            pts = np.array([[k] for k in keys], dtype=np.int64)
        lo = pts.min(axis=0)
        shape = tuple(pts.max(axis=0) - lo + 1)
        arr = np.zeros(shape)
        for p, k in zip(pts, keys):
            arr[tuple(p - lo)] += atoms[k]
        return cls.from_weights(arr, tuple(int(v) for v in lo), truncated_mass)

    # basic queries ----------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.weights.shape

    def support_range(self, axis: int = 0) -> range:
        return range(self.offset[axis], self.offset[axis] + self.weights.shape[axis])

    def weight(self, *point: int) -> float:
        idx = tuple(p - o for p, o in zip(point, self.offset))
        if any(i < 0 or i >= s for i, s in zip(idx, self.weights.shape)):
            return 0.0
        return float(self.weights[idx])

    def __getitem__(self, point):
        if isinstance(point, tuple):
            return self.weight(*point)
        return self.weight(point)

    def total_mass(self) -> float:
        return float(math.fsum(self.weights.ravel()))

    def tv_norm(self) -> float:
        return float(np.abs(self.weights).sum())

    def mean(self) -> np.ndarray | float:
        coords = np.meshgrid(
            *[np.arange(o, o + s) for o, s in zip(self.offset, self.weights.shape)],
            indexing="ij",
        )
        m = np.array([float((c * self.weights).sum()) for c in coords]) / self.weights.sum()
        return float(m[0]) if self.dimension == 1 else m

    def marginal(self, axis: int) -> "SignedLatticeMeasure":
        """Marginal of a 2D measure along coordinate ``axis``."""
        if self.dimension != 2:
            raise DimensionError("marginal is defined for 2D measures")
        other = 1 - axis
        return SignedLatticeMeasure.from_weights(
            self.weights.sum(axis=other), self.offset[axis], self.truncated_mass
        )

    def shifted(self, delta: int | Sequence[int]) -> "SignedLatticeMeasure":
        if isinstance(delta, (int, np.integer)):
            delta = (int(delta),) * self.dimension
        off = tuple(o + d for o, d in zip(self.offset, delta))
        return SignedLatticeMeasure(self.dimension, off, self.weights, self.truncated_mass)

    def scaled(self, c: float) -> "SignedLatticeMeasure":
        return SignedLatticeMeasure.from_weights(
            c * self.weights, self.offset, abs(c) * self.truncated_mass
        )

    def with_truncated_mass(self, tm: float) -> "SignedLatticeMeasure":
        return SignedLatticeMeasure(self.dimension, self.offset, self.weights, float(tm))

    # serialization ----------------------------------------------------

    def to_text(self) -> str:
        """Line-oriented text form.

        The header holds ``dim``, the offsets, the window extents and the
        truncated mass.  Weights follow, one per line in row-major order.
        """
        head = [str(self.dimension)]
        head += [str(o) for o in self.offset]
        head += [str(s) for s in self.weights.shape]
        head.append(f"{self.truncated_mass:.17g}")
        lines = [" ".join(head)]
        lines += [f"{w:.17g}" for w in self.weights.ravel()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SignedLatticeMeasure":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        dim = int(head[0])
        offset = tuple(int(v) for v in head[1 : 1 + dim])
        shape = tuple(int(v) for v in head[1 + dim : 1 + 2 * dim])
        tm = float(head[1 + 2 * dim])
        vals = np.array([float(v) for v in lines[1:]])
        if vals.size != int(np.prod(shape)):
            raise ValueError("weight count does not match the header extents")
        arr = vals.reshape(shape)
        arr.setflags(write=False)
        return cls(dim, offset, arr, tm)

    def __repr__(self) -> str:
        return (
            f"SignedLatticeMeasure(dim={self.dimension}, offset={self.offset}, "
            f"shape={self.weights.shape}, truncated_mass={self.truncated_mass:.3g})"
        )


def _trim(arr: np.ndarray, offset: tuple[int, ...]):
    """Drop boundary slices whose entries are all below ZERO_THRESHOLD."""
    mask = np.abs(arr) >= ZERO_THRESHOLD
    if not mask.any():
        # the zero measure keeps a single atom so that it has a location
        return np.zeros((1,) * arr.ndim), offset
    slices = []
    new_off = []
    for ax in range(arr.ndim):
        other = tuple(a for a in range(arr.ndim) if a != ax)
        nz = np.flatnonzero(mask.any(axis=other) if other else mask)
        slices.append(slice(nz[0], nz[-1] + 1))
        new_off.append(offset[ax] + int(nz[0]))
    return np.ascontiguousarray(arr[tuple(slices)]), tuple(new_off)


def dirac(point: int | Sequence[int] = 0) -> SignedLatticeMeasure:
    if isinstance(point, (int, np.integer)):
        return SignedLatticeMeasure.from_weights([1.0], int(point))
    return SignedLatticeMeasure.from_weights(np.ones((1,) * len(point)), tuple(point))


def _check_same_dim(a: SignedLatticeMeasure, b: SignedLatticeMeasure):
    if a.dimension != b.dimension:
        raise DimensionError(f"dimension mismatch: {a.dimension} vs {b.dimension}")


def convolve(a: SignedLatticeMeasure, b: SignedLatticeMeasure) -> SignedLatticeMeasure:
    """Full discrete convolution ``a * b``."""
    _check_same_dim(a, b)
    if a.dimension == 1:
        w = np.convolve(a.weights, b.weights)
    else:
        from scipy.signal import fftconvolve, convolve2d

        if a.weights.size * b.weights.size <= 4_000_000:
            w = convolve2d(a.weights, b.weights)
        else:
            w = fftconvolve(a.weights, b.weights)
    off = tuple(x + y for x, y in zip(a.offset, b.offset))
    tm = a.truncated_mass * b.tv_norm() + b.truncated_mass * a.tv_norm()
    return SignedLatticeMeasure.from_weights(w, off, tm)


# ----------------------------------------------------------------------
# Exponents and residues
# ----------------------------------------------------------------------

#: number of grid points used to estimate M and sup |phi'|
EXPONENT_GRID = 4096
#: safety factor applied to the grid estimate of M
M_SAFETY = 0.99


@dataclass(frozen=True)
class LevyExponent:
    """Compound Poisson exponent ``phi(xi) = sum_j c_j (exp(i j xi) - 1)`` on Z."""

    jumps: tuple[tuple[int, float], ...]

    def __init__(self, jumps: Mapping[int, float]):
        items = tuple(sorted((int(j), float(c)) for j, c in jumps.items() if c != 0.0))
        if not items:
            raise ValueError("at least one jump rate must be positive")
        if any(j == 0 for j, _ in items):
            raise ValueError("jump 0 is not allowed")
        if any(c < 0 for _, c in items):
            raise ValueError("jump rates must be non-negative")
        if reduce(math.gcd, (abs(j) for j, _ in items)) != 1:
            raise ValueError("jumps do not generate the lattice Z")
        object.__setattr__(self, "jumps", items)
        if not self.M > 0:
            raise ValueError("exponent is degenerate (M <= 0)")

    @classmethod
    def poisson(cls) -> "LevyExponent":
        return cls({1: 1.0})

    dimension = 1

    @property
    def total_rate(self) -> float:
        return math.fsum(c for _, c in self.jumps)

    @property
    def m(self) -> float:
        return math.fsum(j * c for j, c in self.jumps)

    @property
    def sigma2(self) -> float:
        return math.fsum(j * j * c for j, c in self.jumps)

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        return sum(c * (np.exp(1j * j * xi) - 1.0) for j, c in self.jumps)

    def derivative(self, xi, order: int = 1):
        xi = np.asarray(xi, dtype=float)
        return sum(c * (1j * j) ** order * np.exp(1j * j * xi) for j, c in self.jumps)

    @cached_property
    def M(self) -> float:
        theta = np.linspace(math.pi / EXPONENT_GRID, math.pi, EXPONENT_GRID)
        ratio = -np.real(self(theta)) / theta**2
        return M_SAFETY * float(ratio.min())

    @cached_property
    def phi_prime_sup(self) -> float:
        theta = np.linspace(-math.pi, math.pi, EXPONENT_GRID, endpoint=False)
        return float(np.abs(self.derivative(theta)).max())


@dataclass(frozen=True)
class FactorizedExponent:
    """Multi-dimensional exponent ``phi(xi) = sum_i phi_i(xi_i)``."""

    components: tuple[LevyExponent, ...]

    @property
    def dimension(self) -> int:
        return len(self.components)

    @property
    def m(self) -> tuple[float, ...]:
        return tuple(c.m for c in self.components)

    @property
    def sigma2(self) -> tuple[float, ...]:
        return tuple(c.sigma2 for c in self.components)

    @property
    def M(self) -> float:
        return min(c.M for c in self.components)

    def __call__(self, *xi):
        return sum(c(x) for c, x in zip(self.components, xi))


@dataclass(frozen=True)
class LaurentResidue:
    """Polynomial correction ``chi`` of an approximation scheme.

    One-dimensional residues are ``sum_k b_k (e^{i xi}-1)^k +
    sum_k c_k (e^{-i xi}-1)^k`` with ``b = (b_0, ..., b_r)`` and
    ``c = (c_1, ..., c_r)``.  Two-dimensional residues are a map from
    multi-indices ``alpha`` to the coefficient of
    ``prod_i (e^{i xi_i}-1)^{alpha_i}``.
    """

    dimension: int = 1
    b: tuple[float, ...] = (1.0,)
    c: tuple[float, ...] = ()
    coeffs: tuple[tuple[tuple[int, ...], float], ...] = ()

    @classmethod
    def one(cls, dimension: int = 1) -> "LaurentResidue":
        if dimension == 1:
            return cls()
        return cls.multi({(0,) * dimension: 1.0})

    @classmethod
    def polynomial(cls, b: Sequence[float], c: Sequence[float] = ()) -> "LaurentResidue":
        return cls(1, tuple(float(x) for x in b), tuple(float(x) for x in c))

    @classmethod
    def multi(cls, coeffs: Mapping[tuple[int, ...], float]) -> "LaurentResidue":
        items = tuple(sorted((tuple(int(a) for a in k), float(v)) for k, v in coeffs.items()))
        dims = {len(k) for k, _ in items}
        if len(dims) != 1:
            raise ValueError("multi-indices must share one length")
        return cls(dims.pop(), (), (), items)

    @property
    def constant_term(self) -> float:
        if self.dimension == 1:
            return self.b[0] if self.b else 0.0
        return dict(self.coeffs).get((0,) * self.dimension, 0.0)

    @property
    def degree(self) -> int:
        if self.dimension == 1:
            return max(len(self.b) - 1, len(self.c))
        return max((sum(k) for k, v in self.coeffs if v != 0), default=0)

    def __call__(self, *xi):
        if self.dimension == 1:
            x = np.asarray(xi[0], dtype=float)
            u, v = np.exp(1j * x) - 1.0, np.exp(-1j * x) - 1.0
            out = sum(bk * u**k for k, bk in enumerate(self.b))
            out = out + sum(ck * v ** (k + 1) for k, ck in enumerate(self.c))
            return out
        xs = [np.asarray(x, dtype=float) for x in xi]
        us = [np.exp(1j * x) - 1.0 for x in xs]
        return sum(v * np.prod([u**a for u, a in zip(us, k)], axis=0) for k, v in self.coeffs)


def _binomial_row(k: int, sign: int = 1) -> tuple[np.ndarray, int]:
    """Atoms of ``(e^{sign i xi} - 1)^k`` as (weights, offset)."""
    row = np.array([(-1) ** (k - l) * math.comb(k, l) for l in range(k + 1)], dtype=float)
    if sign > 0:
        return row, 0
    return row[::-1].copy(), -k


def residue_atoms(residue: LaurentResidue) -> SignedLatticeMeasure:
    """Finitely supported signed measure whose transform is ``residue``."""
    if residue.dimension == 1:
        r = residue.degree
        w = np.zeros(2 * r + 1)
        for k, bk in enumerate(residue.b):
            row, off = _binomial_row(k, +1)
            w[r + off : r + off + k + 1] += bk * row
        for k, ck in enumerate(residue.c, start=1):
            row, off = _binomial_row(k, -1)
            w[r + off : r + off + k + 1] += ck * row
        return SignedLatticeMeasure.from_weights(w, -r)
    d = residue.dimension
    # size by the largest index present, zero coefficients included
    r = max((max(k) for k, _ in residue.coeffs), default=0)
    w = np.zeros((r + 1,) * d)
    for alpha, v in residue.coeffs:
        block = np.array(v)
        for a in alpha:
            block = np.multiply.outer(block, _binomial_row(a)[0])
        w[tuple(slice(0, a + 1) for a in alpha)] += block
    return SignedLatticeMeasure.from_weights(w, (0,) * d)


# ----------------------------------------------------------------------
# Compound Poisson laws and schemes
# ----------------------------------------------------------------------


def _poisson_cutoff(mu: float, tol: float) -> int:
    """Smallest m with P[Pois(mu) > m] < tol.

    A Chernoff bound gives a safe starting point; the exact survival
    function then walks the cut-off down to the smallest valid index.
    """
    if mu == 0.0:
        return 0
    # Chernoff: P[X >= mu + t] <= exp(-t^2 / (2 (mu + t/3)))
    log_tol = -math.log(tol)
    t = log_tol / 3 + math.sqrt((log_tol / 3) ** 2 + 2 * mu * log_tol)
    hi = int(math.ceil(mu + t)) + 1
    while stats.poisson.sf(hi, mu) >= tol:
        hi *= 2
    lo = 0
    while lo < hi:
        mid = (lo + hi) // 2
        if stats.poisson.sf(mid, mu) < tol:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _check_tol(tol: float):
    if not (0.0 < tol <= 1e-3):
        raise ValueError("tol must lie in (0, 1e-3]")


def _compound_poisson_1d(exponent: LevyExponent, lam: float, tol: float) -> SignedLatticeMeasure:
    rate = exponent.total_rate
    mu = lam * rate
    mmax = _poisson_cutoff(mu, tol)
    tail = float(stats.poisson.sf(mmax, mu))
    jmin = min(j for j, _ in exponent.jumps)
    jmax = max(j for j, _ in exponent.jumps)
    jump = np.zeros(jmax - jmin + 1)
    for j, c in exponent.jumps:
        jump[j - jmin] = c / rate
    pm = stats.poisson.pmf(np.arange(mmax + 1), mu)
    if jmin == jmax == 1:
        # the m-fold jump law is the point mass at m
        return SignedLatticeMeasure.from_weights(pm, 0, tail)
    lo = min(0, jmin * mmax)
    hi = max(0, jmax * mmax)
    out = np.zeros(hi - lo + 1)
    power = np.array([1.0])  # jump law to the m-th convolution power
    for m in range(mmax + 1):
        start = m * jmin - lo
        out[start : start + power.size] += pm[m] * power
        power = np.convolve(power, jump)
    return SignedLatticeMeasure.from_weights(out, lo, tail)


def compound_poisson_measure(exponent, lam: float, tol: float = 1e-14) -> SignedLatticeMeasure:
    """Law with Fourier transform ``exp(lam * phi(xi))``.

    For a factorized multi-dimensional exponent the law is the product of
    the coordinate laws.
    """
    _check_tol(tol)
    if lam < 0 or not math.isfinite(lam):
        raise ValueError("lambda must be a finite non-negative number")
    if lam == 0:
        return dirac(0 if exponent.dimension == 1 else (0,) * exponent.dimension)
    if isinstance(exponent, LevyExponent):
        return _compound_poisson_1d(exponent, lam, tol)
    parts = [_compound_poisson_1d(c, lam, tol) for c in exponent.components]
    w = parts[0].weights
    for p in parts[1:]:
        w = np.multiply.outer(w, p.weights)
    tm = 1.0 - math.prod(1.0 - p.truncated_mass for p in parts)
    off = tuple(p.offset[0] for p in parts)
    return SignedLatticeMeasure.from_weights(w, off, tm)


def poisson_measure(lam: float, tol: float = 1e-14) -> SignedLatticeMeasure:
    return compound_poisson_measure(LevyExponent.poisson(), lam, tol)


def scheme_measure(exponent, lam: float, residue: LaurentResidue, tol: float = 1e-14):
    """Signed measure with transform ``exp(lam * phi) * chi``."""
    if residue.dimension != exponent.dimension:
        raise DimensionError("residue and exponent dimensions differ")
    if abs(residue.constant_term - 1.0) > 1e-12:
        raise ValueError("residue must satisfy chi(0) = 1")
    return convolve(compound_poisson_measure(exponent, lam, tol), residue_atoms(residue))


def charlier_scheme_values(lam: float, beta: float, r: int, k) -> np.ndarray | float:
    """Correction ``beta * Delta^{r+1}`` applied to the Poisson weight at ``k``.

    Equals ``beta * Pois_lam(k) * sum_l (-1)^{r+1-l} C(r+1, l) lam^{-l} k!/(k-l)!``
    with ``l <= min(r+1, k)``; adding it to the Poisson law gives the scheme
    with residue ``1 + beta (e^{i xi} - 1)^{r+1}``.
    """
    if lam <= 0 or r < 0:
        raise ValueError("need lam > 0 and r >= 0")
    ks = np.atleast_1d(np.asarray(k, dtype=np.int64))
    if (ks < 0).any():
        raise ValueError("k must be non-negative")
    base = stats.poisson.pmf(ks, lam)
    total = np.zeros(ks.shape)
    for l in range(r + 2):
        falling = np.ones(ks.shape)  # k!/(k-l)!, zero when l > k
        for i in range(l):
            falling = falling * (ks - i)
        total += (-1) ** (r + 1 - l) * math.comb(r + 1, l) * lam ** (-l) * falling
    out = beta * base * total
    return float(out[0]) if np.ndim(k) == 0 else out


# ----------------------------------------------------------------------
# Distances
# ----------------------------------------------------------------------


def _aligned(a: SignedLatticeMeasure, b: SignedLatticeMeasure):
    """Difference ``a - b`` on the union window, plus its offset."""
    _check_same_dim(a, b)
    lo = [min(x, y) for x, y in zip(a.offset, b.offset)]
    hi = [
        max(oa + sa, ob + sb)
        for oa, sa, ob, sb in zip(a.offset, a.weights.shape, b.offset, b.weights.shape)
    ]
    diff = np.zeros([h - l for l, h in zip(lo, hi)])
    for m, sign in ((a, 1.0), (b, -1.0)):
        sl = tuple(slice(o - l, o - l + s) for o, l, s in zip(m.offset, lo, m.weights.shape))
        diff[sl] += sign * m.weights
    return diff, tuple(lo)


def error_bar(a: SignedLatticeMeasure, b: SignedLatticeMeasure) -> float:
    """Certified slack on any distance between ``a`` and ``b``."""
    return a.truncated_mass + b.truncated_mass


def distance_local(a: SignedLatticeMeasure, b: SignedLatticeMeasure) -> float:
    """``sup_k |a({k}) - b({k})|``."""
    diff, _ = _aligned(a, b)
    return float(np.abs(diff).max())


def distance_kolmogorov(a: SignedLatticeMeasure, b: SignedLatticeMeasure) -> float:
    """``sup_k |a([k, inf)) - b([k, inf))|`` for one-dimensional measures."""
    if a.dimension != 1 or b.dimension != 1:
        raise DimensionError("the Kolmogorov distance is defined on Z only")
    diff, _ = _aligned(a, b)
    tails = np.cumsum(diff[::-1])[::-1]
    return float(np.abs(tails).max())


def distance_tv(a: SignedLatticeMeasure, b: SignedLatticeMeasure) -> float:
    """``sum_k |a({k}) - b({k})|`` (twice the usual total variation)."""
    diff, _ = _aligned(a, b)
    return float(math.fsum(np.abs(diff).ravel()))


# ----------------------------------------------------------------------
# Fourier side
# ----------------------------------------------------------------------


def default_grid_size(width: int) -> int:
    """Next power of two that is at least ``2 * width``."""
    return 1 << max(0, int(2 * width - 1).bit_length())


def _grid_sizes(m: SignedLatticeMeasure, N) -> tuple[int, ...]:
    if N is None:
        return tuple(default_grid_size(s) for s in m.weights.shape)
    if isinstance(N, (int, np.integer)):
        return (int(N),) * m.dimension
    return tuple(int(n) for n in N)


def fourier_sample(m: SignedLatticeMeasure, N=None) -> np.ndarray:
    """Values of ``m_hat`` at ``xi = 2 pi j / N`` for ``j = 0..N-1`` (per axis)."""
    sizes = _grid_sizes(m, N)
    if any(n < s for n, s in zip(sizes, m.weights.shape)):
        raise ValueError("grid smaller than the support width would alias")
    buf = np.zeros(sizes)
    idx = np.ix_(*[(np.arange(s) + o) % n for s, o, n in zip(m.weights.shape, m.offset, sizes)])
    np.add.at(buf, idx, m.weights)
    return np.fft.ifftn(buf) * float(np.prod(sizes))


def wiener_norm(samples) -> float:
    """``sum_n |c_n|`` for the Fourier coefficients recovered from grid samples."""
    s = np.asarray(samples, dtype=complex)
    coeffs = np.fft.fftn(s) / s.size
    return float(math.fsum(np.abs(coeffs).ravel()))
