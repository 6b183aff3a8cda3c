"""Density approximation tools.

Two families live here:

* The scale-mixture density of ``U = X * exp(Y)`` with ``X ~ N(0, 1/k)``
  independent of ``Y ~ N(mu_Y, sigma_Y^2)`` -- the law of one coordinate of
  log-normal data pushed through a Gaussian random projection -- and the
  numeric convolution of several such coordinates into the density of their
  sum. The density is

      f(u) = sqrt(k) / (2 pi sigma_Y) *
             integral exp(-y - k u^2 / (2 e^(2y)) - (y - mu_Y)^2 / (2 sigma_Y^2)) dy

  which degenerates to the plain ``N(0, 1/k)`` density at ``sigma_Y = 0``.

* Discrete approximations that match the first ``2N - 1`` raw moments of a
  target density with ``N`` node/weight pairs, built by turning the moment
  sequence into orthogonal-polynomial recurrence coefficients (Hankel
  Cholesky) and solving the symmetric tridiagonal eigenproblem. A damped
  least-squares polish handles near-degenerate moment sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import least_squares

from .core import DiscreteDist
from .errors import (
    DomainError,
    GridTooCoarse,
    InvalidDistribution,
    MomentMatrixNotPD,
    NonConvergence,
)
from .quadrature import DEFAULT_CONFIG, QuadConfig, integrate_1d

__all__ = [
    "NLNComponent",
    "GridDensity",
    "DiscreteApprox",
    "nln_density",
    "nln_sum_density",
    "moment_match",
]

#: integration range for the mixing variable, in its own standard deviations.
_MIX_RANGE_SIGMAS = 10.0
#: default grid resolution and half-span (in combined standard deviations).
DEFAULT_GRID_POINTS = 4096
DEFAULT_GRID_SPAN = 12.0


@dataclass(frozen=True)
class NLNComponent:
    """One projected coordinate: ``X * exp(Y)`` with ``X ~ N(0, 1/k)``."""

    k: int
    mu_y: float
    sigma_y: float

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("k must be >= 1")
        if self.sigma_y < 0:
            raise DomainError("sigma_y must be >= 0")

    @property
    def variance(self) -> float:
        """``Var(X e^Y) = E[e^(2Y)] / k``."""
        return math.exp(2.0 * self.mu_y + 2.0 * self.sigma_y ** 2) / self.k


@dataclass(frozen=True, eq=False)
class GridDensity:
    """Density sampled on an equally spaced grid.

    ``mass_tol`` bounds how far the trapezoid mass may sit from 1; grid
    products of numeric convolutions use a looser budget than analytically
    sampled densities.
    """

    x: np.ndarray
    values: np.ndarray
    mass_tol: float = 1e-6

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 2:
            raise InvalidDistribution("x and values must be matching 1-D arrays")
        steps = np.diff(x)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise InvalidDistribution("grid must be equally spaced")
        if np.any(v < 0):
            raise InvalidDistribution("density values must be >= 0")
        mass = float(np.trapezoid(v, x))
        if abs(mass - 1.0) > self.mass_tol:
            raise GridTooCoarse(
                f"grid mass {mass!r} deviates from 1 beyond {self.mass_tol}"
            )
        for name, arr in (("x", x), ("values", v)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def spacing(self) -> float:
        return float(self.x[1] - self.x[0])

    def mass(self) -> float:
        return float(np.trapezoid(self.values, self.x))

    def to_csv(self, path) -> None:
        """Two-column CSV (abscissa, density) for external plotting."""
        np.savetxt(path, np.column_stack([self.x, self.values]),
                   delimiter=",", header="x,density", comments="")


def _gaussian_pdf(u: np.ndarray, variance: float) -> np.ndarray:
    return np.exp(-0.5 * u * u / variance) / math.sqrt(2.0 * math.pi * variance)


def nln_density(u: float, comp: NLNComponent,
                cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """Density of ``X exp(Y)`` at ``u``; symmetric in ``u``.

    The mixing integral runs over ``mu_y +- 10 sigma_y`` (tail mass below
    8e-24). At ``sigma_y = 0`` the exact ``N(0, 1/k)`` density is returned.
    """
    if comp.sigma_y == 0.0:
        return float(_gaussian_pdf(np.asarray(float(u)), 1.0 / comp.k))
    k, mu, sig = comp.k, comp.mu_y, comp.sigma_y
    u2 = float(u) * float(u)

    def integrand(y: float) -> float:
        expo = -y - k * u2 / (2.0 * math.exp(2.0 * y)) - (y - mu) ** 2 / (2.0 * sig * sig)
        return math.exp(expo)

    lo = mu - _MIX_RANGE_SIGMAS * sig
    hi = mu + _MIX_RANGE_SIGMAS * sig
    integral = integrate_1d(integrand, lo, hi, cfg).value
    return math.sqrt(k) / (2.0 * math.pi * sig) * integral


def _component_on_grid(xs: np.ndarray, comp: NLNComponent,
                       cfg: QuadConfig) -> np.ndarray:
    if comp.sigma_y == 0.0:
        return _gaussian_pdf(xs, 1.0 / comp.k)
    half = xs[xs >= 0.0]
    vals = np.fromiter((nln_density(x, comp, cfg) for x in half),
                       dtype=float, count=half.size)
    out = np.empty_like(xs)
    out[xs >= 0.0] = vals
    neg = xs < 0.0
    out[neg] = np.interp(-xs[neg], half, vals)
    return out


def nln_sum_density(comps: list[NLNComponent],
                    n_points: int = DEFAULT_GRID_POINTS,
                    span_sigmas: float = DEFAULT_GRID_SPAN,
                    cfg: QuadConfig = DEFAULT_CONFIG) -> GridDensity:
    """Density of the sum of independent mixture coordinates on a grid.

    Each component is sampled on a common grid spanning ``span_sigmas``
    combined standard deviations and the sum density is built by pairwise
    discrete convolution. Raises :class:`GridTooCoarse` when more than 1e-4
    of probability mass is lost to the grid.
    """
    if not comps:
        raise DomainError("need at least one component")
    if n_points < 16:
        raise DomainError("n_points must be >= 16")
    combined_sd = math.sqrt(sum(c.variance for c in comps))
    center = n_points // 2
    h = 2.0 * span_sigmas * combined_sd / (n_points - 1)
    xs = (np.arange(n_points) - center) * h

    dens = _component_on_grid(xs, comps[0], cfg)
    for comp in comps[1:]:
        nxt = _component_on_grid(xs, comp, cfg)
        dens = np.convolve(dens, nxt)[center:center + n_points] * h
    dens = np.maximum(dens, 0.0)
    mass = float(np.trapezoid(dens, xs))
    if abs(mass - 1.0) > 1e-4:
        raise GridTooCoarse(
            f"convolution grid retains mass {mass!r}; widen the span or refine the grid"
        )
    return GridDensity(xs, dens, mass_tol=1e-4)


@dataclass(frozen=True, eq=False)
class DiscreteApprox:
    """Node/weight pairs of a moment-matched discrete distribution."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1 or nodes.size < 1:
            raise InvalidDistribution("nodes and weights must be matching 1-D arrays")
        if np.any(np.diff(nodes) <= 0):
            raise InvalidDistribution("nodes must be strictly increasing")
        if np.any(weights < 0):
            raise InvalidDistribution("weights must be >= 0")
        if abs(float(weights.sum()) - 1.0) > 1e-10:
            raise InvalidDistribution("weights must sum to 1 within 1e-10")
        for name, arr in (("nodes", nodes), ("weights", weights)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def moment(self, j: int) -> float:
        return float(self.weights @ self.nodes ** j)

    def as_discrete_dist(self) -> DiscreteDist:
        """Weights as a category distribution (nodes become category labels)."""
        return DiscreteDist(self.weights, tuple(repr(x) for x in self.nodes))


def _moments_from_density(f, support, count: int, cfg: QuadConfig) -> np.ndarray:
    a, b = support
    moms = np.empty(count)
    for j in range(count):
        moms[j] = integrate_1d(lambda x, j=j: (x ** j) * f(x), a, b, cfg).value
    return moms


def _jacobi_from_moments(moms: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Recurrence coefficients (alpha, sqrt(beta)) via partial Hankel Cholesky.

    Uses exactly ``m_0 .. m_{2n-1}``; the (n, n) Hankel entry is never
    touched. A nonpositive pivot means the sequence is not a valid moment
    sequence of a distribution with ``n`` or more support points.
    """
    size = n + 1
    hank = np.zeros((size, size))
    for i in range(size):
        for j in range(size):
            if i + j < 2 * n:
                hank[i, j] = moms[i + j]
    scale = max(abs(moms).max(), 1.0)
    chol = np.zeros((size, size))
    for j in range(size):
        for i in range(j + 1):
            if i == n and j == n:
                continue
            s = hank[i, j] - chol[:i, i] @ chol[:i, j]
            if i == j:
                if s <= scale * 1e-14:
                    raise MomentMatrixNotPD(
                        f"moment Hankel matrix is not positive definite at order {i}"
                    )
                chol[i, j] = math.sqrt(s)
            else:
                chol[i, j] = s / chol[i, i]
    alpha = np.empty(n)
    off = np.empty(max(n - 1, 0))
    for j in range(n):
        alpha[j] = chol[j, j + 1] / chol[j, j]
        if j > 0:
            alpha[j] -= chol[j - 1, j] / chol[j - 1, j - 1]
            off[j - 1] = chol[j, j] / chol[j - 1, j - 1]
    return alpha, off


def _moment_residuals(nodes, weights, moms) -> np.ndarray:
    scale = np.maximum(np.abs(moms), 1.0)
    got = np.array([weights @ nodes ** j for j in range(moms.size)])
    return (got - moms) / scale


def moment_match(target, n_nodes: int,
                 cfg: QuadConfig = DEFAULT_CONFIG) -> DiscreteApprox:
    """Discrete distribution matching the first ``2 n_nodes - 1`` raw moments.

    ``target`` is either an explicit moment vector ``m_0 .. m_{2N-1}`` (with
    ``m_0 = 1``) or a pair ``(density, (a, b))`` whose moments are computed
    by quadrature. Matched moments are exact to 1e-8 relative; the moment of
    order ``2N`` is generally not matched.
    """
    if n_nodes < 1:
        raise DomainError("n_nodes must be >= 1")
    need = 2 * n_nodes
    if isinstance(target, tuple) and len(target) == 2 and callable(target[0]):
        f, support = target
        moms = _moments_from_density(f, support, need, cfg)
    else:
        moms = np.asarray(target, dtype=float)
        if moms.ndim != 1 or moms.size < need:
            raise DomainError(f"need {need} moments m_0..m_{need - 1}")
        moms = moms[:need]
    if not np.all(np.isfinite(moms)):
        raise DomainError("moments must be finite")
    if abs(moms[0] - 1.0) > 1e-6:
        raise DomainError(f"m_0 must be 1, got {moms[0]!r}")

    if n_nodes == 1:
        return DiscreteApprox(np.array([moms[1] / moms[0]]), np.array([1.0]))

    alpha, off = _jacobi_from_moments(moms, n_nodes)
    nodes, vecs = eigh_tridiagonal(alpha, off)
    weights = moms[0] * vecs[0] ** 2

    if np.abs(_moment_residuals(nodes, weights, moms)).max() > 1e-8:
        packed = np.concatenate([nodes, weights])
        sol = least_squares(
            lambda z: _moment_residuals(z[:n_nodes], z[n_nodes:], moms),
            packed, method="lm", xtol=1e-15, ftol=1e-15,
        )
        nodes, weights = sol.x[:n_nodes], sol.x[n_nodes:]
        order = np.argsort(nodes)
        nodes, weights = nodes[order], weights[order]
        weights = np.where(np.abs(weights) < 1e-13, 0.0, weights)
        if np.abs(_moment_residuals(nodes, weights, moms)).max() > 1e-8:
            raise NonConvergence("moment system could not be matched to 1e-8")

    weights = weights / weights.sum()
    return DiscreteApprox(nodes, weights)
