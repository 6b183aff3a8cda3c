"""Group comparison pipeline: ingest, reduce, fit, and compare.

Given several groups of column-aligned observations (e.g. one price matrix
per market, days as rows and tickers as columns), produce the full pairwise
distance matrix between fitted distributions, either by

* the PCA path: reduce the first group of an ordered pair with the
  increment-rounding retention rule, force the second group to the same
  component count, and fall back to a random projection when the counts
  still differ (the resulting matrix is generally asymmetric and is always
  reported in full), or
* the random-projection path: project every group to one common dimension
  with a per-iteration seeded Gaussian map (groups sharing a source
  dimension share the map), repeated over several iterations whose spread
  is part of the output.

Fits: multivariate normal with diagonal shrinkage; truncated multivariate
normal assembled from per-column truncated fits plus the sample
correlation; or per-column moment-matched discrete approximations whose
product-form overlap factorizes across columns.

Raw levels are compared by default; a log-return transform is opt-in.
Everything is deterministic given the run seed, and pairwise comparisons
can fan out over threads (``DISTSIM_THREADS``) without changing results.
"""

from __future__ import annotations

import csv
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize

from .core import (
    DistanceMatrix,
    GaussianMulti,
    SampleMatrix,
    TruncGaussianMulti,
    TruncGaussianUni,
)
from .divergence import DivergenceValue
from .errors import (
    DegenerateData,
    DimensionMismatch,
    DomainError,
    EmptyAfterCleaning,
    InvalidDistribution,
    ParseError,
)
from .gaussian import bc_mvn, bc_truncated_mvn
from .approx import moment_match
from .quadrature import QuadConfig, std_normal_cdf
from .reduce import jl_min_dimension, jl_project, pca_reduce

__all__ = [
    "GroupDataset",
    "RunConfig",
    "ComparisonResult",
    "load_group",
    "estimate_mvn",
    "estimate_truncated_uni",
    "compare_groups",
]

#: shrinkage ladder tried (in order) until the covariance is well conditioned.
SHRINKAGE_LADDER = (0.0, 0.01, 0.05, 0.1, 0.25)
#: covariance condition number accepted by the estimators.
MAX_COND = 1e10
#: tokens treated as missing values when loading CSVs.
_NA_TOKENS = {"", "na", "nan", "null", "none", "n/a"}

_ENV_THREADS = "DISTSIM_THREADS"


@dataclass(frozen=True, eq=False)
class GroupDataset:
    """A named group: observations as rows, at least two variables."""

    name: str
    data: SampleMatrix

    def __post_init__(self):
        if not self.name:
            raise DomainError("group name must be nonempty")
        if self.data.n_vars < 2:
            raise InvalidDistribution("a group needs at least 2 variables")


@dataclass(frozen=True)
class RunConfig:
    """Settings for one comparison run; mirrors the JSON config file.

    ``method`` selects the reduction path. The projection dimension comes
    from ``k`` when given, otherwise from the distortion budget ``epsilon``
    and the row count. ``fit`` is one of ``mvn``, ``truncated``,
    ``discrete``; ``bounds`` applies to the truncated fit and is either
    ``"observed_range"`` or a fixed ``(lower, upper)`` pair.
    """

    method: str = "jl"
    sig_digits: int = 3
    epsilon: float | None = None
    k: int | None = None
    fit: str = "mvn"
    bounds: object = "observed_range"
    n_nodes: int = 3
    iterations: int = 1
    seed: int = 0
    shrinkage: float = 0.0
    log_returns: bool = False
    mc_samples: int = 200_000
    out_dir: str | None = None

    def __post_init__(self):
        if self.method not in ("pca", "jl"):
            raise DomainError(f"method must be 'pca' or 'jl', got {self.method!r}")
        if self.fit not in ("mvn", "truncated", "discrete"):
            raise DomainError(f"unknown fit {self.fit!r}")
        if self.iterations < 1:
            raise DomainError("iterations must be >= 1")
        if not 0.0 <= self.shrinkage < 1.0:
            raise DomainError("shrinkage must be in [0, 1)")
        if self.sig_digits < 1:
            raise DomainError("sig_digits must be >= 1")
        if self.n_nodes < 1:
            raise DomainError("n_nodes must be >= 1")
        if self.method == "jl" and self.k is None and self.epsilon is None:
            raise DomainError("the jl method needs either k or epsilon")
        if not isinstance(self.bounds, str):
            object.__setattr__(self, "bounds", tuple(float(x) for x in self.bounds))
        elif self.bounds != "observed_range":
            raise DomainError("bounds must be 'observed_range' or a (lower, upper) pair")

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "sig_digits": self.sig_digits,
            "epsilon": self.epsilon,
            "k": self.k,
            "fit": self.fit,
            "bounds": (self.bounds if isinstance(self.bounds, str)
                       else list(self.bounds)),
            "n_nodes": self.n_nodes,
            "iterations": self.iterations,
            "seed": self.seed,
            "shrinkage": self.shrinkage,
            "log_returns": self.log_returns,
            "mc_samples": self.mc_samples,
            "out_dir": self.out_dir,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise DomainError(f"unknown config fields: {sorted(unknown)}")
        if isinstance(d.get("bounds"), list):
            d = {**d, "bounds": tuple(d["bounds"])}
        return cls(**d)


@dataclass(frozen=True)
class ComparisonResult:
    """Per-iteration distance matrices with a cross-iteration summary.

    ``pair_summary`` maps ``"A->B"`` to mean/min/max distance across
    iterations; ``argmin_pairs`` lists the closest pair in each iteration;
    ``notes`` records every silent-looking decision (shrinkage raised,
    dimensions rebalanced) in plain words.
    """

    labels: tuple[str, ...]
    matrices: tuple[DistanceMatrix, ...]
    pair_summary: dict
    argmin_pairs: tuple[tuple[str, str], ...]
    config: RunConfig
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "labels": list(self.labels),
            "iterations": [
                {"iteration": i, "matrix": m.to_dict()["matrix"]}
                for i, m in enumerate(self.matrices)
            ],
            "pair_summary": self.pair_summary,
            "argmin_pairs": [list(p) for p in self.argmin_pairs],
            "notes": list(self.notes),
        }


def load_group(path, name: str) -> GroupDataset:
    """Load one group from CSV (header row = column labels).

    Cells holding NA-like tokens count as missing; any column containing a
    missing value is dropped with a warning (row count is preserved). A
    cell that is neither numeric nor NA-like raises :class:`ParseError`
    naming the row and column.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ParseError(f"{path}: need a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    n_cols = len(header)
    body = np.empty((len(rows) - 1, n_cols))
    missing = np.zeros(n_cols, dtype=bool)
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != n_cols:
            raise ParseError(f"{path}: row {r} has {len(row)} cells, expected {n_cols}")
        for c, cell in enumerate(row):
            token = cell.strip()
            if token.lower() in _NA_TOKENS:
                body[r - 2, c] = np.nan
                missing[c] = True
                continue
            try:
                value = float(token)
            except ValueError:
                raise ParseError(
                    f"{path}: non-numeric cell {cell!r} at row {r}, "
                    f"column {header[c]!r}"
                ) from None
            if not math.isfinite(value):
                body[r - 2, c] = np.nan
                missing[c] = True
            else:
                body[r - 2, c] = value
    if missing.any():
        dropped = [header[i] for i in range(n_cols) if missing[i]]
        warnings.warn(
            f"{path}: dropped {len(dropped)} column(s) with missing values: "
            f"{', '.join(dropped[:8])}{'...' if len(dropped) > 8 else ''}",
            stacklevel=2,
        )
    keep = ~missing
    if not keep.any():
        raise EmptyAfterCleaning(f"{path}: every column had missing values")
    return GroupDataset(name, SampleMatrix(
        body[:, keep], tuple(h for h, k in zip(header, keep) if k)
    ))


def estimate_mvn(data: SampleMatrix, shrinkage: float = 0.0,
                 ) -> tuple[GaussianMulti, float]:
    """Column means and shrunk sample covariance; returns (fit, shrinkage used).

    The covariance is ``(1 - lam) * S + lam * avg_var * I``. If the
    requested ``lam`` leaves the matrix with condition number at or above
    1e10, the smallest larger ladder value that fixes it is used instead
    (the caller should surface the returned value in run metadata).
    """
    values = np.asarray(data.values, dtype=float)
    if values.shape[0] < 2:
        raise DegenerateData("need at least two observations")
    mean = values.mean(axis=0)
    cov = np.cov(values, rowvar=False, ddof=1)
    cov = np.atleast_2d(cov)
    avg_var = float(np.mean(np.diag(cov)))
    if avg_var <= 0.0:
        raise DegenerateData("all columns are constant")
    eye = np.eye(cov.shape[0])
    for lam in sorted({shrinkage, *[x for x in SHRINKAGE_LADDER if x >= shrinkage]}):
        shrunk = (1.0 - lam) * cov + lam * avg_var * eye
        eigvals = np.linalg.eigvalsh(shrunk)
        if eigvals.min() > 0 and eigvals.max() / eigvals.min() < MAX_COND:
            return GaussianMulti(mean, shrunk), lam
    raise DegenerateData(
        "covariance stayed ill-conditioned through the shrinkage ladder"
    )


def _trunc_moments(mu: float, sigma: float, lo: float, hi: float) -> tuple[float, float]:
    alpha = (lo - mu) / sigma
    beta = (hi - mu) / sigma
    z = std_normal_cdf(beta) - std_normal_cdf(alpha)

    def pdf(x):
        return 0.0 if math.isinf(x) else math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)

    def x_pdf(x):
        return 0.0 if math.isinf(x) else x * pdf(x)

    d1 = (pdf(alpha) - pdf(beta)) / z
    mean = mu + sigma * d1
    var = sigma * sigma * (1.0 + (x_pdf(alpha) - x_pdf(beta)) / z - d1 * d1)
    return mean, var


def estimate_truncated_uni(column, bounds="observed_range") -> TruncGaussianUni:
    """Fit a truncated normal to one column by matching mean and variance.

    ``bounds`` is ``"observed_range"`` (data min/max) or a fixed
    ``(lower, upper)`` pair, possibly infinite. The location/scale pair is
    solved so the truncated distribution reproduces the sample mean and
    variance to 1e-6; if the solver fails, the untruncated sample moments
    are used with a warning.
    """
    x = np.asarray(column, dtype=float).ravel()
    if x.size < 10:
        raise DomainError("need at least 10 observations")
    if not np.all(np.isfinite(x)):
        raise DomainError("observations must be finite")
    s_mean = float(x.mean())
    s_var = float(x.var(ddof=1))
    if s_var <= 0.0:
        raise DegenerateData("column is constant")
    if bounds == "observed_range":
        lo, hi = float(x.min()), float(x.max())
        # widen a hair so the extreme observations stay interior
        pad = 1e-9 * max(hi - lo, 1.0)
        lo, hi = lo - pad, hi + pad
    else:
        lo, hi = float(bounds[0]), float(bounds[1])
        if not lo < hi:
            raise DomainError("fixed bounds must satisfy lower < upper")
    if math.isinf(lo) and math.isinf(hi):
        return TruncGaussianUni(s_mean, s_var, lo, hi)

    scale = math.sqrt(s_var)

    def residual(params):
        mu, log_sigma = params
        sigma = math.exp(log_sigma)
        m, v = _trunc_moments(mu, sigma, lo, hi)
        return [(m - s_mean) / scale, (v - s_var) / s_var]

    sol = optimize.root(residual, x0=[s_mean, math.log(scale)], method="hybr",
                        options={"xtol": 1e-12})
    if sol.success and max(abs(r) for r in residual(sol.x)) < 1e-6:
        mu, sigma = float(sol.x[0]), math.exp(float(sol.x[1]))
        return TruncGaussianUni(mu, sigma * sigma, lo, hi)
    warnings.warn(
        "truncated-normal moment solve failed; falling back to untruncated "
        "sample moments",
        stacklevel=2,
    )
    return TruncGaussianUni(s_mean, s_var, lo, hi)


def _fit_truncated_mvn(matrix: np.ndarray, bounds) -> TruncGaussianMulti:
    """Per-column truncated fits tied together by the sample correlation."""
    k = matrix.shape[1]
    fits = [estimate_truncated_uni(matrix[:, j], bounds) for j in range(k)]
    sds = np.array([f.sigma for f in fits])
    corr = np.corrcoef(matrix, rowvar=False)
    corr = np.atleast_2d(corr)
    for lam in SHRINKAGE_LADDER:
        shrunk = (1.0 - lam) * corr + lam * np.eye(k)
        eigvals = np.linalg.eigvalsh(shrunk)
        if eigvals.min() > 0 and eigvals.max() / eigvals.min() < MAX_COND:
            cov = shrunk * np.outer(sds, sds)
            return TruncGaussianMulti(
                np.array([f.mu for f in fits]), cov,
                np.array([f.lower for f in fits]),
                np.array([f.upper for f in fits]),
            )
    raise DegenerateData("sample correlation stayed singular through the ladder")


def _fit_discrete(matrix: np.ndarray, n_nodes: int):
    """Per-column moment-matched discrete approximations (empirical moments)."""
    blocks = []
    for j in range(matrix.shape[1]):
        col = matrix[:, j]
        moms = np.array([np.mean(col ** p) for p in range(2 * n_nodes)])
        blocks.append(moment_match(moms, n_nodes))
    return blocks


def _discrete_distance(blocks_a, blocks_b) -> float:
    """Overlap distance of two product-form discrete fits.

    Cells are aligned by index, so the coefficient factorizes into the
    product of per-column coefficients.
    """
    rho = 1.0
    for da, db in zip(blocks_a, blocks_b):
        rho *= float(np.sqrt(da.weights * db.weights).sum())
    return DivergenceValue.from_coefficient(min(rho, 1.0)).distance


def _log_returns(values: np.ndarray) -> np.ndarray:
    if np.any(values <= 0):
        raise DomainError("log returns need strictly positive levels")
    return np.log(values[1:] / values[:-1])


def _thread_count() -> int:
    raw = os.environ.get(_ENV_THREADS, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


class _Fitter:
    """Fits reduced matrices and computes distances per the run config."""

    def __init__(self, cfg: RunConfig, quad_seed: int, notes: list[str]):
        self.cfg = cfg
        self.quad = QuadConfig(seed=quad_seed, mc_samples=cfg.mc_samples)
        self.notes = notes

    def fit(self, name: str, matrix: np.ndarray):
        if self.cfg.fit == "mvn":
            dist, lam = estimate_mvn(SampleMatrix(matrix), self.cfg.shrinkage)
            if lam > self.cfg.shrinkage:
                self.notes.append(f"{name}: shrinkage raised to {lam}")
            return dist
        if self.cfg.fit == "truncated":
            return _fit_truncated_mvn(matrix, self.cfg.bounds)
        return _fit_discrete(matrix, self.cfg.n_nodes)

    def distance(self, fit_a, fit_b) -> float:
        if self.cfg.fit == "mvn":
            return bc_mvn(fit_a, fit_b).distance
        if self.cfg.fit == "truncated":
            return bc_truncated_mvn(fit_a, fit_b, self.quad).distance
        return _discrete_distance(fit_a, fit_b)


def _jl_iteration(groups, cfg: RunConfig, k: int, iter_seed: np.random.SeedSequence,
                  fitter: _Fitter) -> np.ndarray:
    """One projection round: one map per source dimension, one fit per group."""
    g = len(groups)
    maps: dict[int, int] = {}
    fits = []
    for grp in groups:
        d = grp.data.n_vars
        if d not in maps:
            maps[d] = np.random.SeedSequence(
                entropy=iter_seed.entropy, spawn_key=iter_seed.spawn_key + (d,)
            ).generate_state(1)[0]
        projected = jl_project(grp.data, k, maps[d])
        fits.append(fitter.fit(grp.name, np.asarray(projected.values)))

    values = np.zeros((g, g))
    pairs = [(i, j) for i in range(g) for j in range(i + 1, g)]

    def one(pair):
        i, j = pair
        return fitter.distance(fits[i], fits[j])

    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, pairs))
    else:
        results = [one(p) for p in pairs]
    for (i, j), dist in zip(pairs, results):
        values[i, j] = values[j, i] = dist
    return values


def _pca_iteration(groups, cfg: RunConfig, iter_seed: np.random.SeedSequence,
                   fitter: _Fitter) -> np.ndarray:
    g = len(groups)
    reduced: list[tuple[np.ndarray, int]] = []
    for grp in groups:
        red, kept = pca_reduce(grp.data, significant_digits=cfg.sig_digits,
                               return_truncated=True, transpose_if_needed=False)
        reduced.append((np.asarray(red.values), kept))

    values = np.zeros((g, g))
    pairs = [(i, j) for i in range(g) for j in range(g) if i != j]

    def one(pair):
        i, j = pair
        base_i, kept_i = reduced[i]
        other, kept_j = pca_reduce(groups[j].data, component_count=kept_i,
                                   return_truncated=True, transpose_if_needed=False)
        other = np.asarray(other.values)
        lead = base_i
        if kept_j < kept_i:
            seed = np.random.SeedSequence(
                entropy=iter_seed.entropy,
                spawn_key=iter_seed.spawn_key + (7, i, j),
            ).generate_state(1)[0]
            lead = np.asarray(jl_project(lead, kept_j, seed))
            fitter.notes.append(
                f"{groups[i].name}->{groups[j].name}: first group projected "
                f"from {kept_i} to {kept_j} columns to match the second"
            )
        fit_i = fitter.fit(groups[i].name, lead)
        fit_j = fitter.fit(groups[j].name, other)
        return fitter.distance(fit_i, fit_j)

    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, pairs))
    else:
        results = [one(p) for p in pairs]
    for (i, j), dist in zip(pairs, results):
        values[i, j] = dist
    return values


def compare_groups(groups: Sequence[GroupDataset], cfg: RunConfig) -> ComparisonResult:
    """Full pairwise distance matrices for every iteration, plus a summary.

    All groups must share the observation count. The random-projection path
    yields one symmetric matrix per iteration; the PCA path yields one
    (generally asymmetric) matrix, identical across iterations unless a
    seeded projection had to rebalance dimensions.
    """
    if len(groups) < 2:
        raise DomainError("need at least two groups")
    names = [g.name for g in groups]
    if len(set(names)) != len(names):
        raise DomainError("group names must be unique")
    t_counts = {g.data.n_obs for g in groups}
    if len(t_counts) != 1:
        raise DimensionMismatch(f"groups disagree on observation count: {t_counts}")

    if cfg.log_returns:
        groups = [
            GroupDataset(g.name, SampleMatrix(_log_returns(np.asarray(g.data.values)),
                                              g.data.labels))
            for g in groups
        ]

    t_obs = groups[0].data.n_obs
    notes: list[str] = []
    if cfg.method == "jl":
        k = cfg.k if cfg.k is not None else jl_min_dimension(t_obs, cfg.epsilon)
        if cfg.k is None:
            notes.append(f"projection dimension {k} derived from epsilon={cfg.epsilon}")
    else:
        k = None

    root = np.random.SeedSequence(cfg.seed)
    iter_seeds = root.spawn(cfg.iterations)
    matrices = []
    argmins = []
    for it in range(cfg.iterations):
        fitter = _Fitter(cfg, int(iter_seeds[it].generate_state(1)[0]), notes)
        if cfg.method == "jl":
            values = _jl_iteration(groups, cfg, k, iter_seeds[it], fitter)
            sym = True
        else:
            values = _pca_iteration(groups, cfg, iter_seeds[it], fitter)
            sym = False
        matrices.append(DistanceMatrix(tuple(names), values, symmetric=sym))
        off = values + np.diag(np.full(len(names), math.inf))
        i, j = np.unravel_index(int(np.argmin(off)), off.shape)
        argmins.append((names[i], names[j]))

    summary = {}
    for i, a in enumerate(names):
        for j, b in enumerate(names):
            if i == j:
                continue
            dists = [m.values[i, j] for m in matrices]
            summary[f"{a}->{b}"] = {
                "mean": float(np.mean(dists)),
                "min": float(np.min(dists)),
                "max": float(np.max(dists)),
            }
    # dedupe and sort so threaded runs emit identical metadata
    canonical_notes = tuple(sorted(set(notes)))
    return ComparisonResult(tuple(names), tuple(matrices), summary,
                            tuple(argmins), cfg, canonical_notes)
