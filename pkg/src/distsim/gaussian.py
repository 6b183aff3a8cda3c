"""Closed-form overlap distances for normal and truncated normal families.

Univariate and multivariate normal distances are fully closed-form. The
truncated variants add the two truncation-normalization probabilities and
subtract the probability that a "mixture" Gaussian (precision-weighted mean
``nu``/``m``, combined scale ``varsigma``/``2S``) lands in the common
support. The common support is ``[max of lower bounds, min of upper
bounds]`` per coordinate; if it is empty the distributions share no mass
and the distance is infinite.

Log-determinants are always computed as sums of eigenvalue logarithms,
never through raw determinants, so well-conditioned but large-entry
covariances cannot overflow. Covariances with condition number above 1e12
are rejected with :class:`NotPositiveDefinite` rather than silently
regularized (shrinkage belongs to the estimation layer, not here).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    GaussianMulti,
    GaussianUni,
    MvnOverlapParams,
    OverlapParams,
    QuadResult,
    TruncGaussianMulti,
    TruncGaussianUni,
)
from .divergence import DivergenceValue
from .errors import DimensionMismatch, DomainError, NonConvergence, NotPositiveDefinite
from .quadrature import DEFAULT_CONFIG, QuadConfig, mvn_rect_prob, std_normal_cdf

__all__ = [
    "bc_normal_uni",
    "bc_mvn",
    "bc_truncated_uni",
    "bc_truncated_mvn",
    "overlap_params",
    "mvn_overlap_params",
    "TruncatedMvnTerms",
    "truncated_mvn_terms",
    "InequalityCheck",
    "truncation_inequality_holds_uni",
    "truncation_inequality_holds_mvn",
]

#: covariance condition number beyond which distances refuse to evaluate.
MAX_CONDITION = 1e12


def _log_eigvals(cov: np.ndarray, label: str) -> np.ndarray:
    vals = np.linalg.eigvalsh(cov)
    if vals.min() <= 0 or vals.max() / vals.min() > MAX_CONDITION:
        raise NotPositiveDefinite(
            f"{label} is numerically singular (condition number above {MAX_CONDITION:.0e})"
        )
    return np.log(vals)


def bc_normal_uni(p: GaussianUni, q: GaussianUni) -> DivergenceValue:
    """Distance between two univariate normals.

    ``D = 1/4 ln(1/4 (vp/vq + vq/vp + 2)) + 1/4 (mu_p - mu_q)^2 / (vp + vq)``.
    """
    vp, vq = p.sigma2, q.sigma2
    var_term = 0.25 * math.log(0.25 * ((vp / vq + vq / vp) + 2.0))
    mean_term = 0.25 * (p.mu - q.mu) ** 2 / (vp + vq)
    return DivergenceValue.from_distance(var_term + mean_term)


def bc_mvn(p: GaussianMulti, q: GaussianMulti) -> DivergenceValue:
    """Distance between two multivariate normals.

    ``D = 1/8 d^T S^-1 d + 1/2 ln(det S / sqrt(det Sp det Sq))`` with
    ``S = (Sp + Sq) / 2`` and ``d`` the mean difference; the log-det ratio
    is evaluated through eigenvalue log-sums.
    """
    if p.k != q.k:
        raise DimensionMismatch(f"dimensions differ: {p.k} vs {q.k}")
    avg = 0.5 * (p.cov + q.cov)
    log_avg = _log_eigvals(avg, "average covariance")
    log_p = _log_eigvals(p.cov, "first covariance")
    log_q = _log_eigvals(q.cov, "second covariance")
    d = p.mu - q.mu
    quad = 0.125 * float(d @ np.linalg.solve(avg, d))
    logdet = 0.5 * (float(log_avg.sum()) - 0.5 * (float(log_p.sum()) + float(log_q.sum())))
    return DivergenceValue.from_distance(quad + logdet)


def overlap_params(p: TruncGaussianUni, q: TruncGaussianUni) -> OverlapParams | None:
    """Common-support interval and mixture parameters, or ``None`` if disjoint."""
    lo = max(p.lower, q.lower)
    hi = min(p.upper, q.upper)
    if not lo < hi:
        return None
    vp, vq = p.sigma2, q.sigma2
    nu = (p.mu * vq + q.mu * vp) / (vp + vq)
    varsigma = math.sqrt(2.0 * vp * vq / (vp + vq))
    return OverlapParams(lo, hi, nu, varsigma)


def _phi_interval(mu: float, sigma: float, lo: float, hi: float) -> float:
    return std_normal_cdf((hi - mu) / sigma) - std_normal_cdf((lo - mu) / sigma)


def bc_truncated_uni(p: TruncGaussianUni, q: TruncGaussianUni) -> DivergenceValue:
    """Distance between two truncated univariate normals.

    Closed form: the untruncated distance, plus half the log of each
    truncation probability, minus the log probability that the mixture
    normal ``N(nu, varsigma^2)`` lies in the common support. Disjoint
    supports give a zero coefficient and infinite distance.
    """
    ov = overlap_params(p, q)
    if ov is None:
        return DivergenceValue(0.0, math.inf)
    z_p = _phi_interval(p.mu, p.sigma, p.lower, p.upper)
    z_q = _phi_interval(q.mu, q.sigma, q.lower, q.upper)
    z_overlap = _phi_interval(ov.nu, ov.varsigma, ov.l, ov.u)
    if z_overlap <= 0.0:
        return DivergenceValue(0.0, math.inf)
    base = bc_normal_uni(p.parent(), q.parent()).distance
    dist = base + 0.5 * (math.log(z_p) + math.log(z_q)) - math.log(z_overlap)
    return DivergenceValue.from_distance(dist)


def mvn_overlap_params(p: TruncGaussianMulti,
                       q: TruncGaussianMulti) -> MvnOverlapParams | None:
    """Common box and mixture parameters, or ``None`` if any axis is disjoint.

    ``S`` is assembled from the summed precisions (symmetric in the inputs
    by construction) and ``m`` is the precision-weighted mean.
    """
    lo = np.maximum(p.lower, q.lower)
    hi = np.minimum(p.upper, q.upper)
    if not np.all(lo < hi):
        return None
    prec_p = np.linalg.inv(p.cov)
    prec_q = np.linalg.inv(q.cov)
    prec_sum = prec_p + prec_q
    s_mat = np.linalg.inv(prec_sum)
    s_mat = 0.5 * (s_mat + s_mat.T)
    m_vec = np.linalg.solve(prec_sum, prec_p @ p.mu + prec_q @ q.mu)
    d = p.mu - q.mu
    big_m = float(d @ np.linalg.solve(p.cov + q.cov, d))
    sigma_bar = 0.5 * (p.cov + q.cov)
    return MvnOverlapParams(lo, hi, m_vec, s_mat, max(big_m, 0.0), sigma_bar)


@dataclass(frozen=True)
class TruncatedMvnTerms:
    """Decomposition of the truncated multivariate distance.

    ``untruncated`` is the plain multivariate distance; ``prob_p`` /
    ``prob_q`` are the two box-normalization probabilities and
    ``prob_overlap`` the mixture-Gaussian mass of the common box.
    ``combined_error`` propagates the three probability error estimates
    into distance units.
    """

    untruncated: float
    prob_p: QuadResult
    prob_q: QuadResult
    prob_overlap: QuadResult
    distance: float
    combined_error: float


def truncated_mvn_terms(p: TruncGaussianMulti, q: TruncGaussianMulti,
                        cfg: QuadConfig = DEFAULT_CONFIG) -> TruncatedMvnTerms | None:
    """All terms of the truncated multivariate distance, or ``None`` if disjoint."""
    if p.k != q.k:
        raise DimensionMismatch(f"dimensions differ: {p.k} vs {q.k}")
    ov = mvn_overlap_params(p, q)
    if ov is None:
        return None
    base = bc_mvn(p.parent(), q.parent()).distance
    prob_p = mvn_rect_prob(p.parent(), p.lower, p.upper, cfg)
    prob_q = mvn_rect_prob(q.parent(), q.lower, q.upper, cfg)
    mixture = GaussianMulti(ov.m, 2.0 * ov.S)
    prob_ov = mvn_rect_prob(mixture, ov.l, ov.u, cfg)
    if min(prob_p.value, prob_q.value, prob_ov.value) <= 0.0:
        raise NonConvergence(
            "a truncation-normalization probability underflowed to zero; "
            "the requested boxes are too far in the tails to resolve"
        )
    dist = (base
            + 0.5 * (math.log(prob_p.value) + math.log(prob_q.value))
            - math.log(prob_ov.value))
    err = math.sqrt(
        (0.5 * prob_p.error_estimate / prob_p.value) ** 2
        + (0.5 * prob_q.error_estimate / prob_q.value) ** 2
        + (prob_ov.error_estimate / prob_ov.value) ** 2
    )
    return TruncatedMvnTerms(base, prob_p, prob_q, prob_ov, dist, err)


def bc_truncated_mvn(p: TruncGaussianMulti, q: TruncGaussianMulti,
                     cfg: QuadConfig = DEFAULT_CONFIG) -> DivergenceValue:
    """Distance between two truncated multivariate normals.

    Multivariate analogue of :func:`bc_truncated_uni`; the three box
    probabilities come from :func:`distsim.quadrature.mvn_rect_prob` and the
    result is deterministic for a fixed ``cfg.seed``. Any empty-overlap axis
    gives a zero coefficient and infinite distance.
    """
    terms = truncated_mvn_terms(p, q, cfg)
    if terms is None:
        return DivergenceValue(0.0, math.inf)
    return DivergenceValue.from_distance(terms.distance)


@dataclass(frozen=True)
class InequalityCheck:
    """Both sides of the truncation comparison and the resulting verdict.

    ``holds`` is True when the truncated distance is at least the
    untruncated one, equivalent to ``lhs >= rhs``.
    """

    lhs: float
    rhs: float
    holds: bool


def truncation_inequality_holds_uni(p: TruncGaussianUni,
                                    q: TruncGaussianUni) -> InequalityCheck:
    """Compare ``sqrt(Z_p Z_q)`` against the mixture mass of the overlap.

    ``lhs >= rhs`` exactly when truncation increased the distance relative
    to the untruncated normals. Requires overlapping supports.
    """
    ov = overlap_params(p, q)
    if ov is None:
        raise DomainError("supports do not overlap; the comparison is undefined")
    z_p = _phi_interval(p.mu, p.sigma, p.lower, p.upper)
    z_q = _phi_interval(q.mu, q.sigma, q.lower, q.upper)
    lhs = math.sqrt(z_p * z_q)
    rhs = _phi_interval(ov.nu, ov.varsigma, ov.l, ov.u)
    return InequalityCheck(lhs, rhs, lhs >= rhs)


def truncation_inequality_holds_mvn(p: TruncGaussianMulti, q: TruncGaussianMulti,
                                    cfg: QuadConfig = DEFAULT_CONFIG) -> InequalityCheck:
    """Multivariate analogue of the univariate truncation comparison.

    ``lhs = sqrt(P_p P_q)`` and ``rhs`` is the mixture-Gaussian mass of the
    common box, so again ``lhs >= rhs`` iff the truncated distance is at
    least the untruncated one.
    """
    terms = truncated_mvn_terms(p, q, cfg)
    if terms is None:
        raise DomainError("supports do not overlap; the comparison is undefined")
    lhs = math.sqrt(terms.prob_p.value * terms.prob_q.value)
    rhs = terms.prob_overlap.value
    return InequalityCheck(lhs, rhs, lhs >= rhs)
