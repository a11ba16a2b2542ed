"""Substructure testing machinery.

From a sample-split dataset we collect, per evaluation row k:

* ``M_k``: the squared regression residual for every ordered pair (j, i)
  (regressions trained on the first half of the rows), and
* ``V_k``: the squared deviation of every column from its evaluation-half
  mean.

Their means ``mu`` (per pair) and ``nu`` (per column) give the edge-weight
centres (1/2) * log(mu_ji / nu_i), and the divide-by-n covariance blocks
Sigma_M, Sigma_V, Sigma_MV feed a delta-method standard error

    sigma_ji^2 = Sigma_M[ji,ji]/mu_ji^2 + Sigma_V[i,i]/nu_i^2
                 - 2 * Sigma_MV[ji,i] / (mu_ji * nu_i).

Simultaneous confidence bounds use the Bonferroni quantile
z = Phi^{-1}(1 - alpha / (2 p (p-1))) and half-width z * sigma / (2 sqrt(n)).
A substructure R is rejected when even the most favourable (lower-bound)
score of the trees satisfying R exceeds the most pessimistic
(upper-bound) score of the unconstrained optimum.

Ordered pairs are indexed row-major: (0,1), (0,2), ..., (1,0), (1,2), ...
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .arborescence import FORBIDDEN, WeightMatrix, solve, solve_constrained
from .errors import InfeasibleError, TooFewSamples, ZeroMoment
from .graphs import Substructure
from .regression import RegressionConfig, fit
from .scoring import Dataset


def ordered_pairs(p: int) -> tuple[tuple[int, int], ...]:
    return tuple((j, i) for j in range(p) for i in range(p) if i != j)


def pair_index(p: int, j: int, i: int) -> int:
    """Position of ordered pair (j, i) in the row-major pair layout."""
    if j == i or not (0 <= j < p and 0 <= i < p):
        raise ValueError(f"invalid ordered pair ({j},{i}) for p={p}")
    return j * (p - 1) + i - (i > j)


@dataclass(frozen=True)
class MomentStats:
    n_eval: int
    pairs: tuple[tuple[int, int], ...]
    mu: np.ndarray
    nu: np.ndarray
    sigma_m: np.ndarray
    sigma_v: np.ndarray
    sigma_mv: np.ndarray

    @property
    def p(self) -> int:
        return len(self.nu)


@dataclass(frozen=True)
class ConfidenceBounds:
    lower: WeightMatrix
    upper: WeightMatrix
    center: np.ndarray
    sigma: np.ndarray
    alpha: float
    z_alpha: float
    n_eval: int
    clamped: np.ndarray  # pairs where sigma^2 < 0 was clamped to 0


@dataclass(frozen=True)
class SubstructureTest:
    psi: int
    s_restricted: float
    s_upper: float


def moment_statistics(d: Dataset, cfg: RegressionConfig | None = None) -> MomentStats:
    """Split-sample moments: train on the first half, evaluate on the second."""
    cfg = cfg or RegressionConfig()
    tr, ev = d.halves()
    n_eval = len(ev)
    if n_eval < 2:
        raise TooFewSamples(f"evaluation half has {n_eval} rows; need >= 2")
    p = d.p
    pairs = ordered_pairs(p)
    m = np.empty((n_eval, len(pairs)))
    for idx, (j, i) in enumerate(pairs):
        phi = fit(tr[:, j], tr[:, i], cfg)
        res = ev[:, i] - phi(ev[:, j])
        m[:, idx] = res * res
    v = (ev - ev.mean(axis=0)) ** 2
    mu = m.mean(axis=0)
    nu = v.mean(axis=0)
    mc = m - mu
    vc = v - nu
    sigma_m = mc.T @ mc / n_eval
    sigma_v = vc.T @ vc / n_eval
    sigma_mv = mc.T @ vc / n_eval
    sigma_m = (sigma_m + sigma_m.T) / 2.0
    sigma_v = (sigma_v + sigma_v.T) / 2.0
    return MomentStats(
        n_eval=n_eval,
        pairs=pairs,
        mu=mu,
        nu=nu,
        sigma_m=sigma_m,
        sigma_v=sigma_v,
        sigma_mv=sigma_mv,
    )


def confidence_bounds(ms: MomentStats, alpha: float) -> ConfidenceBounds:
    """Simultaneous per-edge confidence bounds on the Gaussian weights."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    p = ms.p
    if (ms.mu <= 0).any() or (ms.nu <= 0).any():
        raise ZeroMoment("all mu and nu must be positive for the log weights")
    z = float(ndtri(1.0 - alpha / (2.0 * p * (p - 1))))
    center = np.full((p, p), FORBIDDEN)
    sigma = np.zeros((p, p))
    clamped = np.zeros((p, p), dtype=bool)
    for idx, (j, i) in enumerate(ms.pairs):
        var = (
            ms.sigma_m[idx, idx] / ms.mu[idx] ** 2
            + ms.sigma_v[i, i] / ms.nu[i] ** 2
            - 2.0 * ms.sigma_mv[idx, i] / (ms.mu[idx] * ms.nu[i])
        )
        if var < 0.0:
            var = 0.0
            clamped[j, i] = True  # finite-sample delta-method artefact
        center[j, i] = 0.5 * np.log(ms.mu[idx] / ms.nu[i])
        sigma[j, i] = np.sqrt(var)
    half = z * sigma / (2.0 * np.sqrt(ms.n_eval))
    return ConfidenceBounds(
        lower=WeightMatrix(center - half),
        upper=WeightMatrix(center + half),
        center=center,
        sigma=sigma,
        alpha=alpha,
        z_alpha=z,
        n_eval=ms.n_eval,
        clamped=clamped,
    )


def test_substructure(
    w_lower: WeightMatrix, w_upper: WeightMatrix, r: Substructure
) -> SubstructureTest:
    """Reject (psi = 1) iff the best lower-bound score attainable under
    ``r`` still exceeds the upper-bound score of the free optimum."""
    try:
        s_restricted = solve_constrained(w_lower, r).score
    except InfeasibleError:
        s_restricted = float("inf")
    s_upper = solve(w_upper).score
    return SubstructureTest(
        psi=int(s_restricted > s_upper),
        s_restricted=s_restricted,
        s_upper=s_upper,
    )


def run_substructure_test(
    d: Dataset,
    r: Substructure,
    alpha: float,
    cfg: RegressionConfig | None = None,
) -> tuple[SubstructureTest, ConfidenceBounds]:
    """Full pipeline: moments -> bounds -> test."""
    ms = moment_statistics(d, cfg)
    cb = confidence_bounds(ms, alpha)
    return test_substructure(cb.lower, cb.upper, r), cb
