"""Differential entropy and mutual information from samples, in nats.

The workhorse is the Kozachenko-Leonenko k-nearest-neighbour estimator

    h_hat = psi(n) - psi(k) + log(V_d) + (d / n) * sum_m log rho_k(m),

where rho_k(m) is the Euclidean distance from sample m to its k-th
nearest neighbour and V_d the volume of the unit d-ball.  Mutual and
conditional mutual information are entropy combinations of the marginal
and joint samples.

Exact duplicate points would give rho = 0 and a divergent log; they are
de-tied by a deterministic jitter (fixed internal seed, relative scale
``EntropyConfig.jitter``), so identical inputs always produce identical
outputs.  Neighbour distances are exact: they come from a k-d tree query,
not an approximate search.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma, gammaln

from .errors import DegenerateSample, LengthMismatch, NonFiniteInput, TooFewSamples

DEFAULT_K = 5

_JITTER_SEED = 20150921
_MAX_DIM = 3


@dataclass(frozen=True)
class EntropyConfig:
    k: int = DEFAULT_K
    jitter: float = 1e-10

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.jitter > 0:
            raise ValueError("jitter scale must be > 0")


def _as_sample_matrix(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError("samples must be a vector or an n x d matrix")
    if x.shape[1] > _MAX_DIM:
        raise ValueError(f"only d <= {_MAX_DIM} supported, got d={x.shape[1]}")
    if not np.isfinite(x).all():
        raise NonFiniteInput("samples must be finite")
    return x


def _kth_distances(x: np.ndarray, k: int) -> np.ndarray:
    # Column 0 of the query is the point itself at distance 0, so column
    # k is the distance to the k-th nearest *other* point.
    dist, _ = cKDTree(x).query(x, k=k + 1)
    return dist[:, k]


def knn_entropy(samples, cfg: EntropyConfig | None = None) -> float:
    """Kozachenko-Leonenko entropy estimate of an n x d sample, d <= 3."""
    cfg = cfg or EntropyConfig()
    x = _as_sample_matrix(samples)
    n, d = x.shape
    if n <= cfg.k:
        raise TooFewSamples(f"need n > k, got n={n}, k={cfg.k}")
    rho = _kth_distances(x, cfg.k)
    if (rho == 0).any():
        scale = x.std(axis=0)
        fallback = np.abs(x).max(axis=0)
        scale = np.where(scale > 0, scale, np.where(fallback > 0, fallback, 1.0))
        rng = np.random.Generator(np.random.Philox(_JITTER_SEED))
        x = x + rng.standard_normal(x.shape) * (cfg.jitter * scale)
        rho = _kth_distances(x, cfg.k)
        if (rho == 0).any():
            raise DegenerateSample("zero neighbour distances even after jitter")
    log_vd = 0.5 * d * np.log(np.pi) - gammaln(0.5 * d + 1.0)
    return float(
        digamma(n) - digamma(cfg.k) + log_vd + (d / n) * np.log(rho).sum()
    )


def _columns(*arrays) -> np.ndarray:
    cols = [np.asarray(a, dtype=np.float64).reshape(-1) for a in arrays]
    n = cols[0].shape[0]
    if any(c.shape[0] != n for c in cols):
        raise LengthMismatch("samples must have equal lengths")
    return np.column_stack(cols)


def mutual_information(a, b, cfg: EntropyConfig | None = None) -> float:
    """I(a; b) = h(a) + h(b) - h(a, b).  May be slightly negative by
    estimation noise; not clipped."""
    ab = _columns(a, b)
    return (
        knn_entropy(ab[:, 0], cfg)
        + knn_entropy(ab[:, 1], cfg)
        - knn_entropy(ab, cfg)
    )


def conditional_mutual_information(x, y, z, cfg: EntropyConfig | None = None) -> float:
    """I(x; y | z) = h(x,z) + h(y,z) - h(z) - h(x,y,z)."""
    xyz = _columns(x, y, z)
    return (
        knn_entropy(xyz[:, [0, 2]], cfg)
        + knn_entropy(xyz[:, [1, 2]], cfg)
        - knn_entropy(xyz[:, 2], cfg)
        - knn_entropy(xyz, cfg)
    )
