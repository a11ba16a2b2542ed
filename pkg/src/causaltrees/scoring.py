"""Edge-weight matrices from data.

Three weight families over ordered pairs (j, i), j != i:

* Gaussian: (1/2) * log( mean((X_i - phi_ji(X_j))^2) / Var_n(X_i) ),
  with Var_n the divide-by-n plug-in variance.  The numerator is the raw
  mean of squared residuals (not re-centred); a regressor at least as
  good as the constant mean makes the weight <= 0.
* Entropy: h_hat(X_i - phi_ji(X_j)) - h_hat(X_i).
* Conditional-entropy skeleton: -I_hat(X_i; X_j), symmetric — it can
  recover the skeleton only, up to the Markov equivalence class.

With the split flag set, regressions are trained on the first half of
the rows and weights evaluated on the second half; the halves are the
literal first/second blocks of the row order (shuffling, if wanted, is
the caller's job, so splits stay deterministic).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .arborescence import FORBIDDEN, WeightMatrix, _edge_sum
from .entropy import EntropyConfig, knn_entropy, mutual_information
from .errors import DegenerateColumn, ForbiddenEdgeInTree, NonFiniteInput
from .graphs import DirectedTree
from .regression import RegressionConfig, fit

GAUSSIAN = "gaussian"
ENTROPY = "entropy"
CMI_SKELETON = "cmi-skeleton"
_SCORES = (GAUSSIAN, ENTROPY, CMI_SKELETON)


@dataclass(frozen=True)
class Dataset:
    """An n x p data matrix; column i holds variable i."""

    values: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        x = np.ascontiguousarray(self.values, dtype=np.float64)
        if x.ndim != 2:
            raise ValueError("data must be an n x p matrix")
        n, p = x.shape
        if n < 3:
            raise ValueError(f"need at least 3 rows, got {n}")
        if p < 2:
            raise ValueError(f"need at least 2 columns, got {p}")
        if not np.isfinite(x).all():
            raise NonFiniteInput("data must be finite")
        names = tuple(self.names) if self.names else tuple(f"X{i+1}" for i in range(p))
        if len(names) != p:
            raise ValueError(f"{len(names)} names for {p} columns")
        x.flags.writeable = False
        object.__setattr__(self, "values", x)
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.values[:, i]

    def halves(self) -> tuple[np.ndarray, np.ndarray]:
        """(training rows, evaluation rows): first floor(n/2) rows vs rest."""
        h = self.n // 2
        return self.values[:h], self.values[h:]


@dataclass(frozen=True)
class ScoreOptions:
    score: str = GAUSSIAN
    split: bool = False
    regression: RegressionConfig = field(default_factory=RegressionConfig)
    entropy: EntropyConfig = field(default_factory=EntropyConfig)
    n_jobs: int = 1  # accepted as a hint; evaluation is serial either way

    def __post_init__(self) -> None:
        if self.score not in _SCORES:
            raise ValueError(f"unknown score {self.score!r}; expected one of {_SCORES}")
        if self.n_jobs < 1:
            raise ValueError("n_jobs must be >= 1")


def _rows(d: Dataset, opts: ScoreOptions) -> tuple[np.ndarray, np.ndarray]:
    return d.halves() if opts.split else (d.values, d.values)


def _plugin_variance(ev: np.ndarray) -> np.ndarray:
    return np.mean(ev * ev, axis=0) - np.mean(ev, axis=0) ** 2


def _residuals(tr, ev, j, i, cfg) -> np.ndarray:
    phi = fit(tr[:, j], tr[:, i], cfg)
    return ev[:, i] - phi(ev[:, j])


def gaussian_weights(d: Dataset, opts: ScoreOptions | None = None) -> WeightMatrix:
    opts = opts or ScoreOptions()
    tr, ev = _rows(d, opts)
    p = d.p
    denom = _plugin_variance(ev)
    for i in range(p):
        if denom[i] <= 0:
            raise DegenerateColumn(f"column {d.names[i]} has zero variance")
    w = np.full((p, p), FORBIDDEN)
    for j in range(p):
        for i in range(p):
            if i == j:
                continue
            res = _residuals(tr, ev, j, i, opts.regression)
            num = float(np.mean(res * res))
            if num == 0.0:
                raise DegenerateColumn(
                    f"residuals identically zero for edge {d.names[j]}->{d.names[i]}"
                )
            w[j, i] = 0.5 * np.log(num / denom[i])
    return WeightMatrix(w)


def entropy_weights(d: Dataset, opts: ScoreOptions | None = None) -> WeightMatrix:
    opts = opts or ScoreOptions()
    tr, ev = _rows(d, opts)
    p = d.p
    marginal = [knn_entropy(ev[:, i], opts.entropy) for i in range(p)]
    w = np.full((p, p), FORBIDDEN)
    for j in range(p):
        for i in range(p):
            if i == j:
                continue
            res = _residuals(tr, ev, j, i, opts.regression)
            w[j, i] = knn_entropy(res, opts.entropy) - marginal[i]
    return WeightMatrix(w)


def cmi_skeleton_weights(d: Dataset, opts: ScoreOptions | None = None) -> WeightMatrix:
    opts = opts or ScoreOptions()
    _, ev = _rows(d, opts)
    p = d.p
    w = np.full((p, p), FORBIDDEN)
    for j in range(p):
        for i in range(j + 1, p):
            m = -mutual_information(ev[:, j], ev[:, i], opts.entropy)
            w[j, i] = m
            w[i, j] = m
    return WeightMatrix(w)


def compute_weights(d: Dataset, opts: ScoreOptions | None = None) -> WeightMatrix:
    opts = opts or ScoreOptions()
    if opts.score == GAUSSIAN:
        return gaussian_weights(d, opts)
    if opts.score == ENTROPY:
        return entropy_weights(d, opts)
    return cmi_skeleton_weights(d, opts)


def tree_score(w: WeightMatrix, t: DirectedTree) -> float:
    """Sum of the tree's edge weights."""
    if w.p != t.p:
        raise ValueError(f"weight matrix is {w.p}x{w.p} but tree has {t.p} nodes")
    for j, i in t.edges:
        if not np.isfinite(w.w[j, i]):
            raise ForbiddenEdgeInTree(f"tree uses forbidden edge {j}->{i}")
    parents = np.asarray(t.parents)
    return _edge_sum(w.w, parents)
