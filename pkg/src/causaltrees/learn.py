"""End-to-end tree learner: score all ordered pairs, solve the
minimum-weight arborescence, return the tree with diagnostics."""
from __future__ import annotations

import time
from dataclasses import dataclass

from .arborescence import WeightMatrix, solve
from .graphs import DirectedTree
from .scoring import Dataset, ScoreOptions, compute_weights


@dataclass(frozen=True)
class LearnResult:
    tree: DirectedTree
    weights: WeightMatrix
    score: float
    edge_weights: tuple[tuple[int, int, float], ...]
    options: ScoreOptions
    seconds: float


def learn(d: Dataset, opts: ScoreOptions | None = None) -> LearnResult:
    """Fit edge weights from data and return the minimum-weight tree.

    Deterministic given the data and options: scoring, solving and
    tie-breaking all follow fixed orders.
    """
    opts = opts or ScoreOptions()
    start = time.perf_counter()
    weights = compute_weights(d, opts)
    tree, score = solve(weights)
    per_edge = tuple((j, i, float(weights.w[j, i])) for j, i in tree.edges)
    return LearnResult(
        tree=tree,
        weights=weights,
        score=score,
        edge_weights=per_edge,
        options=opts,
        seconds=time.perf_counter() - start,
    )
