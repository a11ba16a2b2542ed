"""How identifiable is the learned tree?

Diagnostics around the score gap between the best and second-best
spanning trees:

* ``edge_reversal_gap``: for a putative cause/effect pair, the mutual
  information between the anti-causal residual and the effect,
  I(x - E[x|y]; y) — the bivariate gap in nats.
* ``estimate_identifiability_gap``: best vs second-best tree scores plus
  the minimum edge-reversal over the learned tree's edges.
* ``piw_min_cmi``: the minimum conditional mutual information over
  triples (w, l, o) where w -> l is a tree edge and o is another
  neighbour of w (a child other than l, or w's parent) — the local
  faithfulness term of the lower-bound decomposition.
* ``gaussian_reversal_bounds``: closed-form bounds on the reversal gap
  for Gaussian noise, from the variance ratio Var(f(X)) / Var(N_Y).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arborescence import second_best
from .entropy import EntropyConfig, conditional_mutual_information, mutual_information
from .errors import NoTriples
from .graphs import DirectedTree
from .regression import LOCAL_LINEAR, RegressionConfig, fit
from .scoring import Dataset, ScoreOptions, compute_weights

# Local-linear by default: the anti-causal residual must not pick up
# boundary bias, or independent pairs would show spurious information.
GAP_REGRESSION = RegressionConfig(method=LOCAL_LINEAR)


@dataclass(frozen=True)
class GapReport:
    best_tree: DirectedTree
    best_score: float
    second_tree: DirectedTree
    second_score: float
    gap: float
    min_reversal: float
    min_reversal_edge: tuple[int, int]
    piw_min: float | None = None
    piw_triple: tuple[int, int, int] | None = None


@dataclass(frozen=True)
class ReversalBounds:
    gauss_bound: float
    logconcave_bound: float
    logconcave_nontrivial: bool


def edge_reversal_gap(
    x,
    y,
    reg_cfg: RegressionConfig | None = None,
    ent_cfg: EntropyConfig | None = None,
) -> float:
    """I(x - phi(y); y) with phi the anti-causal regression of x on y."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    phi = fit(y, x, reg_cfg or GAP_REGRESSION)
    return mutual_information(x - phi(y), y, ent_cfg)


def min_edge_reversal(
    d: Dataset,
    t: DirectedTree,
    reg_cfg: RegressionConfig | None = None,
    ent_cfg: EntropyConfig | None = None,
) -> tuple[float, tuple[int, int]]:
    """Minimum edge-reversal gap over the tree's edges, with the argmin."""
    if t.p != d.p:
        raise ValueError(f"tree has {t.p} nodes but data has {d.p} columns")
    best_val, best_edge = None, None
    for j, i in t.edges:
        val = edge_reversal_gap(d.column(j), d.column(i), reg_cfg, ent_cfg)
        if best_val is None or val < best_val:
            best_val, best_edge = val, (j, i)
    return best_val, best_edge


def piw_triples(t: DirectedTree) -> tuple[tuple[int, int, int], ...]:
    """All (w, l, o): w -> l an edge, o in (children(w) - {l}) + parents(w)."""
    triples = []
    for w, l in t.edges:
        others = [c for c in t.children(w) if c != l]
        if t.parents[w] >= 0:
            others.append(t.parents[w])
        for o in others:
            triples.append((w, l, o))
    return tuple(sorted(triples))


def piw_min_cmi(
    d: Dataset, t: DirectedTree, ent_cfg: EntropyConfig | None = None
) -> tuple[float, tuple[int, int, int]]:
    triples = piw_triples(t)
    if not triples:
        raise NoTriples(f"tree on {t.p} nodes has no (parent, child, neighbour) triples")
    best_val, best_triple = None, None
    for w, l, o in triples:
        val = conditional_mutual_information(
            d.column(w), d.column(l), d.column(o), ent_cfg
        )
        if best_val is None or val < best_val:
            best_val, best_triple = val, (w, l, o)
    return best_val, best_triple


def estimate_identifiability_gap(
    d: Dataset,
    opts: ScoreOptions | None = None,
    reg_cfg: RegressionConfig | None = None,
    ent_cfg: EntropyConfig | None = None,
    include_piw: bool = False,
) -> GapReport:
    """Best/second-best scores and the minimum edge reversal of the best tree."""
    weights = compute_weights(d, opts or ScoreOptions())
    best, runner = second_best(weights)
    min_rev, edge = min_edge_reversal(d, best.tree, reg_cfg, ent_cfg)
    piw_val, piw_arg = None, None
    if include_piw and best.tree.p >= 3:
        piw_val, piw_arg = piw_min_cmi(d, best.tree, ent_cfg)
    return GapReport(
        best_tree=best.tree,
        best_score=best.score,
        second_tree=runner.tree,
        second_score=runner.score,
        gap=runner.score - best.score,
        min_reversal=min_rev,
        min_reversal_edge=edge,
        piw_min=piw_val,
        piw_triple=piw_arg,
    )


def gaussian_reversal_bounds(var_fx: float, var_ny: float) -> ReversalBounds:
    """Closed-form lower bounds on the reversal gap under Gaussian noise.

    The general-Gaussian bound is (1/2) * log(1 + r) for r = var_fx/var_ny;
    if f(X) has a log-concave density the bound (1/2) * log(2/(pi e) * (1+r))
    applies, which is informative only when r > pi*e/2 - 1 (about 3.27).
    """
    if not (var_fx > 0 and var_ny > 0):
        raise ValueError("both variances must be positive")
    ratio = var_fx / var_ny
    gauss = 0.5 * np.log1p(ratio)
    logconcave = 0.5 * np.log(2.0 / (np.pi * np.e) * (1.0 + ratio))
    return ReversalBounds(
        gauss_bound=float(gauss),
        logconcave_bound=float(logconcave),
        logconcave_nontrivial=bool(ratio > np.pi * np.e / 2.0 - 1.0),
    )
