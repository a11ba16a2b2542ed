"""Exact minimum-weight spanning arborescence over a dense weight matrix.

Implements the contraction (Chu-Liu/Edmonds) algorithm for real-valued,
possibly negative weights.  Forbidden edges carry the ``FORBIDDEN``
sentinel (+inf) rather than a large finite number, so an infeasible
problem surfaces as an error instead of a silently bad tree.  The root is
free unless a substructure declares one; the free-root search runs the
fixed-root solver once per candidate root and merges deterministically.

Tie-breaking is deterministic everywhere: for a fixed head the lowest
tail index wins, and across candidate roots the lowest root index wins.
Among exactly tied optima this is a convention, not a claim about which
tied tree is canonical.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InfeasibleError, NonFiniteInput
from .graphs import ROOT, DirectedTree, Substructure

FORBIDDEN = np.inf


@dataclass(frozen=True)
class WeightMatrix:
    """p x p edge weights; entry (j, i) is the weight of edge j -> i.

    The diagonal is excluded (held at the sentinel) and any off-diagonal
    entry may be ``FORBIDDEN``.  All other entries must be finite.
    """

    w: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.w, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {w.shape}")
        if w.shape[0] < 2:
            raise ValueError("weight matrix needs p >= 2")
        if np.isnan(w).any() or np.isneginf(w).any():
            raise NonFiniteInput("weights must be finite or the +inf sentinel")
        np.fill_diagonal(w, FORBIDDEN)
        w.flags.writeable = False
        object.__setattr__(self, "w", w)

    @property
    def p(self) -> int:
        return self.w.shape[0]

    def is_forbidden(self, j: int, i: int) -> bool:
        return bool(np.isposinf(self.w[j, i]))

    def forbid(self, j: int, i: int) -> "WeightMatrix":
        w = self.w.copy()
        w[j, i] = FORBIDDEN
        return WeightMatrix(w)

    def shifted(self, c: float) -> "WeightMatrix":
        """Add ``c`` to every non-sentinel entry (inf + c stays inf)."""
        return WeightMatrix(self.w + c)


class ArborescenceResult(NamedTuple):
    tree: DirectedTree
    score: float


def _as_matrix(w) -> np.ndarray:
    if isinstance(w, WeightMatrix):
        return w.w.copy()
    return WeightMatrix(np.asarray(w)).w.copy()


def _edge_sum(w: np.ndarray, parents: np.ndarray) -> float:
    edges = sorted((int(j), int(i)) for i, j in enumerate(parents) if j != ROOT)
    return float(sum(w[j, i] for j, i in edges))


def _find_cycle(parent: np.ndarray) -> list[int] | None:
    p = len(parent)
    state = [0] * p
    for start in range(p):
        if state[start]:
            continue
        walk: list[int] = []
        v = start
        while v != ROOT and state[v] == 0:
            state[v] = 1
            walk.append(v)
            v = int(parent[v])
        if v != ROOT and state[v] == 1:
            return walk[walk.index(v):]
        for u in walk:
            state[u] = 2
    return None


def _solve_rooted(w: np.ndarray, root: int) -> np.ndarray:
    """Fixed-root contraction algorithm; returns the parent array."""
    p = w.shape[0]
    parent = np.full(p, ROOT, dtype=np.int64)
    for i in range(p):
        if i == root:
            continue
        j = int(np.argmin(w[:, i]))  # ties: lowest tail index
        if not np.isfinite(w[j, i]):
            raise InfeasibleError(f"node {i} has no allowed incoming edge")
        parent[i] = j

    cycle = _find_cycle(parent)
    if cycle is None:
        return parent

    in_cycle = np.zeros(p, dtype=bool)
    in_cycle[cycle] = True
    keep = [i for i in range(p) if not in_cycle[i]]
    m = len(keep) + 1
    super_idx = m - 1
    cyc = np.asarray(cycle)

    contracted = np.full((m, m), FORBIDDEN)
    contracted[: m - 1, : m - 1] = w[np.ix_(keep, keep)]
    # Entering the cycle: reduced cost against the in-cycle pick.
    reduced = w[np.ix_(keep, cyc)] - w[parent[cyc], cyc][None, :]
    entry_choice = np.argmin(reduced, axis=1)
    contracted[: m - 1, super_idx] = reduced[np.arange(m - 1), entry_choice]
    # Leaving the cycle: cheapest cycle node as tail.
    leaving = w[np.ix_(cyc, keep)]
    exit_choice = np.argmin(leaving, axis=0)
    contracted[super_idx, : m - 1] = leaving[exit_choice, np.arange(m - 1)]

    sub_parent = _solve_rooted(contracted, keep.index(root))

    expanded = np.full(p, ROOT, dtype=np.int64)
    for k, node in enumerate(keep):
        q = int(sub_parent[k])
        if q == ROOT:
            continue
        expanded[node] = int(cyc[exit_choice[k]]) if q == super_idx else keep[q]
    entry_tail = keep[int(sub_parent[super_idx])]
    entry_head = int(cyc[entry_choice[int(sub_parent[super_idx])]])
    expanded[entry_head] = entry_tail
    for v in cycle:
        if v != entry_head:
            expanded[v] = int(parent[v])
    return expanded


def _free_root_solve(w: np.ndarray, roots) -> ArborescenceResult:
    best: tuple[float, np.ndarray] | None = None
    for r in roots:
        try:
            parents = _solve_rooted(w, r)
        except InfeasibleError:
            continue
        score = _edge_sum(w, parents)
        if best is None or score < best[0]:
            best = (score, parents)
    if best is None:
        raise InfeasibleError("no spanning arborescence exists")
    score, parents = best
    return ArborescenceResult(DirectedTree(tuple(int(v) for v in parents)), score)


def solve(w) -> ArborescenceResult:
    """Minimum-weight spanning arborescence with a free root."""
    mat = _as_matrix(w)
    return _free_root_solve(mat, range(mat.shape[0]))


def solve_constrained(w, r: Substructure) -> ArborescenceResult:
    """Minimize over trees satisfying the substructure ``r``.

    Each required edge (j, i) removes every other edge into i from the
    pool and removes i from the candidate roots, which together force i's
    parent to be exactly j.  A declared root loses all incoming edges.
    """
    mat = _as_matrix(w)
    p = mat.shape[0]
    for j, i in r.required + r.forbidden:
        if not (0 <= j < p and 0 <= i < p):
            raise ValueError(f"constraint edge ({j},{i}) out of range for p={p}")
    if r.root is not None and not 0 <= r.root < p:
        raise ValueError(f"declared root {r.root} out of range for p={p}")

    for j, i in r.required:
        keep = mat[j, i]
        mat[:, i] = FORBIDDEN
        mat[j, i] = keep
    for j, i in r.forbidden:
        mat[j, i] = FORBIDDEN
    if r.root is not None:
        mat[:, r.root] = FORBIDDEN
        roots = [r.root]
    else:
        blocked = r.required_heads
        roots = [v for v in range(p) if v not in blocked]
    if not roots:
        raise InfeasibleError("required edges leave no feasible root")
    result = _free_root_solve(mat, roots)
    # The forced-parent construction guarantees this, but it is cheap to check.
    assert r.satisfied_by(result.tree)
    return result


def second_best(w) -> tuple[ArborescenceResult, ArborescenceResult]:
    """The optimum and the best tree differing from it in >= 1 edge.

    Reruns the solver p-1 times, each time forbidding one edge of the
    optimum; the minimum over reruns is the true runner-up.
    """
    mat = _as_matrix(w)
    best = _free_root_solve(mat, range(mat.shape[0]))
    runner: ArborescenceResult | None = None
    for j, i in best.tree.edges:
        trial = mat.copy()
        trial[j, i] = FORBIDDEN
        try:
            cand = _free_root_solve(trial, range(mat.shape[0]))
        except InfeasibleError:
            continue
        if runner is None or cand.score < runner.score:
            runner = cand
    if runner is None:
        raise InfeasibleError("no second tree exists")
    return best, runner
