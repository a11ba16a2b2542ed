"""Structural distance metrics for comparing estimated and true graphs.

SHD is the usual edit distance on edge sets with a reversed edge counted as a
single flip.  SID counts ordered node pairs whose interventional distribution,
inferred from the estimate by parent adjustment, is not guaranteed correct
under the truth; validity of the adjustment set is decided exactly with the
adjustment criterion and brute-force d-separation over simple paths.  Ancestor
metrics compare transitive closures.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import Dag, DirectedTree

Graph = DirectedTree | Dag


def _as_dag(graph: Graph) -> Dag:
    return graph.to_dag() if isinstance(graph, DirectedTree) else graph


def _check_same_p(a: Dag, b: Dag) -> int:
    if a.p != b.p:
        raise ValueError(f"graphs have different node counts: {a.p} vs {b.p}")
    return a.p


def shd(truth: Graph, est: Graph) -> int:
    """Structural Hamming distance; insertions and deletions cost 1, a flip 1."""
    a = _as_dag(truth)
    b = _as_dag(est)
    _check_same_p(a, b)
    ea, eb = set(a.edges), set(b.edges)
    pairs = {frozenset(e) for e in ea | eb}
    dist = 0
    for pair in pairs:
        j, i = tuple(pair)
        in_a = ((j, i) in ea, (i, j) in ea)
        in_b = ((j, i) in eb, (i, j) in eb)
        if in_a != in_b:
            dist += 1
    return dist


def _simple_paths(adj: dict[int, set[int]], src: int, dst: int):
    """Yield all simple undirected paths from src to dst as node lists."""
    path = [src]
    on_path = {src}
    stack = [iter(sorted(adj[src]))]
    while stack:
        try:
            nxt = next(stack[-1])
        except StopIteration:
            stack.pop()
            on_path.discard(path.pop())
            continue
        if nxt in on_path:
            continue
        if nxt == dst:
            yield path + [dst]
            continue
        path.append(nxt)
        on_path.add(nxt)
        stack.append(iter(sorted(adj[nxt])))


def _path_is_causal(path: list[int], edges: set[tuple[int, int]]) -> bool:
    return all((path[k], path[k + 1]) in edges for k in range(len(path) - 1))


def _path_blocked(
    path: list[int],
    edges: set[tuple[int, int]],
    z: set[int],
    desc: dict[int, frozenset[int]],
) -> bool:
    """d-separation blocking of one path given conditioning set ``z``.

    A collider is open when it or one of its descendants is conditioned on; a
    non-collider is open when it is not conditioned on.  The path is blocked
    when any interior node is closed.
    """
    for k in range(1, len(path) - 1):
        v = path[k]
        collider = (path[k - 1], v) in edges and (path[k + 1], v) in edges
        if collider:
            if v not in z and not (desc[v] & z):
                return True
        else:
            if v in z:
                return True
    return False


def _valid_adjustment(
    g: Dag,
    i: int,
    j: int,
    z: set[int],
    desc: dict[int, frozenset[int]],
    adj: dict[int, set[int]],
) -> bool:
    """Adjustment criterion for estimating the effect of ``i`` on ``j`` in ``g``.

    Requires (a) no conditioning on a node on a directed i-to-j path (other
    than i) or any of its descendants, and (b) every non-causal simple path
    between i and j blocked by ``z``.
    """
    causal_nodes = {v for v in desc[i] if v == j or j in desc[v]}
    forbidden = set()
    for w in causal_nodes:
        forbidden.add(w)
        forbidden |= desc[w]
    if z & forbidden:
        return False
    edges = set(g.edges)
    for path in _simple_paths(adj, i, j):
        if _path_is_causal(path, edges):
            continue
        if not _path_blocked(path, edges, z, desc):
            return False
    return True


def sid(truth: Graph, est: Graph) -> int:
    """Structural intervention distance between two DAGs.

    For each ordered pair (i, j) the estimate proposes the parent set of i as
    an adjustment set.  The pair counts as wrong when that set is not a valid
    adjustment set for (i, j) in the true graph; when j itself is among the
    proposed parents the inferred effect is null, which is wrong exactly when
    j is a true descendant of i.
    """
    g = _as_dag(truth)
    h = _as_dag(est)
    p = _check_same_p(g, h)
    desc = {v: g.descendants(v) for v in range(p)}
    adj: dict[int, set[int]] = {v: set() for v in range(p)}
    for a, b in g.edges:
        adj[a].add(b)
        adj[b].add(a)
    wrong = 0
    for i in range(p):
        z = set(h.parents(i))
        for j in range(p):
            if j == i:
                continue
            if j in z:
                if j in desc[i]:
                    wrong += 1
            elif not _valid_adjustment(g, i, j, z, desc, adj):
                wrong += 1
    return wrong


def ancestor_metrics(truth: Graph, est: Graph) -> tuple[float, float]:
    """True-positive rate and recall of the estimate's ancestor relation.

    Predicted pairs are the transitive closure of the estimate, true pairs the
    closure of the truth; empty denominators score 1 by convention.
    """
    a = _as_dag(truth)
    b = _as_dag(est)
    _check_same_p(a, b)
    true_pairs = a.ancestor_pairs()
    pred_pairs = b.ancestor_pairs()
    hit = len(true_pairs & pred_pairs)
    tpr = hit / len(pred_pairs) if pred_pairs else 1.0
    recall = hit / len(true_pairs) if true_pairs else 1.0
    return tpr, recall


@dataclass(frozen=True)
class MetricReport:
    """All recovery metrics for one (truth, estimate) pair."""

    shd: int
    sid: int
    ancestor_tpr: float
    ancestor_recall: float

    def to_dict(self) -> dict:
        return {
            "shd": self.shd,
            "sid": self.sid,
            "ancestor_tpr": self.ancestor_tpr,
            "ancestor_recall": self.ancestor_recall,
        }


def metric_report(truth: Graph, est: Graph) -> MetricReport:
    tpr, recall = ancestor_metrics(truth, est)
    return MetricReport(
        shd=shd(truth, est),
        sid=sid(truth, est),
        ancestor_tpr=tpr,
        ancestor_recall=recall,
    )
