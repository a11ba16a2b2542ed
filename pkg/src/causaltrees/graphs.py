"""Directed trees, DAGs and substructure constraints.

A directed tree on ``p`` nodes is stored in parent-array form:
``parents[i]`` is the parent of node ``i``, and the unique root carries
the marker ``-1``.  Nodes are 0-indexed in memory; the 1-indexed labels
used by the file formats are translated at the I/O boundary (see
``fileio``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import (
    CycleError,
    DisconnectedError,
    EqualTreesError,
    MultipleParentsError,
    MultipleRootsError,
    NotEquivalentError,
)

ROOT = -1

ENUMERATION_CAP = 8


@dataclass(frozen=True)
class DirectedTree:
    """A rooted spanning tree with all edges directed away from the root."""

    parents: tuple[int, ...]

    def __post_init__(self) -> None:
        parents = tuple(int(v) for v in self.parents)
        object.__setattr__(self, "parents", parents)
        p = len(parents)
        if p < 1:
            raise ValueError("a tree needs at least one node")
        roots = [i for i, v in enumerate(parents) if v == ROOT]
        for i, v in enumerate(parents):
            if v != ROOT and not 0 <= v < p:
                raise ValueError(f"parent of node {i} out of range: {v}")
            if v == i:
                raise CycleError(f"node {i} is its own parent")
        if not roots:
            raise CycleError("every node has a parent, so the graph contains a cycle")
        if len(roots) > 1:
            raise MultipleRootsError(f"nodes {roots} all lack a parent")
        # Every node must reach the root by following parent pointers.
        state = [0] * p  # 0 unvisited, 1 on current walk, 2 cleared
        for start in range(p):
            if state[start]:
                continue
            walk = []
            v = start
            while v != ROOT and state[v] == 0:
                state[v] = 1
                walk.append(v)
                v = parents[v]
            if v != ROOT and state[v] == 1:
                raise CycleError(f"cycle through node {v}")
            for u in walk:
                state[u] = 2

    @property
    def p(self) -> int:
        return len(self.parents)

    @property
    def root(self) -> int:
        return self.parents.index(ROOT)

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges (parent, child), sorted lexicographically."""
        return tuple(sorted((v, i) for i, v in enumerate(self.parents) if v != ROOT))

    def children(self, j: int) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.parents) if v == j)

    def ancestors(self, i: int) -> frozenset[int]:
        """All nodes with a directed path to ``i`` (``i`` excluded)."""
        if not 0 <= i < self.p:
            raise IndexError(f"node {i} out of range")
        out = set()
        v = self.parents[i]
        while v != ROOT:
            out.add(v)
            v = self.parents[v]
        return frozenset(out)

    def descendants(self, j: int) -> frozenset[int]:
        if not 0 <= j < self.p:
            raise IndexError(f"node {j} out of range")
        out: set[int] = set()
        stack = [j]
        while stack:
            u = stack.pop()
            for v in self.children(u):
                if v not in out:
                    out.add(v)
                    stack.append(v)
        return frozenset(out)

    def skeleton(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(e) for e in self.edges)

    def to_dag(self) -> "Dag":
        return Dag(self.p, self.edges)


def validate_tree(p: int, edges) -> DirectedTree:
    """Build a DirectedTree from an edge list, rejecting anything that is
    not a directed spanning tree on ``p`` nodes."""
    edges = [(int(j), int(i)) for j, i in edges]
    for j, i in edges:
        if not (0 <= j < p and 0 <= i < p):
            raise ValueError(f"edge ({j},{i}) out of range for p={p}")
        if j == i:
            raise CycleError(f"self-loop at node {j}")
    heads = [i for _, i in edges]
    if len(set(heads)) < len(heads):
        dup = next(h for h in heads if heads.count(h) > 1)
        raise MultipleParentsError(f"node {dup} has more than one incoming edge")
    if len(edges) == p:
        # Distinct heads and one edge per node: a parent for everyone,
        # which forces a directed cycle somewhere.
        raise CycleError("every node has an incoming edge, so there is a cycle")
    if len(edges) != p - 1:
        raise DisconnectedError(
            f"a directed tree on {p} nodes has exactly {p - 1} edges, got {len(edges)}"
        )
    parents = [ROOT] * p
    for j, i in edges:
        parents[i] = j
    return DirectedTree(tuple(parents))


@dataclass(frozen=True)
class Dag:
    """A directed acyclic graph; nodes 0..p-1, edges as ordered pairs."""

    p: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        edges = tuple(sorted({(int(j), int(i)) for j, i in self.edges}))
        object.__setattr__(self, "edges", edges)
        if self.p < 1:
            raise ValueError("a DAG needs at least one node")
        for j, i in edges:
            if not (0 <= j < self.p and 0 <= i < self.p):
                raise ValueError(f"edge ({j},{i}) out of range for p={self.p}")
            if j == i:
                raise CycleError(f"self-loop at node {j}")
        # Kahn's algorithm; leftovers mean a cycle.
        indeg = [0] * self.p
        for _, i in edges:
            indeg[i] += 1
        queue = [v for v in range(self.p) if indeg[v] == 0]
        seen = 0
        while queue:
            u = queue.pop()
            seen += 1
            for j, i in edges:
                if j == u:
                    indeg[i] -= 1
                    if indeg[i] == 0:
                        queue.append(i)
        if seen != self.p:
            raise CycleError("edge set contains a directed cycle")

    def parents(self, i: int) -> tuple[int, ...]:
        return tuple(j for j, k in self.edges if k == i)

    def children(self, j: int) -> tuple[int, ...]:
        return tuple(i for k, i in self.edges if k == j)

    def descendants(self, j: int) -> frozenset[int]:
        out: set[int] = set()
        stack = [j]
        while stack:
            u = stack.pop()
            for v in self.children(u):
                if v not in out:
                    out.add(v)
                    stack.append(v)
        return frozenset(out)

    def ancestor_pairs(self) -> frozenset[tuple[int, int]]:
        """Transitive closure as ordered (ancestor, descendant) pairs."""
        pairs = set()
        for a in range(self.p):
            for d in self.descendants(a):
                pairs.add((a, d))
        return frozenset(pairs)


@dataclass(frozen=True)
class Substructure:
    """Constraints on a tree: required edges, forbidden edges, and an
    optional declared root."""

    required: tuple[tuple[int, int], ...] = ()
    forbidden: tuple[tuple[int, int], ...] = ()
    root: int | None = None

    def __post_init__(self) -> None:
        required = tuple(sorted({(int(j), int(i)) for j, i in self.required}))
        forbidden = tuple(sorted({(int(j), int(i)) for j, i in self.forbidden}))
        object.__setattr__(self, "required", required)
        object.__setattr__(self, "forbidden", forbidden)
        for j, i in required + forbidden:
            if j == i:
                raise ValueError(f"self-loop constraint ({j},{i})")
        overlap = set(required) & set(forbidden)
        if overlap:
            raise ValueError(f"edges both required and forbidden: {sorted(overlap)}")
        heads = [i for _, i in required]
        if len(set(heads)) < len(heads):
            raise ValueError("two required edges share a head node")
        if self.root is not None and any(i == self.root for _, i in required):
            raise ValueError(f"required edge points into the declared root {self.root}")

    @property
    def required_heads(self) -> frozenset[int]:
        return frozenset(i for _, i in self.required)

    def is_empty(self) -> bool:
        return not self.required and not self.forbidden and self.root is None

    def satisfied_by(self, tree: DirectedTree) -> bool:
        edges = set(tree.edges)
        if any(e not in edges for e in self.required):
            return False
        if any(e in edges for e in self.forbidden):
            return False
        if self.root is not None and tree.root != self.root:
            return False
        return True


def is_markov_equivalent(a: DirectedTree, b: DirectedTree) -> bool:
    """Trees are Markov equivalent iff their skeletons coincide."""
    if a.p != b.p:
        raise ValueError(f"node counts differ: {a.p} vs {b.p}")
    return a.skeleton() == b.skeleton()


def reversed_path(a: DirectedTree, b: DirectedTree) -> list[int]:
    """The directed path in ``a`` from root(a) to root(b) whose reversal
    turns ``a`` into ``b``.  Markov-equivalent distinct trees differ by
    exactly one such path."""
    if a.parents == b.parents:
        raise EqualTreesError("trees are identical")
    if not is_markov_equivalent(a, b):
        raise NotEquivalentError("trees have different skeletons")
    # root(b) is reachable from root(a) in a; collect that path.
    path = [b.root]
    v = a.parents[b.root]
    while v != ROOT:
        path.append(v)
        v = a.parents[v]
    path.reverse()  # now runs root(a) -> ... -> root(b)
    path_edges = set(zip(path, path[1:]))
    expected = (set(a.edges) - path_edges) | {(i, j) for j, i in path_edges}
    if expected != set(b.edges):
        raise NotEquivalentError("trees differ by more than one reversed path")
    return path


def _prufer_edges(seq: tuple[int, ...], p: int) -> list[tuple[int, int]]:
    # Decode a Prufer sequence into the edge list of a labelled tree.
    degree = [1] * p
    for v in seq:
        degree[v] += 1
    edges = []
    for v in seq:
        leaf = degree.index(1)
        edges.append((leaf, v))
        degree[leaf] = 0
        degree[v] -= 1
    u, w = (i for i in range(p) if degree[i] == 1)
    edges.append((u, w))
    return edges


def enumerate_trees(p: int):
    """Yield every labelled directed spanning tree on ``p`` nodes exactly
    once (there are p^(p-1) of them).  Capped at p <= 8: the count grows
    too fast for anything but oracle use."""
    if not 1 <= p <= ENUMERATION_CAP:
        raise ValueError(f"enumeration supported for 1 <= p <= {ENUMERATION_CAP}")
    if p == 1:
        yield DirectedTree((ROOT,))
        return
    for seq in itertools.product(range(p), repeat=p - 2):
        adjacency: list[list[int]] = [[] for _ in range(p)]
        for u, v in _prufer_edges(seq, p):
            adjacency[u].append(v)
            adjacency[v].append(u)
        for root in range(p):
            parents = [ROOT] * p
            stack = [root]
            seen = [False] * p
            seen[root] = True
            while stack:
                u = stack.pop()
                for v in adjacency[u]:
                    if not seen[v]:
                        seen[v] = True
                        parents[v] = u
                        stack.append(v)
            yield DirectedTree(tuple(parents))
