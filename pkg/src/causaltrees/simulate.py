"""Random causal-tree models and samplers for the simulation harness.

Builds random directed trees (two growth schemes), attaches smooth random
mechanisms drawn from a Gaussian process to every edge, and samples data with
optionally non-Gaussian additive noise.  Trees can be densified into DAGs to
probe robustness to violations of the tree assumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CholeskyFailure
from .graphs import ROOT, Dag, DirectedTree
from .scoring import Dataset

TYPE1 = 1
TYPE2 = 2

_GRID_THRESHOLD = 512
_BASE_JITTER = 1e-8
_CHOLESKY_RETRIES = 3


@dataclass(frozen=True)
class SimConfig:
    """Knobs for one simulated scenario.

    ``alpha`` deforms the Gaussian noise innovations: ``sign(Z) |Z|^alpha``
    with ``Z`` Gaussian, so ``alpha=1`` recovers Gaussian noise.  ``dag_prob``
    is the probability of adding each feasible extra edge on top of the tree
    (0 keeps the model a tree).
    """

    p: int
    n: int
    tree_type: int = TYPE2
    alpha: float = 1.0
    root_sigma: tuple[float, float] = (1.0, 2.0)
    noise_sigma: tuple[float, float] = (0.2, math.sqrt(2.0) / 5.0)
    dag_prob: float = 0.0
    gp_bandwidth: float = 1.0
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.p < 2:
            raise ValueError("p must be at least 2")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.tree_type not in (TYPE1, TYPE2):
            raise ValueError("tree_type must be 1 or 2")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        for lo, hi in (self.root_sigma, self.noise_sigma):
            if not (0 < lo <= hi):
                raise ValueError("sigma ranges must satisfy 0 < low <= high")
        if not 0 <= self.dag_prob <= 1:
            raise ValueError("dag_prob must be in [0, 1]")
        if self.gp_bandwidth <= 0:
            raise ValueError("gp_bandwidth must be positive")


def generate_tree(p: int, tree_type: int, rng: np.random.Generator) -> DirectedTree:
    """Draw a random directed tree on ``p`` nodes rooted at node 0.

    Type 1 scans candidate parents in index order and gives each node its
    first chance at a parent via a forced chain edge, with a 10% chance of
    attaching to an earlier node instead.  Type 2 attaches each node to a
    parent chosen uniformly among all earlier nodes, which yields shallower
    trees on average.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    parents = np.full(p, ROOT, dtype=np.int64)
    if tree_type == TYPE1:
        for j in range(p):
            for i in range(j + 1, p):
                if parents[i] != ROOT:
                    continue
                if i == j + 1:
                    parents[i] = j
                elif rng.random() < 0.1:
                    parents[i] = j
    elif tree_type == TYPE2:
        for i in range(1, p):
            parents[i] = int(rng.integers(0, i))
    else:
        raise ValueError("tree_type must be 1 or 2")
    return DirectedTree(tuple(int(v) for v in parents))


def extend_to_dag(tree: DirectedTree, prob: float, rng: np.random.Generator) -> Dag:
    """Add independent extra edges (lower index to higher) on top of a tree.

    Every pair ``j < i`` that is not already a tree edge receives an edge with
    probability ``prob``, scanned in row-major order so the draw sequence is
    reproducible.  Requires the tree's own edges to point from lower to higher
    index, which the generators in this module guarantee.
    """
    if not 0 <= prob <= 1:
        raise ValueError("prob must be in [0, 1]")
    for j, i in tree.edges:
        if j >= i:
            raise ValueError("tree edges must point from lower to higher index")
    p = tree.p
    slots = [
        (j, i)
        for j in range(p)
        for i in range(j + 1, p)
        if tree.parents[i] != j
    ]
    if slots:
        hits = rng.random(len(slots)) < prob
        extra = [slot for slot, hit in zip(slots, hits) if hit]
    else:
        extra = []
    return Dag(p, tuple(sorted(tree.edges + tuple(extra))))


def _gp_support_draw(
    x: np.ndarray,
    bandwidth: float,
    rng: np.random.Generator,
    grid_threshold: int = _GRID_THRESHOLD,
    jitter: float = _BASE_JITTER,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw one RBF-kernel Gaussian-process path on a support for ``x``.

    Uses the distinct values of ``x`` directly when there are few of them,
    otherwise an equispaced grid spanning their range; returns the support and
    the sampled function values on it.
    """
    support = np.unique(x)
    if support.size > grid_threshold:
        support = np.linspace(support[0], support[-1], grid_threshold)
    m = support.size
    if m == 1:
        return support, rng.standard_normal(1) * math.sqrt(1.0 + jitter)
    delta = support[:, None] - support[None, :]
    cov = np.exp(-(delta * delta) / (2.0 * bandwidth * bandwidth))
    eps = jitter
    for _ in range(_CHOLESKY_RETRIES):
        try:
            chol = np.linalg.cholesky(cov + eps * np.eye(m))
        except np.linalg.LinAlgError:
            eps *= 10.0
            continue
        return support, chol @ rng.standard_normal(m)
    raise CholeskyFailure(
        f"GP covariance factorization failed after {_CHOLESKY_RETRIES} "
        f"jitter escalations (final jitter {eps:g})"
    )


def sample_gp_mechanism(
    inputs: np.ndarray,
    bandwidth: float,
    rng: np.random.Generator,
    grid_threshold: int = _GRID_THRESHOLD,
    jitter: float = _BASE_JITTER,
) -> np.ndarray:
    """Evaluate a freshly drawn random smooth function at ``inputs``.

    Exact joint Gaussian draw when the number of distinct inputs is at most
    ``grid_threshold``; above that the path is drawn on an equispaced grid and
    evaluated by linear interpolation.
    """
    x = np.asarray(inputs, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("inputs must be non-empty")
    if not np.all(np.isfinite(x)):
        raise ValueError("inputs must be finite")
    support, values = _gp_support_draw(x, bandwidth, rng, grid_threshold, jitter)
    if support.size == 1:
        return np.full(x.size, values[0])
    return np.interp(x, support, values)


def sample_noise(
    n: int, sigma: float, alpha: float, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``sign(Z) |Z|^alpha`` noise with ``Z ~ N(0, sigma^2)``."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    z = rng.normal(0.0, sigma, size=n)
    if alpha == 1.0:
        return z
    return np.sign(z) * np.abs(z) ** alpha


@dataclass
class GpMechanism:
    """Edge mechanism drawn lazily from a Gaussian process.

    The path is realized on its support the first time the mechanism is
    evaluated and cached, so repeated evaluations (and fresh samples from the
    same model) reuse one fixed function.
    """

    bandwidth: float = 1.0
    grid_threshold: int = _GRID_THRESHOLD
    jitter: float = _BASE_JITTER
    grid: np.ndarray | None = field(default=None, repr=False)
    values: np.ndarray | None = field(default=None, repr=False)

    def evaluate(
        self, x: np.ndarray, rng: np.random.Generator | None = None
    ) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64).ravel()
        if self.grid is None:
            if rng is None:
                raise ValueError("unrealized mechanism requires an rng to draw from")
            self.grid, self.values = _gp_support_draw(
                x, self.bandwidth, rng, self.grid_threshold, self.jitter
            )
        if self.grid.size == 1:
            return np.full(x.size, self.values[0])
        return np.interp(x, self.grid, self.values)


@dataclass(frozen=True)
class LambdaMechanism:
    """Cubic-to-linear interpolation ``x -> scale * ((1-lam) x^3 + lam x)``.

    ``lam=1`` is the purely linear (non-identified Gaussian) case; ``lam=0``
    is the purely cubic one.
    """

    lam: float
    scale: float = 1.0

    def evaluate(
        self, x: np.ndarray, rng: np.random.Generator | None = None
    ) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return self.scale * ((1.0 - self.lam) * x**3 + self.lam * x)


@dataclass
class ScmSpec:
    """A fully specified additive-noise structural causal model.

    ``mechanisms`` maps each edge ``(j, i)`` to the function applied to the
    parent value; a node's value is the sum of its edge mechanisms plus its
    own noise term with per-node ``sigma`` and deformation exponent ``alpha``.
    """

    graph: DirectedTree | Dag
    mechanisms: dict[tuple[int, int], GpMechanism | LambdaMechanism]
    sigmas: np.ndarray
    alphas: np.ndarray

    def __post_init__(self) -> None:
        edges = set(self.graph.edges)
        if set(self.mechanisms) != edges:
            raise ValueError("mechanisms must cover exactly the graph's edges")
        self.sigmas = np.asarray(self.sigmas, dtype=np.float64)
        self.alphas = np.asarray(self.alphas, dtype=np.float64)
        p = self.graph.p
        if self.sigmas.shape != (p,) or self.alphas.shape != (p,):
            raise ValueError("sigmas and alphas must have one entry per node")
        if np.any(self.sigmas <= 0) or np.any(self.alphas <= 0):
            raise ValueError("sigmas and alphas must be positive")

    @property
    def p(self) -> int:
        return self.graph.p


def random_scm(
    graph: DirectedTree | Dag, config: SimConfig, rng: np.random.Generator
) -> ScmSpec:
    """Equip a graph with random GP mechanisms and per-node noise scales.

    Root nodes (no parents) get the wide ``root_sigma`` range, all others the
    narrow ``noise_sigma`` range; the deformation exponent ``config.alpha``
    applies to every node.
    """
    p = graph.p
    if isinstance(graph, DirectedTree):
        is_root = [i == graph.root for i in range(p)]
    else:
        is_root = [len(graph.parents(i)) == 0 for i in range(p)]
    sigmas = np.empty(p)
    for i in range(p):
        lo, hi = config.root_sigma if is_root[i] else config.noise_sigma
        sigmas[i] = rng.uniform(lo, hi)
    mechanisms = {
        edge: GpMechanism(bandwidth=config.gp_bandwidth) for edge in graph.edges
    }
    return ScmSpec(
        graph=graph,
        mechanisms=mechanisms,
        sigmas=sigmas,
        alphas=np.full(p, config.alpha),
    )


def _topological_order(graph: DirectedTree | Dag) -> list[int]:
    if isinstance(graph, DirectedTree):
        order: list[int] = [graph.root]
        children = graph.children
        queue = list(children(graph.root))
        while queue:
            node = queue.pop(0)
            order.append(node)
            queue.extend(children(node))
        return order
    p = graph.p
    remaining = {i: len(graph.parents(i)) for i in range(p)}
    frontier = [i for i in range(p) if remaining[i] == 0]
    order = []
    while frontier:
        node = frontier.pop(0)
        order.append(node)
        for child in graph.children(node):
            remaining[child] -= 1
            if remaining[child] == 0:
                frontier.append(child)
    return order


def sample_scm(spec: ScmSpec, n: int, rng: np.random.Generator) -> Dataset:
    """Draw ``n`` joint observations from a structural causal model.

    Each node and each edge consumes its own child stream of ``rng`` (noise
    streams first, in node order, then mechanism streams in sorted edge
    order), so the draw is invariant to evaluation order.  Unrealized GP
    mechanisms are drawn on first use and cached on ``spec``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    p = spec.p
    edges = sorted(spec.graph.edges)
    streams = rng.spawn(p + len(edges))
    noise_rng = streams[:p]
    mech_rng = {edge: streams[p + k] for k, edge in enumerate(edges)}
    if isinstance(spec.graph, DirectedTree):
        parents_of = {
            i: () if spec.graph.parents[i] == ROOT else (spec.graph.parents[i],)
            for i in range(p)
        }
    else:
        parents_of = {i: spec.graph.parents(i) for i in range(p)}
    values = np.empty((n, p))
    for i in _topological_order(spec.graph):
        acc = sample_noise(n, float(spec.sigmas[i]), float(spec.alphas[i]), noise_rng[i])
        for j in parents_of[i]:
            acc = acc + spec.mechanisms[(j, i)].evaluate(values[:, j], mech_rng[(j, i)])
        values[:, i] = acc
    return Dataset(values)


def bivariate_scm(lam: float, alpha: float) -> ScmSpec:
    """Two-node model ``X -> Y`` with ``Y = (1-lam) X^3 + lam X + N``.

    The cause's noise is deformed by ``alpha`` while the effect's additive
    noise stays Gaussian, so ``lam=1, alpha=1`` is the linear-Gaussian
    non-identified corner and moving either knob restores identifiability.
    """
    tree = DirectedTree((ROOT, 0))
    return ScmSpec(
        graph=tree,
        mechanisms={(0, 1): LambdaMechanism(lam)},
        sigmas=np.array([1.0, 1.0]),
        alphas=np.array([alpha, 1.0]),
    )


def simulate(config: SimConfig) -> tuple[Dataset, DirectedTree | Dag, ScmSpec]:
    """Generate a graph, a random model on it, and one dataset, end to end."""
    rng = np.random.Generator(np.random.Philox(config.seed))
    tree = generate_tree(config.p, config.tree_type, rng)
    graph: DirectedTree | Dag = tree
    if config.dag_prob > 0:
        graph = extend_to_dag(tree, config.dag_prob, rng)
    spec = random_scm(graph, config, rng)
    data = sample_scm(spec, config.n, rng)
    return data, graph, spec
