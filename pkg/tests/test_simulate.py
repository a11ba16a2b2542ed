"""Tests for random tree generation, GP mechanisms, noise, and SCM sampling."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causaltrees.errors import CholeskyFailure
from causaltrees.graphs import ROOT, Dag, DirectedTree, validate_tree
from causaltrees.simulate import (
    TYPE1,
    TYPE2,
    GpMechanism,
    LambdaMechanism,
    ScmSpec,
    SimConfig,
    bivariate_scm,
    extend_to_dag,
    generate_tree,
    random_scm,
    sample_gp_mechanism,
    sample_noise,
    sample_scm,
    simulate,
)


def philox(seed):
    return np.random.Generator(np.random.Philox(seed))


class TestGenerateTree:
    def test_type2_two_nodes_always_chain(self):
        # Node 1's only possible parent is node 0.
        for seed in range(50):
            tree = generate_tree(2, TYPE2, philox(seed))
            assert tree.edges == ((0, 1),)

    def test_type1_three_nodes_fork_frequency(self):
        # With three nodes the generator flips exactly one 10% coin: heads
        # gives the fork {0->1, 0->2}, tails the chain {0->1, 1->2}.
        fork = frozenset({(0, 1), (0, 2)})
        chain = frozenset({(0, 1), (1, 2)})
        hits = 0
        for seed in range(10000):
            edges = frozenset(generate_tree(3, TYPE1, philox(seed)).edges)
            assert edges in (fork, chain)
            hits += edges == fork
        assert abs(hits / 10000 - 0.1) < 0.02

    def test_roots_at_node_zero(self):
        for tree_type in (TYPE1, TYPE2):
            tree = generate_tree(12, tree_type, philox(3))
            assert tree.root == 0

    def test_type2_has_fewer_leaves_than_type1_at_p100(self):
        # Type 1 parks most late nodes on early parents, leaving a large
        # leaf set; type 2's uniform attachment leaves roughly half.
        def mean_leaves(tree_type):
            counts = []
            for seed in range(100):
                tree = generate_tree(100, tree_type, philox(seed))
                internal = {j for j in tree.parents if j != ROOT}
                counts.append(100 - len(internal))
            return float(np.mean(counts))

        assert mean_leaves(TYPE2) < mean_leaves(TYPE1)

    def test_rejects_single_node(self):
        with pytest.raises(ValueError):
            generate_tree(1, TYPE2, philox(0))

    def test_rejects_unknown_type(self):
        with pytest.raises(ValueError):
            generate_tree(4, 3, philox(0))

    @given(
        p=st.integers(2, 32),
        tree_type=st.sampled_from([TYPE1, TYPE2]),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_output_is_always_a_valid_tree(self, p, tree_type, seed):
        tree = generate_tree(p, tree_type, philox(seed))
        rebuilt = validate_tree(p, tree.edges)
        assert rebuilt.parents == tree.parents
        assert all(j < i for j, i in tree.edges)


class TestGpSampling:
    def test_single_point_is_standard_normal(self):
        rng = philox(11)
        draws = np.array(
            [sample_gp_mechanism(np.array([0.7]), 1.0, r)[0] for r in rng.spawn(2000)]
        )
        assert abs(draws.mean()) < 0.1
        assert abs(draws.var() - 1.0) < 0.15

    def test_identical_inputs_get_identical_outputs(self):
        out = sample_gp_mechanism(np.array([1.3, -0.2, 1.3]), 1.0, philox(5))
        assert abs(out[0] - out[2]) < 1e-4

    def test_empirical_covariance_matches_kernel(self):
        x = np.array([-1.0, 0.0, 0.5, 2.0])
        kernel = np.exp(-((x[:, None] - x[None, :]) ** 2) / 2.0)
        rng = philox(99)
        draws = np.stack(
            [sample_gp_mechanism(x, 1.0, r) for r in rng.spawn(2000)]
        )
        empirical = draws.T @ draws / draws.shape[0]
        assert np.max(np.abs(empirical - kernel)) < 0.05

    def test_bandwidth_controls_wiggle(self):
        # A long length-scale path moves far less between nearby inputs
        # than a short one, on average.
        x = np.linspace(0.0, 1.0, 50)

        def mean_step(bandwidth, seed):
            path = sample_gp_mechanism(x, bandwidth, philox(seed))
            return float(np.mean(np.abs(np.diff(path))))

        wide = np.mean([mean_step(5.0, s) for s in range(20)])
        narrow = np.mean([mean_step(0.05, s) for s in range(20)])
        assert wide < narrow

    def test_many_distinct_points_use_interpolation(self):
        x = philox(2).normal(size=2000)
        out = sample_gp_mechanism(x, 1.0, philox(3), grid_threshold=128)
        assert out.shape == (2000,)
        assert np.all(np.isfinite(out))

    def test_rejects_empty_and_nonfinite_inputs(self):
        with pytest.raises(ValueError):
            sample_gp_mechanism(np.array([]), 1.0, philox(0))
        with pytest.raises(ValueError):
            sample_gp_mechanism(np.array([1.0, np.nan]), 1.0, philox(0))

    def test_cholesky_failure_after_jitter_escalation(self, monkeypatch):
        calls = []

        def always_fail(matrix):
            calls.append(matrix)
            raise np.linalg.LinAlgError("not positive definite")

        monkeypatch.setattr(np.linalg, "cholesky", always_fail)
        with pytest.raises(CholeskyFailure):
            sample_gp_mechanism(np.array([0.0, 1.0]), 1.0, philox(0))
        assert len(calls) == 3


class TestSampleNoise:
    def test_alpha_one_is_exactly_gaussian(self):
        draws = sample_noise(1000, 1.7, 1.0, philox(8))
        reference = philox(8).normal(0.0, 1.7, size=1000)
        np.testing.assert_array_equal(draws, reference)

    def test_alpha_one_moments(self):
        n, sigma = 40000, 1.7
        draws = sample_noise(n, sigma, 1.0, philox(21))
        assert abs(draws.mean()) < 3 * sigma / math.sqrt(n)
        assert abs(draws.std() - sigma) < 3 * sigma / math.sqrt(2 * n)

    def test_alpha_two_has_heavier_tails(self):
        draws = sample_noise(100000, 1.0, 2.0, philox(13))
        kurtosis = np.mean(draws**4) / np.mean(draws**2) ** 2
        assert kurtosis > 3.5

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.0])
    def test_sign_symmetry(self, alpha):
        draws = sample_noise(50000, 1.0, alpha, philox(55))
        assert abs(draws.mean()) < 4 * draws.std() / math.sqrt(draws.size)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            sample_noise(10, 0.0, 1.0, philox(0))
        with pytest.raises(ValueError):
            sample_noise(10, 1.0, 0.0, philox(0))


class TestMechanisms:
    def test_lambda_mechanism_formula(self):
        x = np.array([-1.5, 0.0, 0.5, 2.0])
        mech = LambdaMechanism(0.3, scale=2.0)
        expected = 2.0 * (0.7 * x**3 + 0.3 * x)
        np.testing.assert_allclose(mech.evaluate(x), expected, rtol=0, atol=0)

    def test_lambda_endpoints(self):
        x = np.array([-2.0, 3.0])
        np.testing.assert_array_equal(LambdaMechanism(1.0).evaluate(x), x)
        np.testing.assert_array_equal(LambdaMechanism(0.0).evaluate(x), x**3)

    def test_gp_mechanism_caches_its_path(self):
        x = np.array([0.0, 0.4, 1.1])
        mech = GpMechanism()
        first = mech.evaluate(x, philox(17))
        second = mech.evaluate(x)  # no rng: must reuse the cached path
        np.testing.assert_array_equal(first, second)
        inside = mech.evaluate(np.array([0.2]))
        assert np.isfinite(inside[0])

    def test_unrealized_gp_mechanism_requires_rng(self):
        with pytest.raises(ValueError):
            GpMechanism().evaluate(np.array([0.0, 1.0]))


class TestScmSpec:
    def test_mechanisms_must_cover_edges(self):
        tree = DirectedTree((ROOT, 0, 1))
        with pytest.raises(ValueError):
            ScmSpec(tree, {(0, 1): LambdaMechanism(1.0)}, np.ones(3), np.ones(3))

    def test_rejects_bad_sigmas_and_alphas(self):
        tree = DirectedTree((ROOT, 0))
        mechs = {(0, 1): LambdaMechanism(1.0)}
        with pytest.raises(ValueError):
            ScmSpec(tree, dict(mechs), np.ones(3), np.ones(2))
        with pytest.raises(ValueError):
            ScmSpec(tree, dict(mechs), np.array([1.0, 0.0]), np.ones(2))
        with pytest.raises(ValueError):
            ScmSpec(tree, dict(mechs), np.ones(2), np.array([1.0, -2.0]))

    def test_bivariate_construction(self):
        spec = bivariate_scm(0.25, 3.0)
        assert spec.graph.edges == ((0, 1),)
        assert spec.graph.root == 0
        mech = spec.mechanisms[(0, 1)]
        assert isinstance(mech, LambdaMechanism)
        assert mech.lam == 0.25
        np.testing.assert_array_equal(spec.sigmas, [1.0, 1.0])
        np.testing.assert_array_equal(spec.alphas, [3.0, 1.0])


class TestSampleScm:
    def test_root_column_is_the_pure_noise_draw(self):
        # Streams are spawned noise-first in node order, so the root column
        # must coincide bit for bit with an independently reconstructed draw.
        spec = bivariate_scm(0.0, 1.0)
        data = sample_scm(spec, 500, philox(77))
        streams = philox(77).spawn(3)
        x = streams[0].normal(0.0, 1.0, size=500)
        y = x**3 + streams[1].normal(0.0, 1.0, size=500)
        np.testing.assert_array_equal(data.values[:, 0], x)
        np.testing.assert_array_equal(data.values[:, 1], y)

    def test_dag_sums_mechanisms_over_parents(self):
        dag = Dag(3, ((0, 1), (0, 2), (1, 2)))
        mechs = {
            (0, 1): LambdaMechanism(1.0, scale=0.5),
            (0, 2): LambdaMechanism(1.0, scale=-1.0),
            (1, 2): LambdaMechanism(0.0),
        }
        spec = ScmSpec(dag, mechs, np.array([1.0, 0.5, 0.25]), np.ones(3))
        data = sample_scm(spec, 200, philox(31))
        streams = philox(31).spawn(6)
        x0 = streams[0].normal(0.0, 1.0, size=200)
        x1 = 0.5 * x0 + streams[1].normal(0.0, 0.5, size=200)
        x2 = -x0 + x1**3 + streams[2].normal(0.0, 0.25, size=200)
        np.testing.assert_array_equal(data.values[:, 0], x0)
        np.testing.assert_array_equal(data.values[:, 1], x1)
        np.testing.assert_allclose(data.values[:, 2], x2, rtol=0, atol=1e-12)

    def test_linear_chain_matches_closed_form_covariance(self):
        p = 3
        tree = DirectedTree((ROOT, 0, 1))
        coef = 0.8
        mechs = {edge: LambdaMechanism(1.0, scale=coef) for edge in tree.edges}
        sigmas = np.array([1.0, 0.6, 0.4])
        spec = ScmSpec(tree, mechs, sigmas, np.ones(p))
        data = sample_scm(spec, 100000, philox(6))

        b = np.zeros((p, p))
        for j, i in tree.edges:
            b[j, i] = coef
        transport = np.linalg.inv(np.eye(p) - b.T)
        oracle = transport @ np.diag(sigmas**2) @ transport.T
        empirical = data.values.T @ data.values / data.n
        np.testing.assert_allclose(empirical, oracle, rtol=0.05, atol=0.01)

    def test_rejects_nonpositive_n(self):
        with pytest.raises(ValueError):
            sample_scm(bivariate_scm(1.0, 1.0), 0, philox(0))


class TestExtendToDag:
    def test_prob_zero_keeps_the_tree(self):
        tree = generate_tree(8, TYPE2, philox(4))
        dag = extend_to_dag(tree, 0.0, philox(5))
        assert dag.edges == tuple(sorted(tree.edges))

    def test_prob_one_fills_the_upper_triangle(self):
        tree = generate_tree(5, TYPE2, philox(4))
        dag = extend_to_dag(tree, 1.0, philox(5))
        assert dag.edges == tuple(
            (j, i) for j in range(5) for i in range(j + 1, 5)
        )

    def test_added_edge_count_matches_binomial_mean(self):
        tree = generate_tree(32, TYPE2, philox(0))
        slots = 32 * 31 // 2 - len(tree.edges)
        rng = philox(14)
        added = [
            len(extend_to_dag(tree, 0.05, r).edges) - len(tree.edges)
            for r in rng.spawn(400)
        ]
        expected = 0.05 * slots
        assert abs(np.mean(added) - expected) < 0.1 * expected

    def test_stays_single_rooted(self):
        tree = generate_tree(10, TYPE1, philox(9))
        dag = extend_to_dag(tree, 0.3, philox(10))
        roots = [i for i in range(10) if not dag.parents(i)]
        assert roots == [0]

    def test_rejects_descending_tree_edges(self):
        tree = DirectedTree((1, ROOT))
        with pytest.raises(ValueError):
            extend_to_dag(tree, 0.1, philox(0))

    def test_rejects_bad_probability(self):
        tree = generate_tree(3, TYPE2, philox(0))
        for prob in (-0.1, 1.5):
            with pytest.raises(ValueError):
                extend_to_dag(tree, prob, philox(0))

    @given(
        p=st.integers(2, 16),
        prob=st.floats(0.0, 1.0),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_result_always_contains_the_tree(self, p, prob, seed):
        rng = philox(seed)
        tree = generate_tree(p, TYPE2, rng)
        dag = extend_to_dag(tree, prob, rng)
        assert set(dag.edges) >= set(tree.edges)
        assert all(j < i for j, i in dag.edges)


class TestRandomScm:
    def test_sigma_ranges_split_root_from_the_rest(self):
        config = SimConfig(
            p=6, n=10, root_sigma=(5.0, 6.0), noise_sigma=(0.1, 0.2), seed=0
        )
        rng = philox(1)
        tree = generate_tree(6, TYPE2, rng)
        spec = random_scm(tree, config, rng)
        assert 5.0 <= spec.sigmas[tree.root] <= 6.0
        for i in range(6):
            if i != tree.root:
                assert 0.1 <= spec.sigmas[i] <= 0.2
        assert all(
            isinstance(m, GpMechanism) and m.bandwidth == config.gp_bandwidth
            for m in spec.mechanisms.values()
        )
        np.testing.assert_array_equal(spec.alphas, np.ones(6))


class TestSimulate:
    def test_identical_config_gives_bit_identical_data(self):
        config = SimConfig(p=6, n=50, tree_type=TYPE2, seed=42)
        data_a, graph_a, spec_a = simulate(config)
        data_b, graph_b, spec_b = simulate(config)
        assert data_a.values.tobytes() == data_b.values.tobytes()
        assert graph_a.parents == graph_b.parents
        np.testing.assert_array_equal(spec_a.sigmas, spec_b.sigmas)

    def test_different_seeds_give_different_data(self):
        data_a, _, _ = simulate(SimConfig(p=4, n=30, seed=1))
        data_b, _, _ = simulate(SimConfig(p=4, n=30, seed=2))
        assert data_a.values.tobytes() != data_b.values.tobytes()

    def test_dag_mode_returns_a_dag(self):
        config = SimConfig(p=8, n=20, dag_prob=0.3, seed=7)
        data, graph, spec = simulate(config)
        assert isinstance(graph, Dag)
        assert spec.graph is graph
        assert data.values.shape == (20, 8)

    def test_dataset_shape_and_column_count(self):
        data, graph, _ = simulate(SimConfig(p=5, n=17, seed=3))
        assert data.values.shape == (17, 5)
        assert graph.p == 5

    @settings(max_examples=100)
    @given(
        p=st.integers(2, 6),
        n=st.integers(3, 40),
        tree_type=st.sampled_from([TYPE1, TYPE2]),
        seed=st.integers(0, 2**16),
    )
    def test_determinism_property(self, p, n, tree_type, seed):
        config = SimConfig(p=p, n=n, tree_type=tree_type, seed=seed)
        first, _, _ = simulate(config)
        second, _, _ = simulate(config)
        assert first.values.tobytes() == second.values.tobytes()


class TestSimConfig:
    def test_rejects_invalid_fields(self):
        good = dict(p=4, n=100)
        bad = [
            dict(p=1, n=100),
            dict(p=4, n=0),
            dict(p=4, n=100, tree_type=3),
            dict(p=4, n=100, alpha=0.0),
            dict(p=4, n=100, root_sigma=(0.0, 1.0)),
            dict(p=4, n=100, noise_sigma=(2.0, 1.0)),
            dict(p=4, n=100, dag_prob=-0.1),
            dict(p=4, n=100, dag_prob=1.5),
            dict(p=4, n=100, gp_bandwidth=0.0),
        ]
        SimConfig(**good)
        for kwargs in bad:
            with pytest.raises(ValueError):
                SimConfig(**kwargs)

    def test_boundary_dag_prob_allowed(self):
        SimConfig(p=4, n=100, dag_prob=1.0)
