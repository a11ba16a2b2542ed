"""Directed-tree and DAG structure types: construction, validation,
relations, Markov equivalence, path reversal and exhaustive enumeration.
"""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from causaltrees.errors import (
    CycleError,
    DisconnectedError,
    EqualTreesError,
    MultipleParentsError,
    MultipleRootsError,
    NotEquivalentError,
)
from causaltrees.graphs import (
    ROOT,
    Dag,
    DirectedTree,
    Substructure,
    enumerate_trees,
    is_markov_equivalent,
    reversed_path,
    validate_tree,
)


def random_tree(rng: np.random.Generator, p: int) -> DirectedTree:
    """Uniform random labelled rooted tree via a random parent-pointer walk."""
    order = rng.permutation(p)
    parents = [ROOT] * p
    for k in range(1, p):
        parents[order[k]] = int(order[rng.integers(0, k)])
    return DirectedTree(tuple(parents))


tree_strategy = st.builds(
    lambda seed, p: random_tree(np.random.default_rng(seed), p),
    st.integers(0, 2**32 - 1),
    st.integers(2, 7),
)


class TestValidateTree:
    def test_chain(self):
        t = validate_tree(3, [(0, 1), (1, 2)])
        assert t.root == 0
        assert t.edges == ((0, 1), (1, 2))

    def test_three_cycle(self):
        with pytest.raises(CycleError):
            validate_tree(3, [(0, 1), (1, 2), (2, 0)])

    def test_two_parents(self):
        with pytest.raises(MultipleParentsError):
            validate_tree(3, [(0, 2), (1, 2)])

    def test_too_few_edges(self):
        with pytest.raises(DisconnectedError):
            validate_tree(3, [(0, 1)])

    def test_self_loop(self):
        with pytest.raises(CycleError):
            validate_tree(2, [(1, 1)])

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            validate_tree(2, [(0, 5)])

    def test_direct_construction_rejects_two_roots(self):
        with pytest.raises(MultipleRootsError):
            DirectedTree((ROOT, ROOT, 0))

    def test_direct_construction_rejects_cycle(self):
        with pytest.raises(CycleError):
            DirectedTree((1, 0, 0))


class TestRelations:
    def test_chain_ancestors(self):
        t = validate_tree(3, [(0, 1), (1, 2)])
        assert t.ancestors(2) == {0, 1}
        assert t.ancestors(1) == {0}

    def test_root_has_no_ancestors(self):
        t = validate_tree(4, [(2, 0), (2, 1), (0, 3)])
        assert t.ancestors(t.root) == frozenset()

    def test_leaf_ancestors_are_path_to_root(self):
        # Caterpillar shape: long spine with leaves hanging off it.
        t = validate_tree(
            7, [(0, 1), (1, 2), (2, 3), (1, 4), (2, 5), (3, 6)]
        )
        assert t.ancestors(6) == {0, 1, 2, 3}

    def test_descendants(self):
        t = validate_tree(4, [(0, 1), (1, 2), (1, 3)])
        assert t.descendants(1) == {2, 3}
        assert t.descendants(0) == {1, 2, 3}
        assert t.descendants(3) == frozenset()

    def test_ancestors_out_of_range(self):
        t = validate_tree(2, [(0, 1)])
        with pytest.raises(IndexError):
            t.ancestors(2)

    @given(tree_strategy)
    def test_ancestors_transitively_closed(self, t):
        for i in range(t.p):
            anc_i = t.ancestors(i)
            for j in anc_i:
                assert t.ancestors(j) <= anc_i

    @given(tree_strategy)
    def test_ancestors_and_descendants_agree(self, t):
        for i in range(t.p):
            for j in t.ancestors(i):
                assert i in t.descendants(j)


class TestMarkovEquivalence:
    def test_reversed_chain_equivalent(self):
        a = validate_tree(3, [(0, 1), (1, 2)])
        b = validate_tree(3, [(2, 1), (1, 0)])
        assert is_markov_equivalent(a, b)

    def test_chain_vs_fork_not_equivalent(self):
        a = validate_tree(3, [(0, 1), (1, 2)])
        b = validate_tree(3, [(0, 1), (0, 2)])
        assert not is_markov_equivalent(a, b)

    @given(tree_strategy)
    def test_reflexive(self, t):
        assert is_markov_equivalent(t, t)

    def test_dimension_mismatch(self):
        a = validate_tree(2, [(0, 1)])
        b = validate_tree(3, [(0, 1), (1, 2)])
        with pytest.raises(ValueError):
            is_markov_equivalent(a, b)


class TestReversedPath:
    def test_full_chain_reversal(self):
        a = validate_tree(3, [(0, 1), (1, 2)])
        b = validate_tree(3, [(2, 1), (1, 0)])
        assert reversed_path(a, b) == [0, 1, 2]

    def test_partial_reversal_with_side_branch(self):
        a = validate_tree(4, [(0, 1), (1, 2), (1, 3)])
        b = validate_tree(4, [(2, 1), (1, 0), (1, 3)])
        assert reversed_path(a, b) == [0, 1, 2]

    def test_equal_trees(self):
        a = validate_tree(3, [(0, 1), (1, 2)])
        with pytest.raises(EqualTreesError):
            reversed_path(a, a)

    def test_different_skeletons(self):
        a = validate_tree(3, [(0, 1), (1, 2)])
        b = validate_tree(3, [(0, 1), (0, 2)])
        with pytest.raises(NotEquivalentError):
            reversed_path(a, b)

    def test_rerooting_at_middle_node(self):
        a = validate_tree(3, [(0, 1), (1, 2)])
        b = validate_tree(3, [(1, 0), (1, 2)])
        assert reversed_path(a, b) == [0, 1]

    @given(st.integers(0, 2**32 - 1), st.integers(2, 6))
    def test_reapplying_reversal_reproduces_b(self, seed, p):
        # Re-rooting a tree at any other node reverses exactly the
        # root-to-new-root path; check the reported path does rebuild b.
        rng = np.random.default_rng(seed)
        a = random_tree(rng, p)
        new_root = int(rng.integers(0, p))
        if new_root == a.root:
            new_root = (new_root + 1) % p
        undirected = {frozenset(e) for e in a.edges}
        parents = [ROOT] * p
        seen = {new_root}
        stack = [new_root]
        while stack:
            u = stack.pop()
            for e in undirected:
                if u in e:
                    (v,) = e - {u}
                    if v not in seen:
                        seen.add(v)
                        parents[v] = u
                        stack.append(v)
        b = DirectedTree(tuple(parents))
        path = reversed_path(a, b)
        assert path[0] == a.root and path[-1] == b.root
        path_edges = set(zip(path, path[1:]))
        rebuilt = (set(a.edges) - path_edges) | {(i, j) for j, i in path_edges}
        assert rebuilt == set(b.edges)


class TestEnumeration:
    @pytest.mark.parametrize("p,count", [(1, 1), (2, 2), (3, 9), (4, 64)])
    def test_small_counts(self, p, count):
        assert sum(1 for _ in enumerate_trees(p)) == count

    @pytest.mark.parametrize("p", [5, 6])
    def test_cayley_count(self, p):
        assert sum(1 for _ in enumerate_trees(p)) == p ** (p - 1)

    def test_all_distinct(self):
        seen = {t.parents for t in enumerate_trees(4)}
        assert len(seen) == 64

    def test_round_trip_through_validate(self):
        for t in enumerate_trees(4):
            assert validate_tree(t.p, t.edges).parents == t.parents

    def test_cap(self):
        with pytest.raises(ValueError):
            list(enumerate_trees(9))


class TestDag:
    def test_cycle_rejected(self):
        with pytest.raises(CycleError):
            Dag(3, [(0, 1), (1, 2), (2, 0)])

    def test_duplicate_edges_collapse(self):
        d = Dag(3, [(0, 1), (0, 1), (1, 2)])
        assert d.edges == ((0, 1), (1, 2))

    def test_parents_children(self):
        d = Dag(4, [(0, 2), (1, 2), (2, 3)])
        assert d.parents(2) == (0, 1)
        assert d.children(2) == (3,)

    def test_ancestor_pairs(self):
        d = Dag(3, [(0, 1), (1, 2)])
        assert d.ancestor_pairs() == {(0, 1), (0, 2), (1, 2)}

    @given(tree_strategy)
    def test_tree_to_dag_preserves_structure(self, t):
        d = t.to_dag()
        assert d.edges == t.edges
        for v in range(t.p):
            assert d.descendants(v) == t.descendants(v)


class TestSubstructure:
    def test_required_forbidden_overlap(self):
        with pytest.raises(ValueError):
            Substructure(required=((0, 1),), forbidden=((0, 1),))

    def test_two_required_into_same_head(self):
        with pytest.raises(ValueError):
            Substructure(required=((0, 2), (1, 2)))

    def test_required_into_declared_root(self):
        with pytest.raises(ValueError):
            Substructure(required=((0, 1),), root=1)

    def test_satisfied_by(self):
        t = validate_tree(3, [(0, 1), (1, 2)])
        assert Substructure(required=((0, 1),)).satisfied_by(t)
        assert not Substructure(required=((1, 0),)).satisfied_by(t)
        assert not Substructure(forbidden=((1, 2),)).satisfied_by(t)
        assert Substructure(root=0).satisfied_by(t)
        assert not Substructure(root=2).satisfied_by(t)

    def test_empty(self):
        assert Substructure().is_empty()
        assert not Substructure(root=0).is_empty()
