"""Round-trip and validation tests for CSV/JSON readers and writers."""

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from causaltrees.arborescence import FORBIDDEN, WeightMatrix
from causaltrees.fileio import (
    dag_to_dict,
    graph_from_dict,
    read_dataset_csv,
    read_graph_json,
    read_tree_json,
    read_weights_csv,
    tree_to_dict,
    write_dataset_csv,
    write_graph_json,
    write_json_report,
    write_weights_csv,
)
from causaltrees.graphs import ROOT, Dag, DirectedTree
from causaltrees.scoring import Dataset


class TestDatasetCsv:
    def test_round_trip_is_bit_exact(self, tmp_path):
        rng = np.random.Generator(np.random.Philox(3))
        data = Dataset(rng.normal(size=(20, 4)) * 10.0 ** rng.integers(-8, 8, (20, 4)))
        path = tmp_path / "data.csv"
        write_dataset_csv(path, data)
        back = read_dataset_csv(path)
        np.testing.assert_array_equal(back.values, data.values)
        assert back.names == data.names

    def test_header_names_survive(self, tmp_path):
        data = Dataset(np.eye(3) + 1.0, names=("alpha", "beta", "gamma"))
        path = tmp_path / "named.csv"
        write_dataset_csv(path, data)
        assert read_dataset_csv(path).names == ("alpha", "beta", "gamma")

    def test_seventeen_significant_digits(self, tmp_path):
        value = 0.1 + 0.2  # not representable; needs all 17 digits
        data = Dataset(np.full((3, 2), value))
        path = tmp_path / "precise.csv"
        write_dataset_csv(path, data)
        assert "0.30000000000000004" in path.read_text()

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ValueError, match="empty"):
            read_dataset_csv(path)

    def test_header_only_rejected(self, tmp_path):
        path = tmp_path / "headeronly.csv"
        path.write_text("X1,X2\n")
        with pytest.raises(ValueError, match="no data rows"):
            read_dataset_csv(path)

    def test_ragged_row_rejected(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("X1,X2\n1.0,2.0\n3.0\n")
        with pytest.raises(ValueError, match="expected 2 fields"):
            read_dataset_csv(path)

    def test_non_numeric_cell_rejected(self, tmp_path):
        path = tmp_path / "text.csv"
        path.write_text("X1,X2\n1.0,banana\n2.0,3.0\n4.0,5.0\n")
        with pytest.raises(ValueError, match="non-numeric"):
            read_dataset_csv(path)

    def test_blank_header_name_rejected(self, tmp_path):
        path = tmp_path / "blank.csv"
        path.write_text("X1,\n1.0,2.0\n")
        with pytest.raises(ValueError, match="malformed header"):
            read_dataset_csv(path)

    @given(
        values=st.lists(
            st.lists(
                st.floats(
                    allow_nan=False,
                    allow_infinity=False,
                    min_value=-1e12,
                    max_value=1e12,
                ),
                min_size=2,
                max_size=4,
            ).map(tuple),
            min_size=3,
            max_size=8,
        ).filter(lambda rows: len({len(r) for r in rows}) == 1)
    )
    def test_round_trip_property(self, values, tmp_path_factory):
        data = Dataset(np.asarray(values, dtype=np.float64))
        path = tmp_path_factory.mktemp("csv") / "data.csv"
        write_dataset_csv(path, data)
        np.testing.assert_array_equal(read_dataset_csv(path).values, data.values)


class TestGraphJson:
    def test_tree_dict_is_one_indexed(self):
        tree = DirectedTree((ROOT, 0, 1))
        assert tree_to_dict(tree) == {"p": 3, "root": 1, "edges": [[1, 2], [2, 3]]}

    def test_dag_dict_has_no_root(self):
        dag = Dag(3, ((0, 1), (0, 2)))
        assert dag_to_dict(dag) == {"p": 3, "edges": [[1, 2], [1, 3]]}

    def test_tree_round_trip(self, tmp_path):
        tree = DirectedTree((2, ROOT, 1, 1))
        path = tmp_path / "tree.json"
        write_graph_json(path, tree)
        back = read_graph_json(path)
        assert isinstance(back, DirectedTree)
        assert back.parents == tree.parents

    def test_dag_round_trip(self, tmp_path):
        dag = Dag(4, ((0, 1), (0, 2), (1, 3), (2, 3)))
        path = tmp_path / "dag.json"
        write_graph_json(path, dag)
        back = read_graph_json(path)
        assert isinstance(back, Dag)
        assert back.edges == dag.edges

    def test_declared_root_must_match_edges(self):
        with pytest.raises(ValueError, match="root"):
            graph_from_dict({"p": 3, "root": 2, "edges": [[1, 2], [2, 3]]})

    def test_read_tree_json_rejects_dag_files(self, tmp_path):
        path = tmp_path / "dag.json"
        write_graph_json(path, Dag(2, ((0, 1),)))
        with pytest.raises(ValueError, match="expected a rooted tree"):
            read_tree_json(path)

    def test_invalid_json_text(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ValueError, match="invalid JSON"):
            read_graph_json(path)

    @pytest.mark.parametrize(
        "obj",
        [
            {"edges": []},
            {"p": 0, "edges": []},
            {"p": 2, "edges": [[1]]},
            {"p": 2, "edges": [["a", "b"]]},
            {"p": 2, "edges": [[1, 3]]},
            {"p": 2, "root": 5, "edges": [[1, 2]]},
        ],
    )
    def test_malformed_dicts(self, obj):
        with pytest.raises(ValueError):
            graph_from_dict(obj)

    @given(
        parents=st.integers(2, 7).flatmap(
            lambda p: st.permutations(range(p)).map(
                lambda order: tuple(
                    ROOT if k == order[0] else order[0] for k in range(p)
                )
            )
        )
    )
    def test_star_tree_round_trip_property(self, parents, tmp_path_factory):
        tree = DirectedTree(parents)
        path = tmp_path_factory.mktemp("json") / "tree.json"
        write_graph_json(path, tree)
        assert read_graph_json(path).parents == tree.parents


class TestWeightsCsv:
    def test_round_trip_with_forbidden_entries(self, tmp_path):
        w = np.array(
            [
                [0.0, -1.5, FORBIDDEN],
                [0.25, 0.0, 1e-17],
                [FORBIDDEN, 3.0, 0.0],
            ]
        )
        weights = WeightMatrix(w)
        path = tmp_path / "weights.csv"
        write_weights_csv(path, weights)
        back = read_weights_csv(path)
        np.testing.assert_array_equal(back.w, weights.w)

    def test_header_and_one_indexing(self, tmp_path):
        weights = WeightMatrix(np.array([[0.0, 2.0], [-3.0, 0.0]]))
        path = tmp_path / "weights.csv"
        write_weights_csv(path, weights)
        lines = path.read_text().splitlines()
        assert lines[0] == "from,to,weight"
        assert lines[1] == "1,2,2"
        assert lines[2] == "2,1,-3"

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,0.5\n")
        with pytest.raises(ValueError, match="header"):
            read_weights_csv(path)

    def test_malformed_row_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("from,to,weight\n1,2\n")
        with pytest.raises(ValueError, match="3 fields"):
            read_weights_csv(path)

    def test_non_numeric_weight_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("from,to,weight\n1,2,x\n")
        with pytest.raises(ValueError, match="malformed"):
            read_weights_csv(path)

    def test_empty_body_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("from,to,weight\n")
        with pytest.raises(ValueError, match="no weight rows"):
            read_weights_csv(path)

    @given(
        seed=st.integers(0, 2**32 - 1),
        p=st.integers(2, 6),
    )
    def test_round_trip_property(self, seed, p, tmp_path_factory):
        rng = np.random.Generator(np.random.Philox(seed))
        w = rng.normal(size=(p, p)) * 10.0 ** rng.integers(-6, 6)
        w[rng.random((p, p)) < 0.2] = FORBIDDEN
        weights = WeightMatrix(w)
        path = tmp_path_factory.mktemp("w") / "weights.csv"
        write_weights_csv(path, weights)
        np.testing.assert_array_equal(read_weights_csv(path).w, weights.w)


class TestJsonReport:
    def test_report_round_trips_through_json(self, tmp_path):
        obj = {"score": -1.41, "edges": [[1, 2]], "flags": {"clamped": False}}
        path = tmp_path / "report.json"
        write_json_report(path, obj)
        assert json.loads(path.read_text()) == obj

    def test_report_ends_with_newline(self, tmp_path):
        path = tmp_path / "report.json"
        write_json_report(path, {"ok": True})
        assert path.read_text().endswith("\n")
