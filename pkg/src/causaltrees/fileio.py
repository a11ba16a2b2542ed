"""Plain-text serialization: dataset CSV, graph JSON, weight-matrix CSV.

All writers emit UTF-8, comma-separated CSV with a header row and 17
significant digits, and JSON with 1-indexed node labels; every format
round-trips through the matching reader.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .arborescence import WeightMatrix
from .graphs import Dag, DirectedTree, validate_tree
from .scoring import Dataset

_FMT = "%.17g"


def write_dataset_csv(path: str | Path, data: Dataset) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(data.names) + "\n")
        np.savetxt(fh, data.values, fmt=_FMT, delimiter=",")


def read_dataset_csv(path: str | Path) -> Dataset:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        names = tuple(h.strip() for h in header)
        if not names or any(not n for n in names):
            raise ValueError(f"{path}: malformed header row")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(names):
                raise ValueError(
                    f"{path}:{lineno}: expected {len(names)} fields, got {len(row)}"
                )
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric value") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return Dataset(np.asarray(rows, dtype=np.float64), names=names)


def tree_to_dict(tree: DirectedTree) -> dict:
    """1-indexed JSON form with lexicographically sorted edges."""
    return {
        "p": tree.p,
        "root": tree.root + 1,
        "edges": [[j + 1, i + 1] for j, i in tree.edges],
    }


def dag_to_dict(dag: Dag) -> dict:
    return {"p": dag.p, "edges": [[j + 1, i + 1] for j, i in dag.edges]}


def graph_from_dict(obj: dict) -> DirectedTree | Dag:
    """Parse either graph form; the presence of "root" marks a tree."""
    if not isinstance(obj, dict) or "p" not in obj or "edges" not in obj:
        raise ValueError("graph JSON must contain 'p' and 'edges'")
    p = obj["p"]
    if not isinstance(p, int) or p < 1:
        raise ValueError("'p' must be a positive integer")
    edges = []
    for e in obj["edges"]:
        if not (isinstance(e, (list, tuple)) and len(e) == 2):
            raise ValueError(f"malformed edge entry: {e!r}")
        j, i = e
        if not (isinstance(j, int) and isinstance(i, int)):
            raise ValueError(f"edge endpoints must be integers: {e!r}")
        if not (1 <= j <= p and 1 <= i <= p):
            raise ValueError(f"edge {e!r} out of range for p={p}")
        edges.append((j - 1, i - 1))
    if "root" in obj:
        root = obj["root"]
        if not isinstance(root, int) or not 1 <= root <= p:
            raise ValueError(f"'root' out of range for p={p}")
        tree = validate_tree(p, edges)
        if tree.root != root - 1:
            raise ValueError(
                f"declared root {root} does not match edge structure "
                f"(actual root {tree.root + 1})"
            )
        return tree
    return Dag(p, tuple(edges))


def write_graph_json(path: str | Path, graph: DirectedTree | Dag) -> None:
    obj = tree_to_dict(graph) if isinstance(graph, DirectedTree) else dag_to_dict(graph)
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def read_graph_json(path: str | Path) -> DirectedTree | Dag:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from None
    return graph_from_dict(obj)


def read_tree_json(path: str | Path) -> DirectedTree:
    graph = read_graph_json(path)
    if not isinstance(graph, DirectedTree):
        raise ValueError(f"{path}: expected a rooted tree (with 'root'), got a DAG")
    return graph


def write_weights_csv(path: str | Path, weights: WeightMatrix) -> None:
    """Dump all finite ordered-pair weights as rows "from,to,weight"."""
    p = weights.w.shape[0]
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write("from,to,weight\n")
        for j in range(p):
            for i in range(p):
                if j == i:
                    continue
                v = weights.w[j, i]
                cell = "inf" if math.isinf(v) else _FMT % v
                fh.write(f"{j + 1},{i + 1},{cell}\n")


def read_weights_csv(path: str | Path) -> WeightMatrix:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["from", "to", "weight"]:
            raise ValueError(f"{path}: expected header 'from,to,weight'")
        entries = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 fields")
            try:
                j, i, v = int(row[0]), int(row[1]), float(row[2])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed row") from None
            entries.append((j - 1, i - 1, v))
    if not entries:
        raise ValueError(f"{path}: no weight rows")
    p = 1 + max(max(j, i) for j, i, _ in entries)
    w = np.full((p, p), np.inf)
    for j, i, v in entries:
        if not (0 <= j < p and 0 <= i < p) or j == i:
            raise ValueError(f"{path}: invalid pair ({j + 1},{i + 1})")
        w[j, i] = v
    return WeightMatrix(w)


def write_json_report(path: str | Path, obj: dict) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
