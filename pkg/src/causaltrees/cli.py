"""Command-line interface.

Subcommands: ``learn`` (fit a causal tree from CSV data), ``test``
(substructure hypothesis test; the exit code is the verdict), ``simulate``
(draw a random model and dataset), ``gap`` (identifiability diagnostics),
``metrics`` (compare two graph files), and ``reproduce`` (run a named
desk-scale experiment).

Exit codes: 0 success (for ``test``: null not rejected); 1 rejected null;
2 usage errors, malformed input, or contradictory constraints; 3 degenerate
data.  ``--threads`` (or the environment variable ``CAT_THREADS``) is
validated and passed through as a hint; it never changes any output byte.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from . import fileio
from .entropy import EntropyConfig
from .errors import (
    CausalTreeError,
    DegenerateColumn,
    DegenerateSample,
    NonFiniteInput,
    TooFewSamples,
    ZeroMoment,
)
from .experiments import EXPERIMENTS, run_experiment
from .graphs import DirectedTree, Substructure
from .identifiability import estimate_identifiability_gap
from .inference import run_substructure_test
from .learn import learn
from .metrics import metric_report
from .regression import KERNEL, LOCAL_LINEAR, RegressionConfig
from .scoring import CMI_SKELETON, ENTROPY, GAUSSIAN, Dataset, ScoreOptions
from .simulate import SimConfig, simulate

_USAGE_ERROR = 2
_DEGENERATE = 3
_DEGENERATE_ERRORS = (DegenerateColumn, DegenerateSample, TooFewSamples, ZeroMoment)


class UsageError(Exception):
    pass


def _parse_edge(text: str) -> tuple[int, int]:
    """Parse a 1-indexed edge flag of the form "j->i"."""
    parts = text.split("->")
    if len(parts) != 2:
        raise UsageError(f"bad edge {text!r}; expected the form 'j->i'")
    try:
        j, i = int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"bad edge {text!r}; endpoints must be integers") from None
    if j < 1 or i < 1:
        raise UsageError(f"bad edge {text!r}; node labels are 1-indexed")
    if j == i:
        raise UsageError(f"bad edge {text!r}; self-loops are not allowed")
    return j - 1, i - 1


def _bandwidth(text: str):
    if text in ("silverman", "cv"):
        return text
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"bandwidth must be 'silverman', 'cv', or a positive number, got {text!r}"
        ) from None
    if not (val > 0 and math.isfinite(val)):
        raise argparse.ArgumentTypeError("numeric bandwidth must be positive and finite")
    return val


def _threads(args: argparse.Namespace) -> int:
    value = args.threads
    if value is None:
        env = os.environ.get("CAT_THREADS")
        if env is None:
            return 1
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"CAT_THREADS must be an integer, got {env!r}") from None
    if value < 1:
        raise UsageError("thread count must be at least 1")
    return value


def _regression_config(args: argparse.Namespace) -> RegressionConfig:
    return RegressionConfig(method=args.method, bandwidth=args.bandwidth)


def _load_dataset(args: argparse.Namespace) -> Dataset:
    try:
        data = fileio.read_dataset_csv(args.input)
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if getattr(args, "seed", None) is not None:
        rng = np.random.Generator(np.random.Philox(args.seed))
        order = rng.permutation(data.n)
        data = Dataset(data.values[order], names=data.names)
    return data


def _substructure(args: argparse.Namespace) -> Substructure:
    required = tuple(_parse_edge(e) for e in args.require or ())
    forbidden = tuple(_parse_edge(e) for e in args.forbid or ())
    root = None
    if args.root is not None:
        if args.root < 1:
            raise UsageError("--root is 1-indexed")
        root = args.root - 1
    try:
        return Substructure(required, forbidden, root)
    except ValueError as exc:
        raise UsageError(f"contradictory constraints: {exc}") from None


def _add_regression_flags(sp: argparse.ArgumentParser, default_bw) -> None:
    sp.add_argument(
        "--method",
        choices=(KERNEL, LOCAL_LINEAR),
        default=KERNEL,
        help="regression method for conditional means",
    )
    sp.add_argument(
        "--bandwidth",
        type=_bandwidth,
        default=default_bw,
        help="kernel bandwidth: 'silverman', 'cv', or a number",
    )
    sp.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker hint (or set CAT_THREADS); never changes results",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causaltrees",
        description="Learn and test causal directed trees from observational data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_learn = sub.add_parser("learn", help="fit a causal tree from a dataset CSV")
    p_learn.add_argument("--input", required=True, help="dataset CSV path")
    p_learn.add_argument(
        "--score", choices=(GAUSSIAN, ENTROPY, CMI_SKELETON), default=GAUSSIAN
    )
    p_learn.add_argument("--out", help="write the learned tree as JSON")
    p_learn.add_argument("--weights-out", help="write the weight matrix as CSV")
    p_learn.add_argument(
        "--split", action="store_true", help="train/evaluate on disjoint halves"
    )
    p_learn.add_argument(
        "--seed", type=int, default=None, help="shuffle rows first with this seed"
    )
    p_learn.add_argument("--k", type=int, default=5, help="nearest-neighbour order")
    _add_regression_flags(p_learn, "cv")

    p_test = sub.add_parser("test", help="test a substructure hypothesis")
    p_test.add_argument("--input", required=True)
    p_test.add_argument(
        "--require", action="append", metavar="j->i", help="required edge (1-indexed)"
    )
    p_test.add_argument(
        "--forbid", action="append", metavar="j->i", help="forbidden edge (1-indexed)"
    )
    p_test.add_argument("--root", type=int, default=None, help="required root (1-indexed)")
    p_test.add_argument("--alpha", type=float, default=0.05, help="test level")
    p_test.add_argument("--seed", type=int, default=None, help="shuffle rows first")
    p_test.add_argument("--out", help="write the test report as JSON")
    _add_regression_flags(p_test, "silverman")

    p_sim = sub.add_parser("simulate", help="draw a random model and dataset")
    p_sim.add_argument("--p", type=int, required=True, help="number of nodes")
    p_sim.add_argument("--n", type=int, required=True, help="number of samples")
    p_sim.add_argument("--tree-type", type=int, choices=(1, 2), default=2)
    p_sim.add_argument("--alpha", type=float, default=1.0, help="noise deformation")
    p_sim.add_argument(
        "--dag-prob", type=float, default=0.0, help="extra-edge probability"
    )
    p_sim.add_argument("--gp-bandwidth", type=float, default=1.0)
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--out-data", required=True, help="dataset CSV path")
    p_sim.add_argument("--out-truth", required=True, help="true graph JSON path")

    p_gap = sub.add_parser("gap", help="identifiability-gap diagnostics")
    p_gap.add_argument("--input", required=True)
    p_gap.add_argument(
        "--score", choices=(GAUSSIAN, ENTROPY, CMI_SKELETON), default=GAUSSIAN
    )
    p_gap.add_argument("--split", action="store_true")
    p_gap.add_argument("--seed", type=int, default=None, help="shuffle rows first")
    p_gap.add_argument(
        "--piw", action="store_true", help="also report the minimum conditional MI"
    )
    p_gap.add_argument("--k", type=int, default=5)
    p_gap.add_argument("--out", help="write the gap report as JSON")
    _add_regression_flags(p_gap, "silverman")

    p_met = sub.add_parser("metrics", help="compare two graph files")
    p_met.add_argument("--truth", required=True)
    p_met.add_argument("--estimate", required=True)
    p_met.add_argument("--out", help="write the metric report as JSON")

    p_rep = sub.add_parser("reproduce", help="run a named desk-scale experiment")
    p_rep.add_argument("name", help="|".join(sorted(EXPERIMENTS)))
    p_rep.add_argument("--out", help="results CSV (default results-<name>.csv)")
    p_rep.add_argument("--seed", type=int, default=None, help="override the base seed")
    p_rep.add_argument(
        "--grid-coarse",
        action="store_true",
        help="bivariate-gap only: 3x3 (lambda, alpha) grid",
    )
    return parser


def _format_cell(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def cmd_learn(args: argparse.Namespace) -> int:
    jobs = _threads(args)
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    data = _load_dataset(args)
    opts = ScoreOptions(
        score=args.score,
        split=args.split,
        regression=_regression_config(args),
        entropy=EntropyConfig(k=args.k),
        n_jobs=jobs,
    )
    result = learn(data, opts)
    if args.out:
        fileio.write_graph_json(args.out, result.tree)
    if args.weights_out:
        fileio.write_weights_csv(args.weights_out, result.weights)
    edges = " ".join(f"{j + 1}->{i + 1}" for j, i in result.tree.edges)
    print(f"score {result.score:.6f}")
    print(f"root {result.tree.root + 1}")
    print(f"edges {edges}")
    return 0


def cmd_test(args: argparse.Namespace) -> int:
    _threads(args)
    sub = _substructure(args)
    if sub.is_empty():
        raise UsageError("no constraints given; use --require/--forbid/--root")
    if not (0 < args.alpha < 1):
        raise UsageError("--alpha must be in (0, 1)")
    data = _load_dataset(args)
    for j, i in list(sub.required) + list(sub.forbidden):
        if j >= data.p or i >= data.p:
            raise UsageError(f"edge {j + 1}->{i + 1} out of range for p={data.p}")
    if sub.root is not None and sub.root >= data.p:
        raise UsageError(f"--root {sub.root + 1} out of range for p={data.p}")
    verdict, cb = run_substructure_test(data, sub, args.alpha, _regression_config(args))
    print(f"psi {verdict.psi}")
    print(f"s_restricted {verdict.s_restricted:.6f}")
    print(f"s_upper {verdict.s_upper:.6f}")
    if args.out:
        fileio.write_json_report(
            args.out,
            {
                "alpha": args.alpha,
                "n_eval": cb.n_eval,
                "s_restricted": verdict.s_restricted,
                "s_upper": verdict.s_upper,
                "psi": verdict.psi,
                "constraints": {
                    "require": [f"{j + 1}->{i + 1}" for j, i in sub.required],
                    "forbid": [f"{j + 1}->{i + 1}" for j, i in sub.forbidden],
                    "root": None if sub.root is None else sub.root + 1,
                },
            },
        )
    return verdict.psi


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        cfg = SimConfig(
            p=args.p,
            n=args.n,
            tree_type=args.tree_type,
            alpha=args.alpha,
            dag_prob=args.dag_prob,
            gp_bandwidth=args.gp_bandwidth,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data, truth, _ = simulate(cfg)
    fileio.write_dataset_csv(args.out_data, data)
    fileio.write_graph_json(args.out_truth, truth)
    kind = "tree" if isinstance(truth, DirectedTree) else "dag"
    print(f"wrote {args.out_data} ({data.n} rows, {data.p} columns)")
    print(f"wrote {args.out_truth} ({kind}, {len(truth.edges)} edges)")
    return 0


def cmd_gap(args: argparse.Namespace) -> int:
    _threads(args)
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    data = _load_dataset(args)
    opts = ScoreOptions(
        score=args.score,
        split=args.split,
        regression=_regression_config(args),
        entropy=EntropyConfig(k=args.k),
    )
    report = estimate_identifiability_gap(
        data, opts, ent_cfg=EntropyConfig(k=args.k), include_piw=args.piw
    )
    print(f"best_score {report.best_score:.6f}")
    print(f"second_score {report.second_score:.6f}")
    print(f"gap {report.gap:.6f}")
    print(f"min_reversal {report.min_reversal:.6f}")
    if report.piw_min is not None:
        print(f"piw_min {report.piw_min:.6f}")
    if args.out:
        obj = {
            "best_tree": fileio.tree_to_dict(report.best_tree),
            "best_score": report.best_score,
            "second_tree": fileio.tree_to_dict(report.second_tree),
            "second_score": report.second_score,
            "gap": report.gap,
            "min_reversal": report.min_reversal,
            "min_reversal_edge": [
                report.min_reversal_edge[0] + 1,
                report.min_reversal_edge[1] + 1,
            ],
        }
        if report.piw_min is not None:
            obj["piw_min"] = report.piw_min
            obj["piw_triple"] = [v + 1 for v in report.piw_triple]
        fileio.write_json_report(args.out, obj)
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    try:
        truth = fileio.read_graph_json(args.truth)
        est = fileio.read_graph_json(args.estimate)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        report = metric_report(truth, est)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"shd {report.shd}")
    print(f"sid {report.sid}")
    print(f"ancestor_tpr {report.ancestor_tpr:.6f}")
    print(f"ancestor_recall {report.ancestor_recall:.6f}")
    if args.out:
        fileio.write_json_report(args.out, report.to_dict())
    return 0


def cmd_reproduce(args: argparse.Namespace) -> int:
    if args.name not in EXPERIMENTS:
        known = ", ".join(sorted(EXPERIMENTS))
        raise UsageError(f"unknown experiment {args.name!r}; known: {known}")
    kwargs: dict = {}
    if args.seed is not None:
        if args.name in ("paper-example", "reversal-bounds"):
            raise UsageError(f"{args.name} takes no seed")
        kwargs["seed"] = args.seed
    if args.grid_coarse:
        if args.name != "bivariate-gap":
            raise UsageError("--grid-coarse only applies to bivariate-gap")
        kwargs["grid_coarse"] = True
    result = run_experiment(args.name, **kwargs)
    out = args.out or f"results-{args.name}.csv"
    with open(out, "w", encoding="utf-8", newline="") as fh:
        if result.rows:
            writer = csv.DictWriter(fh, fieldnames=list(result.rows[0].keys()))
            writer.writeheader()
            for row in result.rows:
                writer.writerow({k: _format_cell(v) for k, v in row.items()})
    print(f"wrote {out} ({len(result.rows)} rows)")
    for key, value in result.summary.items():
        print(f"{key} {_format_cell(value)}")
    return 0


_COMMANDS = {
    "learn": cmd_learn,
    "test": cmd_test,
    "simulate": cmd_simulate,
    "gap": cmd_gap,
    "metrics": cmd_metrics,
    "reproduce": cmd_reproduce,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    except _DEGENERATE_ERRORS as exc:
        print(f"error: degenerate data: {exc}", file=sys.stderr)
        return _DEGENERATE
    except NonFiniteInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    except CausalTreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
