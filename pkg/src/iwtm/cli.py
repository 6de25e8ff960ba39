"""Command-line front end: ``iwtm {binarize,train,benchmark,export-rules}``.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .binarizer import Binarizer, BinarizedDataset, binarize
from .data import RECIPES, DataError, Recipe, TrialSpec, format_sweep_table, load_csv, run_trials, split_indices
from .machine import ConfigError, Machine, MachineConfig
from .metrics import ConfusionCounts, compute_metrics, count_literals
from .rules import export_rules

log = logging.getLogger("iwtm")

DEFAULT_SWEEP = (2, 10, 100, 500, 2000, 8000)


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("IWTM_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"IWTM_SEED must be an integer, got {raw!r}") from None


def _sidecar_for(path: Path) -> Path:
    return path.with_name(path.stem + ".spec.json")


def _add_machine_flags(p: argparse.ArgumentParser, clauses=True):
    if clauses:
        p.add_argument("--clauses", "-m", type=int, default=10, help="number of clauses m (even)")
    p.add_argument("--threshold", "-T", type=int, default=15, help="vote-sum target T")
    p.add_argument("--s", type=float, default=3.0, help="specificity s >= 1")
    p.add_argument("--states", "-N", type=int, default=100, help="TA states per action N")
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--weighted", choices=("none", "integer"), default="integer",
                   help="clause weighting: none (vanilla TM) or integer (IWTM)")
    p.add_argument("--seed", type=int, default=None, help="master seed (default: $IWTM_SEED or 0)")
    p.add_argument("--backend", choices=("numba", "numpy"), default=None,
                   help="kernel backend (default: numba unless IWTM_DISABLE_NUMBA=1)")


def _add_table_flags(p: argparse.ArgumentParser):
    p.add_argument("csv", type=Path, help="raw delimited data file")
    p.add_argument("--recipe", choices=sorted(RECIPES), help="built-in dataset recipe")
    p.add_argument("--label", help="label column (required without --recipe)")
    p.add_argument("--columns", help="comma-separated column names for a header-less file")
    p.add_argument("--delimiter", default=",", help="field delimiter; 'whitespace' splits on runs of blanks")
    p.add_argument("--positive-label", help="raw label value mapped to class 1")
    p.add_argument("--max-thresholds", type=int, default=64)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iwtm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("binarize", help="threshold-binarize a CSV file")
    _add_table_flags(p)
    p.add_argument("--out", type=Path, required=True, help="binarized dataset (JSON)")
    p.add_argument("--sidecar", type=Path, help="threshold spec JSON (default: <out>.spec.json)")

    p = sub.add_parser("train", help="train on a binarized dataset, report held-out metrics")
    p.add_argument("dataset", type=Path)
    p.add_argument("--sidecar", type=Path, help="threshold spec JSON (default: <dataset>.spec.json)")
    _add_machine_flags(p)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--out", type=Path, help="model JSON output")

    p = sub.add_parser("benchmark", help="multi-trial sweep over clause counts")
    _add_table_flags(p)
    _add_machine_flags(p, clauses=False)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--sweep", default=",".join(map(str, DEFAULT_SWEEP)),
                   help="comma-separated clause counts")
    p.add_argument("--jobs", type=int, default=0, help="worker processes (0: all cores)")
    p.add_argument("--json-out", type=Path, help="write the full report as JSON")

    p = sub.add_parser("export-rules", help="print the clauses of a model as rules")
    p.add_argument("model", type=Path)
    p.add_argument("--sidecar", type=Path, help="threshold spec JSON naming the literals")
    p.add_argument("--include-dead", action="store_true", help="also show weight-0 clauses")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=Path)
    return parser


def _config(args, num_clauses: int) -> MachineConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        return MachineConfig(num_clauses, args.threshold, args.s, args.states, args.epochs,
                             args.weighted, seed)
    except ConfigError as e:
        raise UsageError(str(e)) from None


def _recipe(args) -> Recipe:
    if args.recipe:
        recipe = RECIPES[args.recipe]
        if args.label:
            recipe = replace(recipe, label=args.label)
    elif args.label:
        recipe = Recipe("custom", args.label)
    else:
        raise UsageError("either --recipe or --label is required")
    if args.columns:
        recipe = replace(recipe, columns=tuple(c.strip() for c in args.columns.split(",")))
    if args.delimiter != ",":
        recipe = replace(recipe, delimiter=None if args.delimiter == "whitespace" else args.delimiter)
    if args.positive_label is not None:
        recipe = replace(recipe, positive_label=args.positive_label)
    return recipe


def _load_table(args):
    recipe = _recipe(args)
    table = load_csv(args.csv, None, recipe.columns, recipe.delimiter, numeric=recipe.numeric)
    if recipe.label not in table.columns:
        raise UsageError(f"label column {recipe.label!r} not in {args.csv} (columns: {table.columns})")
    return recipe, recipe.prepare(table)


def _positive(recipe, table):
    """Coerce a CLI-provided positive label to the column's cell type."""
    pos = recipe.positive_label
    if isinstance(pos, str) and all(not isinstance(v, str) for v in table.column(recipe.label)):
        pos = float(pos)
    return pos


def cmd_binarize(args) -> int:
    if args.max_thresholds < 1:
        raise UsageError("--max-thresholds must be >= 1")
    recipe, table = _load_table(args)
    ds = binarize(table, recipe.label, args.max_thresholds, _positive(recipe, table),
                  category_orders=recipe.category_orders)
    sidecar = args.sidecar or _sidecar_for(args.out)
    ds.save(args.out, sidecar)
    log.info("wrote %d rows x %d bits to %s (spec: %s)", len(ds.labels), ds.num_features, args.out, sidecar)
    return 0


def cmd_train(args) -> int:
    config = _config(args, args.clauses)
    if not 0 < args.train_fraction < 1:
        raise UsageError("--train-fraction must lie in (0, 1)")
    ds = BinarizedDataset.load(args.dataset, args.sidecar or _sidecar_for(args.dataset))
    train, test = split_indices(len(ds.labels), args.train_fraction, config.seed)
    machine = Machine(config, ds.num_features, args.backend)
    machine.fit(ds.rows[train], ds.labels[train])
    counts = ConfusionCounts.from_labels(ds.labels[test], machine.predict(ds.rows[test]))
    m = compute_metrics(counts)
    result = {
        "train_accuracy": float(np.mean(machine.predict(ds.rows[train]) == ds.labels[train])),
        "test": {"precision": m.precision, "recall": m.recall, "f1": m.f1,
                 "accuracy": m.accuracy, "specificity": m.specificity,
                 "degenerate": sorted(m.degenerate)},
        "counts": {"tp": counts.tp, "fp": counts.fp, "tn": counts.tn, "fn": counts.fn},
        "literals": count_literals(machine),
    }
    if args.out:
        machine.save(args.out)
        log.info("model written to %s", args.out)
    print(json.dumps(result, indent=1))
    return 0


def cmd_benchmark(args) -> int:
    try:
        sweep = [int(x) for x in args.sweep.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--sweep must be comma-separated integers, got {args.sweep!r}") from None
    if not sweep:
        raise UsageError("--sweep is empty")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    configs = {m: _config(args, m) for m in sweep}
    recipe, table = _load_table(args)
    reports = {}
    for m, config in configs.items():
        log.info("m=%d: %d trial(s)", m, args.trials)
        spec = TrialSpec(table, recipe.label, config, args.max_thresholds,
                         _positive(recipe, table), recipe.category_orders, backend=args.backend)
        reports[m] = run_trials(spec, args.trials, config.seed, args.jobs)
    title = f"{recipe.name} / weighting={args.weighted} / {args.trials} trial(s)"
    print(format_sweep_table(reports, title))
    if args.json_out:
        doc = {"recipe": recipe.name, "sweep": {str(m): r.to_dict() for m, r in reports.items()}}
        args.json_out.write_text(json.dumps(doc, indent=1, default=str) + "\n")
    return 0


def cmd_export_rules(args) -> int:
    machine = Machine.load(args.model)
    names = None
    if args.sidecar:
        binarizer = Binarizer.load(args.sidecar)
        if binarizer.num_bits != machine.num_features:
            raise DataError(
                f"sidecar describes {binarizer.num_bits} features but the model has {machine.num_features}"
            )
        names = binarizer.literal_names()
    rules = export_rules(machine, names)
    text = rules.render_json(args.include_dead) if args.format == "json" else rules.render_text(args.include_dead)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {
    "binarize": cmd_binarize,
    "train": cmd_train,
    "benchmark": cmd_benchmark,
    "export-rules": cmd_export_rules,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"iwtm: error: {e}", file=sys.stderr)
        return 2
    except (DataError, ValueError, KeyError, OSError, OverflowError) as e:
        print(f"iwtm: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
