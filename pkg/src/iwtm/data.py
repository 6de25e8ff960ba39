"""Dataset loading, train/test splitting and the multi-trial experiment harness."""
from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .binarizer import binarize
from .machine import Machine, MachineConfig
from .metrics import ConfusionCounts, compute_metrics, count_literals

log = logging.getLogger(__name__)

NA_VALUES = ("", "?", "NA", "N/A", "nan", "NaN")


class DataError(ValueError):
    """Malformed input data."""


@dataclass
class RawTable:
    columns: list[str]
    cells: list[list]  # one list per column
    dropped: int = 0   # rows removed for missing values at load time

    def __post_init__(self):
        if len(set(self.columns)) != len(self.columns):
            raise DataError(f"duplicate column names in {self.columns}")
        if len(self.cells) != len(self.columns):
            raise DataError("one cell list per column is required")
        if len({len(c) for c in self.cells}) > 1:
            raise DataError("table is not rectangular")

    @property
    def num_rows(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    def column(self, name: str) -> list:
        try:
            return self.cells[self.columns.index(name)]
        except ValueError:
            raise KeyError(f"unknown column {name!r}; have {self.columns}") from None

    def take(self, rows) -> "RawTable":
        return RawTable(list(self.columns), [[c[i] for i in rows] for c in self.cells], self.dropped)

    def drop_columns(self, names) -> "RawTable":
        keep = [i for i, c in enumerate(self.columns) if c not in set(names)]
        return RawTable([self.columns[i] for i in keep], [self.cells[i] for i in keep], self.dropped)

    def with_column(self, name: str, values: list) -> "RawTable":
        cols, cells = list(self.columns), list(self.cells)
        cells[cols.index(name)] = list(values)
        return RawTable(cols, cells, self.dropped)


def _parse(cell: str):
    try:
        return float(cell)
    except ValueError:
        return cell


def load_csv(path, label: str | None = None, columns=None, delimiter=",",
             na_values=NA_VALUES, numeric=()) -> RawTable:
    """Read a delimited text file into a typed :class:`RawTable`.

    ``columns`` names the fields of a header-less file; otherwise the first
    line is the header. ``delimiter=None`` splits on runs of whitespace.
    A column becomes numeric when all its cells parse as numbers, or when it
    is listed in ``numeric`` (then an unparseable cell is an error). Rows with
    a missing cell are dropped and counted in ``RawTable.dropped``.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        if delimiter is None:
            records = [(i, line.split()) for i, line in enumerate(fh, 1)]
        else:
            records = list(enumerate(csv.reader(fh, delimiter=delimiter, skipinitialspace=True), 1))
    records = [(i, [c.strip() for c in r]) for i, r in records if r and any(c.strip() for c in r)]
    if columns is None:
        if not records:
            raise DataError(f"{path}: empty file")
        columns = records[0][1]
        records = records[1:]
    columns = list(columns)
    if label is not None and label not in columns:
        raise DataError(f"{path}: label column {label!r} not found; columns are {columns}")

    na = set(na_values)
    rows, dropped = [], 0
    for line, rec in records:
        if len(rec) != len(columns):
            raise DataError(f"{path}, line {line}: expected {len(columns)} fields, got {len(rec)}")
        if any(c in na for c in rec):
            dropped += 1
            continue
        rows.append((line, rec))
    if dropped:
        log.info("%s: dropped %d row(s) with missing values", path, dropped)
    if not rows:
        raise DataError(f"{path}: no complete rows")

    cells = []
    for j, name in enumerate(columns):
        raw = [rec[j] for _, rec in rows]
        parsed = [_parse(c) for c in raw]
        if name in numeric:
            for (line, _), value in zip(rows, parsed):
                if isinstance(value, str):
                    raise DataError(f"{path}, line {line}, column {name!r}: non-numeric value {value!r}")
            cells.append(parsed)
        elif all(not isinstance(v, str) for v in parsed):
            cells.append(parsed)
        else:
            cells.append(raw)
    return RawTable(columns, cells, dropped)


def encode_labels(values, positive_label=None) -> np.ndarray:
    """Map a two-valued label column to 0/1.

    The lexicographically (or numerically) larger value becomes 1 unless
    ``positive_label`` names the value to map to 1.
    """
    distinct = sorted(set(values), key=lambda v: (isinstance(v, str), v))
    if len(distinct) > 2:
        raise DataError(f"label column has {len(distinct)} distinct values {distinct[:5]}; need 2")
    if positive_label is None:
        if set(distinct) <= {0.0, 1.0}:
            positive = 1.0
        else:
            positive = distinct[-1]
    else:
        positive = positive_label
        if isinstance(distinct[0], float) and not isinstance(positive, float):
            positive = float(positive)
        if positive not in distinct:
            raise DataError(f"positive label {positive_label!r} not among {distinct}")
    return np.array([v == positive for v in values], dtype=np.uint8)


def train_size(n: int, fraction: float) -> int:
    # round half up, not Python's banker's rounding
    return int(math.floor(n * fraction + 0.5))


def split_indices(n: int, train_fraction: float, rng) -> tuple[np.ndarray, np.ndarray]:
    """Uniform random, unstratified partition of ``range(n)``."""
    if not 0 < train_fraction < 1:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if n < 2:
        raise ValueError(f"need at least 2 rows to split, got {n}")
    k = train_size(n, train_fraction)
    if k == 0 or k == n:
        raise ValueError(f"train fraction {train_fraction} leaves an empty side for n={n}")
    perm = np.random.default_rng(rng).permutation(n)
    return np.sort(perm[:k]), np.sort(perm[k:])


def split(rows, labels, train_fraction: float = 0.8, rng=None):
    """Split a (rows, labels) dataset; returns ``(train_rows, train_labels), (test_rows, test_labels)``."""
    rows, labels = np.asarray(rows), np.asarray(labels)
    tr, te = split_indices(rows.shape[0], train_fraction, rng)
    return (rows[tr], labels[tr]), (rows[te], labels[te])


# -- dataset recipes ---------------------------------------------------------

@dataclass(frozen=True)
class Recipe:
    """How to turn one raw dataset file into a binary classification task."""

    name: str
    label: str
    columns: tuple | None = None      # field names for header-less files
    delimiter: str | None = ","
    drop_columns: tuple = ()
    drop_label_values: tuple = ()     # rows whose label is one of these are removed
    label_at_least: float | None = None  # numeric label binarized as label >= value
    positive_label: object = None
    category_orders: dict = field(default_factory=dict)
    numeric: tuple = ()

    def load(self, path) -> RawTable:
        table = load_csv(path, self.label, self.columns, self.delimiter, numeric=self.numeric)
        return self.prepare(table)

    def prepare(self, table: RawTable) -> RawTable:
        if self.drop_columns:
            table = table.drop_columns(self.drop_columns)
        if self.drop_label_values:
            drop = set(self.drop_label_values)
            labels = table.column(self.label)
            table = table.take([i for i, v in enumerate(labels) if v not in drop])
        if self.label_at_least is not None:
            labels = [int(float(v) >= self.label_at_least) for v in table.column(self.label)]
            table = table.with_column(self.label, labels)
        return table


_BANKRUPTCY_FEATURES = ("IndustrialRisk", "ManagementRisk", "FinancialFlexibility",
                        "Credibility", "Competitiveness", "OperatingRisk")

RECIPES = {
    # UCI Qualitative_Bankruptcy.data.txt; categories code as A=0, N=1, P=2.
    "bankruptcy": Recipe("bankruptcy", "Class", _BANKRUPTCY_FEATURES + ("Class",),
                         positive_label="NB"),
    # UCI balance-scale.data with the "balanced" class removed.
    "balance-scale": Recipe("balance-scale", "Class",
                            ("Class", "LeftWeight", "LeftDistance", "RightWeight", "RightDistance"),
                            drop_label_values=("B",), positive_label="R"),
    # UCI breast-cancer.data; incomplete rows are dropped at load.
    "breast-cancer": Recipe(
        "breast-cancer", "Class",
        ("Class", "age", "menopause", "tumor-size", "inv-nodes", "node-caps",
         "deg-malig", "breast", "breast-quad", "irradiat"),
        positive_label="recurrence-events",
        category_orders={
            "age": ["10-19", "20-29", "30-39", "40-49", "50-59", "60-69", "70-79", "80-89", "90-99"],
            "tumor-size": ["0-4", "5-9", "10-14", "15-19", "20-24", "25-29", "30-34",
                           "35-39", "40-44", "45-49", "50-54", "55-59"],
            "inv-nodes": ["0-2", "3-5", "6-8", "9-11", "12-14", "15-17", "18-20",
                          "21-23", "24-26", "27-29", "30-32", "33-35", "36-39"],
        },
    ),
    # UCI bupa.data: drinks >= 3 is the positive class, selector discarded.
    "liver-disorders": Recipe("liver-disorders", "drinks",
                              ("mcv", "alkphos", "sgpt", "sgot", "gammagt", "drinks", "selector"),
                              drop_columns=("selector",), label_at_least=3.0),
    # UCI Statlog heart.dat, whitespace separated; class 2 = disease present.
    "heart-disease": Recipe(
        "heart-disease", "class",
        ("age", "sex", "chest_pain", "resting_bp", "cholesterol", "fasting_sugar",
         "resting_ecg", "max_heart_rate", "exercise_angina", "oldpeak", "slope",
         "major_vessels", "thal", "class"),
        delimiter=None, positive_label=2.0,
    ),
}


# -- multi-trial harness -----------------------------------------------------

@dataclass
class TrialResult:
    seed: int
    counts: ConfusionCounts
    precision: float
    recall: float
    f1: float
    accuracy: float
    specificity: float
    train_accuracy: float
    literals: int
    degenerate: list[str] = field(default_factory=list)


METRIC_NAMES = ("precision", "recall", "f1", "accuracy", "specificity")


@dataclass
class TrialReport:
    config: MachineConfig
    trials: list[TrialResult]

    def mean(self, name: str) -> float:
        return float(np.mean([getattr(t, name) for t in self.trials]))

    @property
    def means(self) -> dict:
        out = {k: self.mean(k) for k in METRIC_NAMES + ("train_accuracy", "literals")}
        out["literals_rounded"] = int(math.floor(out["literals"] + 0.5))
        return out

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "num_trials": len(self.trials),
            "means": self.means,
            "trials": [asdict(t) for t in self.trials],
        }


@dataclass(frozen=True)
class TrialSpec:
    table: RawTable
    label: str
    config: MachineConfig
    max_thresholds: int = 64
    positive_label: object = None
    category_orders: dict | None = None
    train_fraction: float = 0.8
    backend: str | None = None


def trial_seeds(master_seed: int, trials: int) -> list[int]:
    children = np.random.SeedSequence(master_seed).spawn(trials)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def run_trial(spec: TrialSpec, seed: int) -> TrialResult:
    table = spec.table
    train, test = split_indices(table.num_rows, spec.train_fraction, seed)
    ds = binarize(table, spec.label, spec.max_thresholds, spec.positive_label,
                  fit_rows=train, category_orders=spec.category_orders)
    machine = Machine(replace(spec.config, seed=seed), ds.num_features, spec.backend)
    machine.fit(ds.rows[train], ds.labels[train])
    counts = ConfusionCounts.from_labels(ds.labels[test], machine.predict(ds.rows[test]))
    metrics = compute_metrics(counts)
    train_acc = float(np.mean(machine.predict(ds.rows[train]) == ds.labels[train]))
    return TrialResult(seed, counts, metrics.precision, metrics.recall, metrics.f1,
                       metrics.accuracy, metrics.specificity, train_acc,
                       count_literals(machine), sorted(metrics.degenerate))


def _run_trial_args(args):
    return run_trial(*args)


def run_trials(spec: TrialSpec, trials: int, seed: int = 0, jobs: int = 1) -> TrialReport:
    """Repeat split/binarize/fit/evaluate ``trials`` times with independent seeds."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    seeds = trial_seeds(seed, trials)
    jobs = (os.cpu_count() or 1) if jobs in (0, None) else jobs
    if jobs <= 1 or trials == 1:
        results = [run_trial(spec, s) for s in seeds]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, trials)) as pool:
            results = list(pool.map(_run_trial_args, [(spec, s) for s in seeds]))
    return TrialReport(spec.config, results)


def format_sweep_table(reports: dict[int, TrialReport], title: str = "") -> str:
    """Aligned text table: one row per metric, one column per clause count."""
    ms = list(reports)
    rows = [("m", [str(m) for m in ms])]
    labels = {"precision": "Precision", "recall": "Recall", "f1": "F1-Score",
              "accuracy": "Accuracy", "specificity": "Specificity"}
    for key, name in labels.items():
        rows.append((name, [f"{reports[m].mean(key):.3f}" for m in ms]))
    rows.append(("No. of Lit.", [str(reports[m].means["literals_rounded"]) for m in ms]))
    head = max(len(r[0]) for r in rows)
    width = max(len(c) for _, cells in rows for c in cells)
    lines = [title] if title else []
    for name, cells in rows:
        lines.append(name.ljust(head) + "  " + "  ".join(c.rjust(width) for c in cells))
    lines.append("(No. of Lit.: included literals in clauses with weight > 0, "
                 "summed per machine, mean over trials)")
    return "\n".join(lines)
