"""Binary classification metrics and literal accounting."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @classmethod
    def from_labels(cls, y_true, y_pred) -> "ConfusionCounts":
        t = np.asarray(y_true).astype(bool)
        p = np.asarray(y_pred).astype(bool)
        if t.shape != p.shape:
            raise ValueError(f"label/prediction shapes differ: {t.shape} vs {p.shape}")
        return cls(int(np.sum(t & p)), int(np.sum(~t & p)), int(np.sum(~t & ~p)), int(np.sum(t & ~p)))


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    accuracy: float
    specificity: float
    degenerate: frozenset = field(default_factory=frozenset)


def _ratio(num, den, name, degenerate):
    if den == 0:
        degenerate.add(name)
        return 0.0
    return num / den


def compute_metrics(counts: ConfusionCounts) -> Metrics:
    """Precision, recall, F1, accuracy and specificity; 0/0 is reported as 0 and flagged."""
    if counts.total == 0:
        raise ValueError("no evaluated rows")
    bad: set[str] = set()
    precision = _ratio(counts.tp, counts.tp + counts.fp, "precision", bad)
    recall = _ratio(counts.tp, counts.tp + counts.fn, "recall", bad)
    f1 = _ratio(2 * precision * recall, precision + recall, "f1", bad)
    accuracy = (counts.tp + counts.tn) / counts.total
    specificity = _ratio(counts.tn, counts.tn + counts.fp, "specificity", bad)
    return Metrics(precision, recall, f1, accuracy, specificity, frozenset(bad))


def count_literals(machine) -> int:
    """Included literals summed over clauses; IWTM skips clauses of weight 0."""
    per_clause = machine.included().sum(axis=1)
    if machine.config.weighted:
        per_clause = per_clause[machine.weights > 0]
    return int(per_clause.sum())
