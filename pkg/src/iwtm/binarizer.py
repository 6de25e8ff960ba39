"""Cumulative ("thermometer") threshold binarization of tabular features.

Every raw feature ``f`` gets an ascending threshold list ``t_1 < ... < t_K``
and is replaced by ``K`` bits, bit ``i`` being ``f <= t_i``. With the integer
codes of a three-valued categorical feature this gives::

    code 0 -> 1 1 1
    code 1 -> 0 1 1
    code 2 -> 0 0 1

Categorical (string) columns are first mapped to integer codes in sorted
category order.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

SPEC_FORMAT = "iwtm-binarizer"
DATASET_FORMAT = "iwtm-binarized"
FORMAT_VERSION = 1


@dataclass
class ThresholdSpec:
    feature_index: int
    thresholds: list
    name: str = ""
    categories: list | None = None  # code -> category label, for string columns

    def __post_init__(self):
        if not self.thresholds:
            raise ValueError(f"feature {self.name or self.feature_index}: no thresholds")
        t = np.asarray(self.thresholds, dtype=float)
        if np.any(np.diff(t) <= 0):
            raise ValueError(f"feature {self.name or self.feature_index}: thresholds must be strictly ascending")

    @property
    def width(self) -> int:
        return len(self.thresholds)

    def threshold_label(self, i: int) -> str:
        t = self.thresholds[i]
        if self.categories is not None:
            return str(self.categories[int(t)])
        return _fmt(t)

    def literal_names(self) -> list[str]:
        name = self.name or f"x{self.feature_index}"
        return [f"{name}<={self.threshold_label(i)}" for i in range(self.width)]

    def encode(self, column) -> np.ndarray:
        """Map raw cells to the numeric scale the thresholds live on."""
        if self.categories is None:
            return np.asarray(column, dtype=float)
        index = {c: i for i, c in enumerate(self.categories)}
        codes = np.empty(len(column), dtype=float)
        for r, cell in enumerate(column):
            # Unseen categories sort past every known code, giving all-zero bits.
            codes[r] = index.get(cell, len(self.categories))
        return codes

    def to_dict(self) -> dict:
        d = {"feature_index": self.feature_index, "name": self.name,
             "thresholds": [_jsonable(t) for t in self.thresholds]}
        if self.categories is not None:
            d["categories"] = list(self.categories)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ThresholdSpec":
        return cls(d["feature_index"], list(d["thresholds"]), d.get("name", ""), d.get("categories"))


def _jsonable(t):
    t = float(t)
    return int(t) if t.is_integer() else t


def _fmt(t) -> str:
    t = float(t)
    return str(int(t)) if t.is_integer() else f"{t:.6g}"


def fit_thresholds(column, max_thresholds: int = 64, feature_index: int = 0,
                   name: str = "", categories=None) -> ThresholdSpec:
    """Thresholds at the distinct values of ``column``.

    When there are more than ``max_thresholds`` distinct values, keep the
    ``i / (max_thresholds + 1)`` order statistics of the distinct values,
    ``i = 1..max_thresholds``.
    """
    if max_thresholds < 1:
        raise ValueError(f"max_thresholds must be >= 1, got {max_thresholds}")
    values = np.unique(np.asarray(column, dtype=float))
    if values.size == 0:
        raise ValueError(f"feature {name or feature_index}: empty column")
    if np.isnan(values).any():
        raise ValueError(f"feature {name or feature_index}: column contains NaN")
    if values.size == 1:
        log.warning("feature %s is constant; its single bit is always 1", name or feature_index)
    if values.size > max_thresholds:
        k = values.size
        ranks = [math.ceil(i * k / (max_thresholds + 1)) - 1 for i in range(1, max_thresholds + 1)]
        values = values[ranks]
    return ThresholdSpec(feature_index, values.tolist(), name, categories)


def transform_value(value, spec: ThresholdSpec) -> np.ndarray:
    return (float(value) <= np.asarray(spec.thresholds, dtype=float)).astype(np.uint8)


def transform_column(codes, spec: ThresholdSpec) -> np.ndarray:
    codes = np.asarray(codes, dtype=float)
    return (codes[:, None] <= np.asarray(spec.thresholds, dtype=float)[None, :]).astype(np.uint8)


@dataclass
class Binarizer:
    """Fitted per-column threshold specs; transforms raw tables to bit matrices."""

    specs: list[ThresholdSpec] = field(default_factory=list)

    @classmethod
    def fit(cls, columns, names=None, max_thresholds: int = 64,
            category_orders=None) -> "Binarizer":
        """``columns`` is a list of raw columns (numeric arrays or string lists).

        String columns are coded in sorted category order unless
        ``category_orders`` maps the column name to an explicit order.
        """
        names = names or [f"x{i}" for i in range(len(columns))]
        category_orders = category_orders or {}
        specs = []
        for i, (col, name) in enumerate(zip(columns, names)):
            if _is_categorical(col):
                cats = list(category_orders.get(name, sorted(set(col))))
                unknown = set(col) - set(cats)
                if unknown:
                    raise ValueError(f"column {name!r}: categories {sorted(unknown)} missing from the given order")
                index = {c: k for k, c in enumerate(cats)}
                specs.append(fit_thresholds([index[c] for c in col], max_thresholds, i, name, cats))
            else:
                specs.append(fit_thresholds(col, max_thresholds, i, name))
        return cls(specs)

    @property
    def num_bits(self) -> int:
        return sum(s.width for s in self.specs)

    def transform(self, columns) -> np.ndarray:
        if len(columns) != len(self.specs):
            raise ValueError(f"expected {len(self.specs)} columns, got {len(columns)}")
        blocks = [transform_column(spec.encode(col), spec) for col, spec in zip(columns, self.specs)]
        return np.concatenate(blocks, axis=1) if blocks else np.zeros((0, 0), np.uint8)

    def bit_names(self) -> list[str]:
        return [n for spec in self.specs for n in spec.literal_names()]

    def literal_names(self) -> list[str]:
        """Names of all ``2o`` literals: plain bits, then their negations."""
        plain = self.bit_names()
        return plain + [f"¬({n})" for n in plain]

    def provenance(self) -> list[tuple[int, object]]:
        """For each bit column, the ``(feature_index, threshold)`` pair it tests."""
        return [(s.feature_index, t) for s in self.specs for t in s.thresholds]

    def to_dict(self) -> dict:
        return {
            "format": SPEC_FORMAT,
            "version": FORMAT_VERSION,
            "num_bits": self.num_bits,
            "specs": [s.to_dict() for s in self.specs],
            "literal_names": self.literal_names(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Binarizer":
        if d.get("format") != SPEC_FORMAT:
            raise ValueError(f"not an {SPEC_FORMAT} document")
        return cls([ThresholdSpec.from_dict(s) for s in d["specs"]])

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, ensure_ascii=False) + "\n")

    @classmethod
    def load(cls, path) -> "Binarizer":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _is_categorical(col) -> bool:
    return any(isinstance(c, str) for c in col)


@dataclass
class BinarizedDataset:
    rows: np.ndarray
    labels: np.ndarray
    binarizer: Binarizer

    def __post_init__(self):
        if self.rows.shape[0] != self.labels.shape[0]:
            raise ValueError("row and label counts differ")
        if self.rows.shape[1] != self.binarizer.num_bits:
            raise ValueError("bit columns do not match the threshold specs")

    @property
    def num_features(self) -> int:
        return self.rows.shape[1]

    @property
    def specs(self) -> list[ThresholdSpec]:
        return self.binarizer.specs

    @property
    def feature_names(self) -> list[str]:
        return self.binarizer.literal_names()

    def to_dict(self) -> dict:
        return {
            "format": DATASET_FORMAT,
            "version": FORMAT_VERSION,
            "num_rows": int(self.rows.shape[0]),
            "num_features": int(self.num_features),
            "rows": ["".join(map(str, r)) for r in self.rows.tolist()],
            "labels": "".join(map(str, self.labels.tolist())),
        }

    def save(self, path, sidecar_path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")
        self.binarizer.save(sidecar_path)

    @classmethod
    def load(cls, path, sidecar_path) -> "BinarizedDataset":
        d = json.loads(Path(path).read_text())
        if d.get("format") != DATASET_FORMAT:
            raise ValueError(f"{path}: not an {DATASET_FORMAT} document")
        if d.get("version") != FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported version {d.get('version')}")
        o = d["num_features"]
        rows = np.array([[int(c) for c in r] for r in d["rows"]], dtype=np.uint8).reshape(-1, o)
        labels = np.array([int(c) for c in d["labels"]], dtype=np.uint8)
        return cls(rows, labels, Binarizer.load(sidecar_path))


def binarize(table, label: str, max_thresholds: int = 64, positive_label=None,
             fit_rows=None, category_orders=None) -> BinarizedDataset:
    """Binarize a :class:`iwtm.data.RawTable`.

    Thresholds are fitted on ``fit_rows`` (row indices, default: all rows) and
    applied to every row.
    """
    from .data import encode_labels

    features = [c for c in table.columns if c != label]
    if label not in table.columns:
        raise KeyError(f"label column {label!r} not in table")
    cols = [table.column(c) for c in features]
    for name, col in zip(features, cols):
        _check_cells(name, col)
    if fit_rows is None:
        fit_cols = cols
    else:
        fit_cols = [[col[i] for i in fit_rows] for col in cols]
    binarizer = Binarizer.fit(fit_cols, features, max_thresholds, category_orders)
    rows = binarizer.transform(cols)
    labels = encode_labels(table.column(label), positive_label)
    return BinarizedDataset(rows, labels, binarizer)


def _check_cells(name, col):
    if len({isinstance(c, str) for c in col}) > 1:
        r, c = next((r, c) for r, c in enumerate(col) if isinstance(c, str))
        raise ValueError(f"column {name!r}, row {r}: non-numeric cell {c!r} in a numeric column")
