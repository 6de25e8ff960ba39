"""Tsetlin Machine and Integer-Weighted Tsetlin Machine.

The clause bank is stored as one ``(m, 2o)`` int32 matrix of TA states plus an
int64 weight vector. Clause ``j`` (0-based) has positive polarity when ``j``
is even, i.e. odd clauses in 1-based numbering vote for class 1.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .clause import Clause, Mode, Polarity, make_literals

MODEL_FORMAT = "iwtm-model"
MODEL_VERSION = 1
WEIGHTINGS = ("none", "integer")


class ConfigError(ValueError):
    """Invalid hyperparameters."""


@dataclass(frozen=True)
class MachineConfig:
    num_clauses: int = 10
    threshold: int = 15
    s: float = 3.0
    half_states: int = 100
    epochs: int = 100
    weighting: str = "integer"
    seed: int = 0

    def __post_init__(self):
        if self.num_clauses < 2 or self.num_clauses % 2:
            raise ConfigError(f"num_clauses must be a positive even number, got {self.num_clauses}")
        if self.threshold < 1:
            raise ConfigError(f"threshold must be >= 1, got {self.threshold}")
        if not self.s >= 1:
            raise ConfigError(f"s must be >= 1, got {self.s}")
        if self.half_states < 1:
            raise ConfigError(f"half_states must be >= 1, got {self.half_states}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.weighting not in WEIGHTINGS:
            raise ConfigError(f"weighting must be one of {WEIGHTINGS}, got {self.weighting!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    @property
    def weighted(self) -> bool:
        return self.weighting == "integer"


def feedback_probability(v: int, threshold: int, kind: str) -> float:
    """Clause-selection probability for Type I (``"I"``) or Type II (``"II"``) feedback.

    Type I: (T - clamp(v)) / 2T, Type II: (T + clamp(v)) / 2T, with v clamped
    to [-T, T].
    """
    if threshold < 1:
        raise ConfigError(f"threshold must be >= 1, got {threshold}")
    v = max(-threshold, min(threshold, v))
    if kind == "I":
        return (threshold - v) / (2.0 * threshold)
    if kind == "II":
        return (threshold + v) / (2.0 * threshold)
    raise ValueError(f"kind must be 'I' or 'II', got {kind!r}")


class Machine:
    def __init__(self, config: MachineConfig, num_features: int, backend: str | None = None):
        if num_features < 1:
            raise ValueError(f"num_features must be >= 1, got {num_features}")
        self.config = config
        self.num_features = int(num_features)
        self.backend = _kernels.get_backend(backend)

        init_seq, clause_seq, shuffle_seq = np.random.SeedSequence(config.seed).spawn(3)
        m, n = config.num_clauses, config.half_states
        init_rng = np.random.default_rng(init_seq)
        self.states = (n + init_rng.integers(0, 2, size=(m, 2 * self.num_features))).astype(np.int32)
        self.weights = np.ones(m, dtype=np.int64)
        self.positive = np.arange(m) % 2 == 0
        self.clause_seeds = clause_seq.generate_state(m, dtype=np.uint64)
        self.shuffle_rng = np.random.default_rng(shuffle_seq)
        self.step = 0
        self.learn_weights = config.weighted

    # -- structure -----------------------------------------------------------

    @property
    def num_clauses(self) -> int:
        return self.config.num_clauses

    def clause(self, j: int) -> Clause:
        """A live view of clause ``j``; mutations write through to the machine."""
        polarity = Polarity.POSITIVE if self.positive[j] else Polarity.NEGATIVE
        return Clause(self.states[j], polarity, half_states=self.config.half_states,
                      weight_cell=self.weights[j:j + 1])

    @property
    def clauses(self) -> list[Clause]:
        return [self.clause(j) for j in range(self.num_clauses)]

    def included(self) -> np.ndarray:
        """Boolean include matrix, shape (m, 2o)."""
        return self.states > self.config.half_states

    # -- inference -----------------------------------------------------------

    def _check_rows(self, X) -> np.ndarray:
        X = np.asarray(X)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.num_features:
            raise ValueError(
                f"expected rows with {self.num_features} features, got shape {np.shape(X)}"
            )
        return X

    def vote_sum(self, x, mode=Mode.INFERENCE) -> int:
        return int(self.vote_sums(x, mode)[0])

    def vote_sums(self, X, mode=Mode.INFERENCE) -> np.ndarray:
        lits = make_literals(self._check_rows(X))
        return self.backend.votes(self.states, self.weights, self.positive, lits,
                                  self.config.half_states, mode is Mode.LEARNING)

    def clause_outputs(self, X, mode=Mode.INFERENCE) -> np.ndarray:
        lits = make_literals(self._check_rows(X))
        return self.backend.clause_outputs(self.states, lits, self.config.half_states,
                                           mode is Mode.LEARNING)

    def classify(self, x) -> int:
        x = np.asarray(x)
        if x.ndim != 1:
            raise ValueError("classify takes a single feature vector")
        return int(self.vote_sum(x) >= 0)

    def predict_batch(self, X) -> np.ndarray:
        X = np.asarray(X)
        if X.size == 0:
            return np.zeros(0, dtype=np.uint8)
        return (self.vote_sums(X) >= 0).astype(np.uint8)

    predict = predict_batch

    # -- learning ------------------------------------------------------------

    def _train(self, lits, y, order):
        cfg = self.config
        step, overflow = self.backend.train(
            self.states, self.weights, self.positive, lits, y, order,
            self.clause_seeds, np.uint64(self.step), cfg.half_states, cfg.threshold,
            (cfg.s - 1.0) / cfg.s, 1.0 / cfg.s, self.learn_weights,
        )
        self.step = int(step)
        if overflow:
            raise OverflowError("clause weight overflow; configuration is diverging")

    def train_step(self, x, y: int) -> None:
        """One online update on a single example."""
        x = np.asarray(x)
        if x.ndim != 1:
            raise ValueError("train_step takes a single feature vector")
        lits = make_literals(self._check_rows(x))
        self._train(lits, np.array([int(y)], dtype=np.uint8), np.zeros(1, dtype=np.int64))

    def fit(self, X, y, epochs: int | None = None) -> "Machine":
        X = self._check_rows(X)
        y = np.asarray(y)
        if X.shape[0] == 0:
            raise ValueError("cannot fit on an empty dataset")
        if y.shape != (X.shape[0],):
            raise ValueError(f"got {X.shape[0]} rows but {y.size} labels")
        if not np.isin(y, (0, 1)).all():
            raise ValueError("labels must be binary (0/1)")
        epochs = self.config.epochs if epochs is None else epochs
        lits = np.ascontiguousarray(make_literals(X))
        y = y.astype(np.uint8)
        if epochs == 0:
            return self
        # One kernel call for all epochs; each epoch is its own fresh permutation.
        order = np.concatenate([self.shuffle_rng.permutation(X.shape[0]) for _ in range(epochs)])
        self._train(lits, y, order.astype(np.int64))
        return self

    # -- serialisation -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "config": asdict(self.config),
            "num_features": self.num_features,
            "rng": {
                "step": self.step,
                "clause_seeds": [int(s) for s in self.clause_seeds],
                "shuffle_state": self.shuffle_rng.bit_generator.state,
            },
            "clauses": [
                {
                    "polarity": "+" if self.positive[j] else "-",
                    "weight": int(self.weights[j]),
                    "states": self.states[j].tolist(),
                }
                for j in range(self.num_clauses)
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict, backend: str | None = None) -> "Machine":
        if doc.get("format") != MODEL_FORMAT:
            raise ValueError(f"not an {MODEL_FORMAT} document")
        if doc.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {doc.get('version')}")
        machine = cls(MachineConfig(**doc["config"]), doc["num_features"], backend)
        clauses = doc["clauses"]
        if len(clauses) != machine.num_clauses:
            raise ValueError("clause count does not match config")
        for j, c in enumerate(clauses):
            if (c["polarity"] == "+") != bool(machine.positive[j]):
                raise ValueError(f"clause {j} has the wrong polarity")
        states = np.array([c["states"] for c in clauses], dtype=np.int32)
        if states.shape != machine.states.shape:
            raise ValueError("TA state matrix has the wrong shape")
        if states.min() < 1 or states.max() > 2 * machine.config.half_states:
            raise ValueError("TA state out of range")
        machine.states[:] = states
        machine.weights[:] = [c["weight"] for c in clauses]
        if "rng" in doc:
            machine.step = int(doc["rng"]["step"])
            machine.clause_seeds = np.array(doc["rng"]["clause_seeds"], dtype=np.uint64)
            machine.shuffle_rng.bit_generator.state = doc["rng"]["shuffle_state"]
        return machine

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path, backend: str | None = None) -> "Machine":
        return cls.from_dict(json.loads(Path(path).read_text()), backend)

    def copy(self) -> "Machine":
        return Machine.from_dict(self.to_dict(), self.backend.name)

    def __repr__(self):
        c = self.config
        return (f"Machine(m={c.num_clauses}, T={c.threshold}, s={c.s}, N={c.half_states}, "
                f"weighting={c.weighting!r}, o={self.num_features})")
