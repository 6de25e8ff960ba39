"""A single conjunctive clause: a team of ``2o`` Tsetlin Automata and a weight.

This is the readable, one-clause-at-a-time form of the learning rules. The
machine trains through the batched kernels in :mod:`iwtm._kernels`; the
methods here are the reference those kernels are tested against.
"""
from __future__ import annotations

import enum

import numpy as np

from .automata import SslWeight, TsetlinAutomaton


class Polarity(enum.IntEnum):
    NEGATIVE = -1
    POSITIVE = 1


class Mode(enum.Enum):
    LEARNING = "learning"
    INFERENCE = "inference"


def make_literals(x) -> np.ndarray:
    """Return ``[x_1..x_o, not x_1..not x_o]`` as uint8.

    Works on a single feature vector or on a 2-D batch (one row per example).
    """
    x = np.asarray(x)
    if x.size and not np.isin(x, (0, 1)).all():
        raise ValueError("features must be binary (0/1)")
    x = x.astype(np.uint8)
    return np.concatenate([x, 1 - x], axis=-1)


class Clause:
    """Conjunction of the literals whose automata currently choose *include*.

    ``states`` may be a view into a machine's state matrix, and ``weight_cell``
    a one-element view into its weight vector; mutating the clause then
    mutates the machine.
    """

    def __init__(self, states, polarity=Polarity.POSITIVE, weight=1, half_states=100,
                 weight_cell=None):
        self.states = np.asarray(states)
        if self.states.ndim != 1 or self.states.size % 2:
            raise ValueError("a clause needs an even-length 1-D vector of TA states")
        self.half_states = int(half_states)
        self.polarity = Polarity(polarity)
        if weight_cell is None:
            SslWeight(int(weight))  # validates range
            weight_cell = np.array([weight], dtype=np.int64)
        self._weight = weight_cell

    @classmethod
    def fresh(cls, num_features, half_states=100, polarity=Polarity.POSITIVE, rng=None):
        """A clause whose automata sit at N or N+1, chosen at random."""
        rng = np.random.default_rng(rng)
        states = half_states + rng.integers(0, 2, size=2 * num_features)
        return cls(states.astype(np.int32), polarity, 1, half_states)

    @property
    def num_features(self) -> int:
        return self.states.size // 2

    @property
    def weight(self) -> int:
        return int(self._weight[0])

    @weight.setter
    def weight(self, value: int):
        SslWeight(int(value))
        self._weight[0] = value

    @property
    def team(self) -> list[TsetlinAutomaton]:
        """Copies of the automata (mutating them does not touch the clause)."""
        return [TsetlinAutomaton(int(s), self.half_states) for s in self.states]

    def included_literals(self) -> set[int]:
        return set(np.flatnonzero(self.states > self.half_states).tolist())

    def evaluate(self, literals, mode=Mode.INFERENCE) -> int:
        literals = np.asarray(literals)
        if literals.shape != self.states.shape:
            raise ValueError(
                f"literal vector has length {literals.size}, clause expects {self.states.size}"
            )
        included = self.states > self.half_states
        if not included.any():
            return 1 if mode is Mode.LEARNING else 0
        return int(np.all(literals[included] == 1))

    def apply_type_i(self, literals, clause_output, s, rng) -> None:
        """Type Ia / Ib feedback.

        A TA whose literal is 1 in a clause that output 1 is pushed towards
        include with probability (s-1)/s; every other TA is pushed towards
        exclude with probability 1/s. ``rng`` needs a ``random(size)`` method.
        """
        if s < 1:
            raise ValueError(f"s must be >= 1, got {s}")
        literals = np.asarray(literals)
        u = np.asarray(rng.random(self.states.size))
        top = 2 * self.half_states
        fires = (literals == 1) & bool(clause_output)
        up = fires & (u < (s - 1) / s) & (self.states < top)
        down = ~fires & (u < 1 / s) & (self.states > 1)
        self.states += up.astype(self.states.dtype)
        self.states -= down.astype(self.states.dtype)

    def apply_type_ii(self, literals, clause_output) -> None:
        """Type II feedback: push every 0-valued literal towards include."""
        if not clause_output:
            return
        literals = np.asarray(literals)
        grow = (literals == 0) & (self.states < 2 * self.half_states)
        self.states += grow.astype(self.states.dtype)

    def __repr__(self):
        lits = sorted(self.included_literals())
        return f"Clause(polarity={self.polarity.name}, weight={self.weight}, literals={lits})"
