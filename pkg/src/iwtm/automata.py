"""Primitive learning automata.

Two automata drive everything else in the package:

* the two-action Tsetlin Automaton, with ``2N`` states, where states
  ``1..N`` select *exclude* and ``N+1..2N`` select *include*;
* the integer stochastic-searching-on-the-line automaton that holds a clause
  weight. It walks the non-negative integers with step 1 and has no upper
  bound.

Both are available as small mutable objects and as vectorised array
functions (``reward_states``, ``penalize_states``, ``increment_weights``,
``decrement_weights``) that operate on whole state matrices at once.

Note the two automata each have a parameter conventionally called ``N``. Here
the Tsetlin Automaton's one is ``half_states``; the weight automaton always
moves with resolution 1.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

# Weights live in a signed 64-bit word so that signed vote sums stay integral.
WEIGHT_MAX = 2**63 - 1


class Action(enum.IntEnum):
    EXCLUDE = 0
    INCLUDE = 1


@dataclass
class TsetlinAutomaton:
    state: int
    half_states: int = 100

    def __post_init__(self):
        if self.half_states < 1:
            raise ValueError(f"half_states must be >= 1, got {self.half_states}")
        if not 1 <= self.state <= 2 * self.half_states:
            raise ValueError(
                f"state {self.state} outside [1, {2 * self.half_states}]"
            )

    @classmethod
    def random(cls, half_states: int, rng: np.random.Generator) -> "TsetlinAutomaton":
        """Start at N or N+1 with equal probability (weakest conviction)."""
        return cls(int(half_states + rng.integers(0, 2)), half_states)

    @property
    def action(self) -> Action:
        return Action.INCLUDE if self.state > self.half_states else Action.EXCLUDE

    def reward(self) -> None:
        """Move one step deeper into the current action's half."""
        if self.state <= self.half_states:
            self.state = max(1, self.state - 1)
        else:
            self.state = min(2 * self.half_states, self.state + 1)

    def penalize(self) -> None:
        """Move one step towards the centre; may flip the action."""
        if self.state <= self.half_states:
            self.state += 1
        else:
            self.state -= 1


def ta_action(ta: TsetlinAutomaton) -> Action:
    return ta.action


def ta_reward(ta: TsetlinAutomaton) -> TsetlinAutomaton:
    ta.reward()
    return ta


def ta_penalize(ta: TsetlinAutomaton) -> TsetlinAutomaton:
    ta.penalize()
    return ta


@dataclass
class SslWeight:
    """Integer clause weight learned by stochastic searching on the line."""

    value: int = 1

    def __post_init__(self):
        if not 0 <= self.value <= WEIGHT_MAX:
            raise ValueError(f"weight must lie in [0, {WEIGHT_MAX}], got {self.value}")

    def increment(self) -> None:
        if self.value >= WEIGHT_MAX:
            raise OverflowError("clause weight overflow; configuration is diverging")
        self.value += 1

    def decrement(self) -> None:
        # Absorbing at zero: a zero-weight clause stays switched off.
        if self.value > 0:
            self.value -= 1


def ssl_increment(w: SslWeight) -> SslWeight:
    w.increment()
    return w


def ssl_decrement(w: SslWeight) -> SslWeight:
    w.decrement()
    return w


# -- vectorised forms --------------------------------------------------------

def actions(states: np.ndarray, half_states: int) -> np.ndarray:
    """Boolean include mask for an array of TA states."""
    return np.asarray(states) > half_states


def reward_states(states: np.ndarray, half_states: int, mask=None) -> np.ndarray:
    """In-place reward of every TA selected by ``mask`` (all if None)."""
    if mask is None:
        mask = np.ones(states.shape, dtype=bool)
    include = states > half_states
    step = np.where(include, 1, -1) * mask
    np.add(states, step.astype(states.dtype), out=states)
    np.clip(states, 1, 2 * half_states, out=states)
    return states


def penalize_states(states: np.ndarray, half_states: int, mask=None) -> np.ndarray:
    """In-place penalty of every TA selected by ``mask`` (all if None)."""
    if mask is None:
        mask = np.ones(states.shape, dtype=bool)
    include = states > half_states
    step = np.where(include, -1, 1) * mask
    np.add(states, step.astype(states.dtype), out=states)
    return states


def increment_weights(weights: np.ndarray, mask=None) -> np.ndarray:
    if mask is None:
        mask = np.ones(weights.shape, dtype=bool)
    if np.any(weights[mask] >= np.iinfo(weights.dtype).max):
        raise OverflowError("clause weight overflow; configuration is diverging")
    weights[mask] += 1
    return weights


def decrement_weights(weights: np.ndarray, mask=None) -> np.ndarray:
    if mask is None:
        mask = np.ones(weights.shape, dtype=bool)
    weights[mask & (weights > 0)] -= 1
    return weights
