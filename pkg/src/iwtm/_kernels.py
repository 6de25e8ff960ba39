"""Hot loops for clause evaluation and feedback, in two interchangeable backends.

``numba``  scalar loops compiled with ``@njit`` (the default).
``numpy``  the same arithmetic vectorised over clauses; used when numba is not
           importable or when ``IWTM_DISABLE_NUMBA=1`` is set.

Both backends draw their random numbers from the same counter-based generator
(SplitMix64 evaluated at an explicit position), one stream per clause. Draw
``i`` of clause ``j`` is a pure function of ``(seeds[j], i)``, so the two
backends produce bit-identical TA states and weights, and clauses could be
updated in any order without changing the result.

Per training example ``t`` each clause owns the counter block
``[t * (2o + 1), (t + 1) * (2o + 1))``: slot 0 decides clause selection, slot
``1 + k`` is the Bernoulli draw for the TA of literal ``k``.
"""
from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0
_WEIGHT_MAX = np.iinfo(np.int64).max


def numba_disabled() -> bool:
    return os.environ.get("IWTM_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


# -- random draws ------------------------------------------------------------

@njit(cache=True, inline="always")
def _uniform_scalar(seed, counter):
    z = seed + counter * GAMMA
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    z = z ^ (z >> _S31)
    return np.float64(z >> _S11) * _INV53


def uniform(seeds, counters) -> np.ndarray:
    """Vectorised draws; ``seeds`` and ``counters`` broadcast against each other."""
    seeds = np.asarray(seeds, dtype=np.uint64)
    counters = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):  # wrap-around is the point
        z = seeds + counters * GAMMA
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
        z = z ^ (z >> _S31)
    return (z >> _S11).astype(np.float64) * _INV53


# -- numba backend -----------------------------------------------------------

@njit(cache=True, error_model="numpy")
def _nb_train(states, weights, positive, X, y, order, seeds, step,
              half_states, threshold, p_include, p_exclude, update_weights):
    m, n_lit = states.shape
    top = 2 * half_states
    block = np.uint64(n_lit + 1)
    out = np.empty(m, dtype=np.uint8)
    for idx in order:
        lit = X[idx]
        target = y[idx]

        v = 0
        for j in range(m):
            c = 1
            for k in range(n_lit):
                if states[j, k] > half_states and lit[k] == 0:
                    c = 0
                    break
            out[j] = c
            if c == 1:
                if positive[j]:
                    v += weights[j]
                else:
                    v -= weights[j]

        if v > threshold:
            v = threshold
        elif v < -threshold:
            v = -threshold
        if target == 1:
            p_select = (threshold - v) / (2.0 * threshold)
        else:
            p_select = (threshold + v) / (2.0 * threshold)

        base = step * block
        for j in range(m):
            seed = seeds[j]
            if _uniform_scalar(seed, base) >= p_select:
                continue
            row = states[j]
            fired = out[j] == 1
            if positive[j] == (target == 1):
                # Type I. Draws are positional, so skipping a clamped TA's draw changes nothing.
                for k in range(n_lit):
                    if fired and lit[k] == 1:
                        if row[k] < top and _uniform_scalar(seed, base + np.uint64(k + 1)) < p_include:
                            row[k] += 1
                    elif row[k] > 1 and _uniform_scalar(seed, base + np.uint64(k + 1)) < p_exclude:
                        row[k] -= 1
                if update_weights and fired:
                    if weights[j] == _WEIGHT_MAX:
                        return step, True
                    weights[j] += 1
            elif fired:
                # Type II
                for k in range(n_lit):
                    if lit[k] == 0 and row[k] < top:
                        row[k] += 1
                if update_weights and weights[j] > 0:
                    weights[j] -= 1
        step += np.uint64(1)
    return step, False


@njit(cache=True)
def _nb_clause_outputs(states, X, half_states, learning):
    m, n_lit = states.shape
    n = X.shape[0]
    out = np.zeros((n, m), dtype=np.uint8)
    for i in range(n):
        for j in range(m):
            c = 1
            empty = True
            for k in range(n_lit):
                if states[j, k] > half_states:
                    empty = False
                    if X[i, k] == 0:
                        c = 0
                        break
            if empty and not learning:
                c = 0
            out[i, j] = c
    return out


@njit(cache=True)
def _nb_votes(states, weights, positive, X, half_states, learning):
    out = _nb_clause_outputs(states, X, half_states, learning)
    n, m = out.shape
    votes = np.zeros(n, dtype=np.int64)
    for i in range(n):
        v = 0
        for j in range(m):
            if out[i, j] == 1:
                if positive[j]:
                    v += weights[j]
                else:
                    v -= weights[j]
        votes[i] = v
    return votes


# -- numpy backend -----------------------------------------------------------

def _np_clause_outputs(states, X, half_states, learning):
    included = (states > half_states).astype(np.int32)
    violations = (1 - X.astype(np.int32)) @ included.T
    out = violations == 0
    if not learning:
        out &= included.any(axis=1)[None, :]
    return out.astype(np.uint8)


def _np_votes(states, weights, positive, X, half_states, learning):
    out = _np_clause_outputs(states, X, half_states, learning).astype(np.int64)
    signed = np.where(positive, weights, -weights).astype(np.int64)
    return out @ signed


def _np_train(states, weights, positive, X, y, order, seeds, step,
              half_states, threshold, p_include, p_exclude, update_weights):
    m, n_lit = states.shape
    top = 2 * half_states
    block = np.uint64(n_lit + 1)
    slots = np.arange(1, n_lit + 1, dtype=np.uint64)
    included_ok = np.empty(m, dtype=bool)
    signed = np.empty(m, dtype=np.int64)
    step = np.uint64(step)
    for idx in order:
        lit = X[idx]
        target = int(y[idx])
        zero_lit = lit == 0

        included_ok[:] = ~np.any((states > half_states) & zero_lit[None, :], axis=1)
        out = included_ok
        np.copyto(signed, np.where(positive, weights, -weights))
        v = int(signed[out].sum())
        v = max(-threshold, min(threshold, v))
        if target == 1:
            p_select = (threshold - v) / (2.0 * threshold)
        else:
            p_select = (threshold + v) / (2.0 * threshold)

        base = step * block
        selected = uniform(seeds, base) < p_select
        type_i = selected & (positive == (target == 1))
        type_ii = selected & ~type_i & out

        rows = np.flatnonzero(type_i)
        if rows.size:
            u = uniform(seeds[rows, None], base + slots[None, :])
            fires = out[rows, None] & (lit[None, :] == 1)
            sub = states[rows]
            up = fires & (u < p_include) & (sub < top)
            down = ~fires & (u < p_exclude) & (sub > 1)
            sub += up.astype(states.dtype)
            sub -= down.astype(states.dtype)
            states[rows] = sub
            if update_weights:
                grow = rows[out[rows]]
                if grow.size and np.any(weights[grow] == _WEIGHT_MAX):
                    return step, True
                weights[grow] += 1

        rows = np.flatnonzero(type_ii)
        if rows.size:
            sub = states[rows]
            sub += (zero_lit[None, :] & (sub < top)).astype(states.dtype)
            states[rows] = sub
            if update_weights:
                shrink = rows[weights[rows] > 0]
                weights[shrink] -= 1
        step += np.uint64(1)
    return step, False


NUMBA = SimpleNamespace(name="numba", train=_nb_train, votes=_nb_votes,
                        clause_outputs=_nb_clause_outputs)
NUMPY = SimpleNamespace(name="numpy", train=_np_train, votes=_np_votes,
                        clause_outputs=_np_clause_outputs)


def get_backend(name: str | None = None) -> SimpleNamespace:
    """Resolve a backend by name, or from the environment when ``name`` is None."""
    if name is None:
        name = "numpy" if (numba_disabled() or not NUMBA_AVAILABLE) else "numba"
    if name == "numba":
        if not NUMBA_AVAILABLE:
            raise RuntimeError("numba backend requested but numba is not installed")
        return NUMBA
    if name == "numpy":
        return NUMPY
    raise ValueError(f"unknown backend {name!r}; expected 'numba' or 'numpy'")
