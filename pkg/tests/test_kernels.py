import os
import subprocess
import sys

import numpy as np
import pytest

from iwtm import _kernels
from iwtm.machine import Machine, MachineConfig


def test_scalar_and_vector_draws_agree():
    seeds = np.array([0, 1, 2**63 + 5], dtype=np.uint64)
    for seed in seeds:
        for ctr in [0, 1, 17, 2**40]:
            a = _kernels._uniform_scalar(np.uint64(seed), np.uint64(ctr))
            b = _kernels.uniform(seed, ctr)
            assert a == b


def test_draws_look_uniform():
    u = _kernels.uniform(np.uint64(123), np.arange(200_000, dtype=np.uint64))
    assert u.min() >= 0 and u.max() < 1
    assert abs(u.mean() - 0.5) < 0.005
    hist, _ = np.histogram(u, bins=10, range=(0, 1))
    assert hist.min() > 19_000


@pytest.mark.parametrize("weighting", ["integer", "none"])
def test_backends_bit_identical(weighting):
    rng = np.random.default_rng(5)
    X = rng.integers(0, 2, size=(300, 12)).astype(np.uint8)
    y = (X[:, 0] & ~X[:, 3] | X[:, 7]).astype(np.uint8) & 1
    cfg = MachineConfig(num_clauses=40, threshold=8, s=4.0, epochs=15, weighting=weighting, seed=3)
    a = Machine(cfg, 12, "numba").fit(X, y)
    b = Machine(cfg, 12, "numpy").fit(X, y)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.weights, b.weights)
    for learning in (False, True):
        lits = np.concatenate([X, 1 - X], axis=1)
        assert np.array_equal(_kernels.NUMBA.votes(a.states, a.weights, a.positive, lits, 100, learning),
                              _kernels.NUMPY.votes(a.states, a.weights, a.positive, lits, 100, learning))


def test_backend_selection(monkeypatch):
    monkeypatch.setenv("IWTM_DISABLE_NUMBA", "1")
    assert _kernels.get_backend().name == "numpy"
    monkeypatch.setenv("IWTM_DISABLE_NUMBA", "0")
    assert _kernels.get_backend().name == "numba"
    assert _kernels.get_backend("numpy").name == "numpy"
    with pytest.raises(ValueError):
        _kernels.get_backend("cuda")


def test_env_flag_reaches_new_process():
    env = dict(os.environ, IWTM_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "from iwtm.machine import Machine, MachineConfig; print(Machine(MachineConfig(), 2).backend.name)"],
        env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
