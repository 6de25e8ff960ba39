import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import duplicated, reference_train_step
from iwtm._kernels import get_backend
from iwtm.clause import Mode
from iwtm.machine import ConfigError, Machine, MachineConfig, feedback_probability

N = 100


def machine_with(includes, weights=None, o=2, weighting="integer", **kw):
    """Machine whose clause j includes exactly the literal indices ``includes[j]``."""
    cfg = MachineConfig(num_clauses=len(includes), weighting=weighting, **kw)
    m = Machine(cfg, o)
    m.states[:] = cfg.half_states
    for j, inc in enumerate(includes):
        m.states[j, list(inc)] = cfg.half_states + 1
    if weights is not None:
        m.weights[:] = weights
    return m


def xor_machine():
    # Literals for o=2: 0:x1 1:x2 2:¬x1 3:¬x2. Even slots vote for class 1.
    return machine_with([[0, 3], [0, 1], [2, 1], [2, 3]], weighting="none")


@pytest.mark.parametrize("bad", [
    dict(num_clauses=3), dict(num_clauses=0), dict(threshold=0), dict(s=0.5),
    dict(half_states=0), dict(epochs=-1), dict(weighting="real"), dict(seed=-1),
])
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        MachineConfig(**bad)


def test_polarity_alternates():
    m = Machine(MachineConfig(num_clauses=6), 3)
    assert m.positive.tolist() == [True, False] * 3
    assert set(np.unique(m.states)) <= {N, N + 1}
    assert m.weights.tolist() == [1] * 6


def test_hand_built_xor_machine():
    m = xor_machine()
    assert m.vote_sum([1, 0]) == 1
    assert [m.classify(x) for x in [(0, 0), (0, 1), (1, 0), (1, 1)]] == [0, 1, 1, 0]
    assert m.predict_batch([[0, 0], [0, 1], [1, 0], [1, 1]]).tolist() == [0, 1, 1, 0]


def test_silent_machine_votes_zero_and_ties_go_to_one():
    m = machine_with([[0, 2], [1, 3]])  # contradictions never fire
    assert m.vote_sum([1, 0]) == 0
    assert m.classify([1, 0]) == 1


def test_negative_vote_classifies_zero():
    m = machine_with([[0, 2], [0]])
    assert m.vote_sum([1, 1]) == -1
    assert m.classify([1, 1]) == 0


def test_two_clause_bankruptcy_vote():
    o = 18
    m = machine_with([[o + 13], [13, o + 12]], weights=[0, 3], o=o)
    x = np.zeros(o, dtype=np.uint8)
    x[12] = 1  # ¬13 false, so the weighted clause is off; ¬14 is true
    assert m.clause_outputs(x)[0].tolist() == [1, 0]
    assert m.vote_sum(x) == 0
    assert m.classify(x) == 1
    x[12], x[13] = 0, 1  # Competitiveness <= N only
    assert m.vote_sum(x) == -3


def test_learning_mode_counts_empty_clauses():
    m = machine_with([[], []], weights=[2, 5])
    assert m.vote_sum([0, 1], Mode.LEARNING) == -3
    assert m.vote_sum([0, 1], Mode.INFERENCE) == 0


def test_dimension_errors():
    m = xor_machine()
    with pytest.raises(ValueError):
        m.classify([1, 0, 1])
    with pytest.raises(ValueError):
        m.predict_batch([[1, 0, 0]])
    with pytest.raises(ValueError):
        m.train_step([1], 1)


def test_predict_batch_edge_cases():
    m = xor_machine()
    assert m.predict_batch(np.zeros((0, 2))).shape == (0,)
    assert m.predict_batch([[1, 0]]).tolist() == [m.classify([1, 0])]


@pytest.mark.parametrize("v, p1, p2", [(15, 0.0, 1.0), (-15, 1.0, 0.0), (0, 0.5, 0.5),
                                       (40, 0.0, 1.0), (5, 1 / 3, 2 / 3)])
def test_feedback_probability_examples(v, p1, p2):
    assert feedback_probability(v, 15, "I") == pytest.approx(p1)
    assert feedback_probability(v, 15, "II") == pytest.approx(p2)


@given(st.integers(1, 500), st.data())
def test_feedback_probability_bounds(t, data):
    v = data.draw(st.integers(-3 * t, 3 * t))
    a, b = feedback_probability(v, t, "I"), feedback_probability(v, t, "II")
    assert 0 <= a <= 1 and 0 <= b <= 1
    assert a + b == pytest.approx(1.0)


def test_feedback_probability_errors():
    with pytest.raises(ConfigError):
        feedback_probability(0, 0, "I")
    with pytest.raises(ValueError):
        feedback_probability(0, 3, "III")


def random_machine(seed, o=4, m=6, weighting="integer", s=3.0):
    rng = np.random.default_rng(seed)
    cfg = MachineConfig(num_clauses=m, threshold=3, s=s, half_states=5, weighting=weighting, seed=seed)
    mach = Machine(cfg, o)
    mach.states[:] = rng.integers(1, 11, size=mach.states.shape)
    mach.weights[:] = rng.integers(0, 4, size=m)
    return mach, rng


@pytest.mark.parametrize("backend", ["numba", "numpy"])
@pytest.mark.parametrize("weighting", ["integer", "none"])
def test_kernel_matches_reference_trainer(backend, weighting):
    for seed in range(30):
        fast, rng = random_machine(seed, weighting=weighting)
        fast.backend = get_backend(backend)
        slow = fast.copy()
        for _ in range(40):
            x = rng.integers(0, 2, size=4)
            y = int(rng.integers(0, 2))
            fast.train_step(x, y)
            reference_train_step(slow, x, y)
        assert np.array_equal(fast.states, slow.states)
        assert np.array_equal(fast.weights, slow.weights)
        assert fast.step == slow.step


def test_weight_increment_on_type_ia():
    # One positive clause that fires on x; v clamped at -T makes selection certain for y=1.
    m = machine_with([[0], [0]], weights=[1, 1], threshold=1)
    m.weights[1] = 3  # v = 1 - 3 = -2 <= -T, so p(Type I on clause 0) = 1
    m.train_step([1, 0], 1)
    assert m.weights[0] == 2
    # The negative clause got Type II with probability 1 as well and fired: decremented.
    assert m.weights[1] == 2


def test_no_weight_change_when_positive_clauses_silent():
    m = machine_with([[2], [0]], weights=[1, 5], threshold=1)
    before = m.weights.copy()
    m.train_step([1, 0], 1)
    assert m.weights[0] == before[0]


def test_weight_decrement_floors_at_zero():
    m = machine_with([[0], [2, 3]], weights=[0, 0], threshold=1)
    # v = 0 with w=0; p(Type II) for y=0 is 1/2, so run until selected.
    for _ in range(50):
        m.train_step([1, 0], 0)
        assert m.weights.min() >= 0
    assert m.weights[0] == 0


def test_vanilla_weights_stay_one(xor_data):
    X, y = xor_data
    m = Machine(MachineConfig(num_clauses=10, threshold=5, epochs=5, weighting="none"), 2).fit(X, y)
    assert m.weights.tolist() == [1] * 10


def test_fit_deterministic(xor_data):
    X, y = xor_data
    cfg = MachineConfig(num_clauses=10, threshold=5, epochs=5, seed=42)
    a = Machine(cfg, 2).fit(X, y)
    b = Machine(cfg, 2).fit(X, y)
    assert np.array_equal(a.states, b.states) and np.array_equal(a.weights, b.weights)


def test_fit_zero_epochs_is_noop(xor_data):
    X, y = xor_data
    m = Machine(MachineConfig(num_clauses=4), 2)
    states, weights = m.states.copy(), m.weights.copy()
    m.fit(X, y, epochs=0)
    assert np.array_equal(m.states, states) and np.array_equal(m.weights, weights)


def test_fit_input_errors():
    m = Machine(MachineConfig(num_clauses=4), 2)
    with pytest.raises(ValueError):
        m.fit(np.zeros((0, 2)), np.zeros(0))
    with pytest.raises(ValueError):
        m.fit([[0, 1]], [2])
    with pytest.raises(ValueError):
        m.fit([[0, 1]], [1, 0])


def test_xor_training_accuracy(xor_data):
    X, y = xor_data
    cfg = MachineConfig(num_clauses=20, threshold=10, s=3.0, epochs=200, weighting="none", seed=1)
    m = Machine(cfg, 2).fit(X, y)
    assert m.predict(np.array([[0, 0], [0, 1], [1, 0], [1, 1]])).tolist() == [0, 1, 1, 0]


def test_serialisation_round_trip(tmp_path, xor_data):
    X, y = xor_data
    m = Machine(MachineConfig(num_clauses=6, threshold=4, epochs=3, seed=9), 2).fit(X, y)
    m.save(tmp_path / "m.json")
    r = Machine.load(tmp_path / "m.json")
    assert r.config == m.config
    assert np.array_equal(r.states, m.states) and np.array_equal(r.weights, m.weights)
    # Training continues identically after a reload.
    m.fit(X, y, epochs=2)
    r.fit(X, y, epochs=2)
    assert np.array_equal(r.states, m.states) and np.array_equal(r.weights, m.weights)


def test_load_rejects_bad_documents():
    doc = Machine(MachineConfig(num_clauses=2), 2).to_dict()
    with pytest.raises(ValueError):
        Machine.from_dict({**doc, "format": "other"})
    with pytest.raises(ValueError):
        Machine.from_dict({**doc, "version": 99})
    bad = {**doc, "clauses": [dict(c, states=[0, 0, 0, 0]) for c in doc["clauses"]]}
    with pytest.raises(ValueError):
        Machine.from_dict(bad)


def test_live_clause_view_writes_through():
    m = Machine(MachineConfig(num_clauses=2), 2)
    c = m.clause(1)
    c.weight = 7
    c.states[0] = 1
    assert m.weights[1] == 7 and m.states[1, 0] == 1


def all_inputs(o):
    return np.array(list(itertools.product([0, 1], repeat=o)), dtype=np.uint8)


def duplication_violations(machine):
    X = all_inputs(machine.num_features)
    return int(np.sum(machine.predict(X) != duplicated(machine).predict(X)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_duplication_equivalence(seed, o):
    m, _ = random_machine(seed, o=o)
    assert duplication_violations(m) == 0


def test_zero_weight_clause_is_ignored():
    X = all_inputs(4)
    for seed in range(20):
        m, rng = random_machine(seed)
        m.weights[2] = 0
        ref = m.predict(X)
        for _ in range(10):
            m.states[2] = rng.integers(1, 11, size=8)
            assert np.array_equal(m.predict(X), ref)


def test_vanilla_equivalence():
    for seed in range(10):
        a, rng = random_machine(seed, weighting="none")
        b = Machine.from_dict({**a.to_dict(), "config": {**a.to_dict()["config"], "weighting": "integer"}})
        a.weights[:] = 1
        b.weights[:] = 1
        b.learn_weights = False
        for _ in range(50):
            x, y = rng.integers(0, 2, size=4), int(rng.integers(0, 2))
            a.train_step(x, y)
            b.train_step(x, y)
        assert np.array_equal(a.states, b.states)
        assert b.weights.tolist() == [1] * 6


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1.0, 10.0))
def test_train_step_stays_in_bounds(seed, s):
    m, rng = random_machine(seed, s=s)
    for _ in range(30):
        m.train_step(rng.integers(0, 2, size=4), int(rng.integers(0, 2)))
        assert m.states.min() >= 1 and m.states.max() <= 10
        assert m.weights.min() >= 0


def test_overflow_is_reported():
    top = np.iinfo(np.int64).max
    m = machine_with([[0], [0]], weights=[top, top], threshold=1)
    with pytest.raises(OverflowError):
        for _ in range(100):
            m.train_step([1, 0], 1)
