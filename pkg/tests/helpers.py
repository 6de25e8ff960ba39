"""Shared test utilities: reference trainer, synthetic tables, criterion log."""
import numpy as np

from iwtm import _kernels
from iwtm.automata import SslWeight
from iwtm.clause import Mode, Polarity, make_literals
from iwtm.data import RawTable
from iwtm.machine import Machine, MachineConfig, feedback_probability

CRITERIA = {}


def record(key, ok, detail):
    CRITERIA[key] = f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}"


class StreamRng:
    """Feeds the kernel's per-clause draws to the one-clause reference methods."""

    def __init__(self, seed, start):
        self.seed, self.pos = np.uint64(seed), start

    def random(self, size):
        ctr = self.pos + np.arange(size, dtype=np.uint64)
        self.pos += np.uint64(size)
        return _kernels.uniform(self.seed, ctr)


def reference_train_step(machine, x, y):
    """Slow, clause-by-clause train step built only from Clause/SslWeight operations."""
    cfg = machine.config
    lits = make_literals(np.asarray(x))
    clauses = machine.clauses
    outs = [c.evaluate(lits, Mode.LEARNING) for c in clauses]
    v = sum(int(c.polarity) * c.weight * o for c, o in zip(clauses, outs))
    p = feedback_probability(v, cfg.threshold, "I" if y == 1 else "II")
    base = np.uint64(machine.step) * np.uint64(2 * machine.num_features + 1)
    for j, (c, out) in enumerate(zip(clauses, outs)):
        seed = machine.clause_seeds[j]
        if _kernels.uniform(seed, base) >= p:
            continue
        if (c.polarity is Polarity.POSITIVE) == (y == 1):
            c.apply_type_i(lits, out, cfg.s, StreamRng(seed, base + np.uint64(1)))
            if machine.learn_weights and out:
                w = SslWeight(c.weight)
                w.increment()
                c.weight = w.value
        elif out:
            c.apply_type_ii(lits, out)
            if machine.learn_weights:
                w = SslWeight(c.weight)
                w.decrement()
                c.weight = w.value
    machine.step += 1


BANKRUPTCY_COLUMNS = ["IndustrialRisk", "ManagementRisk", "FinancialFlexibility",
                      "Credibility", "Competitiveness", "OperatingRisk", "Class"]


def synthetic_bankruptcy(n=250, noise=0.0, seed=0):
    """A table with the Bankruptcy schema (six P/A/N features, B/NB label).

    NOT the real dataset: bankruptcy is driven by Competitiveness == N, with
    the other features loosely correlated. Used only to exercise the pipeline.
    """
    rng = np.random.default_rng(seed)
    comp = rng.choice(["P", "A", "N"], size=n, p=[0.35, 0.22, 0.43])
    bankrupt = comp == "N"
    flip = rng.random(n) < noise
    bankrupt = bankrupt ^ flip
    cols = []
    for name in BANKRUPTCY_COLUMNS[:-1]:
        if name == "Competitiveness":
            cols.append(list(comp))
            continue
        p_bad = np.where(bankrupt, 0.6, 0.2)
        u = rng.random(n)
        col = np.where(u < p_bad, "N", np.where(u < p_bad + 0.3, "A", "P"))
        cols.append(list(col))
    cols.append(["B" if b else "NB" for b in bankrupt])
    return RawTable(list(BANKRUPTCY_COLUMNS), cols)


def duplicated(machine):
    """Unweighted machine with each clause repeated ``weight`` times; pads with silent clauses."""
    half = machine.config.half_states
    pos = [j for j in range(machine.num_clauses) if machine.positive[j]]
    neg = [j for j in range(machine.num_clauses) if not machine.positive[j]]
    pos_rows = [machine.states[j] for j in pos for _ in range(machine.weights[j])]
    neg_rows = [machine.states[j] for j in neg for _ in range(machine.weights[j])]
    empty = np.full(machine.states.shape[1], half, dtype=np.int32)
    k = max(len(pos_rows), len(neg_rows), 1)
    pos_rows += [empty] * (k - len(pos_rows))
    neg_rows += [empty] * (k - len(neg_rows))
    cfg = MachineConfig(num_clauses=2 * k, threshold=machine.config.threshold,
                        half_states=half, weighting="none")
    dup = Machine(cfg, machine.num_features)
    dup.states[0::2] = pos_rows
    dup.states[1::2] = neg_rows
    return dup
