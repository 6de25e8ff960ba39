"""Compare the numba and numpy training/inference backends.

    python3 benchmarks/bench_kernels.py [--clauses 20,200,2000] [--features 18] [--rows 200] [--epochs 5]

Both backends consume the same random stream, so the script also checks that
they end in identical states.
"""
import argparse
import time

import numpy as np

from iwtm.machine import Machine, MachineConfig


def timed(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--clauses", default="20,200,2000")
    ap.add_argument("--features", type=int, default=18)
    ap.add_argument("--rows", type=int, default=200)
    ap.add_argument("--epochs", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    X = rng.integers(0, 2, size=(args.rows, args.features)).astype(np.uint8)
    y = (X[:, 0] ^ X[:, 1]).astype(np.uint8)
    print(f"rows={args.rows} o={args.features} epochs={args.epochs}")
    print(f"{'m':>6} {'numba fit':>10} {'numpy fit':>10} {'speedup':>8} "
          f"{'numba pred':>11} {'numpy pred':>11} {'same':>5}")
    for m in (int(c) for c in args.clauses.split(",")):
        cfg = MachineConfig(num_clauses=m, threshold=max(2, m // 10), s=4.0,
                            epochs=args.epochs, seed=args.seed)
        Machine(cfg, args.features, "numba").fit(X[:2], y[:2], epochs=1)  # compile
        fits, preds, ends = {}, {}, {}
        for backend in ("numba", "numpy"):
            fits[backend] = timed(lambda: Machine(cfg, args.features, backend).fit(X, y), repeat=1)
            trained = Machine(cfg, args.features, backend).fit(X, y)
            preds[backend] = timed(lambda: trained.predict(X))
            ends[backend] = (trained.states, trained.weights)
        same = all(np.array_equal(a, b) for a, b in zip(ends["numba"], ends["numpy"]))
        print(f"{m:>6} {fits['numba']:>9.3f}s {fits['numpy']:>9.3f}s "
              f"{fits['numpy'] / fits['numba']:>7.1f}x {preds['numba'] * 1e3:>9.2f}ms "
              f"{preds['numpy'] * 1e3:>9.2f}ms {str(same):>5}")


if __name__ == "__main__":
    main()
