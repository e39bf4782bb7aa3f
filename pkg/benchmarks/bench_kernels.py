"""Compare the numba kernels with their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 3]

Each row times the same workload under both backends after a warm-up call,
so compilation is excluded, and reports the largest difference between the two.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from selmax import _kernels as K
from selmax.domains import gen_domain, gripper
from selmax.heuristics import PDB, HMax, LMCut
from selmax.learning import NaiveBayes
from selmax.search import dijkstra_oracle


def best_of(fn, repeat):
    fn()  # warm-up
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def heuristic_workload(cls, task, states):
    def run(use_numba):
        h = cls(task, use_numba=use_numba)
        return [h(s) for s in states]
    return run


def pdb_workload(task, pattern):
    def run(use_numba):
        return PDB(task, pattern, use_numba=use_numba).table.copy()
    return run


def nb_workload(n_examples, n_queries, sizes, seed=0):
    rng = np.random.default_rng(seed)
    xs = [tuple(int(rng.integers(d)) for d in sizes) for _ in range(n_examples)]
    ys = [int(rng.integers(2)) for _ in xs]
    qs = [tuple(int(rng.integers(d)) for d in sizes) for _ in range(n_queries)]

    def run(use_numba):
        nb = NaiveBayes(sizes, use_numba=use_numba).fit(xs, ys)
        return [nb.classify(q).confidence for q in qs]
    return run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    task = gen_domain("transport-lite", 8, seed=1)
    states = dijkstra_oracle(task).states[:400]
    big = gripper(4)
    rows = [
        ("hmax x400 states", heuristic_workload(HMax, task, states)),
        ("lmcut x400 states", heuristic_workload(LMCut, task, states)),
        ("pdb build gripper(4) full", pdb_workload(big, range(len(big.variables)))),
        ("naive bayes 500 fit + 2000 classify", nb_workload(500, 2000, [2, 3, 4, 5, 6, 7, 8])),
    ]
    print(f"{'workload':<38}{'numba s':>10}{'numpy s':>10}{'speedup':>9}  max diff")
    for name, work in rows:
        t_jit, a = best_of(lambda: work(True), args.repeat)
        t_np, b = best_of(lambda: work(False), args.repeat)
        a, b = np.asarray(a, float), np.asarray(b, float)
        finite = np.isfinite(a)
        # unreachable pattern states are inf in both tables
        diff = float(np.max(np.abs(a[finite] - b[finite]), initial=0.0))
        if not np.array_equal(finite, np.isfinite(b)):
            diff = float("inf")
        print(f"{name:<38}{t_jit:>10.4f}{t_np:>10.4f}{t_np / t_jit:>8.1f}x  {diff:.1e}")


if __name__ == "__main__":
    main()
