"""Throughput comparison of the numba and numpy simulation backends.

Usage: python benchmarks/bench_backends.py [--trials N] [--max-steps M]

Each rule kind is run on both backends with identical streams (the results
are bit-identical; only the speed differs).  The first numba call includes
JIT compilation, so a warmup pass runs before timing.
"""

import argparse
import time
from fractions import Fraction as Q

from walkembed import (
    ChipStep,
    ExitCompositionRule,
    MaxThresholdRule,
    MinimalRule,
    RandomizedPairRule,
    hall_rule,
    measure,
    minimal_certificate,
    simulate,
)


def build_rules():
    mu516 = measure({0: Q(5, 16), -2: Q(11, 32), 2: Q(11, 32)})
    uniform3 = measure({-2: Q(1, 3), 0: Q(1, 3), 2: Q(1, 3)})
    return [
        ("randomizedPair", RandomizedPairRule(-2, 2)),
        ("hall", hall_rule(uniform3)),
        ("exitComposition",
         ExitCompositionRule((ChipStep(-1, 2), ChipStep(-3, 0)))),
        ("maxThreshold", MaxThresholdRule(((-1, 0), (0, 1), (1, 1)))),
        ("minimalTheorem1", MinimalRule(minimal_certificate(mu516))),
    ]


def bench(rule, trials, max_steps, backend):
    t0 = time.perf_counter()
    rep = simulate(rule, trials, seed=7, max_steps=max_steps, backend=backend)
    elapsed = time.perf_counter() - t0
    return elapsed, rep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=50_000)
    ap.add_argument("--max-steps", type=int, default=100_000)
    args = ap.parse_args()

    rules = build_rules()
    for _, rule in rules:  # warmup compiles every kernel
        simulate(rule, 8, seed=0, max_steps=16, backend="numba")

    header = f"{'rule':<18} {'numba':>10} {'numpy':>10} {'speedup':>9}  counts match"
    print(header)
    print("-" * len(header))
    for name, rule in rules:
        t_nb, rep_nb = bench(rule, args.trials, args.max_steps, "numba")
        t_np, rep_np = bench(rule, args.trials, args.max_steps, "numpy")
        match = rep_nb.counts == rep_np.counts
        print(f"{name:<18} {t_nb:>9.3f}s {t_np:>9.3f}s {t_np / t_nb:>8.1f}x  {match}")


if __name__ == "__main__":
    main()
