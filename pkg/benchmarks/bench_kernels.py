#!/usr/bin/env python3
"""Time the numpy and numba kernel backends side by side.

Runs the two hot kernels (batch firing strengths and antecedent
gradients) on random problem instances, reports the median wall time
per call for each backend, and cross-checks that both backends agree
on the outputs.

Usage:
    python benchmarks/bench_kernels.py [--samples N] [--rules R]
                                       [--features F] [--repeats K]
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from it2anfis.kernels import HAVE_NUMBA, STRENGTH_FLOOR, get_backend


def make_instance(n_samples: int, n_rules: int, n_features: int, seed: int):
    """Random inputs shaped like a mid-training batch."""
    rng = np.random.default_rng(seed)
    c1 = rng.uniform(0.0, 0.9, (n_rules, n_features))
    c2 = c1 + rng.uniform(0.05, 0.3, (n_rules, n_features))
    sigma = rng.uniform(0.08, 0.5, (n_rules, n_features))
    w = rng.normal(0.0, 0.5, (n_rules, n_features))
    b = rng.normal(0.0, 0.5, n_rules)
    X = rng.uniform(-0.2, 1.2, (n_samples, n_features))
    y = rng.normal(0.0, 1.0, n_samples)
    return X, y, c1, c2, sigma, w, b


def time_call(fn, args, repeats: int) -> float:
    """Median seconds per call over `repeats` timed invocations."""
    samples = []
    for _ in range(repeats):
        started = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - started)
    return statistics.median(samples)


def max_abs_diff(a, b) -> float:
    return max(float(np.max(np.abs(x - y))) for x, y in zip(a, b))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="benchmark the it2anfis kernel backends")
    parser.add_argument("--samples", type=int, default=4096)
    parser.add_argument("--rules", type=int, default=10)
    parser.add_argument("--features", type=int, default=6)
    parser.add_argument("--repeats", type=int, default=9)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    X, y, c1, c2, sigma, w, b = make_instance(
        args.samples, args.rules, args.features, args.seed)
    fire_args = (X, c1, c2, sigma)
    grad_args = (X, y, c1, c2, sigma, w, b, 0.5, STRENGTH_FLOOR)

    numpy_backend = get_backend("numpy")
    backends = [numpy_backend]
    if HAVE_NUMBA:
        numba_backend = get_backend("numba")
        backends.append(numba_backend)
        # compile outside the timed region
        started = time.perf_counter()
        numba_backend["fire"](*fire_args)
        numba_backend["ant_grads"](*grad_args)
        print(f"numba warmup (compile): "
              f"{time.perf_counter() - started:.2f} s")
    else:
        print("numba is not installed; timing the numpy backend only")

    print(f"problem size: {args.samples} samples x {args.rules} rules "
          f"x {args.features} features, median of {args.repeats} calls")
    print()
    print(f"{'kernel':<12} {'backend':<8} {'ms/call':>10} {'speedup':>9}")

    worst_gap = 0.0
    for kernel, call_args in (("fire", fire_args),
                              ("ant_grads", grad_args)):
        baseline_ms = None
        for backend in backends:
            seconds = time_call(backend[kernel], call_args, args.repeats)
            ms = seconds * 1e3
            if baseline_ms is None:
                baseline_ms = ms
                speedup = ""
            else:
                speedup = f"{baseline_ms / ms:8.1f}x"
            print(f"{kernel:<12} {backend['name']:<8} {ms:>10.3f} "
                  f"{speedup:>9}")
        if len(backends) == 2:
            gap = max_abs_diff(backends[0][kernel](*call_args),
                               backends[1][kernel](*call_args))
            worst_gap = max(worst_gap, gap)

    if len(backends) == 2:
        print()
        print(f"max abs difference between backends: {worst_gap:.2e}")
        if worst_gap > 1e-9:
            print("WARNING: backends disagree beyond 1e-9")
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
