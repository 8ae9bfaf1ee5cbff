"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat N]

Both paths are checked for agreement before timing.
"""
import argparse
import time

import numpy as np

from mu_metrics import kernels
from mu_metrics._jit import HAVE_NUMBA
from mu_metrics.sampling import random_distribution


def _best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_w2(repeat):
    rng = np.random.default_rng(0)
    pairs = [(random_distribution(rng, 32), random_distribution(rng, 32)) for _ in range(2000)]

    def run(f):
        return [f(p.support, p.probs, q.support, q.probs) for p, q in pairs]

    a, b = np.array(run(kernels.w2_squared_jit)), np.array(run(kernels.w2_squared_numpy))
    assert np.max(np.abs(a - b)) <= 1e-12
    return (
        "w2 (2000 pairs, support <= 32)",
        _best_of(lambda: run(kernels.w2_squared_jit), repeat),
        _best_of(lambda: run(kernels.w2_squared_numpy), repeat),
    )


def bench_qubit_grid(repeat, n=40):
    a, b = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    radii = np.linspace(0.0, 1.0, n)
    angles = np.linspace(0.0, 2 * np.pi, 2 * n, endpoint=False)
    va, _ = kernels.qubit_grid_jit(a, b, radii, angles)
    vb, _ = kernels.qubit_grid_numpy(a, b, radii, angles)
    assert abs(va - vb) <= 1e-12
    return (
        f"qubit grid ({n} radii x {2 * n} angles, squared)",
        _best_of(lambda: kernels.qubit_grid_jit(a, b, radii, angles), repeat),
        _best_of(lambda: kernels.qubit_grid_numpy(a, b, radii, angles), repeat),
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is disabled or missing; unset MU_METRICS_NO_JIT to benchmark")
    print(f"{'kernel':45s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}")
    for name, t_jit, t_np in (bench_w2(args.repeat), bench_qubit_grid(args.repeat)):
        print(f"{name:45s} {t_jit:10.4f} {t_np:10.4f} {t_np / t_jit:8.1f}x")


if __name__ == "__main__":
    main()
