"""Timing comparison of the compiled extension kernels against their
pure-Python twins.

Usage::

    python benchmarks/bench_kernels.py            # both implementations
    python benchmarks/bench_kernels.py --repeat 5

The reservoir recurrence dominates experiment runtime, so this is the
number that matters when deciding whether the extension built correctly.
"""
import argparse
import time

import numpy as np

import rolab.kernels as kernels
from rolab import _kernels_py
from rolab.reservoir import ReservoirSpec, build_reservoir

try:
    from rolab import _kernels
except ImportError:
    _kernels = None


CASES = [
    ("drive d=400 (ODE presets)", dict(d=400, density=0.05, n_steps=2500)),
    ("drive d=500 (KS desk)", dict(d=500, density=0.06, n_steps=12_000)),
    ("drive d=1000 (KS full)", dict(d=1000, density=0.06, n_steps=5_000)),
]


def run_case(impl, d, density, n_steps):
    spec = ReservoirSpec(d=d, density=density, rho=0.9, seed=0)
    w = build_reservoir(spec, 2)
    a = w.a.tocsr()
    inputs = np.random.default_rng(1).standard_normal((n_steps, 2))
    r = np.zeros(d)
    out = np.empty((n_steps, d))
    args = (np.ascontiguousarray(a.data),
            np.ascontiguousarray(a.indices, np.int32),
            np.ascontiguousarray(a.indptr, np.int32),
            w.w_in, inputs, 1.0, 0.5, r, np.empty((0, d)), 0, out)
    t0 = time.perf_counter()
    impl.leaky_tanh_drive(*args)
    return time.perf_counter() - t0


def bench_rk4(impl, n_samples=100_000):
    y = np.array([0.1, 0.2, 0.3])
    out = np.empty((n_samples, 3))
    params = np.array([0.5, 2.0, 4.0])
    t0 = time.perf_counter()
    impl.rk4_ode(0, params, y, n_samples, 0.1, 10, out)
    return time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    print(f"compiled extension available: {kernels.COMPILED}")
    impls = [("python", _kernels_py)]
    if _kernels is not None:
        impls.append(("compiled", _kernels))

    for label, case in CASES:
        times = {}
        for name, impl in impls:
            times[name] = min(run_case(impl, **case)
                              for _ in range(args.repeat))
        line = f"{label:30s} " + "  ".join(
            f"{name}: {t * 1e3:8.1f} ms" for name, t in times.items())
        if len(times) == 2:
            line += f"  speedup: {times['python'] / times['compiled']:.1f}x"
        print(line)

    times = {}
    for name, impl in impls:
        n = 100_000 if name == "compiled" else 5_000
        t = min(bench_rk4(impl, n) for _ in range(args.repeat))
        times[name] = t / n
    line = f"{'rk4 per sampling interval':30s} " + "  ".join(
        f"{name}: {t * 1e6:8.2f} us" for name, t in times.items())
    if len(times) == 2:
        line += f"  speedup: {times['python'] / times['compiled']:.1f}x"
    print(line)


if __name__ == "__main__":
    main()
