"""Compare the compiled and pure-Python kernel backends.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from memgrid.device_model import DeviceParams, Window
from memgrid.kernels import available_backends


def cases(mod):
    dev = DeviceParams()
    rng = np.random.default_rng(0)
    phi = rng.uniform(-2, 2, 1_000_000)
    n_b = rng.uniform(0.05, 0.95, phi.size)
    t = np.arange(100_001) * 1e-4
    v = np.sin(2 * np.pi * t)
    knobs = Window().knobs()
    current = np.full(100_000, 1e-3)
    return {
        "impedance_arrays (1e6 points)": lambda: mod.impedance_arrays(phi, n_b, dev.f0, dev.p, dev.alpha, 1e-8),
        "current_driven_loop (1e5 steps)": lambda: mod.current_driven_loop(
            v, 1e-4, 0.1, 2e4, dev.rho1, dev.rho2, *knobs
        ),
        "walk_boundary (1e5 steps)": lambda: mod.walk_boundary(current, 1e-4, 0.01, 2e4, *knobs),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = available_backends()
    timings = {}
    for name, mod in backends.items():
        for label, fn in cases(mod).items():
            fn()  # warm-up
            timings[(label, name)] = min(timeit.repeat(fn, number=1, repeat=args.repeat))

    labels = list(cases(backends["python"]))
    print(f"{'kernel':<34}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if "cython" in backends else ""))
    for label in labels:
        row = f"{label:<34}" + "".join(f"{timings[(label, b)] * 1e3:>10.2f}ms" for b in backends)
        if "cython" in backends:
            row += f"{timings[(label, 'python')] / timings[(label, 'cython')]:>11.1f}x"
        print(row)
    if "cython" not in backends:
        print("compiled backend not built; only the pure-Python timings are shown")


if __name__ == "__main__":
    main()
