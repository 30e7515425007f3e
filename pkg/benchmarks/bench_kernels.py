"""Time the compiled and numpy kernels on the same workloads.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Reports the best wall time per backend and the largest difference between
their outputs.
"""
import argparse
import time

import numpy as np

from pubchoice import _backend
from pubchoice.experiments import build_parametric_game


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def workloads(k):
    spec = build_parametric_game(0.6)
    spot = np.zeros(spec.costs.shape)
    starts = np.random.default_rng(0).uniform(1.0, 25.0, size=(200, spec.n_venues))

    def iterate_many():
        return np.array([
            k.iterate(spec.thetas, spec.masses, spec.costs, spot, v, spec.alpha, spec.beta, spec.budget,
                      1e-12, 1000)[0]
            for v in starts
        ])

    big = np.random.default_rng(1)
    costs = np.sort(big.uniform(1.0, 5.0, size=(400, 50)), axis=1)
    impacts = big.uniform(1.0, 10.0, 50)
    bspot = np.zeros(costs.shape)

    def best_responses_many():
        return np.array([k.best_responses(costs, impacts, bspot, 0.2, 2.0, 40.0) for _ in range(50)])

    return {"iterate 200 starts to 1e-12": iterate_many, "best responses 400x50 x50": best_responses_many}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = _backend.AVAILABLE
    if "cython" not in backends:
        print("compiled kernels not built; only the numpy backend is available")
    results = {}
    for name, k in backends.items():
        for label, fn in workloads(k).items():
            results[(name, label)] = _best(fn, args.repeat)
    for label in workloads(backends["python"]):
        py_t, py_out = results[("python", label)]
        line = f"{label:32s} python {py_t * 1e3:9.2f} ms"
        if ("cython", label) in results:
            cy_t, cy_out = results[("cython", label)]
            diff = float(np.abs(cy_out - py_out).max())
            line += f"   cython {cy_t * 1e3:9.2f} ms   speedup {py_t / cy_t:6.1f}x   max diff {diff:.1e}"
        print(line)


if __name__ == "__main__":
    main()
