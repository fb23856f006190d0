#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Run with the default backend (numba when available); the numpy twins are
always importable, so both paths get timed in one process:

    python3 scripts/bench_kernels.py [N ...]
"""

import sys
import time

import numpy as np

from ris_wideband import kernels
from ris_wideband.lc_phase import beta_factor
from ris_wideband.scalable_optimizer import build_model, lambda_min_grid
from ris_wideband.scenario import _scenario_from_dict, frequency_grids, paper_scenario


def bench_phase_matrix(n):
    rng = np.random.default_rng(0)
    d = rng.uniform(1.0, 30.0, (n, 256))
    for fn, label in ((kernels.phase_matrix, kernels.backend_name()),
                      (kernels.numpy_phase_matrix, "numpy")):
        fn(d, 1256.6)  # warm-up / compile
        t0 = time.perf_counter()
        for _ in range(20):
            fn(d, 1256.6)
        dt = (time.perf_counter() - t0) / 20
        print(f"  phase_matrix[{n}x256] {label:>6}: {dt * 1e3:8.3f} ms")


def bench_inner_loop(n):
    d = paper_scenario().to_dict()
    d["ris_elements"] = int(n)
    sc = _scenario_from_dict(d)
    model = build_model(sc)
    lam = lambda_min_grid(model.qforms, 1.3)
    rng = np.random.default_rng(1)
    om = rng.uniform(0, 2 * np.pi, n)
    args = (model.qforms.au, model.qforms.ae, model.design_beta_k, lam, 1.3,
            0.05, om, model.score_qforms.au, model.score_qforms.ae,
            model.score_beta_k, 50)
    for fn, label in ((kernels.scalable_inner_loop, kernels.backend_name()),
                      (lambda *a: kernels.numpy_scalable_inner_loop(
                          a[0], a[1], np.asarray(a[2], float), a[3], a[4], a[5],
                          a[6].copy(), a[7], a[8], np.asarray(a[9], float),
                          a[10], 1e-5, 3), "numpy")):
        fn(*args)
        t0 = time.perf_counter()
        reps = 3
        for _ in range(reps):
            fn(*args)
        dt = (time.perf_counter() - t0) / reps
        print(f"  inner_loop[N={n}, 50 iters] {label:>6}: {dt * 1e3:8.1f} ms")


def main():
    sizes = [int(s) for s in sys.argv[1:]] or [100, 400]
    print(f"active backend: {kernels.backend_name()}")
    for n in sizes:
        bench_phase_matrix(n)
        bench_inner_loop(n)


if __name__ == "__main__":
    main()
