"""Comparison schemes: dispersion-blind reconfigurations of the scalable method.

Each benchmark swaps only the design-time world model; evaluation always
applies the physical dispersion through the shared worst_case_report path.
Candidate selection inside the optimizer also runs under the benchmark's own
model: a dispersion-blind designer cannot score with the dispersion it does
not know about.
"""

from __future__ import annotations

import numpy as np

from .scalable_optimizer import DesignModel, build_model, run_scalable
from .scenario import Scenario, frequency_grids


BENCHMARK_IDS = (1, 2, 3)


def _region_centers(scenario: Scenario):
    u = np.asarray(scenario.user_region.lo, float) + np.asarray(scenario.user_region.hi, float)
    e = np.asarray(scenario.eve_region.lo, float) + np.asarray(scenario.eve_region.hi, float)
    return (u / 2.0)[None, :], (e / 2.0)[None, :]


def benchmark_model(bench_id: int, scenario: Scenario) -> DesignModel:
    """Design-model toggles per scheme.

    1: all design frequencies, both regions, element response assumed flat.
    2: center frequency only, both regions.
    3: all design frequencies, flat elements, region centers only.
    """
    f_design = frequency_grids(scenario.freq_plan)[0]
    if bench_id == 1:
        return build_model(scenario, f_design=f_design, design_beta=0.0,
                           label="benchmark1")
    if bench_id == 2:
        return build_model(scenario, f_design=[scenario.freq_plan.center_hz],
                           label="benchmark2")
    if bench_id == 3:
        pu, pe = _region_centers(scenario)
        return build_model(scenario, f_design=f_design, design_beta=0.0,
                           user_points=pu, eve_points=pe, label="benchmark3")
    raise ValueError(f"unknown benchmark id {bench_id}")


def run_benchmark(bench_id: int, scenario: Scenario, *, seed: int | None = None,
                  log=None, report_mode: str = "los"):
    """Run one benchmark; returns (PhaseProfile, SecrecyReport, state)."""
    model = benchmark_model(bench_id, scenario)
    return run_scalable(scenario, model=model, seed=seed, log=log,
                        report_mode=report_mode)
