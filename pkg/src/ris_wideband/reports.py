"""CSV / manifest / iteration-log plumbing.

Every CSV starts with one JSON header line (prefixed '# ') carrying the
scenario hash, the seed, and file-kind metadata, then a normal CSV header and
rows. Floats serialize via repr for byte-stable reruns; manifests are written
atomically before any result file and are the only place timestamps live.
"""

from __future__ import annotations

import json
import os
import time
from pathlib import Path

import numpy as np

from .evaluation import HeatMapGrid, SquintStudy
from .lc_phase import PhaseProfile, phase_to_voltage
from .scenario import Scenario
from .secrecy import SecrecyReport

TOOL_VERSION = "ris-wideband 0.1.0"


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path, meta: dict, columns, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["# " + json.dumps(meta, sort_keys=True)]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def read_csv(path):
    """Read a headered CSV back: (meta, columns, rows-as-strings)."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError(f"{path}: missing JSON header line")
    meta = json.loads(lines[0][2:])
    columns = lines[1].split(",")
    rows = [ln.split(",") for ln in lines[2:] if ln]
    return meta, columns, rows


def write_manifest(path, scenario: Scenario, method: str, seed: int,
                   outputs: dict) -> dict:
    """Atomic manifest write (tmp + rename), returns the manifest dict."""
    man = {
        "tool": TOOL_VERSION,
        "scenario_hash": scenario.hash(),
        "method": method,
        "seed": int(seed),
        "hyper": scenario.hyper.__dict__,
        "outputs": {k: str(v) for k, v in outputs.items()},
        "created_unix": time.time(),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(man, indent=2, sort_keys=True))
    os.replace(tmp, path)
    return man


def _meta(scenario: Scenario, seed, kind, manifest=None, **extra) -> dict:
    m = {"scenario_hash": scenario.hash(), "seed": int(seed), "kind": kind,
         "tool": TOOL_VERSION}
    if manifest is not None:
        m["manifest"] = str(manifest)
    m.update(extra)
    return m


def write_phases_csv(path, profile: PhaseProfile, scenario: Scenario, seed,
                     manifest=None) -> None:
    cols = ["element_index", "omega_c_rad"]
    mat = scenario.lc.material
    volts = phase_to_voltage(mat, profile.omega_c) if mat is not None else None
    if volts is not None:
        cols.append("voltage_V")
    rows = []
    for i, om in enumerate(profile.omega_c):
        row = [i, om]
        if volts is not None:
            row.append(volts[i])
        rows.append(row)
    meta = _meta(scenario, seed, "phases", manifest,
                 beta=profile.beta, f_c_hz=profile.f_c, n=profile.n)
    _write_csv(path, meta, cols, rows)


def read_phases_csv(path):
    """Returns (meta, omega_c array)."""
    meta, cols, rows = read_csv(path)
    idx = cols.index("omega_c_rad")
    return meta, np.array([float(r[idx]) for r in rows])


def write_report_csv(path, report: SecrecyReport, scenario: Scenario, seed,
                     manifest=None) -> None:
    cols = ["freq_hz", "sr_min_bits", "worst_user_x", "worst_user_y", "worst_user_z",
            "best_eve_x", "best_eve_y", "best_eve_z"]
    if report.mode == "rician":
        cols += ["sr_mean_bits", "sr_p10_bits"]
    rows = []
    for k, f in enumerate(report.frequencies):
        row = [f, report.sr_min[k], *report.worst_user[k], *report.best_eve[k]]
        if report.mode == "rician":
            row += [report.sr_mean[k], report.sr_p10[k]]
        rows.append(row)
    meta = _meta(scenario, seed, "secrecy_report", manifest, mode=report.mode,
                 band_min_bits=report.band_min)
    _write_csv(path, meta, cols, rows)


def write_heatmap_csv(path, grid: HeatMapGrid, scenario: Scenario, seed,
                      manifest=None) -> None:
    rows = []
    for ix, xv in enumerate(grid.x):
        for iy, yv in enumerate(grid.y):
            v = grid.snr_db[ix, iy]
            rows.append([xv, yv, "null" if np.isnan(v) else repr(float(v))])
    meta = _meta(scenario, seed, "heatmap", manifest,
                 nx=len(grid.x), ny=len(grid.y), z=grid.z,
                 freq_hz=grid.frequency_hz,
                 user_rect=list(grid.user_rect), eve_rect=list(grid.eve_rect))
    _write_csv(path, meta, ["x", "y", "snr_db"], rows)


def write_squint_csv(path, study: SquintStudy, scenario: Scenario, seed,
                     manifest=None) -> None:
    meta = _meta(scenario, seed, "squint", manifest, axis=study.axis,
                 rx_distance_m=study.rx_distance_m,
                 rx_azimuth_deg=study.rx_azimuth_deg)
    rows = list(zip(study.axis_values, study.norm_snr_db))
    _write_csv(path, meta, ["axis_value", "norm_snr_db"], rows)


def write_runtime_csv(path, pairs, method: str, scenario: Scenario, seed,
                      manifest=None) -> None:
    meta = _meta(scenario, seed, "runtime", manifest, method=method)
    _write_csv(path, meta, ["n", "seconds"], pairs)


class JsonlLogger:
    """Append-only JSON-lines iteration log."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = self.path.open("w")

    def __call__(self, row: dict):
        self._fh.write(json.dumps(row, sort_keys=True) + "\n")

    def close(self):
        self._fh.close()
