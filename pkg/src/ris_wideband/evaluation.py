"""Result surfaces: SNR heat maps, beam-squint studies, runtime scaling sweeps."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import channel as ch
from .lc_phase import PhaseProfile, phase_vector
from .scenario import Scenario
from .secrecy import beamformer

DB_FLOOR_REL = 60.0  # serialization floor below the map maximum


@dataclass
class HeatMapGrid:
    x: np.ndarray                  # (nx,) cell centers
    y: np.ndarray                  # (ny,)
    z: float
    frequency_hz: float
    snr_db: np.ndarray             # (nx, ny); NaN marks floored/invalid cells
    user_rect: tuple = ()
    eve_rect: tuple = ()


def heatmap(profile: PhaseProfile, scenario: Scenario, f: float, *,
            x_range=(0.0, 10.0), y_range=(-5.0, 5.0), z: float = -5.0,
            nx: int = 200, ny: int = 200, mode: str = "los",
            include_direct: bool = False, threads: int = 1) -> HeatMapGrid:
    """SNR over an x-y slice at height z, via the effective-channel formula.

    Cells shared with report grids reproduce the optimizer-reported SNRs
    exactly (same channel path).
    """
    xs = np.linspace(*x_range, nx)
    ys = np.linspace(*y_range, ny)
    q = beamformer(scenario).q
    h_t = ch.bs_ris_matrix(scenario, f, 0, mode)
    gam = phase_vector(profile, f) * scenario.lc.amplitude
    w = gam * (h_t @ q)                       # Gamma H_t q, fixed over cells
    sig2 = scenario.noise_power_w

    def row(ix):
        pts = np.stack([np.full(ny, xs[ix]), ys, np.full(ny, z)], axis=1)
        hr = ch.ris_point_rows(scenario, pts, f, 0, mode)
        amp = hr.conj() @ w
        if include_direct:
            hd = ch.bs_point_rows(scenario, pts, f, 0, mode)
            amp = amp + hd.conj() @ q
        return np.abs(amp) ** 2 / sig2

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(row, range(nx)))
    else:
        rows = [row(ix) for ix in range(nx)]
    snr = np.stack(rows)
    with np.errstate(divide="ignore"):
        snr_db = 10.0 * np.log10(snr)
    floor = np.nanmax(snr_db) - DB_FLOOR_REL
    snr_db = np.where(snr_db < floor, np.nan, snr_db)
    ur = scenario.user_region
    er = scenario.eve_region
    return HeatMapGrid(x=xs, y=ys, z=z, frequency_hz=f, snr_db=snr_db,
                       user_rect=(ur.lo[0], ur.lo[1], ur.hi[0], ur.hi[1]),
                       eve_rect=(er.lo[0], er.lo[1], er.hi[0], er.hi[1]))


@dataclass
class SquintStudy:
    axis: str                      # "frequency" or "elements"
    axis_values: np.ndarray
    norm_snr_db: np.ndarray        # normalized against the center frequency
    n_elements: int = 0
    rx_distance_m: float = 25.0
    rx_azimuth_deg: float = 12.0


def _squint_geometry(n: int, spacing: float, distance: float, azimuth_deg: float):
    pos = np.zeros((n, 3))
    pos[:, 1] = (np.arange(n) - (n - 1) / 2.0) * spacing
    az = math.radians(azimuth_deg)
    rx = np.array([distance * math.cos(az), distance * math.sin(az), 0.0])
    return np.linalg.norm(rx - pos, axis=1)


def squint_study(n_elements, f_c: float, bandwidth: float, *, n_freq: int = 101,
                 spacing: float | None = None, rx_distance_m: float = 25.0,
                 rx_azimuth_deg: float = 12.0) -> SquintStudy:
    """Center-matched beamformer loss across the band (single-antenna receiver).

    With an int n_elements: normalized SNR vs frequency for that array.
    With a list: min-over-band normalized SNR vs array size.
    Receiver distance/azimuth are free parameters of the study (defaults
    documented in the README).
    """
    from .constants import SPEED_OF_LIGHT

    if spacing is None:
        spacing = SPEED_OF_LIGHT / f_c / 2.0
    freqs = np.linspace(f_c - bandwidth / 2.0, f_c + bandwidth / 2.0, n_freq)

    def norm_curve(n):
        d = _squint_geometry(n, spacing, rx_distance_m, rx_azimuth_deg)
        kap_c = 2.0 * math.pi * f_c / SPEED_OF_LIGHT
        h_c = np.exp(1j * kap_c * d)
        q = h_c / np.linalg.norm(h_c)                     # matched at f_c
        amps = np.exp(-1j * (2.0 * math.pi / SPEED_OF_LIGHT) * np.outer(freqs, d)) @ q
        snr = np.abs(amps) ** 2
        snr_c = float(np.abs(np.vdot(h_c, q)) ** 2)
        return 10.0 * np.log10(snr / snr_c)

    if np.isscalar(n_elements):
        n = int(n_elements)
        return SquintStudy(axis="frequency", axis_values=freqs,
                           norm_snr_db=norm_curve(n), n_elements=n,
                           rx_distance_m=rx_distance_m, rx_azimuth_deg=rx_azimuth_deg)
    sizes = np.asarray(list(n_elements), int)
    mins = np.array([norm_curve(int(n)).min() for n in sizes])
    return SquintStudy(axis="elements", axis_values=sizes.astype(float),
                       norm_snr_db=mins,
                       rx_distance_m=rx_distance_m, rx_azimuth_deg=rx_azimuth_deg)


def runtime_sweep(method: str, n_list, scenario: Scenario, *, seed: int = 1):
    """Wall-clock per full optimization run at fixed tuple counts.

    Uses singleton regions, K_design = 3 and one outer round so the measured
    scaling reflects per-solve cost, constant across N (see README).
    """
    from .scalable_optimizer import build_model, run_scalable
    from .sdp_optimizer import run_sdp
    from .scenario import HyperParams, _scenario_from_dict

    results = []
    for n in n_list:
        d = scenario.to_dict()
        d["ris_elements"] = int(n)
        hyper = dict(d["hyper"])
        hyper.update(t_max=1, scalable_j_max=1, scalable_i_max=20,
                     sdp_j_max=1, sdp_i_max=3, rng_seed=seed)
        d["hyper"] = hyper
        d["freq_plan"] = dict(d["freq_plan"], design_grid=3, eval_grid=11)
        sc = _scenario_from_dict(d)
        u = (np.asarray(sc.user_region.lo) + np.asarray(sc.user_region.hi)) / 2.0
        e = (np.asarray(sc.eve_region.lo) + np.asarray(sc.eve_region.hi)) / 2.0
        model = build_model(sc, user_points=u[None, :], eve_points=e[None, :],
                            label=f"runtime-{method}")
        t0 = time.perf_counter()
        if method == "sdp":
            run_sdp(sc, model=model, seed=seed, eps_inner=1e-4, eps_final=1e-4)
        elif method == "scalable":
            run_scalable(sc, model=model, seed=seed)
        else:
            raise ValueError(f"unknown method {method!r}")
        results.append((int(n), time.perf_counter() - t0))
    return results


def loglog_slope(pairs) -> float:
    """Least-squares slope of log(time) vs log(N)."""
    n = np.log([p[0] for p in pairs])
    t = np.log([p[1] for p in pairs])
    return float(np.polyfit(n, t, 1)[0])
