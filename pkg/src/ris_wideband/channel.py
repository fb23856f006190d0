"""Near-field LOS and Rician channel synthesis.

All LOS phases are exact spherical-wave phases exp(j*kappa*||rx - tx||); no
planar approximation anywhere. Channels are deterministic functions of
(scenario, rng_seed): stochastic reflector draws are keyed by the byte
content of the endpoint positions, so the same physical point gets the same
realization regardless of batch order or thread count.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT
from .scenario import Reflector, Scenario
from . import kernels


class GeometryError(ValueError):
    pass


# channel kinds index the (BS-MU, BS-RIS, RIS-MU) constant triples
KIND_BS_POINT = 0
KIND_BS_RIS = 1
KIND_RIS_POINT = 2


def wave_number(f: float) -> float:
    return 2.0 * math.pi * f / SPEED_OF_LIGHT


def pathloss_amplitude(f: float, d: float, exponent: float, d0: float = 1.0) -> float:
    """Linear amplitude sqrt(rho_k * (d0/d)^sigma), rho_k = (c/(4*pi*f))^2."""
    if d <= 0:
        raise GeometryError("pathloss: distance must be > 0")
    rho = (SPEED_OF_LIGHT / (4.0 * math.pi * f)) ** 2
    return math.sqrt(rho * (d0 / d) ** exponent)


def los_matrix(tx_positions, rx_positions, f: float) -> np.ndarray:
    """Unit-modulus spherical-wave LOS matrix, [m, n] = exp(j*kappa*||rx_m - tx_n||)."""
    tx = np.atleast_2d(np.asarray(tx_positions, float))
    rx = np.atleast_2d(np.asarray(rx_positions, float))
    d = np.linalg.norm(rx[:, None, :] - tx[None, :, :], axis=2)
    if np.any(d == 0.0):
        raise GeometryError("degenerate geometry: coincident tx/rx points")
    return kernels.phase_matrix(d, wave_number(f))


def mirror_points(points, reflector: Reflector) -> np.ndarray:
    """Mirror image of points across the reflector plane."""
    p = np.atleast_2d(np.asarray(points, float))
    n = np.asarray(reflector.normal, float)
    q = np.asarray(reflector.point, float)
    return p - 2.0 * ((p - q) @ n)[:, None] * n[None, :]


def ris_steering(scenario: Scenario, p, f: float) -> np.ndarray:
    """Unit-norm near-field steering vector of the RIS toward point p."""
    return steering_vector(scenario.ris_positions(), p, f)


def bs_steering(scenario: Scenario, p, f: float) -> np.ndarray:
    """Unit-norm BS steering vector in the transmit convention.

    Entries carry exp(-j*kappa*d) so that the LOS factorization
    H_t ~ a_RIS a_BS^H holds entrywise and q = sqrt(P_t) a_BS is the
    transmit matched filter with |a_BS^H q|^2 = P_t.
    """
    return np.conj(steering_vector(scenario.bs_positions(), p, f))


def steering_vector(element_positions, p, f: float) -> np.ndarray:
    pos = np.asarray(element_positions, float)
    d = np.linalg.norm(np.asarray(p, float)[None, :] - pos, axis=1)
    if np.any(d == 0.0):
        raise GeometryError("degenerate geometry: point coincides with an element")
    a = np.exp(1j * wave_number(f) * d)
    return a / math.sqrt(len(d))


def _point_stream(seed: int, kind: int, f_index: int, r_index: int, realization: int,
                  *positions) -> np.random.Generator:
    """Deterministic per-(kind, frequency, reflector, realization, endpoints) stream."""
    h = hashlib.sha256()
    h.update(np.int64([seed, kind, f_index, r_index, realization]).tobytes())
    for p in positions:
        h.update(np.asarray(p, float).tobytes())
    ent = int.from_bytes(h.digest()[:16], "little")
    return np.random.default_rng(np.random.SeedSequence(ent))


def default_reflectors(scenario: Scenario) -> tuple:
    """Configured reflectors, else ground plane + seeded random planes.

    The paper-style setup fixes only R; the plane geometry is a documented
    stand-in (see README): random unit normals, anchor points 8-20 m out.
    """
    if scenario.reflectors:
        return scenario.reflectors
    refl = []
    if scenario.ground_plane_z is not None:
        refl.append(Reflector(point=(0.0, 0.0, float(scenario.ground_plane_z)),
                              normal=(0.0, 0.0, 1.0)))
    rng = np.random.default_rng(np.random.SeedSequence(entropy=scenario.hyper.rng_seed,
                                                       spawn_key=(0x5EF1,)))
    while len(refl) < scenario.n_random_reflectors + (scenario.ground_plane_z is not None):
        n = rng.standard_normal(3)
        n /= np.linalg.norm(n)
        anchor = rng.uniform(8.0, 20.0) * _random_direction(rng)
        refl.append(Reflector(point=tuple(anchor), normal=tuple(n),
                              kbar_scale=0.0 if scenario.ground_plane_z is not None else 1.0))
    return tuple(refl)


def _random_direction(rng) -> np.ndarray:
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def rician_channel(tx_positions, rx_positions, reflectors, kbar: float, ktilde: float,
                   f: float, *, c0: float = 1.0, rng=None,
                   seed_ctx: tuple | None = None, realization: int = 0) -> np.ndarray:
    """General near-field Rician channel c0*(H_LOS + sum_r kbar_r*Hbar_r + ktilde_r*Htilde_r).

    Hbar_r mirrors the receiver positions across reflector r; Htilde_r entries
    are CN(0,1). Draws come from `rng` when given, else from a deterministic
    position-keyed stream identified by seed_ctx = (seed, kind, f_index).
    """
    tx = np.atleast_2d(np.asarray(tx_positions, float))
    rx = np.atleast_2d(np.asarray(rx_positions, float))
    H = los_matrix(tx, rx, f).astype(np.complex128)
    for r_idx, refl in enumerate(reflectors):
        kb = kbar * refl.kbar_scale
        kt = ktilde * refl.ktilde_scale
        if kb == 0.0 and kt == 0.0:
            continue
        if kb > 0.0:
            n_vec = np.asarray(refl.normal, float)
            q_pt = np.asarray(refl.point, float)
            if (np.any(np.abs((tx - q_pt) @ n_vec) < 1e-9)
                    and np.any(np.abs((rx - q_pt) @ n_vec) < 1e-9)):
                raise GeometryError("degenerate image: reflector plane contains both endpoints")
            rx_img = mirror_points(rx, refl)
            d_img = np.linalg.norm(rx_img[:, None, :] - tx[None, :, :], axis=2)
            if np.any(d_img == 0.0):
                raise GeometryError("degenerate image: reflector plane contains both endpoints")
            H += kb * kernels.phase_matrix(d_img, wave_number(f))
        if kt > 0.0:
            if rng is None:
                seed, kind, f_index = seed_ctx if seed_ctx else (0, 0, 0)
                g = _point_stream(seed, kind, f_index, r_idx, realization, tx, rx)
            else:
                g = rng
            noise = (g.standard_normal(H.shape) + 1j * g.standard_normal(H.shape)) / math.sqrt(2.0)
            H += kt * noise
    return c0 * H


@dataclass
class ChannelSet:
    """Per-frequency channels against fixed user/eve query points.

    h_t: (K, N, Nt) BS->RIS; h_r_user/h_r_eve: (K, P, N) RIS->point rows;
    h_d_*: optional (K, P, Nt) blocked direct links. Amplitudes carry the
    per-hop pathloss; LOS-only sets are fully deterministic.
    """
    frequencies: np.ndarray
    h_t: np.ndarray
    h_r_user: np.ndarray
    h_r_eve: np.ndarray
    h_d_user: np.ndarray | None = None
    h_d_eve: np.ndarray | None = None


def _hop_amplitude(scenario, kind, f, d):
    sig = scenario.rf.pathloss_exponents[kind]
    return pathloss_amplitude(f, d, sig, scenario.rf.reference_distance_m)


def ris_point_rows(scenario: Scenario, points, f: float, f_index: int = 0,
                   mode: str = "los", realization: int = 0) -> np.ndarray:
    """RIS->point channel rows h_r (P, N) with per-hop pathloss."""
    ris = scenario.ris_positions()
    pts = np.atleast_2d(np.asarray(points, float))
    d_center = np.linalg.norm(pts - np.asarray(scenario.ris_center, float), axis=1)
    rows = np.empty((len(pts), scenario.ris_elements), np.complex128)
    refl = default_reflectors(scenario) if mode == "rician" else ()
    for i, p in enumerate(pts):
        c0 = _hop_amplitude(scenario, KIND_RIS_POINT, f, d_center[i])
        if mode == "los":
            rows[i] = c0 * los_matrix(ris, p[None, :], f)[0]
        else:
            rows[i] = rician_channel(ris, p[None, :], refl,
                                     scenario.rf.kbar[KIND_RIS_POINT],
                                     scenario.rf.ktilde[KIND_RIS_POINT],
                                     f, c0=c0, realization=realization,
                                     seed_ctx=(scenario.hyper.rng_seed, KIND_RIS_POINT, f_index))[0]
    return rows


def bs_point_rows(scenario: Scenario, points, f: float, f_index: int = 0,
                  mode: str = "los", realization: int = 0) -> np.ndarray:
    """Blocked direct BS->point rows h_d (P, Nt), attenuated by blockage_loss."""
    bs = scenario.bs_positions()
    pts = np.atleast_2d(np.asarray(points, float))
    att = 10.0 ** (-scenario.rf.blockage_loss_db / 20.0)
    rows = np.empty((len(pts), scenario.n_bs), np.complex128)
    refl = default_reflectors(scenario) if mode == "rician" else ()
    for i, p in enumerate(pts):
        d = np.linalg.norm(p - np.asarray(scenario.bs_center, float))
        c0 = att * _hop_amplitude(scenario, KIND_BS_POINT, f, d)
        if mode == "los":
            rows[i] = c0 * los_matrix(bs, p[None, :], f)[0]
        else:
            rows[i] = rician_channel(bs, p[None, :], refl,
                                     scenario.rf.kbar[KIND_BS_POINT],
                                     scenario.rf.ktilde[KIND_BS_POINT],
                                     f, c0=c0, realization=realization,
                                     seed_ctx=(scenario.hyper.rng_seed, KIND_BS_POINT, f_index))[0]
    return rows


def bs_ris_matrix(scenario: Scenario, f: float, f_index: int = 0,
                  mode: str = "los", realization: int = 0) -> np.ndarray:
    ris = scenario.ris_positions()
    bs = scenario.bs_positions()
    d = np.linalg.norm(np.asarray(scenario.bs_center, float) - np.asarray(scenario.ris_center, float))
    c0 = _hop_amplitude(scenario, KIND_BS_RIS, f, d)
    if mode == "los":
        return c0 * los_matrix(bs, ris, f)
    return rician_channel(bs, ris, default_reflectors(scenario),
                          scenario.rf.kbar[KIND_BS_RIS], scenario.rf.ktilde[KIND_BS_RIS],
                          f, c0=c0, realization=realization,
                          seed_ctx=(scenario.hyper.rng_seed, KIND_BS_RIS, f_index))


def build_channels(scenario: Scenario, frequencies, *, mode: str = "los",
                   include_direct: bool = False, user_points=None,
                   eve_points=None, realization: int = 0) -> ChannelSet:
    """Synthesize the ChannelSet on a frequency grid for the region grids."""
    if mode not in ("los", "rician"):
        raise ValueError(f"unknown channel mode {mode!r}")
    freqs = np.asarray(frequencies, float)
    pu = scenario.user_points() if user_points is None else np.atleast_2d(user_points)
    pe = scenario.eve_points() if eve_points is None else np.atleast_2d(eve_points)
    K = len(freqs)
    N, Nt = scenario.ris_elements, scenario.n_bs
    cs = ChannelSet(
        frequencies=freqs,
        h_t=np.empty((K, N, Nt), np.complex128),
        h_r_user=np.empty((K, len(pu), N), np.complex128),
        h_r_eve=np.empty((K, len(pe), N), np.complex128),
        h_d_user=np.empty((K, len(pu), Nt), np.complex128) if include_direct else None,
        h_d_eve=np.empty((K, len(pe), Nt), np.complex128) if include_direct else None,
    )
    for k, f in enumerate(freqs):
        cs.h_t[k] = bs_ris_matrix(scenario, f, k, mode, realization)
        cs.h_r_user[k] = ris_point_rows(scenario, pu, f, k, mode, realization)
        cs.h_r_eve[k] = ris_point_rows(scenario, pe, f, k, mode, realization)
        if include_direct:
            cs.h_d_user[k] = bs_point_rows(scenario, pu, f, k, mode, realization)
            cs.h_d_eve[k] = bs_point_rows(scenario, pe, f, k, mode, realization)
    return cs
