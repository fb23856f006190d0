"""Low-complexity majorization method with LSE-smoothed worst-case weighting.

Per restart: random init, outer loop refreshes the rate ratio gamma in closed
form, inner loop majorizes each tuple's quadratic form via the rank-2
minimum-eigenvalue shift and realigns the center-frequency phases to the
LSE-weighted aggregate. The returned profile is the iterate that maximizes
the worst-case SR on the densified scoring grid under the optimizer's own
design model; the per-tuple constraint work stays on the coarse design grid,
so the iteration cost keeps the O(T I |Pu| |Pe| N K) scaling.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .lc_phase import PhaseProfile, beta_factor, profile_from_complex
from .scenario import Scenario, frequency_grids
from .secrecy import (QuadraticFormSet, SecrecyReport, design_forms,
                      gamma_closed_form, worst_case_report)

_SCALE_DOMAIN = 0x5CA1


@dataclass
class DesignModel:
    """What the optimizer believes: constraint tuples, dispersion, scoring grid.

    The proposed method uses the physical dispersion (beta from the scenario)
    on both grids; benchmarks override beta and/or the grids with their own
    (dispersion-blind) world view.
    """
    qforms: QuadraticFormSet
    design_beta_k: np.ndarray
    score_qforms: QuadraticFormSet
    score_beta_k: np.ndarray
    label: str = "proposed"


def score_grid_for(f_design: np.ndarray, n_points: int) -> np.ndarray:
    """Densify the design frequency *range*: a single-frequency design stays
    single-frequency (dispersion-blind by construction)."""
    f_design = np.asarray(f_design, float)
    lo, hi = float(f_design.min()), float(f_design.max())
    if lo == hi:
        return np.array([lo])
    return np.linspace(lo, hi, n_points)


def build_model(scenario: Scenario, *, f_design=None, design_beta: float | None = None,
                user_points=None, eve_points=None, label: str = "proposed") -> DesignModel:
    """Assemble a DesignModel; None arguments take the physical defaults."""
    if f_design is None:
        f_design = frequency_grids(scenario.freq_plan)[0]
    f_design = np.asarray(f_design, float)
    if design_beta is None:
        design_beta = scenario.lc.beta
    fc = scenario.freq_plan.center_hz
    f_score = score_grid_for(f_design, scenario.freq_plan.eval_grid)
    qf = design_forms(scenario, f_design, user_points=user_points, eve_points=eve_points)
    qf_s = design_forms(scenario, f_score, user_points=user_points, eve_points=eve_points)
    return DesignModel(
        qforms=qf,
        design_beta_k=np.asarray(beta_factor(f_design, fc, design_beta), float),
        score_qforms=qf_s,
        score_beta_k=np.asarray(beta_factor(f_score, fc, design_beta), float),
        label=label)


def proposed_model(scenario: Scenario) -> DesignModel:
    return build_model(scenario)


@dataclass
class ScalableState:
    gamma: float
    best_sr: float = -math.inf
    restart: int = 0
    outer: int = 0
    inner: int = 0
    history: list = field(default_factory=list)


def lambda_min_rank2(a_u: np.ndarray, a_e: np.ndarray, gamma: float) -> float:
    """Minimum eigenvalue of a_u a_u^H - gamma a_e a_e^H via the 2x2 reduction.

    The nonzero spectrum equals that of C = diag(1, -gamma) @ Gram(a_u, a_e);
    the N-2 remaining eigenvalues are zero, so lambda_min = min(roots, 0).
    """
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    guu = float(np.real(np.vdot(a_u, a_u)))
    gee = float(np.real(np.vdot(a_e, a_e)))
    gue = np.vdot(a_u, a_e)
    return _lam_min_from_gram(guu, gee, abs(gue) ** 2, gamma)


def _lam_min_from_gram(guu, gee, gue_sq, gamma):
    tr_c = guu - gamma * gee
    det_c = -gamma * (guu * gee - gue_sq)
    disc = math.sqrt(max(tr_c * tr_c - 4.0 * det_c, 0.0))
    return min((tr_c - disc) / 2.0, 0.0)


def lambda_min_grid(qf: QuadraticFormSet, gamma: float) -> np.ndarray:
    """lambda_min for every (k, p_u, p_e) tuple; Grams computed once."""
    guu = np.real(np.einsum("kpn,kpn->kp", qf.au.conj(), qf.au))
    gee = np.real(np.einsum("kqn,kqn->kq", qf.ae.conj(), qf.ae))
    gue_sq = np.abs(np.einsum("kpn,kqn->kpq", qf.au.conj(), qf.ae)) ** 2
    tr_c = guu[:, :, None] - gamma * gee[:, None, :]
    det_c = -gamma * (guu[:, :, None] * gee[:, None, :] - gue_sq)
    disc = np.sqrt(np.maximum(tr_c ** 2 - 4.0 * det_c, 0.0))
    return np.minimum((tr_c - disc) / 2.0, 0.0)


def majorizer_vector(s_tilde: np.ndarray, a_u: np.ndarray, a_e: np.ndarray,
                     gamma: float, lam_min: float):
    """Lemma-3 surrogate pieces in O(N) without materializing Phi.

    Returns (beta_vec, offset): the bound on s^H A s at any unit-modulus s is
    offset + 2*Re{s^H beta_vec} + gamma - 1, tight at s = s_tilde.
    """
    du = np.vdot(a_u, s_tilde)
    de = np.vdot(a_e, s_tilde)
    n = s_tilde.size
    beta_vec = a_u * du - gamma * (a_e * de) - lam_min * s_tilde
    s_phi_s = (abs(du) ** 2 - gamma * abs(de) ** 2) - lam_min * n
    offset = lam_min * n - s_phi_s + 1.0 - gamma
    return beta_vec, offset


def lse_weights(sr_values: np.ndarray, mu: float):
    """Normalized exp(-SR/mu) weights and the smoothed lower bound on min(SR).

    Max-shift stabilized; bound = -mu * log(sum exp(-SR/mu)) <= min(SR).
    """
    if mu <= 0:
        raise ValueError("mu must be > 0")
    z = -np.asarray(sr_values, float) / mu
    zmax = z.max()
    w = np.exp(z - zmax)
    total = w.sum()
    return w / total, float(-mu * (math.log(total) + zmax))


def phase_update(weights: np.ndarray, beta_vecs: np.ndarray,
                 prev_omega: np.ndarray | None = None,
                 beta_k: np.ndarray | None = None,
                 mode: str = "literal") -> np.ndarray:
    """Closed-form phase realignment to the weighted aggregate direction.

    mode="literal" follows the aggregate-then-arg rule; mode="beta_scaled"
    first maps each tuple's target phases back to center-frequency
    coordinates (experimental alternative, see README).
    """
    w = np.asarray(weights, float).reshape(-1)
    b = np.asarray(beta_vecs, np.complex128).reshape(len(w), -1)
    if mode == "beta_scaled":
        if beta_k is None:
            raise ValueError("beta_scaled mode needs per-tuple beta_k")
        bk = np.asarray(beta_k, float).reshape(-1, 1)
        b = np.abs(b) * np.exp(1j * np.angle(b) / bk)
    agg = (w[:, None] * b).sum(axis=0)
    omega = np.mod(np.angle(agg), 2.0 * np.pi)
    dead = np.abs(agg) == 0.0
    if dead.any():
        if prev_omega is None:
            omega[dead] = 0.0
        else:
            omega[dead] = np.asarray(prev_omega, float)[dead]
    return omega


def refine_profile(omega0: np.ndarray, model: DesignModel, hp, *,
                   outer_rounds: int = 2, inner_iters: int = 15,
                   gamma0: float | None = None):
    """Short majorization descent from a given start; returns (omega, score).

    Used both by the scalable method's restarts and as the local-refinement
    stage completing the SDP relaxation (rounding candidates are descended
    under the true design model before selection).
    """
    qf = model.qforms
    au, ae = qf.au, qf.ae
    au_sc, ae_sc = model.score_qforms.au, model.score_qforms.ae
    omega = np.asarray(omega0, float).copy()
    if gamma0 is None:
        s0 = np.exp(1j * omega[None, :] * model.design_beta_k[:, None])
        gamma0 = gamma_closed_form(s0, qf)
    gamma = max(gamma0, 1.0)
    best_s, best_om = -math.inf, omega.copy()
    r_best, r_om = -math.inf, omega.copy()
    for _ in range(outer_rounds):
        lam = lambda_min_grid(qf, gamma)
        (omega, bd, bd_om, bs, bs_om, _, _) = kernels.scalable_inner_loop(
            au, ae, model.design_beta_k, lam, gamma, hp.mu, omega,
            au_sc, ae_sc, model.score_beta_k, inner_iters)
        if bd > r_best:
            r_best, r_om = bd, bd_om
        if bs > best_s:
            best_s, best_om = bs, bs_om
        s_per_freq = np.exp(1j * r_om[None, :] * model.design_beta_k[:, None])
        gamma = gamma_closed_form(s_per_freq, qf)
    return best_om, best_s


def run_scalable(scenario: Scenario, *, model: DesignModel | None = None,
                 seed: int | None = None, log=None,
                 report_mode: str = "los"):
    """Random-restart majorization search (Algorithm-2-style double loop).

    Returns (PhaseProfile, SecrecyReport, ScalableState). Restarts carry
    independent RNG streams and trackers; gamma refreshes each outer round
    from the restart's own best design-grid profile.
    """
    hp = scenario.hyper
    if model is None:
        model = proposed_model(scenario)
    if seed is None:
        seed = hp.rng_seed
    qf = model.qforms
    au, ae = np.ascontiguousarray(qf.au), np.ascontiguousarray(qf.ae)
    au_sc = np.ascontiguousarray(model.score_qforms.au)
    ae_sc = np.ascontiguousarray(model.score_qforms.ae)
    bk_d = model.design_beta_k
    bk_sc = model.score_beta_k
    n = au.shape[2]

    state = ScalableState(gamma=hp.gamma0)
    g_score, g_om = -math.inf, None
    for t in range(hp.t_max):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                           spawn_key=(_SCALE_DOMAIN, t)))
        omega = 2.0 * np.pi * rng.random(n)
        gamma = hp.gamma0
        r_best, r_om = -math.inf, omega.copy()
        for j in range(hp.scalable_j_max):
            lam = lambda_min_grid(qf, gamma)
            t0 = time.perf_counter()
            (omega, best_d, best_d_om, best_s, best_s_om,
             n_done, hist) = kernels.scalable_inner_loop(
                au, ae, bk_d, lam, gamma, hp.mu, omega,
                au_sc, ae_sc, bk_sc, hp.scalable_i_max)
            wall_ms = (time.perf_counter() - t0) * 1e3 / max(n_done, 1)
            if best_d > r_best:
                r_best, r_om = best_d, best_d_om
            if best_s > g_score:
                g_score, g_om = best_s, best_s_om
            state.best_sr = max(g_score, 0.0)
            for i in range(n_done):
                row = dict(t=t, j=j, i=i, gamma=gamma,
                           min_sr=float(hist[i, 0]), lse_bound=float(hist[i, 1]),
                           eval_sr=float(hist[i, 2]), best_sr=state.best_sr,
                           wall_ms=wall_ms)
                state.history.append(row)
                if log is not None:
                    log(row)
            # Eq.-(16) closed form from this restart's best profile
            s_per_freq = np.exp(1j * r_om[None, :] * bk_d[:, None])
            gamma = gamma_closed_form(s_per_freq, qf)
            state.gamma = gamma
            state.restart, state.outer, state.inner = t, j, n_done

    profile = PhaseProfile(omega_c=g_om, beta=scenario.lc.beta,
                           f_c=scenario.freq_plan.center_hz)
    report = worst_case_report(profile, scenario, mode=report_mode)
    state.best_sr = max(g_score, 0.0)
    return profile, report, state
