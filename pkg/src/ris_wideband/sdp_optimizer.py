"""Alternating SDP method: rank-one penalty plus two first-order linearizations.

Outer loop freezes the rate ratio inside the constraint matrices and refreshes
it in closed form; inner loop maximizes gamma minus the growing rank penalty
over the linearized feasible set. For a unit-diagonal PSD variable the nuclear
norm is exactly tr(S) = N, so only the linearized spectral-norm term remains
in the penalty. Raw splitting-solver iterates are polished (PSD eigenvalue
clip, exact unit diagonal) before they re-enter the Taylor machinery.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .conic import P7Data, make_backend
from .lc_phase import PhaseProfile, entrywise_power
from .scalable_optimizer import DesignModel, proposed_model, refine_profile
from .scenario import Scenario
from .secrecy import QuadraticFormSet, gamma_closed_form, worst_case_report

TWO_PI = 2.0 * math.pi


@dataclass
class SdpState:
    S_c: np.ndarray
    gamma: float
    eta: float
    outer: int = 0
    inner: int = 0
    history: list = field(default_factory=list)

    @property
    def rank_gap(self) -> float:
        w = np.clip(np.linalg.eigvalsh((self.S_c + self.S_c.conj().T) / 2.0), 0.0, None)
        return float(w.sum() - w.max())


def build_A_diff(qf: QuadraticFormSet, gamma: float, u_idx: int, e_idx: int,
                 k: int) -> np.ndarray:
    """A_u(p_u) - gamma * A_e(p_e) at design frequency k (Hermitian, rank <= 2)."""
    au = qf.au[k, u_idx]
    ae = qf.ae[k, e_idx]
    return np.outer(au, au.conj()) - gamma * np.outer(ae, ae.conj())


def build_A_diff_stack(qf: QuadraticFormSet, gamma: float) -> np.ndarray:
    """All (k, p_u, p_e) tuples stacked in deterministic (k, u, e) order."""
    K, Pu, N = qf.au.shape
    Pe = qf.ae.shape[1]
    out = np.empty((K * Pu * Pe, N, N), np.complex128)
    idx = 0
    for k in range(K):
        for u in range(Pu):
            Au = np.outer(qf.au[k, u], qf.au[k, u].conj())
            for e in range(Pe):
                out[idx] = Au - gamma * np.outer(qf.ae[k, e], qf.ae[k, e].conj())
                idx += 1
    return out


def hadamard_taylor(S_ref: np.ndarray, beta_k: float):
    """First-order expansion pieces of the entrywise power at S_ref.

    Returns (S_ref^(beta_k), beta_k * S_ref^(beta_k - 1)); the linearized
    constraint reads tr(A (T0 + T1 .* (S - S_ref))) >= gamma - 1. Entry
    phases take the principal branch.
    """
    t0 = entrywise_power(S_ref, beta_k)
    t1 = beta_k * entrywise_power(S_ref, beta_k - 1.0)
    return t0, t1


def spectral_taylor(S_ref: np.ndarray):
    """(||S_ref||_2, lam lam^H): affine minorant of the spectral norm at S_ref."""
    w, v = np.linalg.eigh((S_ref + S_ref.conj().T) / 2.0)
    lam = v[:, -1]
    return float(w[-1]), np.outer(lam, lam.conj())


def assemble_p7(A_stack: np.ndarray, tuple_beta_k: np.ndarray, S_ref: np.ndarray,
                eta: float) -> P7Data:
    """Fold the Hadamard linearization into effective constraint rows.

    tr(A (T1 .* S)) = <M, S> with M = conj(A^T .* T1); the constant carries
    tr(A T0) - <M, S_ref>.
    """
    T = A_stack.shape[0]
    mats = np.empty_like(A_stack)
    consts = np.empty(T)
    cache = {}
    for t in range(T):
        b = float(tuple_beta_k[t])
        if b not in cache:
            cache[b] = hadamard_taylor(S_ref, b)
        T0, T1 = cache[b]
        A = A_stack[t]
        M = np.conj(A.T * T1)
        mats[t] = M
        consts[t] = float(np.real(np.trace(A @ T0))
                          - np.real(np.sum(np.conj(M) * S_ref)))
    _, grad = spectral_taylor(S_ref)
    return P7Data(constraint_mats=mats, constraint_consts=consts, grad=grad, eta=eta)


def polish(S: np.ndarray):
    """Clip to PSD, renormalize to an exact unit diagonal; return (S, rank_gap)."""
    w, v = np.linalg.eigh((S + S.conj().T) / 2.0)
    w = np.clip(w, 0.0, None)
    S = (v * w) @ v.conj().T
    d = np.real(np.diag(S)).copy()
    d[d < 1e-12] = 1.0
    S = S / np.sqrt(np.outer(d, d))
    w = np.clip(np.linalg.eigvalsh((S + S.conj().T) / 2.0), 0.0, None)
    return S, float(w.sum() - w.max())


def solve_p7(A_stack: np.ndarray, tuple_beta_k: np.ndarray, S_ref: np.ndarray,
             eta: float, backend, eps: float):
    """One convex inner solve; returns (gamma_var, polished S, rank_gap, solution)."""
    data = assemble_p7(A_stack, tuple_beta_k, S_ref, eta)
    sol = backend.solve(data, eps)
    S, gap = polish(sol.S)
    return sol.gamma, S, gap, sol


def extract_profile(S_c: np.ndarray, beta: float, f_c: float,
                    gap_warn: float = 1e-2) -> PhaseProfile:
    """Unit-modulus factor recovery: top-eigenvector phases mapped to [0, 2*pi)."""
    w, v = np.linalg.eigh((S_c + S_c.conj().T) / 2.0)
    wc = np.clip(w, 0.0, None)
    gap = wc.sum() - wc.max()
    if gap > gap_warn * len(w):
        warnings.warn(f"extracting profile from S_c with rank gap {gap:.3g}",
                      stacklevel=2)
    om = np.mod(np.angle(v[:, -1]), TWO_PI)
    om[om >= TWO_PI] = 0.0
    return PhaseProfile(omega_c=om, beta=beta, f_c=f_c)


def gaussian_roundings(S: np.ndarray, n_draws: int, rng) -> np.ndarray:
    """Classic SDR rounding: z ~ CN(0, S), candidate s = exp(j*arg(z)).

    Returns an (n_draws, N) stack of center-frequency phase vectors in
    [0, 2*pi); the scored best completes the rank relaxation.
    """
    w, v = np.linalg.eigh((S + S.conj().T) / 2.0)
    w = np.clip(w, 0.0, None)
    fac = v * np.sqrt(w)
    g = (rng.standard_normal((n_draws, len(w)))
         + 1j * rng.standard_normal((n_draws, len(w)))) / math.sqrt(2.0)
    z = g @ fac.conj().T
    om = np.mod(np.angle(z), TWO_PI)
    om[om >= TWO_PI] = 0.0
    return om


def run_sdp(scenario: Scenario, *, model: DesignModel | None = None,
            seed: int | None = None, log=None, backend: str = "scs",
            eps_inner: float = 1e-4, eps_final: float = 1e-5,
            eta_persist: bool = False, report_mode: str = "los",
            n_roundings: int = 30, n_refine: int = 6):
    """Algorithm-1-style double loop; returns (PhaseProfile, SecrecyReport, SdpState).

    Initialization is a random unit-modulus rank-one S_c from the seed. Each
    inner iterate contributes its top-eigenvector extraction plus n_roundings
    Gaussian-randomization candidates; the n_refine best candidates then get
    a short majorization descent under the true design model (the standard
    relaxation-rounding-refinement completion), and the profile scoring best
    on the model's densified grid is returned. The state keeps the final
    trajectory iterate and the per-solve history.
    """
    hp = scenario.hyper
    if model is None:
        model = proposed_model(scenario)
    if seed is None:
        seed = hp.rng_seed
    qf = model.qforms
    K, Pu, N = qf.au.shape
    Pe = qf.ae.shape[1]
    tuple_beta = np.repeat(model.design_beta_k, Pu * Pe)

    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0x5D9,)))
    s0 = np.exp(1j * TWO_PI * rng.random(N))
    S_ref = np.outer(s0, s0.conj())
    be = make_backend(backend, N)

    state = SdpState(S_c=S_ref, gamma=hp.gamma0, eta=hp.eta0)
    pool = []           # (score, tie, omega) candidate pool, best kept small
    best_score = -math.inf
    gamma = hp.gamma0
    eta = hp.eta0

    def consider(omega):
        nonlocal best_score
        score = kernels.numpy_profile_score(omega, model.score_qforms.au,
                                            model.score_qforms.ae, model.score_beta_k)
        pool.append((score, len(pool), omega))
        pool.sort(key=lambda t: -t[0])
        del pool[max(n_refine, 1):]
        best_score = max(best_score, score)
        return score

    for j in range(hp.sdp_j_max):
        A_stack = build_A_diff_stack(qf, gamma)
        if not eta_persist:
            eta = hp.eta0
        for i in range(hp.sdp_i_max):
            eps = eps_final if i == hp.sdp_i_max - 1 else eps_inner
            t0 = time.perf_counter()
            gam_var, S_ref, gap, sol = solve_p7(A_stack, tuple_beta, S_ref, eta, be, eps)
            wall_ms = (time.perf_counter() - t0) * 1e3
            prof = extract_profile(S_ref, scenario.lc.beta, scenario.freq_plan.center_hz,
                                   gap_warn=math.inf)
            score = consider(prof.omega_c)
            for om in gaussian_roundings(S_ref, n_roundings, rng):
                consider(om)
            row = dict(j=j, i=i, gamma=gamma, gamma_var=gam_var,
                       objective=sol.objective, rank_gap=gap, eval_sr=score,
                       best_sr=max(best_score, 0.0), eta=eta,
                       iterations=sol.iterations, wall_ms=wall_ms)
            state.history.append(row)
            if log is not None:
                log(row)
            eta *= hp.penalty_growth
        state.S_c = S_ref
        state.inner = hp.sdp_i_max
        state.outer = j + 1
        # closed-form ratio refresh from the entrywise powers of the iterate
        S_k = np.stack([entrywise_power(S_ref, b) for b in model.design_beta_k])
        gamma = gamma_closed_form(S_k, qf)
        state.gamma = gamma
        state.eta = eta

    # local refinement of the leading candidates under the true design model
    best_omega = pool[0][2]
    for score0, _, om0 in list(pool):
        om_r, score_r = refine_profile(om0, model, hp)
        if score_r > best_score:
            best_score, best_omega = score_r, om_r

    profile = PhaseProfile(omega_c=np.mod(best_omega, TWO_PI),
                           beta=scenario.lc.beta, f_c=scenario.freq_plan.center_hz)
    report = worst_case_report(profile, scenario, mode=report_mode)
    return profile, report, state
