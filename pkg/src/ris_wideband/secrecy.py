"""Beamformer, SNRs, secrecy rates, quadratic forms, worst-case reports.

The fixed BS beamformer is the center-frequency transmit matched filter
toward the RIS center. SNRs attach to rank-one quadratic forms: with
a = h_r .* conj(H_t q) / sigma_n the physical SNR |h_r^H Gamma H_t q|^2 /
sigma_n^2 equals |a^H s_k|^2 = s_k^H (a a^H) s_k exactly, with s_k the
unit-modulus phase vector of the profile at that frequency.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import channel as ch
from .lc_phase import PhaseProfile, beta_factor, phase_vector, reflection_coefficients
from .scenario import Scenario, frequency_grids


@dataclass(frozen=True)
class Beamformer:
    q: np.ndarray
    power_w: float


def beamformer(scenario: Scenario) -> Beamformer:
    """q = sqrt(P_t) * a_BS(p_RIS, f_c); ||q||^2 = P_t exactly.

    a_BS is the transmit-convention steering vector (phases exp(-j*kappa*d)),
    so q focuses the array on the RIS center; fixed for all optimization.
    """
    a = ch.bs_steering(scenario, np.asarray(scenario.ris_center, float),
                       scenario.freq_plan.center_hz)
    q = np.sqrt(scenario.rf.transmit_power_w) * a
    return Beamformer(q=q, power_w=scenario.rf.transmit_power_w)


def secrecy_rate(snr_u, snr_e):
    """[log2(1+snr_u) - log2(1+snr_e)]^+ in bits/symbol."""
    return np.maximum(np.log2(1.0 + np.asarray(snr_u)) - np.log2(1.0 + np.asarray(snr_e)), 0.0)


def snr(scenario: Scenario, profile: PhaseProfile, f: float, point, *,
        mode: str = "los", include_direct: bool = False, f_index: int = 0,
        realization: int = 0) -> float:
    """Reference single-point SNR via the effective-channel formula.

    h_eff^H = h_d^H + h_r^H Gamma H_t, SNR = |h_eff^H q|^2 / sigma_n^2.
    Slow path used by tests and spot checks; grid evaluation goes through
    the quadratic forms.
    """
    q = beamformer(scenario).q
    pt = np.asarray(point, float)
    h_t = ch.bs_ris_matrix(scenario, f, f_index, mode, realization=realization)
    h_r = ch.ris_point_rows(scenario, pt[None, :], f, f_index, mode, realization=realization)[0]
    gam = reflection_coefficients(profile, f, scenario.lc.amplitude)
    amp = np.vdot(h_r, gam * (h_t @ q))  # h_r^H Gamma H_t q
    if include_direct:
        h_d = ch.bs_point_rows(scenario, pt[None, :], f, f_index, mode, realization=realization)[0]
        amp = amp + np.vdot(h_d, q)
    return float(np.abs(amp) ** 2 / scenario.noise_power_w)


@dataclass
class QuadraticFormSet:
    """Rank-one SNR factors per (frequency, grid point, role).

    au/ae hold the factors a scaled by 1/sigma_n so SNR = |a^H s_k|^2;
    d_user/d_eve optionally hold the direct-link amplitudes (h_d^H q)/sigma_n
    which add coherently to a^H s_k.
    """
    frequencies: np.ndarray
    beta_k: np.ndarray
    au: np.ndarray                      # (K, Pu, N)
    ae: np.ndarray                      # (K, Pe, N)
    user_points: np.ndarray
    eve_points: np.ndarray
    d_user: np.ndarray | None = None    # (K, Pu)
    d_eve: np.ndarray | None = None

    def dense(self, k: int, role: str, idx: int) -> np.ndarray:
        """Materialize the Hermitian PSD rank-one matrix A = a a^H."""
        a = (self.au if role == "user" else self.ae)[k, idx]
        m = np.outer(a, a.conj())
        return (m + m.conj().T) / 2.0  # exact Hermitian despite FMA rounding

    def snr_user(self, s_k: np.ndarray, k: int) -> np.ndarray:
        amp = self.au[k].conj() @ s_k
        if self.d_user is not None:
            amp = amp + self.d_user[k]
        return np.abs(amp) ** 2

    def snr_eve(self, s_k: np.ndarray, k: int) -> np.ndarray:
        amp = self.ae[k].conj() @ s_k
        if self.d_eve is not None:
            amp = amp + self.d_eve[k]
        return np.abs(amp) ** 2


def build_quadratic_forms(scenario: Scenario, channels: ch.ChannelSet,
                          bf: Beamformer) -> QuadraticFormSet:
    """Factors a = h_r .* conj(H_t q) / sigma_n from a synthesized ChannelSet."""
    sig_n = np.sqrt(scenario.noise_power_w)
    v = np.einsum("knm,m->kn", channels.h_t, bf.q)        # H_t q per frequency
    au = channels.h_r_user * np.conj(v)[:, None, :] / sig_n
    ae = channels.h_r_eve * np.conj(v)[:, None, :] / sig_n
    d_user = d_eve = None
    if channels.h_d_user is not None:
        d_user = np.einsum("kpm,m->kp", np.conj(channels.h_d_user), bf.q) / sig_n
        d_eve = np.einsum("kpm,m->kp", np.conj(channels.h_d_eve), bf.q) / sig_n
    bk = beta_factor(channels.frequencies, scenario.freq_plan.center_hz, scenario.lc.beta)
    return QuadraticFormSet(frequencies=channels.frequencies, beta_k=np.asarray(bk, float),
                            au=au, ae=ae,
                            user_points=scenario.user_points(),
                            eve_points=scenario.eve_points(),
                            d_user=d_user, d_eve=d_eve)


def design_forms(scenario: Scenario, frequencies=None, *, user_points=None,
                 eve_points=None) -> QuadraticFormSet:
    """LOS-only quadratic forms on the design grid (optimizer inputs, h_d = 0)."""
    if frequencies is None:
        frequencies = frequency_grids(scenario.freq_plan)[0]
    cs = ch.build_channels(scenario, frequencies, mode="los", include_direct=False,
                           user_points=user_points, eve_points=eve_points)
    qf = build_quadratic_forms(scenario, cs, beamformer(scenario))
    if user_points is not None:
        qf.user_points = np.atleast_2d(user_points)
    if eve_points is not None:
        qf.eve_points = np.atleast_2d(eve_points)
    return qf


def gamma_closed_form(s_per_freq, qforms: QuadraticFormSet) -> float:
    """gamma = min over (p_u, p_e, k) of (tr(A_u S_k)+1)/(tr(A_e S_k)+1).

    Accepts stacked unit-modulus vectors (K, N) or Hermitian matrices
    (K, N, N); alpha = log2(gamma).
    """
    arr = np.asarray(s_per_freq)
    best = np.inf
    for k in range(len(qforms.frequencies)):
        if arr.ndim == 2:
            tu = qforms.snr_user(arr[k], k)
            te = qforms.snr_eve(arr[k], k)
        else:
            tu = np.real(np.einsum("pn,nm,pm->p", qforms.au[k].conj(), arr[k], qforms.au[k]))
            te = np.real(np.einsum("pn,nm,pm->p", qforms.ae[k].conj(), arr[k], qforms.ae[k]))
        best = min(best, (1.0 + tu.min()) / (1.0 + te.max()))
    return float(best)


@dataclass
class SecrecyReport:
    frequencies: np.ndarray
    sr_min: np.ndarray            # clipped worst-case SR per frequency
    sr_tilde: np.ndarray          # unclipped
    worst_user: np.ndarray        # (K, 3) arg-min user points
    best_eve: np.ndarray          # (K, 3) arg-max eve points
    mode: str = "los"
    sr_mean: np.ndarray | None = None   # rician mode: mean over realizations
    sr_p10: np.ndarray | None = None

    @property
    def band_min(self) -> float:
        return float(self.sr_min.min())

    @property
    def band_min_tilde(self) -> float:
        return float(self.sr_tilde.min())

    @property
    def band_argmin_hz(self) -> float:
        return float(self.frequencies[int(np.argmin(self.sr_min))])


def _report_from_forms(profile: PhaseProfile, qf: QuadraticFormSet) -> SecrecyReport:
    K = len(qf.frequencies)
    sr_tilde = np.empty(K)
    worst_user = np.empty((K, 3))
    best_eve = np.empty((K, 3))
    for k, f in enumerate(qf.frequencies):
        s_k = phase_vector(profile, f)
        su = qf.snr_user(s_k, k)
        se = qf.snr_eve(s_k, k)
        iu = int(np.argmin(su))
        ie = int(np.argmax(se))
        sr_tilde[k] = np.log2(1.0 + su[iu]) - np.log2(1.0 + se[ie])
        worst_user[k] = qf.user_points[iu]
        best_eve[k] = qf.eve_points[ie]
    return SecrecyReport(frequencies=np.asarray(qf.frequencies, float),
                         sr_min=np.maximum(sr_tilde, 0.0), sr_tilde=sr_tilde,
                         worst_user=worst_user, best_eve=best_eve)


def worst_case_report(profile: PhaseProfile, scenario: Scenario, *,
                      frequencies=None, mode: str = "los",
                      include_direct: bool = False, n_realizations: int = 20,
                      threads: int = 1) -> SecrecyReport:
    """Worst-case secrecy rate over the region grids, per frequency.

    For each frequency: min over user grid of the SR against the best
    eavesdropper point, witnesses in deterministic grid order. mode="los"
    is the deterministic default; mode="rician" Monte-Carlos n_realizations
    channel draws and reports the mean (sr_min) plus the 10th percentile.
    """
    if frequencies is None:
        frequencies = frequency_grids(scenario.freq_plan)[1]
    frequencies = np.asarray(frequencies, float)
    bf = beamformer(scenario)

    def forms_for(realization: int) -> QuadraticFormSet:
        cs = ch.build_channels(scenario, frequencies, mode=mode,
                               include_direct=include_direct, realization=realization)
        return build_quadratic_forms(scenario, cs, bf)

    if mode == "los":
        rep = _report_from_forms(profile, forms_for(0))
        rep.mode = "los"
        return rep

    def one(r):
        return _report_from_forms(profile, forms_for(r))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            reps = list(ex.map(one, range(n_realizations)))
    else:
        reps = [one(r) for r in range(n_realizations)]
    stack = np.stack([r.sr_min for r in reps])
    out = reps[0]
    out.mode = "rician"
    out.sr_mean = stack.mean(axis=0)
    out.sr_p10 = np.percentile(stack, 10.0, axis=0)
    out.sr_min = out.sr_mean.copy()
    out.sr_tilde = np.stack([r.sr_tilde for r in reps]).mean(axis=0)
    return out
