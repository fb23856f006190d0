"""Hot numeric kernels: numba-compiled with a pure-numpy fallback.

Backend selection: env var RIS_WB_BACKEND = "numba" | "numpy". Default is
numba when importable, else numpy. Both paths implement identical arithmetic;
scripts/bench_kernels.py compares them. Results are deterministic per backend.
"""

from __future__ import annotations

import math
import os

import numpy as np

_requested = os.environ.get("RIS_WB_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ValueError(f"RIS_WB_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

_HAVE_NUMBA = False
if _requested != "numpy":
    try:
        import numba
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise
        _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and _requested != "numpy"


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# phase matrix exp(j * kappa * d)
# ---------------------------------------------------------------------------

def _phase_matrix_np(d, kappa):
    return np.exp(1j * kappa * d)


if USE_NUMBA:

    @njit(cache=True)
    def _phase_matrix_nb(d, kappa):  # pragma: no cover - compiled
        out = np.empty(d.shape, np.complex128)
        flat_d = d.ravel()
        flat_o = out.ravel()
        for i in range(flat_d.size):
            ph = kappa * flat_d[i]
            flat_o[i] = complex(math.cos(ph), math.sin(ph))
        return out

    def phase_matrix(d, kappa):
        return _phase_matrix_nb(np.ascontiguousarray(d, np.float64), float(kappa))

else:
    phase_matrix = _phase_matrix_np


# ---------------------------------------------------------------------------
# scalable-optimizer inner loop (fixed gamma)
# ---------------------------------------------------------------------------
# Layout: au (K, Pu, N), ae (K, Pe, N) complex128 rank-one SNR factors so that
# SNR = |a^H s_k|^2 with s_k = exp(j * beta_k * omega); lam_min (K, Pu, Pe).
# Score factors are the densified grid the returned candidate is ranked on.

_LOG2 = math.log(2.0)


def _inner_loop_np(au, ae, bk, lam_min, gamma, mu, omega0,
                   au_sc, ae_sc, bk_sc, i_max, tol, patience):
    K, Pu, N = au.shape
    Pe = ae.shape[1]
    omega = omega0.copy()
    best_d = -np.inf
    best_d_om = omega0.copy()
    best_s = -np.inf
    best_s_om = omega0.copy()
    hist = np.full((i_max, 3), np.nan)
    au_c = au.conj()
    ae_c = ae.conj()
    calm = 0
    n_done = 0
    for it in range(i_max):
        sk = np.exp(1j * omega[None, :] * bk[:, None])
        du = np.einsum("kpn,kn->kp", au_c, sk)
        de = np.einsum("kqn,kn->kq", ae_c, sk)
        ru = np.log2(1.0 + np.abs(du) ** 2)
        re = np.log2(1.0 + np.abs(de) ** 2)
        sr_t = ru[:, :, None] - re[:, None, :]
        z = -sr_t / mu
        zmax = z.max()
        w = np.exp(z - zmax)
        w_total = w.sum()
        lse = -mu * (math.log(w_total) + zmax)
        w /= w_total
        d_min = sr_t.min()
        if it > 0:
            # current omega is the candidate produced by the previous update
            if d_min > best_d:
                best_d = d_min
                best_d_om = omega.copy()
            s_min = _score_np(omega, au_sc, ae_sc, bk_sc)
            if s_min > best_s:
                best_s = s_min
                best_s_om = omega.copy()
        else:
            s_min = np.nan
        hist[it, 0] = d_min
        hist[it, 1] = lse
        hist[it, 2] = s_min
        agg = (np.einsum("kp,kpn,kp->n", w.sum(2), au, du)
               - gamma * np.einsum("kq,kqn,kq->n", w.sum(1), ae, de)
               - np.einsum("kpq,kpq,kn->n", w, lam_min, sk))
        new_omega = np.mod(np.angle(agg), 2.0 * np.pi)
        zero = np.abs(agg) == 0.0
        if zero.any():
            new_omega[zero] = omega[zero]  # documented tie-break
        step = np.abs(np.exp(1j * new_omega) - np.exp(1j * omega)).max()
        omega = new_omega
        n_done = it + 1
        if step < tol:
            calm += 1
            if calm >= patience:
                break
        else:
            calm = 0
    # final candidate
    d_min = _design_min_np(omega, au_c, ae_c, bk)
    if d_min > best_d:
        best_d = d_min
        best_d_om = omega.copy()
    s_min = _score_np(omega, au_sc, ae_sc, bk_sc)
    if s_min > best_s:
        best_s = s_min
        best_s_om = omega.copy()
    return omega, best_d, best_d_om, best_s, best_s_om, n_done, hist


def _design_min_np(omega, au_c, ae_c, bk):
    sk = np.exp(1j * omega[None, :] * bk[:, None])
    ru = np.log2(1.0 + np.abs(np.einsum("kpn,kn->kp", au_c, sk)) ** 2)
    re = np.log2(1.0 + np.abs(np.einsum("kqn,kn->kq", ae_c, sk)) ** 2)
    return float((ru.min(1) - re.max(1)).min())


def _score_np(omega, au_sc, ae_sc, bk_sc):
    sk = np.exp(1j * omega[None, :] * bk_sc[:, None])
    ru = np.log2(1.0 + np.abs(np.einsum("kpn,kn->kp", au_sc.conj(), sk)) ** 2)
    re = np.log2(1.0 + np.abs(np.einsum("kqn,kn->kq", ae_sc.conj(), sk)) ** 2)
    return float((ru.min(1) - re.max(1)).min())


if USE_NUMBA:

    @njit(cache=True)
    def _minmax_sr_nb(omega, au, ae, bk):  # pragma: no cover - compiled
        K, Pu, N = au.shape
        Pe = ae.shape[1]
        worst = np.inf
        for k in range(K):
            b = bk[k]
            ru_min = np.inf
            re_max = -np.inf
            for p in range(Pu):
                acc = 0.0 + 0.0j
                for n in range(N):
                    ph = b * omega[n]
                    s = complex(math.cos(ph), math.sin(ph))
                    acc += np.conj(au[k, p, n]) * s
                v = math.log(1.0 + abs(acc) ** 2) / _LOG2
                if v < ru_min:
                    ru_min = v
            for q in range(Pe):
                acc = 0.0 + 0.0j
                for n in range(N):
                    ph = b * omega[n]
                    s = complex(math.cos(ph), math.sin(ph))
                    acc += np.conj(ae[k, q, n]) * s
                v = math.log(1.0 + abs(acc) ** 2) / _LOG2
                if v > re_max:
                    re_max = v
            if ru_min - re_max < worst:
                worst = ru_min - re_max
        return worst

    @njit(cache=True)
    def _inner_loop_nb(au, ae, bk, lam_min, gamma, mu, omega0,
                       au_sc, ae_sc, bk_sc, i_max, tol, patience):  # pragma: no cover
        K, Pu, N = au.shape
        Pe = ae.shape[1]
        omega = omega0.copy()
        best_d = -np.inf
        best_d_om = omega0.copy()
        best_s = -np.inf
        best_s_om = omega0.copy()
        hist = np.full((i_max, 3), np.nan)
        calm = 0
        n_done = 0
        sk = np.empty((K, N), np.complex128)
        du = np.empty((K, Pu), np.complex128)
        de = np.empty((K, Pe), np.complex128)
        sr_t = np.empty((K, Pu, Pe))
        for it in range(i_max):
            for k in range(K):
                b = bk[k]
                for n in range(N):
                    ph = b * omega[n]
                    sk[k, n] = complex(math.cos(ph), math.sin(ph))
            for k in range(K):
                for p in range(Pu):
                    acc = 0.0 + 0.0j
                    for n in range(N):
                        acc += np.conj(au[k, p, n]) * sk[k, n]
                    du[k, p] = acc
                for q in range(Pe):
                    acc = 0.0 + 0.0j
                    for n in range(N):
                        acc += np.conj(ae[k, q, n]) * sk[k, n]
                    de[k, q] = acc
            zmax = -np.inf
            for k in range(K):
                for p in range(Pu):
                    ru = math.log(1.0 + abs(du[k, p]) ** 2) / _LOG2
                    for q in range(Pe):
                        re = math.log(1.0 + abs(de[k, q]) ** 2) / _LOG2
                        v = ru - re
                        sr_t[k, p, q] = v
                        if -v / mu > zmax:
                            zmax = -v / mu
            w_total = 0.0
            d_min = np.inf
            for k in range(K):
                for p in range(Pu):
                    for q in range(Pe):
                        if sr_t[k, p, q] < d_min:
                            d_min = sr_t[k, p, q]
                        w_total += math.exp(-sr_t[k, p, q] / mu - zmax)
            lse = -mu * (math.log(w_total) + zmax)
            if it > 0:
                if d_min > best_d:
                    best_d = d_min
                    best_d_om = omega.copy()
                s_min = _minmax_sr_nb(omega, au_sc, ae_sc, bk_sc)
                if s_min > best_s:
                    best_s = s_min
                    best_s_om = omega.copy()
            else:
                s_min = np.nan
            hist[it, 0] = d_min
            hist[it, 1] = lse
            hist[it, 2] = s_min
            agg = np.zeros(N, np.complex128)
            for k in range(K):
                lam_w = 0.0
                for p in range(Pu):
                    wu = 0.0
                    for q in range(Pe):
                        wv = math.exp(-sr_t[k, p, q] / mu - zmax) / w_total
                        wu += wv
                        lam_w += wv * lam_min[k, p, q]
                    cu = wu * du[k, p]
                    for n in range(N):
                        agg[n] += au[k, p, n] * cu
                for q in range(Pe):
                    we = 0.0
                    for p in range(Pu):
                        we += math.exp(-sr_t[k, p, q] / mu - zmax) / w_total
                    ce = gamma * we * de[k, q]
                    for n in range(N):
                        agg[n] -= ae[k, q, n] * ce
                for n in range(N):
                    agg[n] -= lam_w * sk[k, n]
            step = 0.0
            for n in range(N):
                if abs(agg[n]) == 0.0:
                    new = omega[n]
                else:
                    new = math.atan2(agg[n].imag, agg[n].real) % (2.0 * math.pi)
                diff = abs(complex(math.cos(new), math.sin(new))
                           - complex(math.cos(omega[n]), math.sin(omega[n])))
                if diff > step:
                    step = diff
                omega[n] = new
            n_done = it + 1
            if step < tol:
                calm += 1
                if calm >= patience:
                    break
            else:
                calm = 0
        d_min = _minmax_sr_nb(omega, au, ae, bk)
        if d_min > best_d:
            best_d = d_min
            best_d_om = omega.copy()
        s_min = _minmax_sr_nb(omega, au_sc, ae_sc, bk_sc)
        if s_min > best_s:
            best_s = s_min
            best_s_om = omega.copy()
        return omega, best_d, best_d_om, best_s, best_s_om, n_done, hist

    def scalable_inner_loop(au, ae, bk, lam_min, gamma, mu, omega0,
                            au_sc, ae_sc, bk_sc, i_max, tol=1e-5, patience=3):
        return _inner_loop_nb(au, ae, np.asarray(bk, float), lam_min, float(gamma),
                              float(mu), np.asarray(omega0, float), au_sc, ae_sc,
                              np.asarray(bk_sc, float), i_max, tol, patience)

else:

    def scalable_inner_loop(au, ae, bk, lam_min, gamma, mu, omega0,
                            au_sc, ae_sc, bk_sc, i_max, tol=1e-5, patience=3):
        return _inner_loop_np(au, ae, np.asarray(bk, float), lam_min, float(gamma),
                              float(mu), np.asarray(omega0, float), au_sc, ae_sc,
                              np.asarray(bk_sc, float), i_max, tol, patience)


# pure-numpy twins are always importable for parity tests and benchmarks
numpy_phase_matrix = _phase_matrix_np
numpy_scalable_inner_loop = _inner_loop_np


def numpy_profile_score(omega, au_sc, ae_sc, bk_sc) -> float:
    """Worst-case SR-tilde of a phase profile on a scoring grid (numpy path)."""
    return _score_np(np.asarray(omega, float), au_sc, ae_sc, np.asarray(bk_sc, float))
