"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Heavy reproduction runs (criteria 1 and 2) share session-scoped results.
Criterion interpretations that needed pinning:
  - the reproduction windows are asserted on the *median* band-minimum SR
    over the 10 seeds (the headline value), the SDP-vs-scalable comparison
    is per-seed;
  - benchmark separation uses the same 10 seeds and medians.
Everything runs LOS-only on the bundled desk-scale scenario.
"""

import json
import math
import shutil
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import ris_wideband as rw
from ris_wideband.lc_phase import rank_one_power
from ris_wideband.scalable_optimizer import (lambda_min_rank2, lse_weights,
                                             majorizer_vector, run_scalable)
from ris_wideband.sdp_optimizer import run_sdp, spectral_taylor
from ris_wideband.scenario import _scenario_from_dict
from tests.conftest import shrink

pytestmark = pytest.mark.acceptance

SEEDS = list(range(1, 11))


def _report(name, ok, detail=""):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


@pytest.fixture(scope="session")
def paper_sc():
    return rw.paper_scenario()


@pytest.fixture(scope="session")
def scalable_runs(paper_sc):
    out = {}
    for seed in SEEDS:
        t0 = time.perf_counter()
        _, rep, _ = run_scalable(paper_sc, seed=seed)
        out[seed] = (rep.band_min, time.perf_counter() - t0)
    return out


@pytest.fixture(scope="session")
def sdp_runs(paper_sc):
    out = {}
    for seed in SEEDS:
        t0 = time.perf_counter()
        _, rep, state = run_sdp(paper_sc, seed=seed)
        out[seed] = (rep.band_min, time.perf_counter() - t0, state.rank_gap)
    return out


def test_criterion_1_fig7_reproduction(paper_sc, scalable_runs, sdp_runs):
    sdp_vals = np.array([sdp_runs[s][0] for s in SEEDS])
    sca_vals = np.array([scalable_runs[s][0] for s in SEEDS])
    sdp_med = float(np.median(sdp_vals))
    sca_med = float(np.median(sca_vals))
    wins = int(sum(sdp_runs[s][0] >= scalable_runs[s][0] - 1e-12 for s in SEEDS))
    sdp_time = max(sdp_runs[s][1] for s in SEEDS)
    sca_time = max(scalable_runs[s][1] for s in SEEDS)
    ok = (1.0 <= sdp_med <= 3.0 and 0.5 <= sca_med <= 2.0 and wins >= 8
          and sca_time <= 120.0 and sdp_time <= 1800.0)
    assert _report(
        "criterion 1 (Fig. 7 reproduction)",
        ok,
        f"SDP median {sdp_med:.2f} bits in [1,3]; scalable median {sca_med:.2f} "
        f"in [0.5,2]; SDP>=scalable on {wins}/10 seeds; worst times "
        f"scalable {sca_time:.0f}s<=120s, SDP {sdp_time:.0f}s<=1800s "
        f"(per-seed SDP {np.round(sdp_vals, 2).tolist()}, "
        f"scalable {np.round(sca_vals, 2).tolist()})")


def test_criterion_2_benchmark_separation(paper_sc, scalable_runs, sdp_runs):
    meds = {}
    for bid in (1, 2, 3):
        vals = []
        for seed in SEEDS:
            _, rep, _ = rw.run_benchmark(bid, paper_sc, seed=seed)
            vals.append(rep.band_min)
        meds[bid] = float(np.median(vals))
    sdp_med = float(np.median([sdp_runs[s][0] for s in SEEDS]))
    sca_med = float(np.median([scalable_runs[s][0] for s in SEEDS]))
    ok = (all(m < 0.1 for m in meds.values()) and sdp_med > 0.5 and sca_med > 0.5)
    assert _report(
        "criterion 2 (benchmark separation)",
        ok,
        f"benchmark medians {dict((k, round(v, 3)) for k, v in meds.items())} "
        f"(need < 0.1); proposed medians SDP {sdp_med:.2f}, scalable "
        f"{sca_med:.2f} (need > 0.5)")


def test_criterion_3_lemma_suite(rng):
    n_cases = 1000
    # Lemma 2: factor-route Hadamard power preserves rank/PSD/unit diagonal
    worst_second = 0.0
    for _ in range(n_cases):
        om = rng.uniform(0, 2 * math.pi, 8)
        S = np.outer(np.exp(1j * om), np.exp(-1j * om))
        P = rank_one_power(S, float(rng.uniform(0.7, 1.3)))
        w = np.linalg.eigvalsh(P)
        worst_second = max(worst_second, abs(w[-2]))
        assert w[0] > -1e-10 and np.abs(np.diag(P) - 1).max() < 1e-10
    ok2 = worst_second < 1e-9

    # Lemma 3: majorizer validity + tightness at the anchor
    worst_violation = -np.inf
    worst_anchor = 0.0
    for _ in range(n_cases):
        n = 10
        a_u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        a_e = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        gam = float(rng.uniform(0.1, 3.0))
        s_t = np.exp(1j * rng.uniform(0, 2 * math.pi, n))
        s = np.exp(1j * rng.uniform(0, 2 * math.pi, n))
        lam = lambda_min_rank2(a_u, a_e, gam)
        bv, off = majorizer_vector(s_t, a_u, a_e, gam, lam)
        exact = abs(np.vdot(a_u, s)) ** 2 - gam * abs(np.vdot(a_e, s)) ** 2
        bound = off + 2 * np.real(np.vdot(s, bv)) + gam - 1.0
        worst_violation = max(worst_violation, bound - exact)
        at_anchor = off + 2 * np.real(np.vdot(s_t, bv)) + gam - 1.0
        exact_anchor = abs(np.vdot(a_u, s_t)) ** 2 - gam * abs(np.vdot(a_e, s_t)) ** 2
        worst_anchor = max(worst_anchor, abs(at_anchor - exact_anchor))
    ok3 = worst_violation < 1e-9 and worst_anchor < 1e-9

    # Lemma 4: LSE sandwich
    ok4 = True
    for _ in range(n_cases):
        v = rng.uniform(-20, 20, int(rng.integers(1, 30)))
        mu = float(rng.uniform(1e-3, 1.0))
        _, bound = lse_weights(v, mu)
        ok4 &= (v.min() - mu * math.log(len(v)) - 1e-9 <= bound <= v.min() + 1e-9)

    # Eq.-(17)-style spectral-norm minorant validity (PSD reference)
    ok17 = True
    for _ in range(n_cases):
        n = 6
        B = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        S_ref = B @ B.conj().T
        C = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        S = (C + C.conj().T) / 2
        snorm, G = spectral_taylor(S_ref)
        bound = snorm + np.real(np.trace(G.conj().T @ (S - S_ref)))
        ok17 &= bound <= np.linalg.norm(S, 2) + 1e-9

    assert _report(
        "criterion 3 (lemma property suite, 1000 cases each)",
        ok2 and ok3 and ok4 and ok17,
        f"rank-one power second eig {worst_second:.1e} < 1e-9; majorizer "
        f"violation {worst_violation:.1e} < 1e-9 (anchor gap {worst_anchor:.1e}); "
        f"LSE sandwich {'ok' if ok4 else 'VIOLATED'}; spectral minorant "
        f"{'ok' if ok17 else 'VIOLATED'}")


def test_criterion_4_rank2_shortcut(rng):
    worst_rel = 0.0
    for n in (8, 64, 256):
        for _ in range(500):
            a_u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            a_e = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            gam = float(rng.uniform(0.2, 3.0))
            fast = lambda_min_rank2(a_u, a_e, gam)
            A = np.outer(a_u, a_u.conj()) - gam * np.outer(a_e, a_e.conj())
            dense = np.linalg.eigvalsh((A + A.conj().T) / 2)[0]
            worst_rel = max(worst_rel, abs(fast - dense) / abs(dense))
    # timing at N = 256
    n = 256
    tuples = [(rng.standard_normal(n) + 1j * rng.standard_normal(n),
               rng.standard_normal(n) + 1j * rng.standard_normal(n))
              for _ in range(500)]
    t0 = time.perf_counter()
    for a_u, a_e in tuples:
        lambda_min_rank2(a_u, a_e, 1.7)
    t_fast = time.perf_counter() - t0
    t0 = time.perf_counter()
    for a_u, a_e in tuples:
        A = np.outer(a_u, a_u.conj()) - 1.7 * np.outer(a_e, a_e.conj())
        np.linalg.eigvalsh((A + A.conj().T) / 2)
    t_dense = time.perf_counter() - t0
    speedup = t_dense / t_fast
    ok = worst_rel < 1e-8 and speedup >= 50
    assert _report(
        "criterion 4 (rank-2 eigenvalue shortcut)",
        ok,
        f"max relative error {worst_rel:.1e} < 1e-8 over 500 tuples x "
        f"N in (8,64,256); speedup at N=256: {speedup:.0f}x >= 50x")


def test_criterion_5_small_instance_optimality(paper_sc):
    sc = shrink(paper_sc, n_ris=4, bs=(4, 4), k_design=2, k_eval=21,
                user_grid=(1, 1, 1), eve_grid=(1, 1, 1),
                t_max=10, scalable_j_max=8, scalable_i_max=30,
                sdp_j_max=2, sdp_i_max=9)
    from ris_wideband.lc_phase import beta_factor
    from ris_wideband.scenario import frequency_grids
    from ris_wideband.secrecy import design_forms

    qf = design_forms(sc)
    f_d = frequency_grids(sc.freq_plan)[0]
    bk = np.asarray(beta_factor(f_d, sc.freq_plan.center_hz, sc.lc.beta))
    levels = 2 * math.pi * np.arange(16) / 16
    grids = np.stack(np.meshgrid(*[levels] * 4, indexing="ij"), -1).reshape(-1, 4)
    sr_all = np.full(len(grids), np.inf)
    for k in range(len(f_d)):
        s = np.exp(1j * grids * bk[k])
        su = np.abs(s @ qf.au[k, 0].conj()) ** 2
        se = np.abs(s @ qf.ae[k, 0].conj()) ** 2
        sr_all = np.minimum(sr_all, np.log2(1 + su) - np.log2(1 + se))
    grid_opt = float(sr_all.max())
    assert len(grids) == 65536

    sca_ok = 0
    for seed in SEEDS:
        _, rep, _ = run_scalable(sc, seed=seed)
        if rep.band_min_tilde >= grid_opt - 0.2:
            sca_ok += 1
    _, rep_sdp, _ = run_sdp(sc, seed=1)
    sdp_gap = grid_opt - rep_sdp.band_min_tilde
    ok = sca_ok == 10 and sdp_gap <= 0.2
    assert _report(
        "criterion 5 (small-instance optimality)",
        ok,
        f"16^4 exhaustive optimum {grid_opt:.3f} bits; scalable within 0.2 bits "
        f"on {sca_ok}/10 seeds; SDP gap {sdp_gap:.3f} <= 0.2")


def test_criterion_6_squint_trends():
    sweep = rw.squint_study([4, 8, 16, 32, 64, 128, 256], 60e9, 8e9)
    mono = bool(np.all(np.diff(sweep.norm_snr_db) <= 1e-9))
    at_100 = float(rw.squint_study(100, 60e9, 8e9).norm_snr_db.min())
    at_8 = float(rw.squint_study(8, 60e9, 8e9).norm_snr_db.min())
    ok = mono and at_100 < -3.0 and at_8 > -1.0
    assert _report(
        "criterion 6 (squint trends)",
        ok,
        f"min-over-band nonincreasing in N: {mono}; N=100 band loss "
        f"{-at_100:.1f} dB > 3 dB; N=8 loss {-at_8:.2f} dB < 1 dB")


def test_criterion_7_complexity_scaling(paper_sc):
    sizes = [50, 100, 200, 300]
    sca = rw.runtime_sweep("scalable", sizes, paper_sc)
    sdp = rw.runtime_sweep("sdp", sizes, paper_sc)
    s_sca = rw.loglog_slope(sca)
    s_sdp = rw.loglog_slope(sdp)
    ok = s_sca <= 1.3 and s_sdp >= 2.2
    assert _report(
        "criterion 7 (complexity scaling)",
        ok,
        f"log-log slope scalable {s_sca:.2f} <= 1.3, SDP {s_sdp:.2f} >= 2.2 "
        f"(scalable {[(n, round(t, 2)) for n, t in sca]}, "
        f"sdp {[(n, round(t, 1)) for n, t in sdp]})")


def test_criterion_8_rank_penalty_convergence(paper_sc, sdp_runs):
    # the criterion-1 runs already carry the final iterate after I_max inner
    # iterations for 10 random initializations; reuse their gap telemetry
    gaps = [sdp_runs[s][2] for s in SEEDS]
    bound = 1e-4 * paper_sc.ris_elements
    ok = all(g < bound for g in gaps)
    assert _report(
        "criterion 8 (rank-penalty convergence)",
        ok,
        f"final nuclear-minus-spectral gaps over 10 inits: max {max(gaps):.2e} "
        f"< 1e-4*N = {bound:.0e}")


def test_criterion_9_determinism(paper_sc, tmp_path):
    from ris_wideband.cli import main
    from ris_wideband.scenario import save_scenario
    from ris_wideband.secrecy import worst_case_report

    sc = shrink(paper_sc, n_ris=8, bs=(2, 2), k_design=3, k_eval=7,
                t_max=1, scalable_j_max=2, scalable_i_max=6)
    cfg = tmp_path / "det.json"
    save_scenario(sc, cfg)
    outs = []
    for run_dir in ("r1", "r2"):
        out = tmp_path / run_dir
        assert main(["optimize", "-c", str(cfg), "--method", "scalable",
                     "--seed", "4", "--out", str(out)]) == 0
        outs.append(out)
    byte_equal = all((outs[0] / n).read_bytes() == (outs[1] / n).read_bytes()
                     for n in ("phases.csv", "report.csv"))

    prof, _, _ = run_scalable(sc, seed=4)
    r1 = worst_case_report(prof, sc, mode="rician", n_realizations=5, threads=1)
    r8 = worst_case_report(prof, sc, mode="rician", n_realizations=5, threads=8)
    thread_gap = float(np.abs(r1.sr_min - r8.sr_min).max())
    ok = byte_equal and thread_gap <= 1e-12
    assert _report(
        "criterion 9 (determinism)",
        ok,
        f"rerun CSVs byte-identical: {byte_equal}; thread-count report "
        f"difference {thread_gap:.1e} <= 1e-12")


def test_criterion_10_secondary_rendering():
    frontend = Path(__file__).resolve().parents[1] / "frontend"
    if not (frontend / "node_modules").exists() or shutil.which("npx") is None:
        pytest.skip("frontend not built (npm install && npx vitest run)")
    proc = subprocess.run(["npx", "vitest", "run", "--reporter", "basic"],
                          cwd=frontend, capture_output=True, text=True,
                          timeout=600)
    ok = proc.returncode == 0
    assert _report(
        "criterion 10 (secondary rendering, via frontend vitest suite)",
        ok,
        "frontend tests green" if ok else proc.stdout[-400:])
