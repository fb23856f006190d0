import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from ris_wideband.cli import main
from ris_wideband.reports import read_csv
from tests.conftest import shrink
from ris_wideband.scenario import paper_scenario, save_scenario


@pytest.fixture()
def small_cfg(tmp_path):
    sc = shrink(paper_scenario(), n_ris=8, bs=(2, 2), k_design=3, k_eval=7,
                t_max=1, scalable_j_max=2, scalable_i_max=6,
                sdp_j_max=1, sdp_i_max=3)
    p = tmp_path / "small.json"
    save_scenario(sc, p)
    return p


def _run(argv):
    proc = subprocess.run([sys.executable, "-m", "ris_wideband.cli", *argv],
                          capture_output=True, text=True)
    return proc


def test_optimize_happy_path(small_cfg, tmp_path):
    out = tmp_path / "run"
    rc = main(["optimize", "-c", str(small_cfg), "--method", "scalable",
               "--seed", "7", "--out", str(out)])
    assert rc == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["iterations.jsonl", "manifest.json", "phases.csv", "report.csv"]
    man = json.loads((out / "manifest.json").read_text())
    assert man["seed"] == 7
    meta, _, rows = read_csv(out / "phases.csv")
    assert meta["manifest"] == "manifest.json"
    assert len(rows) == 8


def test_optimize_unknown_method(small_cfg):
    proc = _run(["optimize", "-c", str(small_cfg), "--method", "sorcery"])
    assert proc.returncode == 2
    err = json.loads(proc.stderr.strip().splitlines()[-1])
    assert "unknown method" in err["error"]


def test_missing_config_path(tmp_path):
    missing = tmp_path / "ghost.toml"
    proc = _run(["optimize", "-c", str(missing), "--method", "scalable"])
    assert proc.returncode == 2
    err = json.loads(proc.stderr.strip().splitlines()[-1])
    assert str(missing) in err["error"] or str(missing) in err.get("path", "")


def test_evaluate_wrong_profile_length(small_cfg, tmp_path):
    bad = tmp_path / "bad_phases.csv"
    bad.write_text('# {"kind": "phases"}\nelement_index,omega_c_rad\n0,0.0\n1,0.1\n')
    proc = _run(["evaluate", "-c", str(small_cfg), "--phases", str(bad),
                 "--sr-curve", str(tmp_path / "sr.csv")])
    assert proc.returncode == 2
    err = json.loads(proc.stderr.strip().splitlines()[-1])
    assert "profile length 2 != scenario N 8" in err["error"]


def test_evaluate_sr_curve_row_count(small_cfg, tmp_path):
    out = tmp_path / "run"
    main(["optimize", "-c", str(small_cfg), "--method", "scalable",
          "--seed", "3", "--out", str(out)])
    curve = tmp_path / "sr.csv"
    rc = main(["evaluate", "-c", str(small_cfg), "--phases", str(out / "phases.csv"),
               "--sr-curve", str(curve)])
    assert rc == 0
    meta, cols, rows = read_csv(curve)
    assert len(rows) == 7  # K_eval rows
    assert cols[:2] == ["freq_hz", "sr_min_bits"]


def test_rerun_byte_identical(small_cfg, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        rc = main(["optimize", "-c", str(small_cfg), "--method", "benchmark2",
                   "--seed", "5", "--out", str(out)])
        assert rc == 0
    for name in ("phases.csv", "report.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_squint_command(small_cfg, tmp_path):
    out = tmp_path / "squint.csv"
    rc = main(["squint", "-c", str(small_cfg), "--sizes", "4,8,16",
               "--out", str(out)])
    assert rc == 0
    meta, cols, rows = read_csv(out)
    assert meta["kind"] == "squint"
    assert len(rows) == 3


def test_export_phases_roundtrip(small_cfg, tmp_path):
    out = tmp_path / "run"
    main(["optimize", "-c", str(small_cfg), "--method", "scalable",
          "--seed", "3", "--out", str(out)])
    exported = tmp_path / "exported.csv"
    rc = main(["export-phases", "-c", str(small_cfg),
               "--phases", str(out / "phases.csv"), "--out", str(exported)])
    assert rc == 0
    _, omega1 = __import__("ris_wideband.reports", fromlist=["x"]).read_phases_csv(out / "phases.csv")
    _, omega2 = __import__("ris_wideband.reports", fromlist=["x"]).read_phases_csv(exported)
    assert np.allclose(omega1, omega2, atol=0)


def test_iteration_log_schema(small_cfg, tmp_path):
    out = tmp_path / "run"
    main(["optimize", "-c", str(small_cfg), "--method", "sdp",
          "--seed", "2", "--out", str(out)])
    rows = [json.loads(l) for l in (out / "iterations.jsonl").read_text().splitlines()]
    assert rows
    for key in ("j", "i", "gamma", "rank_gap", "objective", "wall_ms"):
        assert key in rows[0]
