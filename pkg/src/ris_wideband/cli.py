"""Command-line entry point: optimize, evaluate, squint, runtime-sweep, export-phases."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

METHODS = ("sdp", "scalable", "benchmark1", "benchmark2", "benchmark3")


def _fail(code: int, message: str, **detail):
    sys.stderr.write(json.dumps({"error": message, **detail}) + "\n")
    sys.exit(code)


def _threads(args) -> int:
    env = os.environ.get("RIS_WB_THREADS")
    if env:
        return max(1, int(env))
    if args.threads:
        return max(1, args.threads)
    return os.cpu_count() or 1


def _load(args):
    from .scenario import ConfigError, load_scenario

    try:
        return load_scenario(args.config)
    except ConfigError as e:
        _fail(2, str(e), path=str(args.config))


def cmd_optimize(args) -> int:
    from . import benchmarks, reports
    from .scalable_optimizer import run_scalable
    from .sdp_optimizer import run_sdp

    sc = _load(args)
    if args.method not in METHODS:
        _fail(2, f"unknown method {args.method!r}", choices=list(METHODS))
    seed = sc.hyper.rng_seed if args.seed is None else args.seed
    out = Path(args.out or f"runs/{args.method}_seed{seed}")
    out.mkdir(parents=True, exist_ok=True)
    paths = {k: out / f"{k}.{ext}" for k, ext in
             [("phases", "csv"), ("report", "csv"),
              ("iterations", "jsonl"), ("manifest", "json")]}
    reports.write_manifest(paths["manifest"], sc, args.method, seed,
                           {k: v for k, v in paths.items() if k != "manifest"})
    log = reports.JsonlLogger(paths["iterations"])
    try:
        if args.method == "sdp":
            profile, report, _ = run_sdp(sc, seed=seed, log=log,
                                         eta_persist=args.eta_persist,
                                         backend=args.backend,
                                         report_mode=args.report_mode)
        elif args.method == "scalable":
            profile, report, _ = run_scalable(sc, seed=seed, log=log,
                                              report_mode=args.report_mode)
        else:
            profile, report, _ = benchmarks.run_benchmark(int(args.method[-1]), sc,
                                                          seed=seed, log=log,
                                                          report_mode=args.report_mode)
    finally:
        log.close()
    reports.write_phases_csv(paths["phases"], profile, sc, seed, paths["manifest"].name)
    reports.write_report_csv(paths["report"], report, sc, seed, paths["manifest"].name)
    print(f"{args.method}: band-min SR {report.band_min:.4f} bits/symbol -> {out}")
    return 0


def _profile_from_args(args, sc):
    from .lc_phase import PhaseProfile
    from .reports import read_phases_csv

    try:
        meta, omega = read_phases_csv(args.phases)
    except (OSError, ValueError) as e:
        _fail(2, f"cannot read phases file: {e}", path=str(args.phases))
    if omega.size != sc.ris_elements:
        _fail(2, f"profile length {omega.size} != scenario N {sc.ris_elements}")
    return PhaseProfile(omega_c=np.mod(omega, 2 * np.pi), beta=sc.lc.beta,
                        f_c=sc.freq_plan.center_hz)


def cmd_evaluate(args) -> int:
    from . import reports
    from .evaluation import heatmap
    from .secrecy import worst_case_report

    sc = _load(args)
    profile = _profile_from_args(args, sc)
    seed = sc.hyper.rng_seed if args.seed is None else args.seed
    threads = _threads(args)
    wrote = []
    if args.sr_curve:
        rep = worst_case_report(profile, sc, mode=args.channel,
                                include_direct=args.direct, threads=threads)
        reports.write_report_csv(args.sr_curve, rep, sc, seed)
        wrote.append(args.sr_curve)
    if args.heatmap:
        f = args.heatmap_freq or sc.freq_plan.center_hz
        grid = heatmap(profile, sc, f, mode=args.channel,
                       include_direct=args.direct, nx=args.heatmap_cells,
                       ny=args.heatmap_cells, threads=threads)
        reports.write_heatmap_csv(args.heatmap, grid, sc, seed)
        wrote.append(args.heatmap)
    if not wrote:
        _fail(2, "nothing to do: pass --sr-curve and/or --heatmap")
    print("wrote " + ", ".join(str(w) for w in wrote))
    return 0


def cmd_squint(args) -> int:
    from . import reports
    from .evaluation import squint_study

    sc = _load(args)
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else None
    if sizes and len(sizes) > 1:
        study = squint_study(sizes, sc.freq_plan.center_hz, args.band,
                             rx_distance_m=args.rx_distance,
                             rx_azimuth_deg=args.rx_azimuth)
    else:
        n = sizes[0] if sizes else sc.ris_elements
        study = squint_study(n, sc.freq_plan.center_hz, args.band,
                             rx_distance_m=args.rx_distance,
                             rx_azimuth_deg=args.rx_azimuth)
    reports.write_squint_csv(args.out, study, sc, sc.hyper.rng_seed)
    print(f"wrote {args.out}")
    return 0


def cmd_runtime_sweep(args) -> int:
    from . import reports
    from .evaluation import loglog_slope, runtime_sweep

    sc = _load(args)
    sizes = [int(s) for s in args.sizes.split(",")]
    pairs = runtime_sweep(args.method, sizes, sc, seed=args.seed or sc.hyper.rng_seed)
    reports.write_runtime_csv(args.out, pairs, args.method, sc, sc.hyper.rng_seed)
    print(f"{args.method}: log-log slope {loglog_slope(pairs):.2f} -> {args.out}")
    return 0


def cmd_export_phases(args) -> int:
    from . import reports

    sc = _load(args)
    profile = _profile_from_args(args, sc)
    reports.write_phases_csv(args.out, profile, sc, sc.hyper.rng_seed)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ris-wb",
                                description="Wideband LC-RIS secrecy phase design")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("-c", "--config", required=True)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--threads", type=int, default=None)

    sp = sub.add_parser("optimize", help="run a phase-shift design method")
    common(sp)
    sp.add_argument("--method", required=True)
    sp.add_argument("--out", default=None)
    sp.add_argument("--backend", default="scs", choices=("scs", "cvxpy"))
    sp.add_argument("--eta-persist", action="store_true",
                    help="carry the rank penalty across outer rounds instead of resetting")
    sp.add_argument("--report-mode", default="los", choices=("los", "rician"))
    sp.set_defaults(fn=cmd_optimize)

    sp = sub.add_parser("evaluate", help="score an existing phase profile")
    common(sp)
    sp.add_argument("--phases", required=True)
    sp.add_argument("--sr-curve", default=None)
    sp.add_argument("--heatmap", default=None)
    sp.add_argument("--heatmap-freq", type=float, default=None)
    sp.add_argument("--heatmap-cells", type=int, default=200)
    sp.add_argument("--channel", default="los", choices=("los", "rician"))
    sp.add_argument("--direct", action="store_true",
                    help="include the blocked direct link in evaluation")
    sp.set_defaults(fn=cmd_evaluate)

    sp = sub.add_parser("squint", help="beam-squint study CSV")
    common(sp)
    sp.add_argument("--sizes", default=None, help="comma-separated element counts")
    sp.add_argument("--band", type=float, default=8e9)
    sp.add_argument("--rx-distance", type=float, default=25.0)
    sp.add_argument("--rx-azimuth", type=float, default=12.0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_squint)

    sp = sub.add_parser("runtime-sweep", help="wall-time vs array size CSV")
    common(sp)
    sp.add_argument("--method", required=True, choices=("sdp", "scalable"))
    sp.add_argument("--sizes", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_runtime_sweep)

    sp = sub.add_parser("export-phases", help="re-emit a phase CSV (adds voltages when configured)")
    common(sp)
    sp.add_argument("--phases", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_export_phases)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit:
        raise
    except Exception as e:  # surface as machine-readable error
        _fail(1, f"{type(e).__name__}: {e}")


if __name__ == "__main__":
    sys.exit(main())
