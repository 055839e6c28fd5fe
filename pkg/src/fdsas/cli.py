"""Command-line front end.

Subcommands: gen-channel, optimize, sweep, beampattern. Every command
takes a JSON config (``--config``); flags override individual keys. Each
run writes its fully resolved config to ``<out>/config.json``.

Exit codes: 0 success, 2 config error, 3 I/O error, 4 infeasible angle
window, 5 oracle grid-cap refusal, 6 geometry error, 7 tensor format error.
"""

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import tensorio
from .baselines import exhaustive_oracle
from .beamforming import TX, beampattern, first_null_beamwidth, steering_vector
from .channel import FrequencyGrid, generate_synthetic
from .config import ExperimentConfig, load_config
from .errors import FdsasError
from .geometry import SubArrayKind
from .metric import SENTINEL_DB
from .pso import optimize, solution_degradations

EXIT_IO = 3


def _capped(value):
    return min(value, SENTINEL_DB)


def _prepare_out(cfg):
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    cfg.dump(out / "config.json")
    return out


def cmd_gen_channel(cfg, target=None):
    out = _prepare_out(cfg)
    ch = cfg.raw["channel"]
    tensor = generate_synthetic(
        cfg.geometry,
        FrequencyGrid(**ch["grid"]),
        isolation_db=ch["isolation_db"],
        diffuse_ratio=ch["diffuse_ratio"],
        seed=ch["seed"],
    )
    path = Path(target) if target else out / "channel.sich"
    checksum = tensorio.save(tensor, path)
    print(f"wrote {path} shape={tensor.shape} sha256={checksum}")
    return checksum


def _run_optimize(channel, cfg, pso_cfg):
    result = optimize(channel, pso_cfg)
    oracle = None
    if cfg.raw["oracle_step_deg"] is not None:
        oracle = exhaustive_oracle(
            channel, pso_cfg.theta_D, pso_cfg.theta_U, pso_cfg.kind, pso_cfg.eps_db,
            float(cfg.raw["oracle_step_deg"]), pso_cfg.spacing_wl, pso_cfg.max_index,
            int(cfg.raw["grid_cap"]),
        )
    return result, oracle


def cmd_optimize(cfg):
    channel = cfg.load_channel()
    pso_cfg = cfg.pso_config()
    out = _prepare_out(cfg)
    result, oracle = _run_optimize(channel, cfg, pso_cfg)
    payload = result.to_dict()
    payload["degradation_db"] = list(solution_degradations(result.solution, pso_cfg))
    payload["num_samples"] = channel.grid.num_points
    if oracle is not None:
        payload["oracle"] = oracle.to_dict()
    (out / "solution.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    (out / "trace.csv").write_text(result.trace_csv())
    s = result.solution
    print(f"DBF    [{result.dbf.policy}] a_si = {_capped(result.dbf.a_si_db):.2f} dB")
    print(
        f"min-SI theta_hat_D={s.theta_hat_D:.3f} theta_hat_U={s.theta_hat_U:.3f} "
        f"Tx={s.i} Rx={s.j} a_si = {_capped(result.a_si_db):.2f} dB"
    )
    if oracle is not None:
        print(f"oracle a_si = {_capped(oracle.a_si_db):.2f} dB over {oracle.grid_size} points")
    return payload


def _sweep_cell(args):
    channel, cfg_raw, theta_D, theta_U = args
    cfg = ExperimentConfig(cfg_raw)
    result = optimize(channel, cfg.pso_config(theta_D, theta_U))
    s = result.solution
    return {
        "theta_D": theta_D,
        "theta_U": theta_U,
        "dbf_a_si_db": _capped(result.dbf.a_si_db),
        "minsi_a_si_db": _capped(result.a_si_db),
        "gain_db": _capped(result.a_si_db) - _capped(result.dbf.a_si_db),
        "theta_hat_D": s.theta_hat_D,
        "theta_hat_U": s.theta_hat_U,
        "tx_index": s.i,
        "rx_index": s.j,
        "dbf_tx_index": result.dbf.tx_index,
        "dbf_rx_index": result.dbf.rx_index,
    }


SWEEP_COLUMNS = [
    "theta_D", "theta_U", "dbf_a_si_db", "minsi_a_si_db", "gain_db",
    "theta_hat_D", "theta_hat_U", "tx_index", "rx_index", "dbf_tx_index", "dbf_rx_index",
]


def run_sweep(channel, cfg):
    angles = [float(a) for a in cfg.raw["angles"]]
    jobs = [(channel, cfg.raw, d, u) for d in angles for u in angles]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_sweep_cell, jobs))
    else:
        rows = [_sweep_cell(job) for job in jobs]
    return rows


def summarize(rows, policy):
    def stats(key):
        values = [r[key] for r in rows]
        return {"min": min(values), "max": max(values), "mean": math.fsum(values) / len(values)}

    return {
        "cells": len(rows),
        "dbf_policy": policy,
        "dbf_a_si_db": stats("dbf_a_si_db"),
        "minsi_a_si_db": stats("minsi_a_si_db"),
        "gain_db": stats("gain_db"),
    }


def cmd_sweep(cfg):
    channel = cfg.load_channel()
    cfg.pso_config()
    out = _prepare_out(cfg)
    rows = run_sweep(channel, cfg)
    with open(out / "sweep.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    policy = cfg.pso_config().dbf_pair
    label = "best" if policy == "best" else f"fixed({policy[0]},{policy[1]})"
    summary = summarize(rows, label)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    g = summary["gain_db"]
    print(
        f"{len(rows)} cells  DBF {summary['dbf_a_si_db']['min']:.1f}-{summary['dbf_a_si_db']['max']:.1f} dB  "
        f"min-SI {summary['minsi_a_si_db']['min']:.1f}-{summary['minsi_a_si_db']['max']:.1f} dB  "
        f"gain mean {g['mean']:.1f} dB max {g['max']:.1f} dB"
    )
    return summary


def beampattern_rows(kinds, angles, step_deg, spacing_wl):
    """Long-format pattern rows and per-curve first-null beamwidths."""
    n = int(round(180.0 / step_deg))
    grid = step_deg * np.arange(1, n)
    rows, widths = [], []
    for kind in kinds:
        kind = SubArrayKind.parse(kind)
        for steer in angles:
            pattern = beampattern(steering_vector(TX, kind.size, steer, spacing_wl), grid)
            for angle, gain in pattern:
                rows.append((kind.value, float(steer), float(angle), float(gain)))
            widths.append(
                {
                    "kind": kind.value,
                    "steer_deg": float(steer),
                    "peak_db": float(pattern[np.argmin(np.abs(grid - steer)), 1]),
                    "first_null_beamwidth_deg": first_null_beamwidth(pattern, steer),
                }
            )
    return rows, widths


def cmd_beampattern(cfg):
    out = _prepare_out(cfg)
    bp = cfg.raw["beampattern"]
    rows, widths = beampattern_rows(bp["kinds"], bp["angles"], float(bp["step_deg"]), cfg.geometry.spacing_wl)
    with open(out / "beampattern.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["kind", "steer_deg", "angle_deg", "gain_db"])
        for kind, steer, angle, gain in rows:
            writer.writerow([kind, repr(steer), repr(angle), repr(gain)])
    (out / "beampattern_summary.json").write_text(json.dumps(widths, indent=2, sort_keys=True) + "\n")
    for w in widths:
        print(f"{w['kind']} steer={w['steer_deg']:g} first-null width={w['first_null_beamwidth_deg']:.2f} deg")
    return widths


def build_parser():
    parser = argparse.ArgumentParser(prog="fdsas", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("gen-channel", "generate a synthetic SI channel tensor file"),
        ("optimize", "run min-SI beamforming with sub-array selection for one angle pair"),
        ("sweep", "compare DBF and min-SI over an angle grid"),
        ("beampattern", "export DBF beampatterns"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, help="JSON config file")
        p.add_argument("--seed", type=int, help="RNG seed (channel seed for gen-channel)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--channel", help="channel tensor path (output path for gen-channel)")
        p.add_argument("--bandwidth-hz", type=float)
        p.add_argument("--kind", choices=["lin4", "lin8"])
    return parser


def _overrides(args):
    o = {}
    if args.seed is not None:
        o["channel.seed" if args.command == "gen-channel" else "pso.seed"] = args.seed
    if args.out is not None:
        o["out"] = args.out
    if args.channel is not None and args.command != "gen-channel":
        o["channel.source"] = "file"
        o["channel.path"] = args.channel
    if args.bandwidth_hz is not None:
        o["bandwidth_hz"] = args.bandwidth_hz
    if args.kind is not None:
        o["kind"] = args.kind
    return o


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, _overrides(args))
        if args.command == "gen-channel":
            cmd_gen_channel(cfg, args.channel)
        elif args.command == "optimize":
            cmd_optimize(cfg)
        elif args.command == "sweep":
            cmd_sweep(cfg)
        else:
            cmd_beampattern(cfg)
    except FdsasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
