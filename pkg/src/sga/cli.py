"""Command-line front end.

Subcommands: simulate, focus, evaluate, compare, budget.
Exit codes: 0 success, 1 runtime failure, 2 scenario validation failure.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np


def _common(p):
    p.add_argument("--output-dir", default=None, help="artifact directory")
    p.add_argument("--threads", type=int, default=None,
                   help="cap worker threads")


def build_parser():
    ap = argparse.ArgumentParser(prog="sga",
                                 description="Spherical-geometry SAR imaging")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate raw echoes only")
    p.add_argument("scenario")
    _common(p)

    p = sub.add_parser("focus", help="simulate and form an image")
    p.add_argument("scenario")
    p.add_argument("--mode", choices=("sga_low", "sga_high", "bp"),
                   default=None, help="override the scenario mode")
    p.add_argument("--keep-intermediates", action="store_true", default=None)
    _common(p)

    p = sub.add_parser("evaluate", help="point-target metrics of an image")
    p.add_argument("image", help=".sgai file")
    p.add_argument("scenario", help="scenario defining the targets")
    _common(p)

    p = sub.add_parser("compare", help="compare two images target by target")
    p.add_argument("image_a")
    p.add_argument("image_b")
    p.add_argument("scenario")
    _common(p)

    p = sub.add_parser("budget", help="out-of-plane error budget")
    p.add_argument("scenario")
    _common(p)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    from .scenario import ScenarioError
    try:
        return _dispatch(args)
    except ScenarioError as e:
        print(f"scenario error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - boundary of the CLI
        print(f"error: {e}", file=sys.stderr)
        return 1


def _dispatch(args):
    from . import formats, mocomp, pipeline
    from .scenario import (build_earth, build_radar, build_scene,
                           build_trajectory, load_scenario)

    if args.command == "simulate":
        cfg = load_scenario(args.scenario)
        out = Path(args.output_dir or cfg["output"]["dir"])
        out.mkdir(parents=True, exist_ok=True)
        pipeline._set_threads(args.threads)
        traj, ref, targets, raw = pipeline.simulate(cfg)
        name = cfg.get("name", "run")
        formats.write_raw(out / f"{name}_raw.sgac", raw)
        print(f"wrote {out / (name + '_raw.sgac')} "
              f"({raw.data.shape[0]} x {raw.data.shape[1]})")
        return 0

    if args.command == "focus":
        manifest = pipeline.run(args.scenario, output_dir=args.output_dir,
                                mode=args.mode, threads=args.threads,
                                keep_intermediates=args.keep_intermediates)
        secs = manifest["stage_seconds"]
        for stage, sec in secs.items():
            print(f"  {stage:20s} {sec:8.2f} s")
        print(f"artifacts in {args.output_dir or manifest['scenario']['output']['dir']}")
        return 0

    if args.command == "evaluate":
        cfg = load_scenario(args.scenario)
        earth = build_earth(cfg)
        traj = build_trajectory(cfg, earth)
        ref, targets = build_scene(cfg, traj, earth)
        img = formats.read_image(args.image)
        rows = pipeline.evaluate_targets(img, targets)
        out = Path(args.output_dir or cfg["output"]["dir"])
        out.mkdir(parents=True, exist_ok=True)
        path = out / (Path(args.image).stem + "_metrics.csv")
        formats.write_metrics_csv(path, rows)
        for r in rows:
            print(f"  target ({r['true_x_m']:12.2f},{r['true_y_m']:12.2f})  "
                  f"irw {r['irw_az_m']:.3f} x {r['irw_rg_m']:.3f} m  "
                  f"pslr {r['pslr_az_db']:.2f}/{r['pslr_rg_db']:.2f} dB")
        print(f"wrote {path}")
        return 0

    if args.command == "compare":
        cfg = load_scenario(args.scenario)
        earth = build_earth(cfg)
        traj = build_trajectory(cfg, earth)
        ref, targets = build_scene(cfg, traj, earth)
        img_a = formats.read_image(args.image_a)
        img_b = formats.read_image(args.image_b)
        out = Path(args.output_dir or cfg["output"]["dir"])
        out.mkdir(parents=True, exist_ok=True)
        report = pipeline.compare(img_a, img_b, targets, out_dir=out)
        with open(out / "compare_report.json", "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
        for row in report["targets"]:
            flag = "pass" if row["pass"] else "FAIL"
            print(f"  target {row['index']}: d_irw "
                  f"{row['d_irw_az_rel']*100:.1f}%/{row['d_irw_rg_rel']*100:.1f}%  "
                  f"d_peak {row['d_peak_x_m']:.3f}/{row['d_peak_y_m']:.3f} m  "
                  f"[{flag}]")
        print("overall:", "pass" if report["pass"] else "FAIL")
        return 0 if report["pass"] else 1

    if args.command == "budget":
        cfg = load_scenario(args.scenario)
        earth = build_earth(cfg)
        traj = build_trajectory(cfg, earth)
        ref, targets = build_scene(cfg, traj, earth)
        radar = build_radar(cfg)
        fc_eff = pipeline._fc_eff(traj, ref, earth, radar)
        budget = mocomp.error_budget(
            pipeline._scene_half_extent(targets, ref, 0),
            pipeline._scene_half_extent(targets, ref, 1),
            ref, traj, radar, fc_eff, earth)
        out = Path(args.output_dir or cfg["output"]["dir"])
        out.mkdir(parents=True, exist_ok=True)
        name = cfg.get("name", "run")
        formats.write_budget(out / f"{name}_budget.txt",
                             out / f"{name}_budget.json", budget)
        for k, v in budget.as_dict().items():
            print(f"  {k:28s} {v:.6g}")
        return 0

    raise ValueError(f"unknown command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
