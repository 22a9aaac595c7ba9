"""Operator command line: segment single frames, dump cue traces,
run missions.

Exit codes are a stable contract: 0 success, 1 validation error
(config or argument semantics), 2 I/O error (missing or unreadable
inputs), 3 mission fault (including a budget that runs out before the
mission completes).  Set REAPER_LOG=debug (or info, warning, error)
for logging on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, MissionConfig, default_config, load_config
from .driver import run_mission
from .imaging import PnmError, load_ppm, save_pgm
from .navcues import extract_cues, initialize_references
from .pipeline import analyze_frame

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_FAULT = 3

log = logging.getLogger("reaper")


def _configure_logging() -> None:
    name = os.environ.get("REAPER_LOG", "warning").strip().upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _load(args) -> MissionConfig:
    cfg = default_config() if args.config is None else load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, geofence=replace(cfg.geofence, seed=args.seed))
    return cfg


def cmd_segment(args) -> int:
    cfg = _load(args)
    image = load_ppm(args.image)
    analysis = analyze_frame(image, cfg.pipeline)
    prefix = Path(args.out)
    if prefix.parent != Path("."):
        prefix.parent.mkdir(parents=True, exist_ok=True)
    save_pgm(analysis.sy, f"{prefix}.sy.pgm")
    save_pgm(analysis.opened, f"{prefix}.tsy.pgm")
    save_pgm(analysis.vtsy, f"{prefix}.vtsy.pgm")
    print("sy = %d" % int(analysis.sy.bits.sum()))
    print("tsy = %d" % int(analysis.opened.bits.sum()))
    print("vtsy = %d" % int(analysis.vtsy.bits.sum()))
    log.debug("stage timings ms: %s", analysis.timings_ms)
    return EXIT_OK


def cmd_cues(args) -> int:
    cfg = _load(args)
    frame_dir = Path(args.frames)
    if not frame_dir.is_dir():
        raise FileNotFoundError(f"not a directory: {frame_dir}")
    frames = sorted(frame_dir.glob("*.ppm"))
    if not frames:
        raise FileNotFoundError(f"no .ppm frames in {frame_dir}")

    lines = ["frame,file,l_height,e_outer,deviation,end_of_field"]
    state = None
    for index, path in enumerate(frames):
        image = load_ppm(path)
        analysis = analyze_frame(image, cfg.pipeline)
        if state is None:
            try:
                state = initialize_references(
                    analysis.vtsy,
                    height_fraction=cfg.navcues.height_fraction,
                    eof_tolerance_fraction=cfg.navcues.eof_tolerance_fraction,
                    edge_rows_fraction=cfg.navcues.edge_rows_fraction,
                )
            except ValueError as exc:
                log.error("%s", exc)
                return EXIT_FAULT
        cues = extract_cues(analysis.vtsy, state)
        lines.append("%d,%s,%s,%s,%s,%d" % (
            index,
            path.name,
            "" if cues.l_height is None else "%d" % cues.l_height,
            "" if cues.e_outer is None else "%.3f" % cues.e_outer,
            "" if cues.deviation is None else "%.3f" % cues.deviation,
            1 if cues.end_of_field else 0,
        ))
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="ascii")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_mission(cfg)

    (out_dir / "telemetry.csv").write_text("\n".join(result.telemetry) + "\n", encoding="ascii")
    (out_dir / "report.txt").write_text(result.report.to_text(), encoding="ascii")
    plot = {
        "path": [[round(x, 6), round(y, 6)] for x, y in result.path],
        "field_corners": [list(c) for c in cfg.field.corners],
        "fence_corners": [list(c) for c in cfg.geofence.corners],
        "cell_size": result.field.cell_size,
        "origin": [float(result.field.origin[0]), float(result.field.origin[1])],
        "cells": result.field.cells.tolist(),
    }
    with open(out_dir / "plotdata.json", "w", encoding="ascii") as fh:
        json.dump(plot, fh)

    print(result.report.to_text(), end="")
    if result.report.status != "DONE":
        log.error("mission did not complete: %s", result.report.fault or result.report.status)
        return EXIT_FAULT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reaper",
        description="Vision-guided harvester: segmentation, navigation cues, mission simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_seg = sub.add_parser("segment", help="run the vision pipeline on one PPM frame")
    p_seg.add_argument("image", help="input P6 PPM frame")
    p_seg.add_argument("--config", default=None, help="mission config file (defaults used if omitted)")
    p_seg.add_argument("--out", required=True, help="output prefix for .sy/.tsy/.vtsy PGM masks")

    p_cues = sub.add_parser("cues", help="navigation cues over an ordered PPM frame directory")
    p_cues.add_argument("frames", help="directory of .ppm frames, lexical order")
    p_cues.add_argument("--config", default=None)
    p_cues.add_argument("--out", default=None, help="CSV path (stdout if omitted)")

    p_sim = sub.add_parser("simulate", help="run a closed-loop harvest mission")
    p_sim.add_argument("--config", default=None)
    p_sim.add_argument("--out", required=True, help="output directory for telemetry, report, plot data")
    p_sim.add_argument("--seed", type=int, default=None, help="override geofence.seed")

    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"segment": cmd_segment, "cues": cmd_cues, "simulate": cmd_simulate}
    try:
        return handlers[args.command](args)
    except (FileNotFoundError, IsADirectoryError, NotADirectoryError, PermissionError, PnmError) as exc:
        log.error("%s", exc)
        return EXIT_IO
    except (ConfigError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
