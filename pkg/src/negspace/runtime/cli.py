"""Command-line surface.

Subcommands: serve, client, simulate, analyze, puzzle gen|validate, stats,
proj.  Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import asyncio
import glob as globmod
import json
import sys
from pathlib import Path

import numpy as np

from ..awareness import design_space_matrix, format_matrix, matrix_to_doc
from ..errors import NegspaceError
from ..geometry import Role, project_point, projection_matrix
from ..tasks import (
    RuleSet,
    format_summary,
    generate_puzzle,
    puzzle_from_json,
    puzzle_to_json,
    read_event_log,
    score_log,
    summarize,
    validate_puzzle,
)
from .agents import AgentPolicy, Interpretation
from .config import EngineConfig, load_config
from .netsim import NetworkModel
from .simulate import simulate_session


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="negspace",
        description="Shared-volume face-to-face 3D collaboration engine.")
    parser.add_argument("--config", help="TOML config path (or set NEGSPACE_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run a live two-participant session server")
    p.add_argument("--tcp-port", type=int)
    p.add_argument("--udp-port", type=int)
    p.add_argument("--gateway", action="store_true",
                   help="also open the WebSocket gateway for browser clients")
    p.add_argument("--gateway-port", type=int)
    p.add_argument("--pair-id", type=int)
    p.add_argument("--log-dir")

    p = sub.add_parser("client", help="headless native client")
    p.add_argument("--host")
    p.add_argument("--tcp-port", type=int)
    p.add_argument("--udp-port", type=int)
    p.add_argument("--participant", type=int, default=0, choices=(0, 1))
    p.add_argument("--name", default="")
    p.add_argument("--auto-pair", action="store_true",
                   help="run both scripted participants and play a full session")
    p.add_argument("--pace", type=float, default=1.0,
                   help="conversational pacing multiplier for --auto-pair")

    p = sub.add_parser("simulate", help="run a seeded headless session")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pair-id", type=int, default=0)
    p.add_argument("--latency-ms", type=float)
    p.add_argument("--jitter-ms", type=float)
    p.add_argument("--loss", type=float)
    p.add_argument("--noise", type=float, default=0.0,
                   help="assembler aiming noise (radians std)")
    p.add_argument("--interpretation", choices=("frame_aware", "frame_naive"),
                   default="frame_aware")
    p.add_argument("--misread", type=float, default=0.0,
                   help="per-channel misread probability for frame_naive")
    p.add_argument("--out-dir", help="write per-task JSONL logs here")
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("analyze", help="reference-frame awareness matrix")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    p.add_argument("--out", help="also write the JSON document to this path")

    p = sub.add_parser("puzzle", help="puzzle generation and validation")
    puzzle_sub = p.add_subparsers(dest="puzzle_command", required=True)
    g = puzzle_sub.add_parser("gen", help="generate a puzzle file")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", help="output path (default: stdout)")
    g.add_argument("--total-distance", type=int)
    g.add_argument("--min-step-distance", type=int)
    v = puzzle_sub.add_parser("validate", help="validate a puzzle file")
    v.add_argument("file")
    v.add_argument("--total-distance", type=int)
    v.add_argument("--min-step-distance", type=int)

    p = sub.add_parser("stats", help="summarize task logs into a median/IQR table")
    p.add_argument("logs", nargs="+", help="JSONL event logs (globs allowed)")

    p = sub.add_parser("proj", help="projection debug: eye + screen to matrix + NDC")
    p.add_argument("--eye", required=True, help="head position as x,y,z meters")
    p.add_argument("--role", choices=("instructor", "assembler"),
                   default="instructor")
    p.add_argument("--near", type=float, default=0.05)
    p.add_argument("--far", type=float, default=10.0)
    return parser


def _engine_config(args) -> EngineConfig:
    cfg = load_config(args.config)
    overrides = {}
    for attr, key in [("tcp_port", "tcp_port"), ("udp_port", "udp_port"),
                      ("gateway_port", "gateway_port"), ("pair_id", "pair_id"),
                      ("log_dir", "log_dir"), ("host", "host"),
                      ("latency_ms", "latency_ms"), ("jitter_ms", "jitter_ms"),
                      ("loss", "loss")]:
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = value
    if overrides:
        from dataclasses import replace
        cfg = replace(cfg, **overrides)
    return cfg


def _rules(cfg: EngineConfig, args) -> RuleSet:
    total = getattr(args, "total_distance", None)
    min_step = getattr(args, "min_step_distance", None)
    return RuleSet(
        total_distance=total if total is not None else cfg.total_distance,
        min_step_distance=min_step if min_step is not None else cfg.min_step_distance)


def cmd_serve(args) -> int:
    from .server import serve_forever
    cfg = _engine_config(args)
    try:
        return asyncio.run(serve_forever(cfg, enable_gateway=args.gateway))
    except KeyboardInterrupt:
        print("interrupted; shutting down")
        return 0


def cmd_client(args) -> int:
    from .client import run_auto_pair, run_solo_client
    cfg = _engine_config(args)
    if args.auto_pair:
        return asyncio.run(run_auto_pair(cfg, pace=args.pace))
    return asyncio.run(run_solo_client(cfg, participant=args.participant,
                                       name=args.name))


def cmd_simulate(args) -> int:
    cfg = _engine_config(args)
    policies = (
        AgentPolicy(role=Role.INSTRUCTOR),
        AgentPolicy(role=Role.ASSEMBLER,
                    aiming_noise_rad=args.noise,
                    interpretation=Interpretation(args.interpretation),
                    misread_probability=args.misread),
    )
    result = simulate_session(pair_id=args.pair_id, policies=policies,
                              network=cfg.network(), seed=args.seed,
                              volume=cfg.volume(), board_spec=cfg.board_spec(),
                              rules=cfg.rules())
    rows = [score_log(log) for log in result.task_logs]
    if not args.quiet:
        print(format_summary(summarize(rows)))
        print(f"\nvirtual duration: {result.duration_s:.1f} s; "
              f"stats: {result.stats}; replicas converged: "
              f"{result.replicas_converged}")
    if args.out_dir:
        paths = result.write_logs(args.out_dir)
        if not args.quiet:
            print(f"wrote {len(paths)} logs to {args.out_dir}")
    return 0


def cmd_analyze(args) -> int:
    cfg = load_config(args.config)
    reports = design_space_matrix(cfg.volume(), cfg.board_spec())
    doc = matrix_to_doc(reports)
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print(format_matrix(reports))
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2), encoding="utf-8")
    return 0


def cmd_puzzle(args) -> int:
    cfg = load_config(args.config)
    board = cfg.board_spec()
    rules = _rules(cfg, args)
    if args.puzzle_command == "gen":
        puzzle = generate_puzzle(args.seed, board, rules)
        text = puzzle_to_json(puzzle, board)
        if args.out:
            Path(args.out).write_text(text + "\n", encoding="utf-8")
        else:
            print(text)
        return 0
    text = Path(args.file).read_text(encoding="utf-8")
    report = validate_puzzle(puzzle_from_json(text), board, rules)
    for check in report.checks:
        mark = "pass" if check.passed else "FAIL"
        detail = f"  ({check.detail})" if check.detail and not check.passed else ""
        print(f"{mark}  {check.rule}{detail}")
    return 0 if report.passed else 1


def cmd_stats(args) -> int:
    paths = []
    for pattern in args.logs:
        matched = sorted(globmod.glob(pattern))
        paths.extend(matched if matched else [pattern])
    rows = [score_log(read_event_log(p)) for p in paths]
    print(format_summary(summarize(rows)))
    return 0


def cmd_proj(args) -> int:
    cfg = load_config(args.config)
    try:
        eye = tuple(float(x) for x in args.eye.split(","))
        if len(eye) != 3:
            raise ValueError
    except ValueError:
        print("error: --eye must be x,y,z", file=sys.stderr)
        return 2
    volume = cfg.volume()
    role = Role.INSTRUCTOR if args.role == "instructor" else Role.ASSEMBLER
    screen = volume.screen_plane(role)
    matrix = projection_matrix(eye, screen, args.near, args.far)
    print("projection matrix (row-major):")
    for row in matrix:
        print("  [" + "  ".join(f"{x: .6f}" for x in row) + "]")
    print("\nscreen corner NDC check:")
    worst = 0.0
    for label, corner in zip(("lower-left", "lower-right", "upper-left",
                              "upper-right"), screen.corners()):
        ndc = project_point(matrix, corner)
        worst = max(worst, abs(abs(ndc[0]) - 1), abs(abs(ndc[1]) - 1))
        print(f"  {label:11s} -> ({ndc[0]: .8f}, {ndc[1]: .8f})")
    print(f"\nmax |NDC| deviation from the boundary: {worst:.2e}"
          f"  ({'ok' if worst < 1e-6 else 'OUT OF TOLERANCE'})")
    return 0 if worst < 1e-6 else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"serve": cmd_serve, "client": cmd_client, "simulate": cmd_simulate,
                "analyze": cmd_analyze, "puzzle": cmd_puzzle, "stats": cmd_stats,
                "proj": cmd_proj}
    try:
        return handlers[args.command](args)
    except NegspaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
