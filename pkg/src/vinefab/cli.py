"""Command-line interface: plan, pattern, fk, grow, measure, analyze.

Angles are degrees at this boundary (switchable to radians for display);
all file formats are those defined in the formats module. Exit codes:
0 success, 1 parse error, 2 infeasible design, 3 missing data.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

from . import formats
from .errors import (DegenerateDataError, DegenerateGeometryError,
                     InfeasibleLinkError, InversionError, MissingMarkerError,
                     SingularityError, ValidationError, VinefabError)
from .fabrication import GapModel, compile_plan
from .geometry import DHChain, canonicalize_polyline, fk_chain, polyline_to_dh
from .growth import GrowthState, ObstacleScene, clearance, tip_pose_at
from .measurement import dh_errors, recover_dh
from .pattern import write_pattern
from .stats import analyze_table

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INFEASIBLE = 2
EXIT_MISSING_DATA = 3

# refuse to plan folds this close to the 180-degree singularity
MAX_PLAN_THETA_DEG = 175.0


@dataclass
class Project:
    chain: DHChain | None
    gap: GapModel
    scene: ObstacleScene | None
    out_dir: str
    degrees: bool


def _load_config(path):
    data = formats.load_json(path)
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: config must be a JSON object")
    base = os.path.dirname(os.path.abspath(path))

    def resolve(p):
        return p if os.path.isabs(p) else os.path.join(base, p)

    return data, resolve


def _chain_from_path(path, radius=None):
    if path.lower().endswith(".csv"):
        if radius is None:
            raise ValidationError(
                "a polyline chain source needs a radius (--radius or config "
                "radius_mm)")
        points = formats.read_polyline(path)
        canonical, _ = canonicalize_polyline(points)
        return polyline_to_dh(canonical, radius=radius)
    return formats.read_chain(path)


def _build_project(args, need_chain=True) -> Project:
    config = {}
    resolve = lambda p: p  # noqa: E731
    if args.config:
        config, resolve = _load_config(args.config)

    chain = None
    if need_chain:
        radius = args.radius if args.radius is not None else config.get("radius_mm")
        chain_sources = []
        if args.chain:
            chain_sources.append(("flag --chain", args.chain, False))
        if "chain" in config:
            chain_sources.append(("config chain", config["chain"], True))
        if len(chain_sources) != 1:
            raise ValidationError(
                "exactly one chain source required (either --chain or the "
                f"config 'chain' field); got {len(chain_sources)}")
        _, source, from_config = chain_sources[0]
        if isinstance(source, dict):
            chain = formats.chain_from_dict(source, context="config chain")
        else:
            path = resolve(source) if from_config else source
            chain = _chain_from_path(path, radius=radius)

    gap_cfg = config.get("gap", {})
    method = args.method or gap_cfg.get("method", "tape")
    d_g = args.d_g if args.d_g is not None else gap_cfg.get("d_g_mm")
    gap = GapModel.for_method(method, d_g=d_g)

    scene = None
    scene_path = args.scene or (resolve(config["scene"]) if "scene" in config else None)
    if scene_path:
        scene = formats.read_scene(scene_path)

    out_dir = args.out or config.get("out_dir", ".")
    os.makedirs(out_dir, exist_ok=True)

    units = config.get("units", "deg")
    degrees = not args.rad if (args.deg or args.rad) else units != "rad"

    return Project(chain=chain, gap=gap, scene=scene, out_dir=out_dir,
                   degrees=degrees)


def _angle_str(project, rad):
    if project.degrees:
        return f"{formats.fmt9(math.degrees(rad))} deg"
    return f"{formats.fmt9(rad)} rad"


def _out(project, name):
    return os.path.join(project.out_dir, name)


# ------------------------------------------------------------------ commands

def cmd_plan(project, args) -> int:
    for i, link in enumerate(project.chain.links, start=1):
        if abs(math.degrees(link.theta)) >= args.max_theta_deg:
            raise SingularityError(
                f"link {i}: joint angle {math.degrees(link.theta):.4g} deg is "
                f"within {180 - args.max_theta_deg:.4g} deg of the fold "
                "singularity at 180 deg")
    plan = compile_plan(project.chain, project.gap)
    formats.write_plan(plan, _out(project, "plan.json"))

    print(f"fabrication plan ({project.gap.method}, d_g = "
          f"{formats.fmt9(project.gap.d_g)} mm, radius = "
          f"{formats.fmt9(plan.radius)} mm)")
    print("joint  theta           s_tilde_mm    Z_mm          c_mm")
    for joint, link in zip(plan.joints, project.chain.links):
        print(f"{joint.index:>5}  {_angle_str(project, link.theta):<14}  "
              f"{formats.fmt9(joint.s_tilde):<12}  "
              f"{formats.fmt9(joint.axial_start):<12}  "
              f"{formats.fmt9(joint.circumferential)}")
    print("cyl    l_mm")
    for i, l in enumerate(plan.cylinders, start=1):
        print(f"{i:>5}  {formats.fmt9(l)}")
    print("step   arc_mm")
    for i, s in enumerate(plan.arc_offsets, start=1):
        print(f"{i:>5}  {formats.fmt9(s)}")
    print(f"total tube length: {formats.fmt9(plan.total_tube_length)} mm")
    return EXIT_OK


def cmd_pattern(project, args) -> int:
    plan = compile_plan(project.chain, project.gap)
    path = _out(project, "pattern.svg")
    write_pattern(plan, path)
    print(f"wrote {path} ({formats.fmt9(plan.circumference)} x "
          f"{formats.fmt9(plan.total_tube_length)} mm)")
    return EXIT_OK


def cmd_fk(project, args) -> int:
    frames = fk_chain(project.chain)
    path = _out(project, "fk_frames.csv")
    formats.write_fk_frames(frames, path)
    tip = frames[-1].translation
    print(f"tip: ({formats.fmt9(tip[0])}, {formats.fmt9(tip[1])}, "
          f"{formats.fmt9(tip[2])}) mm over {len(frames) - 1} links")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_grow(project, args) -> int:
    chain = project.chain
    total = chain.total_length
    if args.steps < 1:
        raise ValidationError(f"--steps must be >= 1, got {args.steps}")
    trace = []
    for i in range(args.steps + 1):
        everted = total * i / args.steps
        state = GrowthState(chain, everted)
        tip = tip_pose_at(state).translation
        clr = None
        if project.scene is not None and not project.scene.empty:
            result = clearance(state, project.scene, step=args.sweep_step)
            clr = result.clearance
        trace.append((everted, tip, clr))
    path = _out(project, "grow_trace.csv")
    formats.write_growth_trace(trace, path)
    print(f"wrote {path} ({args.steps + 1} rows, total {formats.fmt9(total)} mm)")
    if project.scene is not None and not project.scene.empty:
        final = min(t[2] for t in trace if t[2] is not None)
        print(f"worst clearance: {formats.fmt9(final)} mm")
    return EXIT_OK


def cmd_measure(project, args) -> int:
    records = formats.read_markers(args.markers)
    measured = recover_dh(records, phase=args.phase)
    rows = dh_errors(measured, project.chain)
    formats.write_measured(measured, _out(project, "measured_dh.json"))
    formats.write_errors(rows, _out(project, "dh_errors.csv"))
    worst = max(rows, key=lambda r: abs(r.error))
    print(f"recovered {len(measured.joint_thetas)} joints, "
          f"{len(measured.link_alphas)} twists, "
          f"{len(measured.link_lengths)} lengths ({args.phase})")
    unit = "deg" if worst.parameter in ("joint", "twist") else "mm"
    print(f"largest error: {worst.parameter} {worst.index}: "
          f"{formats.fmt9(worst.error)} {unit}")
    print(f"wrote {_out(project, 'measured_dh.json')} and "
          f"{_out(project, 'dh_errors.csv')}")
    return EXIT_OK


def cmd_analyze(project, args) -> int:
    table = formats.read_samples(args.samples)
    report = analyze_table(table)
    path = _out(project, "report.json")
    formats.write_json(report, path)
    print(f"analyzed {report['row_count']} rows across "
          f"{len(report['parameters'])} parameters")
    for notice in report["notices"]:
        print(f"notice: {notice}")
    for param, factors in report["parameters"].items():
        for factor, block in factors.items():
            omnibus = block.get("omnibus")
            if omnibus:
                print(f"{param}/{factor}: {omnibus['test']} p = "
                      f"{formats.fmt9(omnibus['p_value'])}")
            if block.get("pairwise"):
                for pair in block["pairwise"]:
                    if pair["significant"]:
                        print(f"  {pair['a']} vs {pair['b']}: p = "
                              f"{formats.fmt9(pair['p_value'])} {pair['stars']}")
    print(f"wrote {path}")
    return EXIT_OK


# -------------------------------------------------------------------- parser

def _add_common(sub):
    sub.add_argument("--config", help="project config JSON")
    sub.add_argument("--chain", help="chain JSON or polyline CSV")
    sub.add_argument("--radius", type=float,
                     help="body radius in mm (required for polyline chains)")
    sub.add_argument("--method", choices=("tape", "weld", "loop"),
                     help="fastening method (default tape)")
    sub.add_argument("--d-g", dest="d_g", type=float,
                     help="override gap distance d_g in mm")
    sub.add_argument("--scene", help="obstacle scene JSON")
    sub.add_argument("--out", help="output directory (default '.')")
    sub.add_argument("--seed", type=int, default=0,
                     help="seed for any randomized operation (reserved)")
    units = sub.add_mutually_exclusive_group()
    units.add_argument("--deg", action="store_true",
                       help="display angles in degrees (default)")
    units.add_argument("--rad", action="store_true",
                       help="display angles in radians")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vinefab",
        description="Plan, simulate, and verify preformed everting-tube "
                    "robots with discrete bends.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("plan", help="compile fabrication parameters")
    _add_common(p)
    p.add_argument("--max-theta-deg", type=float, default=MAX_PLAN_THETA_DEG,
                   help="reject joint angles at or beyond this magnitude")
    p.set_defaults(func=cmd_plan)

    p = subs.add_parser("pattern", help="write the unrolled flat pattern SVG")
    _add_common(p)
    p.set_defaults(func=cmd_pattern)

    p = subs.add_parser("fk", help="forward kinematics frames of the chain")
    _add_common(p)
    p.set_defaults(func=cmd_fk)

    p = subs.add_parser("grow", help="growth trace with optional clearance")
    _add_common(p)
    p.add_argument("--steps", type=int, default=100,
                   help="number of growth increments (default 100)")
    p.add_argument("--sweep-step", type=float, default=1.0,
                   help="centerline sampling step in mm (default 1)")
    p.set_defaults(func=cmd_grow)

    p = subs.add_parser("measure", help="recover DH parameters from markers")
    _add_common(p)
    p.add_argument("--markers", required=True, help="marker pose CSV")
    p.add_argument("--phase", choices=("pre", "post"), default="pre",
                   help="measurement phase label (default pre)")
    p.set_defaults(func=cmd_measure)

    p = subs.add_parser("analyze", help="statistical report from a sample CSV")
    _add_common(p)
    p.add_argument("--samples", required=True, help="long-format sample CSV")
    p.set_defaults(func=cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        project = _build_project(args, need_chain=args.command != "analyze")
        return args.func(project, args)
    except (SingularityError, InfeasibleLinkError, InversionError) as exc:
        print(f"infeasible design: {exc}", file=sys.stderr)
        if isinstance(exc, InfeasibleLinkError):
            print(f"minimum feasible link length: {exc.min_feasible:.9g} mm",
                  file=sys.stderr)
        return EXIT_INFEASIBLE
    except (MissingMarkerError, DegenerateGeometryError,
            DegenerateDataError) as exc:
        print(f"missing data: {exc}", file=sys.stderr)
        return EXIT_MISSING_DATA
    except (ValidationError, VinefabError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
