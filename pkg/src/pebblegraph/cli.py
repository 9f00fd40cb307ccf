"""Command-line entry points.

Exit codes: 0 success, 1 plan violation (validate), 2 usage or I/O error,
3 planning timeout, 4 infeasible input (invalid or unreachable arrangement).
Set PEBBLE_LOG to error, info or debug to control logging.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from . import bench
from .hypergraph import PlanningTimeout
from .plan import PlanFormatError, dump_plan, load_plan, replay
from .planner import PlannerConfig, plan_rearrangement
from .roadmap import RoadmapCacheError, build_roadmap, load_roadmap, save_roadmap
from .scene import InvalidArrangement, SceneError, load_scene_file
from .svg import storyboard

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_TIMEOUT, EXIT_INFEASIBLE = 0, 1, 2, 3, 4

log = logging.getLogger("pebblegraph")


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _setup_logging():
    level = os.environ.get("PEBBLE_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _load_scene(path):
    try:
        return load_scene_file(path)
    except InvalidArrangement as exc:
        raise CliError(f"{path}: {exc}", EXIT_INFEASIBLE) from None
    except SceneError as exc:
        raise CliError(f"{path}: {exc}") from None
    except OSError as exc:
        raise CliError(f"cannot read scene: {exc}") from None


def _write(path, text: str):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from None


def _roadmap_for(scene, args):
    if args.roadmap:
        try:
            return load_roadmap(Path(args.roadmap).read_text(), scene)
        except OSError as exc:
            raise CliError(f"cannot read roadmap: {exc}") from None
        except RoadmapCacheError as exc:
            raise CliError(f"{args.roadmap}: {exc}") from None
    log.info("no roadmap cache given; building one")
    return build_roadmap(scene, args.samples, args.neighbors, seed=args.roadmap_seed)


def cmd_precompute(args) -> int:
    scene = _load_scene(args.scene)
    t0 = time.perf_counter()
    rm = build_roadmap(scene, args.samples, args.neighbors, seed=args.roadmap_seed)
    _write(args.out, save_roadmap(rm))
    reachable = len(scene.poses) - len(rm.unreachable)
    print(f"roadmap: {len(rm.nodes)} vertices, {len(rm.edges)} edges, "
          f"{reachable}/{len(scene.poses)} poses reachable, {time.perf_counter() - t0:.2f} s")
    return EXIT_OK


def cmd_plan(args) -> int:
    if args.b < 1 or args.passes < 1:
        raise CliError("--b and --passes must be >= 1")
    scene = _load_scene(args.scene)
    rm = _roadmap_for(scene, args)
    cfg = PlannerConfig(b=args.b, time_limit=args.time_limit, seed=args.seed,
                        smooth_passes=args.passes)
    try:
        res = plan_rearrangement(scene, rm, cfg)
    except InvalidArrangement as exc:
        raise CliError(str(exc), EXIT_INFEASIBLE) from None
    except PlanningTimeout as exc:
        H = exc.hypergraph
        print(f"timeout: {exc}")
        print(f"hypernodes: {len(H.nodes)}  hyperedges: {len(H.edges)}  "
              f"iterations: {H.iterations}")
        return EXIT_TIMEOUT
    _write(args.out, dump_plan(res.plan))
    if args.svg:
        _write(args.svg, storyboard(scene, res.plan))
    H = res.hypergraph
    print(f"wall time: {res.wall_time:.3f} s")
    print(f"hypernodes: {len(H.nodes) if H else 0}  hyperedges: {len(H.edges) if H else 0}")
    print(f"moves: {len(res.raw.moves())} raw, {len(res.plan.moves())} smoothed")
    print(f"length: {res.raw.length:.4f} raw, {res.plan.length:.4f} smoothed")
    grasps = " ".join(f"{obj}:{n}" for obj, n in sorted(res.grasps.items()))
    print(f"grasps per object: {grasps}")
    return EXIT_OK


def cmd_validate(args) -> int:
    scene = _load_scene(args.scene)
    try:
        plan = load_plan(Path(args.plan).read_text())
    except OSError as exc:
        raise CliError(f"cannot read plan: {exc}") from None
    except PlanFormatError as exc:
        raise CliError(f"{args.plan}: {exc}") from None
    report = replay(scene, plan)
    if report.ok:
        print(f"ok: {len(plan.moves())} moves, length {plan.length:.4f}")
        return EXIT_OK
    print(f"violation at segment {report.segment}: {report.message}")
    return EXIT_VIOLATION


def cmd_bench(args) -> int:
    if min(args.k) < 1 or min(args.b) < 1 or args.trials < 1:
        raise CliError("--k, --b and --trials must be >= 1")
    cfg = bench.BenchConfig(ks=tuple(args.k), bs=tuple(args.b), trials=args.trials,
                            time_limit=args.time_limit, seed=args.seed,
                            samples_per_mode=args.samples, connection_neighbors=args.neighbors)

    def progress(row):
        log.info("%s k=%d b=%d trial=%d success=%s %ss", row["scene"], row["k"], row["b"],
                 row["trial"], row["success"], row["wall_time"])

    try:
        rows = bench.run_bench_dir(args.scene_dir, cfg, progress)
    except (OSError, SceneError) as exc:
        raise CliError(str(exc)) from None
    _write(args.out, bench.rows_to_csv(rows))
    print(bench.format_summary(bench.summarize(rows)))
    return EXIT_OK


def cmd_render(args) -> int:
    scene = _load_scene(args.scene)
    try:
        plan = load_plan(Path(args.plan).read_text())
    except (OSError, PlanFormatError) as exc:
        raise CliError(f"cannot read plan: {exc}") from None
    _write(args.out, storyboard(scene, plan))
    return EXIT_OK


def _roadmap_flags(p):
    p.add_argument("--samples", type=int, default=250, help="roadmap samples per mode")
    p.add_argument("--neighbors", type=int, default=8, help="roadmap connection neighbours")
    p.add_argument("--roadmap-seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pebblegraph",
                                     description="Planar rearrangement planning with pebble graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("precompute", help="build and cache the manipulation roadmap")
    p.add_argument("scene")
    p.add_argument("--out", required=True)
    _roadmap_flags(p)
    p.set_defaults(func=cmd_precompute)

    p = sub.add_parser("plan", help="solve the scene's start -> goal problem")
    p.add_argument("scene")
    p.add_argument("--roadmap", help="roadmap cache from precompute")
    p.add_argument("--b", type=int, default=2, help="blank poses per RPG")
    p.add_argument("--time-limit", type=float, default=60.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--passes", type=int, default=1, help="smoothing passes")
    p.add_argument("--out", required=True)
    p.add_argument("--svg")
    _roadmap_flags(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("validate", help="replay a plan against the scene")
    p.add_argument("scene")
    p.add_argument("plan")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="run the (k, b) benchmark grid")
    p.add_argument("scene_dir")
    p.add_argument("--k", type=int, nargs="+", default=[2, 3, 4])
    p.add_argument("--b", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--time-limit", type=float, default=60.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--samples", type=int, default=250)
    p.add_argument("--neighbors", type=int, default=8)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("render", help="draw a plan as an SVG storyboard")
    p.add_argument("scene")
    p.add_argument("plan")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
