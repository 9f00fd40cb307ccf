"""Seeded benchmark grid over (k, b) with CSV output."""
from __future__ import annotations

import csv
import io
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from statistics import mean

import numpy as np

from .generate import random_arrangement
from .hypergraph import PlanningTimeout, reachable_poses
from .plan import replay
from .planner import PlannerConfig, plan_rearrangement
from .roadmap import Roadmap, build_roadmap
from .scene import SceneSpec, load_scene_file

log = logging.getLogger(__name__)

COLUMNS = ["scene", "k", "b", "trial", "seed", "success", "wall_time", "raw_length",
           "smoothed_length", "hypernodes", "hyperedges", "max_grasps_per_object"]


@dataclass
class BenchConfig:
    ks: tuple[int, ...] = (2, 3, 4)
    bs: tuple[int, ...] = (1, 2, 3)
    trials: int = 10
    time_limit: float = 60.0
    seed: int = 0
    samples_per_mode: int = 250
    connection_neighbors: int = 8


def trial_seed(seed: int, k: int, b: int, trial: int) -> int:
    """Per-trial seed; independent of b so every b sees the same problems."""
    return int(np.random.SeedSequence([seed, k, trial]).generate_state(1)[0])


def trial_problem(scene: SceneSpec, rm: Roadmap, k: int, tseed: int) -> SceneSpec | None:
    rng = np.random.default_rng(tseed)
    pool = reachable_poses(rm, scene)
    start = random_arrangement(scene, k, rng, pool)
    goal = random_arrangement(scene, k, rng, pool)
    if start is None or goal is None:
        return None
    return scene.with_problem(start, goal)


def run_trial(name: str, scene: SceneSpec, rm: Roadmap, k: int, b: int, trial: int,
              cfg: BenchConfig) -> dict:
    tseed = trial_seed(cfg.seed, k, b, trial)
    row = {"scene": name, "k": k, "b": b, "trial": trial, "seed": tseed, "success": 0,
           "wall_time": "", "raw_length": "", "smoothed_length": "", "hypernodes": 0,
           "hyperedges": 0, "max_grasps_per_object": ""}
    problem = trial_problem(scene, rm, k, tseed)
    if problem is None:
        return row
    t0 = time.perf_counter()
    try:
        res = plan_rearrangement(problem, rm, PlannerConfig(b=b, time_limit=cfg.time_limit,
                                                            seed=tseed))
    except PlanningTimeout as exc:
        row.update(wall_time=round(time.perf_counter() - t0, 4),
                   hypernodes=len(exc.hypergraph.nodes), hyperedges=len(exc.hypergraph.edges))
        return row
    assert replay(problem, res.plan), "benchmark produced an invalid plan"
    H = res.hypergraph
    row.update(success=1, wall_time=round(res.wall_time, 4),
               raw_length=round(res.raw.length, 4), smoothed_length=round(res.plan.length, 4),
               hypernodes=len(H.nodes) if H else 0, hyperedges=len(H.edges) if H else 0,
               max_grasps_per_object=res.max_grasps)
    return row


def scene_files(scene_dir) -> list[Path]:
    return sorted(p for p in Path(scene_dir).glob("*.json") if not p.name.endswith(".roadmap.json"))


def run_bench(scenes: dict[str, SceneSpec], cfg: BenchConfig, progress=None) -> list[dict]:
    rows = []
    for name, scene in sorted(scenes.items()):
        rm = build_roadmap(scene, cfg.samples_per_mode, cfg.connection_neighbors, seed=cfg.seed)
        for k in cfg.ks:
            for b in cfg.bs:
                for trial in range(cfg.trials):
                    row = run_trial(name, scene, rm, k, b, trial, cfg)
                    rows.append(row)
                    if progress:
                        progress(row)
    rows.sort(key=lambda r: (r["scene"], r["k"], r["b"], r["trial"]))
    return rows


def run_bench_dir(scene_dir, cfg: BenchConfig, progress=None) -> list[dict]:
    scenes = {p.stem: load_scene_file(p) for p in scene_files(scene_dir)}
    if not scenes:
        raise FileNotFoundError(f"no scene files in {scene_dir}")
    return run_bench(scenes, cfg, progress)


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def summarize(rows: list[dict]) -> dict[tuple[int, int], dict]:
    """Per (k, b): success ratio and mean wall time (timeouts count at their time)."""
    out = {}
    keys = sorted({(r["k"], r["b"]) for r in rows})
    for key in keys:
        sel = [r for r in rows if (r["k"], r["b"]) == key]
        times = [float(r["wall_time"]) for r in sel if r["wall_time"] != ""]
        out[key] = {
            "trials": len(sel),
            "success": sum(int(r["success"]) for r in sel) / len(sel),
            "mean_time": mean(times) if times else float("nan"),
        }
    return out


def format_summary(summary: dict) -> str:
    lines = ["k  b  success  mean_time_s"]
    for (k, b), s in summary.items():
        lines.append(f"{k}  {b}  {s['success']:.2f}     {s['mean_time']:.3f}")
    return "\n".join(lines)
