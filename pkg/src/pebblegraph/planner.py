"""One-call planning pipeline: grow, query, smooth, validate."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .hypergraph import Hypergraph, PlanningTimeout, answer_query, grow_hypergraph
from .plan import ManipulationPlan, replay
from .roadmap import Roadmap
from .scene import InvalidArrangement, SceneSpec, is_valid_arrangement
from .smoothing import smooth


class InfeasibleProblem(InvalidArrangement):
    """The start or goal arrangement is unusable (overlap, unknown or unreachable pose)."""


@dataclass
class PlannerConfig:
    b: int = 2
    time_limit: float | None = 60.0
    seed: int = 0
    smooth_passes: int = 1
    max_iterations: int | None = None


@dataclass
class PlanResult:
    raw: ManipulationPlan
    plan: ManipulationPlan
    hypergraph: Hypergraph | None
    wall_time: float
    history: list = field(default_factory=list)

    @property
    def grasps(self) -> dict[int, int]:
        return self.plan.grasp_counts()

    @property
    def max_grasps(self) -> int:
        return max(self.grasps.values(), default=0)


def check_problem(scene: SceneSpec, rm: Roadmap) -> None:
    if len(scene.start) != len(scene.goal):
        raise InfeasibleProblem("start and goal hold different numbers of objects")
    for name, arr in (("start", scene.start), ("goal", scene.goal)):
        if not is_valid_arrangement(scene, arr):
            raise InfeasibleProblem(f"{name} arrangement is not valid")
        bad = sorted(p for p in arr if p in rm.unreachable or p not in rm.transitions)
        if bad and frozenset(scene.start) != frozenset(scene.goal):
            raise InfeasibleProblem(f"{name} poses {bad} cannot be grasped from the roadmap")


def plan_rearrangement(scene: SceneSpec, rm: Roadmap, config: PlannerConfig | None = None,
                       **overrides) -> PlanResult:
    """Solve scene.start -> scene.goal. Raises PlanningTimeout or InfeasibleProblem."""
    cfg = config or PlannerConfig()
    for key, value in overrides.items():
        setattr(cfg, key, value)
    t0 = time.perf_counter()
    check_problem(scene, rm)
    start, goal = frozenset(scene.start), frozenset(scene.goal)
    if start == goal:
        empty = ManipulationPlan(start, goal)
        return PlanResult(empty, empty, None, time.perf_counter() - t0)
    H = grow_hypergraph(scene, rm, len(start), cfg.b, time_budget=cfg.time_limit,
                        rng=np.random.default_rng(cfg.seed), max_iterations=cfg.max_iterations)
    raw = answer_query(H, rm)
    report = replay(scene, raw)
    assert report.ok, f"planner produced an invalid plan: {report.message}"
    history: list = []
    plan = smooth(raw, scene, rm, passes=cfg.smooth_passes, history=history)
    return PlanResult(raw, plan, H, time.perf_counter() - t0, history)


__all__ = ["InfeasibleProblem", "PlannerConfig", "PlanResult", "PlanningTimeout",
           "check_problem", "plan_rearrangement"]
