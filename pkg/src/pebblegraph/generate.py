"""Procedural scenes and problem instances for tests and benchmarks."""
from __future__ import annotations

from collections import deque

import numpy as np

from .geometry import Point, Polygon, distance
from .scene import Pose, SceneSpec, disc_is_free, sample_pose_library, validate_scene


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def box(x0: float, y0: float, x1: float, y1: float) -> Polygon:
    return Polygon((Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)))


def random_arrangement(scene: SceneSpec, k: int, rng=None, poses=None,
                       attempts: int = 200) -> frozenset | None:
    """k pairwise non-overlapping poses drawn at random, or None."""
    rng = _rng(rng)
    pool = sorted(poses if poses is not None else scene.pose_ids)
    sep = 2 * scene.object_radius
    for _ in range(attempts):
        chosen: list[int] = []
        for idx in rng.permutation(len(pool)):
            pid = pool[int(idx)]
            c = scene.position(pid)
            if all(distance(c, scene.position(q)) >= sep for q in chosen):
                chosen.append(pid)
                if len(chosen) == k:
                    return frozenset(chosen)
    return None


def random_scene(seed=None, n_poses: int = 14, n_obstacles: int = 3, k: int = 2,
                 object_radius: float = 0.04, gripper_radius: float = 0.03) -> SceneSpec:
    """Unit-square scene with random boxes, a safe pose near the top and random poses.

    start and goal are random arrangements over all poses; callers that need
    a solvable instance should redraw them over roadmap-reachable poses.
    """
    rng = _rng(seed)
    bounds = (0.0, 0.0, 1.0, 1.0)
    safe = Point(0.5, 0.92)
    obstacles = []
    while len(obstacles) < n_obstacles:
        w, h = rng.uniform(0.04, 0.25, size=2)
        x0 = rng.uniform(0.0, 1.0 - w)
        y0 = rng.uniform(0.0, 0.78 - h)
        obstacles.append(box(float(x0), float(y0), float(x0 + w), float(y0 + h)))
    clear = object_radius + gripper_radius + 0.01
    poses: list[Pose] = []
    while len(poses) < n_poses:
        cand = sample_pose_library(bounds, obstacles, object_radius, 1, seed=rng)[0]
        if distance(cand.position, safe) > clear:
            poses.append(Pose(len(poses), cand.position, cand.orientation))
    probe = SceneSpec(bounds, tuple(obstacles), object_radius, gripper_radius, tuple(poses),
                      safe, frozenset(), frozenset(), k)
    start = random_arrangement(probe, k, rng) or frozenset()
    goal = random_arrangement(probe, k, rng) or frozenset()
    if len(start) != k or len(goal) != k:
        return random_scene(rng, n_poses + 2, n_obstacles, k, object_radius, gripper_radius)
    scene = SceneSpec(bounds, tuple(obstacles), object_radius, gripper_radius, tuple(poses),
                      safe, start, goal, k)
    assert disc_is_free(scene, safe, gripper_radius)
    validate_scene(scene)
    return scene


def shelf_scene(bays: int = 4, rows: int = 2, k: int = 4, buffers: int = 4, wall: float = 0.03,
                object_radius: float = 0.04, gripper_radius: float = 0.03) -> SceneSpec:
    """Open-fronted shelf of `bays` bays, each two poses wide and `rows` deep.

    Buffer poses sit on the floor beside the shelf, alternating left and
    right. Rear poses (low y) can only be reached through the pose in front.
    """
    pitch = 2 * object_radius + 0.02
    bay_w = 2 * pitch
    margin = 0.15
    width = bays * (bay_w + wall) + wall
    xmax = round(width + 2 * margin, 4)
    depth = 0.06 + rows * 0.10
    obstacles = []
    for i in range(bays + 1):
        x0 = margin + i * (bay_w + wall)
        obstacles.append(box(round(x0, 4), 0.0, round(x0 + wall, 4), depth))
    poses = []
    for i in range(bays):
        xb = margin + wall + i * (bay_w + wall)
        for r in range(rows):
            for c in range(2):
                x = xb + pitch * (c + 0.5)
                poses.append(Pose(len(poses), Point(round(x, 4), round(0.10 + 0.10 * r, 4))))
    for j in range(buffers):
        x = margin / 2 if j % 2 == 0 else xmax - margin / 2
        poses.append(Pose(len(poses), Point(round(x, 4), round(0.2 + 0.15 * (j // 2), 4))))
    ids = [p.id for p in poses]
    start = frozenset(ids[:k])
    goal = frozenset(ids[2 * bays * rows - k:2 * bays * rows])
    scene = SceneSpec((0.0, 0.0, xmax, 1.0), tuple(obstacles), object_radius, gripper_radius,
                      tuple(poses), Point(xmax / 2, 0.85), start, goal, k)
    validate_scene(scene)
    return scene



def solvable(scene: SceneSpec, rm, max_states: int = 50_000) -> bool | None:
    """Exact search over arrangements using conflict-free single moves.

    A move p -> q is allowed when the roadmap has a path with no conflicts
    against the other occupied poses. Returns None if the state budget runs
    out before the question is settled.
    """
    from .hypergraph import reachable_poses
    from .minconflict import min_conflict_path
    from .scene import is_valid_arrangement

    pool = reachable_poses(rm, scene)
    start, goal = frozenset(scene.start), frozenset(scene.goal)
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if cur == goal:
            return True
        for p in sorted(cur):
            for q in pool:
                nxt = (cur - {p}) | {q}
                if q in cur or nxt in seen or not is_valid_arrangement(scene, nxt):
                    continue
                path = min_conflict_path(rm, p, q, cur - {p})
                if path is not None and not path.conflict_set:
                    if len(seen) >= max_states:
                        return None
                    seen.add(nxt)
                    queue.append(nxt)
    return False


def random_instance(seed, k: int, n_poses: int = 14, n_obstacles: int = 3,
                    samples_per_mode: int = 250, require_solvable: bool = True):
    """Random scene plus roadmap, start and goal drawn over roadmap-reachable poses."""
    from .hypergraph import reachable_poses
    from .roadmap import build_roadmap

    rng = _rng(seed)
    while True:
        scene = random_scene(rng, n_poses=n_poses, n_obstacles=n_obstacles, k=k)
        rm = build_roadmap(scene, samples_per_mode, seed=int(rng.integers(2**31)))
        pool = reachable_poses(rm, scene)
        start = random_arrangement(scene, k, rng, pool)
        goal = random_arrangement(scene, k, rng, pool)
        if start is None or goal is None or start == goal:
            continue
        scene = scene.with_problem(start, goal)
        if not require_solvable or solvable(scene, rm):
            return scene, rm
