"""Workspace, stable-pose library, arrangements and the JSON scene format.

Scene file schema (all lengths in meters)::

    {
      "workspace": [xmin, ymin, xmax, ymax],
      "obstacles": [[[x, y], [x, y], [x, y], ...], ...],
      "object_radius": 0.04,
      "gripper_radius": 0.03,
      "poses": [{"id": 0, "x": 0.4, "y": 0.1, "theta": 0.0}, ...],
      "safe": [x, y],
      "start": [pose ids],
      "goal": [pose ids],
      "k": 2
    }
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .geometry import (
    EPS,
    Disc,
    Point,
    Polygon,
    capsule_in_bounds,
    disc_disc_overlap,
    swept_disc_hits_polygon,
)

Arrangement = frozenset  # of pose ids; objects are unlabeled


class SceneError(ValueError):
    """Scene text failed to parse or violates a scene invariant."""


class InvalidArrangement(SceneError):
    """The start or goal arrangement is not a legal arrangement of the scene."""


class SamplingExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class Pose:
    id: int
    position: Point
    orientation: float = 0.0


@dataclass(frozen=True)
class SceneSpec:
    bounds: tuple[float, float, float, float]
    obstacles: tuple[Polygon, ...]
    object_radius: float
    gripper_radius: float
    poses: tuple[Pose, ...]
    safe_config: Point
    start: Arrangement
    goal: Arrangement
    k: int
    _index: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {p.id: p for p in self.poses})

    @property
    def transfer_radius(self) -> float:
        """Radius of the gripper-plus-carried-object footprint."""
        return max(self.gripper_radius, self.object_radius)

    def pose(self, pid: int) -> Pose:
        try:
            return self._index[pid]
        except KeyError:
            raise KeyError(f"unknown pose id {pid}") from None

    def position(self, pid: int) -> Point:
        return self.pose(pid).position

    @property
    def pose_ids(self) -> list[int]:
        return [p.id for p in self.poses]

    def object_disc(self, pid: int) -> Disc:
        return Disc(self.position(pid), self.object_radius)

    def with_problem(self, start: Iterable[int], goal: Iterable[int]) -> "SceneSpec":
        start, goal = frozenset(start), frozenset(goal)
        scene = SceneSpec(
            self.bounds, self.obstacles, self.object_radius, self.gripper_radius,
            self.poses, self.safe_config, start, goal, len(start),
        )
        validate_scene(scene)
        return scene


def disc_is_free(scene: SceneSpec, center: Point, radius: float, closed: bool = True) -> bool:
    """Static check for a disc at rest.

    closed=True treats obstacle contact as collision (gripper footprints);
    closed=False lets a resting object touch obstacles.
    """
    if not capsule_in_bounds(center, center, radius, scene.bounds):
        return False
    r = radius if closed else radius - 2 * EPS
    return not any(swept_disc_hits_polygon(center, center, r, ob) for ob in scene.obstacles)


def pose_is_free(scene: SceneSpec, pid: int) -> bool:
    return disc_is_free(scene, scene.position(pid), scene.object_radius, closed=False)


def is_valid_arrangement(scene: SceneSpec, arrangement: Iterable[int]) -> bool:
    ids = sorted(set(arrangement))
    for pid in ids:
        scene.pose(pid)
    if not all(pose_is_free(scene, pid) for pid in ids):
        return False
    discs = [scene.object_disc(pid) for pid in ids]
    for i in range(len(discs)):
        for j in range(i + 1, len(discs)):
            if disc_disc_overlap(discs[i], discs[j]):
                return False
    return True


def validate_scene(scene: SceneSpec) -> None:
    xmin, ymin, xmax, ymax = scene.bounds
    if not (xmin < xmax and ymin < ymax):
        raise SceneError("workspace bounds are empty")
    if not (scene.object_radius > 0 and scene.gripper_radius > 0):
        raise SceneError("object_radius and gripper_radius must be positive")
    ids = [p.id for p in scene.poses]
    if len(set(ids)) != len(ids):
        raise SceneError("duplicate pose ids")
    for p in scene.poses:
        if not pose_is_free(scene, p.id):
            raise SceneError(f"pose {p.id} is not collision-free")
    for name, arr in (("start", scene.start), ("goal", scene.goal)):
        unknown = [pid for pid in arr if pid not in scene._index]
        if unknown:
            raise InvalidArrangement(f"{name} arrangement uses unknown pose ids {sorted(unknown)}")
        if len(arr) != scene.k:
            raise InvalidArrangement(f"{name} arrangement has {len(arr)} poses, expected k={scene.k}")
        for pid in arr:
            if not pose_is_free(scene, pid):
                raise InvalidArrangement(f"{name} arrangement overlaps obstacle at pose {pid}")
        if not is_valid_arrangement(scene, arr):
            raise InvalidArrangement(f"{name} arrangement has overlapping objects")
    if not disc_is_free(scene, scene.safe_config, scene.gripper_radius):
        raise SceneError("safe configuration collides with the workspace")
    safe_disc = Disc(scene.safe_config, scene.gripper_radius)
    for p in scene.poses:
        if disc_disc_overlap(safe_disc, scene.object_disc(p.id)):
            raise SceneError(f"safe configuration overlaps pose {p.id}")


def _num(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneError(f"field '{where}': expected a number, got {value!r}")
    if not math.isfinite(value):
        raise SceneError(f"field '{where}': must be finite")
    return float(value)


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SceneError(f"field '{where}': expected an integer, got {value!r}")
    return value


def _point(value, where: str) -> Point:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise SceneError(f"field '{where}': expected [x, y]")
    return Point(_num(value[0], f"{where}[0]"), _num(value[1], f"{where}[1]"))


def scene_from_dict(data: dict) -> SceneSpec:
    if not isinstance(data, dict):
        raise SceneError("scene must be a JSON object")
    required = ("workspace", "obstacles", "object_radius", "gripper_radius",
                "poses", "safe", "start", "goal", "k")
    for key in required:
        if key not in data:
            raise SceneError(f"field '{key}': missing")
    ws = data["workspace"]
    if not isinstance(ws, list) or len(ws) != 4:
        raise SceneError("field 'workspace': expected [xmin, ymin, xmax, ymax]")
    bounds = tuple(_num(v, f"workspace[{i}]") for i, v in enumerate(ws))
    if not isinstance(data["obstacles"], list):
        raise SceneError("field 'obstacles': expected a list of polygons")
    obstacles = []
    for i, poly in enumerate(data["obstacles"]):
        if not isinstance(poly, list):
            raise SceneError(f"field 'obstacles[{i}]': expected a vertex list")
        verts = [_point(v, f"obstacles[{i}][{j}]") for j, v in enumerate(poly)]
        try:
            obstacles.append(Polygon(tuple(verts)))
        except ValueError as exc:
            raise SceneError(f"field 'obstacles[{i}]': {exc}") from None
    if not isinstance(data["poses"], list):
        raise SceneError("field 'poses': expected a list")
    poses = []
    for i, p in enumerate(data["poses"]):
        if not isinstance(p, dict):
            raise SceneError(f"field 'poses[{i}]': expected an object")
        for key in ("id", "x", "y"):
            if key not in p:
                raise SceneError(f"field 'poses[{i}].{key}': missing")
        poses.append(Pose(
            _int(p["id"], f"poses[{i}].id"),
            Point(_num(p["x"], f"poses[{i}].x"), _num(p["y"], f"poses[{i}].y")),
            _num(p.get("theta", 0.0), f"poses[{i}].theta"),
        ))
    for key in ("start", "goal"):
        if not isinstance(data[key], list):
            raise SceneError(f"field '{key}': expected a list of pose ids")
    start = [_int(v, f"start[{i}]") for i, v in enumerate(data["start"])]
    goal = [_int(v, f"goal[{i}]") for i, v in enumerate(data["goal"])]
    for name, arr in (("start", start), ("goal", goal)):
        if len(set(arr)) != len(arr):
            raise SceneError(f"field '{name}': repeated pose id")
    scene = SceneSpec(
        bounds=bounds,
        obstacles=tuple(obstacles),
        object_radius=_num(data["object_radius"], "object_radius"),
        gripper_radius=_num(data["gripper_radius"], "gripper_radius"),
        poses=tuple(poses),
        safe_config=_point(data["safe"], "safe"),
        start=frozenset(start),
        goal=frozenset(goal),
        k=_int(data["k"], "k"),
    )
    validate_scene(scene)
    return scene


def load_scene(text: str) -> SceneSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return scene_from_dict(data)


def load_scene_file(path) -> SceneSpec:
    with open(path) as fh:
        return load_scene(fh.read())


def scene_to_dict(scene: SceneSpec) -> dict:
    return {
        "workspace": list(scene.bounds),
        "obstacles": [[list(v) for v in ob.vertices] for ob in scene.obstacles],
        "object_radius": scene.object_radius,
        "gripper_radius": scene.gripper_radius,
        "poses": [
            {"id": p.id, "x": p.position.x, "y": p.position.y, "theta": p.orientation}
            for p in scene.poses
        ],
        "safe": list(scene.safe_config),
        "start": sorted(scene.start),
        "goal": sorted(scene.goal),
        "k": scene.k,
    }


def dump_scene(scene: SceneSpec) -> str:
    """Scene JSON with one obstacle or pose per line."""
    lines = []
    for key, value in scene_to_dict(scene).items():
        if key in ("obstacles", "poses") and value:
            items = ",\n".join("    " + json.dumps(v) for v in value)
            lines.append(f'  "{key}": [\n{items}\n  ]')
        else:
            lines.append(f'  "{key}": {json.dumps(value)}')
    return "{\n" + ",\n".join(lines) + "\n}\n"


def scene_hash(scene: SceneSpec) -> str:
    """Hash of the geometry that a roadmap depends on (start/goal excluded)."""
    d = scene_to_dict(scene)
    for key in ("start", "goal", "k"):
        d.pop(key)
    blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def sample_pose_library(bounds, obstacles, object_radius: float, count: int, seed=None,
                        attempts_per_pose: int = 1000, first_id: int = 0) -> list[Pose]:
    """Sample `count` individually collision-free poses.

    Poses may overlap one another. Raises SamplingExhausted after
    `attempts_per_pose * count` rejected draws.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    xmin, ymin, xmax, ymax = bounds
    probe = SceneSpec(tuple(bounds), tuple(obstacles), object_radius, object_radius, (),
                      Point(0.0, 0.0), frozenset(), frozenset(), 0)
    poses: list[Pose] = []
    budget = attempts_per_pose * count
    lo_x, hi_x = xmin + object_radius, xmax - object_radius
    lo_y, hi_y = ymin + object_radius, ymax - object_radius
    if lo_x > hi_x or lo_y > hi_y:
        raise SamplingExhausted("workspace too small for the object")
    while len(poses) < count:
        if budget <= 0:
            raise SamplingExhausted(
                f"found only {len(poses)} of {count} poses after {attempts_per_pose * count} attempts")
        budget -= 1
        c = Point(float(rng.uniform(lo_x, hi_x)), float(rng.uniform(lo_y, hi_y)))
        if disc_is_free(probe, c, object_radius, closed=False):
            theta = float(rng.uniform(-math.pi, math.pi))
            poses.append(Pose(first_id + len(poses), c, theta))
    return poses
