"""Manipulation plans: segment records, the JSON plan format and replay checking.

A plan is a sequence of (reach, carry, retract) triples, one per object
move. Reach and retract are Transit segments, carry is a Transfer segment,
and modes only switch at the pose being grasped or released.

Plan file schema::

    {
      "format": "pebblegraph-plan", "version": 1,
      "start": [pose ids], "goal": [pose ids],
      "segments": [
        {"mode": "transit", "action": "reach", "waypoints": [[x, y], ...],
         "moved": [from_pose, to_pose]},
        ...
      ]
    }
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable

from .geometry import (
    Disc,
    Point,
    capsule_in_bounds,
    distance,
    path_length,
    swept_disc_hits_disc,
    swept_disc_hits_polygon,
)
from .minconflict import SegmentedPath
from .roadmap import Mode, Roadmap
from .scene import SceneSpec

PLAN_FORMAT = "pebblegraph-plan"
PLAN_VERSION = 1
POINT_TOL = 1e-7


class Action(str, enum.Enum):
    REACH = "reach"
    CARRY = "carry"
    RETRACT = "retract"


ACTION_CYCLE = (Action.REACH, Action.CARRY, Action.RETRACT)
ACTION_MODE = {Action.REACH: Mode.TRANSIT, Action.CARRY: Mode.TRANSFER,
               Action.RETRACT: Mode.TRANSIT}


class PlanFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Segment:
    mode: Mode
    action: Action
    waypoints: tuple[Point, ...]
    moved: tuple[int, int]

    @property
    def length(self) -> float:
        return path_length(self.waypoints)


@dataclass
class ManipulationPlan:
    start: frozenset
    goal: frozenset
    segments: list[Segment] = field(default_factory=list)

    @property
    def length(self) -> float:
        return sum(s.length for s in self.segments)

    def moves(self) -> list[tuple[int, int]]:
        return [s.moved for s in self.segments if s.action is Action.CARRY]

    def triples(self) -> list[list[Segment]]:
        return [self.segments[i:i + 3] for i in range(0, len(self.segments), 3)]

    def arrangements(self) -> list[frozenset]:
        """Arrangement in force before each move, plus the final one."""
        cur = frozenset(self.start)
        out = [cur]
        for a, b in self.moves():
            cur = (cur - {a}) | {b}
            out.append(cur)
        return out

    def object_labels(self) -> list[int]:
        """Induced label of the object displaced by each move."""
        where = {p: i for i, p in enumerate(sorted(self.start))}
        labels = []
        for a, b in self.moves():
            lab = where.pop(a)
            where[b] = lab
            labels.append(lab)
        return labels

    def grasp_counts(self) -> dict[int, int]:
        counts = {i: 0 for i in range(len(self.start))}
        for lab in self.object_labels():
            counts[lab] += 1
        return counts


def segments_for_move(rm: Roadmap, path: SegmentedPath) -> list[Segment]:
    def pts(ids):
        return tuple(rm.nodes[i].config for i in ids)

    moved = (path.source, path.target)
    return [
        Segment(Mode.TRANSIT, Action.REACH, pts(path.reach), moved),
        Segment(Mode.TRANSFER, Action.CARRY, pts(path.transfer), moved),
        Segment(Mode.TRANSIT, Action.RETRACT, pts(path.retract), moved),
    ]


def plan_to_dict(plan: ManipulationPlan) -> dict:
    return {
        "format": PLAN_FORMAT,
        "version": PLAN_VERSION,
        "start": sorted(plan.start),
        "goal": sorted(plan.goal),
        "segments": [
            {
                "mode": s.mode.value,
                "action": s.action.value,
                "waypoints": [[p.x, p.y] for p in s.waypoints],
                "moved": list(s.moved),
            }
            for s in plan.segments
        ],
    }


def dump_plan(plan: ManipulationPlan) -> str:
    return json.dumps(plan_to_dict(plan), indent=1)


def load_plan(text: str) -> ManipulationPlan:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlanFormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict) or data.get("format") != PLAN_FORMAT:
        raise PlanFormatError("not a pebblegraph plan file")
    try:
        segs = [
            Segment(Mode(s["mode"]), Action(s["action"]),
                    tuple(Point(float(x), float(y)) for x, y in s["waypoints"]),
                    (int(s["moved"][0]), int(s["moved"][1])))
            for s in data["segments"]
        ]
        return ManipulationPlan(frozenset(data["start"]), frozenset(data["goal"]), segs)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise PlanFormatError(f"malformed plan: {exc}") from None


@dataclass
class ReplayReport:
    ok: bool
    segment: int | None = None
    message: str = ""
    final: frozenset = frozenset()

    def __bool__(self):
        return self.ok


def _same(a: Point, b: Point) -> bool:
    return distance(a, b) <= POINT_TOL


def sweep_violation(scene: SceneSpec, a: Point, b: Point, radius: float,
                    objects: Iterable[int], ignore: int | None = None) -> str | None:
    """First reason the capsule a->b of `radius` is not free, or None."""
    if not capsule_in_bounds(a, b, radius, scene.bounds):
        return "leaves the workspace"
    for i, ob in enumerate(scene.obstacles):
        if swept_disc_hits_polygon(a, b, radius, ob):
            return f"hits obstacle {i}"
    for pid in objects:
        if pid == ignore:
            continue
        if swept_disc_hits_disc(a, b, radius, Disc(scene.position(pid), scene.object_radius)):
            return f"hits object at pose {pid}"
    return None


def segment_violation(scene: SceneSpec, seg: Segment, arrangement: frozenset,
                      lo: int = 0, hi: int | None = None) -> str | None:
    """Check the waypoint pairs lo..hi of a segment against a world state.

    Reach may enclose its target object on its final waypoint pair only and
    retract may leave its released object on its first pair only.
    """
    wps = seg.waypoints
    hi = len(wps) - 1 if hi is None else hi
    src, dst = seg.moved
    if seg.action is Action.CARRY:
        radius, objects = scene.transfer_radius, arrangement - {src}
    else:
        radius, objects = scene.gripper_radius, arrangement
    if len(wps) == 1:
        return sweep_violation(scene, wps[0], wps[0], radius, objects,
                               src if seg.action is Action.REACH else dst)
    for i in range(lo, hi):
        ignore = None
        if seg.action is Action.REACH and i == len(wps) - 2:
            ignore = src
        elif seg.action is Action.RETRACT and i == 0:
            ignore = dst
        why = sweep_violation(scene, wps[i], wps[i + 1], radius, objects, ignore)
        if why:
            return f"waypoint {i}->{i + 1} {why}"
    return None


def shortcut_free(scene: SceneSpec, seg: Segment, arrangement: frozenset, i: int, j: int) -> bool:
    """Would replacing waypoints i..j of seg by a straight move be free?"""
    wps = seg.waypoints
    src, dst = seg.moved
    if seg.action is Action.CARRY:
        radius, objects = scene.transfer_radius, arrangement - {src}
    else:
        radius, objects = scene.gripper_radius, arrangement
    ignore = None
    if seg.action is Action.REACH and j == len(wps) - 1:
        ignore = src
    elif seg.action is Action.RETRACT and i == 0:
        ignore = dst
    return sweep_violation(scene, wps[i], wps[j], radius, objects, ignore) is None


def replay(scene: SceneSpec, plan: ManipulationPlan, start: Iterable[int] | None = None,
           goal: Iterable[int] | None = None) -> ReplayReport:
    """Simulate a plan against the scene geometry and arrangement evolution."""
    cur = frozenset(scene.start if start is None else start)
    goal = frozenset(scene.goal if goal is None else goal)
    segs = plan.segments
    if len(segs) % 3:
        return ReplayReport(False, len(segs) - 1, "plan does not consist of whole moves", cur)
    pos = scene.safe_config
    for idx, seg in enumerate(segs):
        expected = ACTION_CYCLE[idx % 3]
        if seg.action is not expected:
            return ReplayReport(False, idx, f"expected a {expected.value} segment", cur)
        if seg.mode is not ACTION_MODE[seg.action]:
            return ReplayReport(False, idx, f"{seg.action.value} must be {ACTION_MODE[seg.action].value}", cur)
        if not seg.waypoints:
            return ReplayReport(False, idx, "segment has no waypoints", cur)
        if idx % 3 and seg.moved != segs[idx - 1].moved:
            return ReplayReport(False, idx, "move records disagree within one move", cur)
        if not _same(seg.waypoints[0], pos):
            return ReplayReport(False, idx, "discontinuous with the previous segment", cur)
        src, dst = seg.moved
        try:
            src_pos, dst_pos = scene.position(src), scene.position(dst)
        except KeyError as exc:
            return ReplayReport(False, idx, str(exc), cur)
        if seg.action is Action.REACH:
            if src not in cur:
                return ReplayReport(False, idx, f"no object to grasp at pose {src}", cur)
            if not _same(seg.waypoints[-1], src_pos):
                return ReplayReport(False, idx, "reach does not end at the grasped pose", cur)
        elif seg.action is Action.CARRY:
            if not (_same(seg.waypoints[0], src_pos) and _same(seg.waypoints[-1], dst_pos)):
                return ReplayReport(False, idx, "carry does not join the source and target poses", cur)
            if dst in cur and dst != src:
                return ReplayReport(False, idx, f"target pose {dst} is occupied", cur)
        else:
            if not _same(seg.waypoints[0], dst_pos):
                return ReplayReport(False, idx, "retract does not start at the placed pose", cur)
        why = segment_violation(scene, seg, cur)
        if why:
            return ReplayReport(False, idx, why, cur)
        if seg.action is Action.CARRY:
            cur = (cur - {src}) | {dst}
        pos = seg.waypoints[-1]
    if segs and not _same(pos, scene.safe_config):
        return ReplayReport(False, len(segs) - 1, "plan does not end at the safe configuration", cur)
    if cur != goal:
        return ReplayReport(False, len(segs) - 1 if segs else None,
                            f"final arrangement {sorted(cur)} differs from goal {sorted(goal)}", cur)
    return ReplayReport(True, None, "ok", cur)

