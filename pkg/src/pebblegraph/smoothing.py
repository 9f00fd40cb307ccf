"""Post-processing of manipulation plans.

Phase 1 fuses back-to-back moves of the same object into one carry. Phase 2
shortcuts waypoints inside each segment. Phase 3 drops intermediate
placements: an object parked at a pose and later moved on is taken straight
to its later destination when both the direct move and the moves in between
stay collision-free. Path length is total gripper waypoint arc length; no
phase ever increases it.
"""
from __future__ import annotations

import logging

from .minconflict import min_conflict_path
from .plan import (
    Action,
    ManipulationPlan,
    Segment,
    replay,
    segments_for_move,
    shortcut_free,
    sweep_violation,
)
from .roadmap import Roadmap, UnreachablePoseError
from .scene import SceneSpec

log = logging.getLogger(__name__)


def _with_moved(seg: Segment, moved) -> Segment:
    return Segment(seg.mode, seg.action, seg.waypoints, moved)


def smooth_phase1(plan: ManipulationPlan) -> ManipulationPlan:
    triples = [list(t) for t in plan.triples()]
    out: list[list[Segment]] = []
    for t in triples:
        if out and out[-1][1].moved[1] == t[1].moved[0]:
            prev = out.pop()
            a, c = prev[1].moved[0], t[1].moved[1]
            carry = Segment(prev[1].mode, Action.CARRY,
                            prev[1].waypoints + t[1].waypoints[1:], (a, c))
            merged = [_with_moved(prev[0], (a, c)), carry, _with_moved(t[2], (a, c))]
            if a == c:
                # the object came back where it started; nothing to do
                continue
            out.append(merged)
        else:
            out.append(t)
    return ManipulationPlan(plan.start, plan.goal, [s for t in out for s in t])


def _shortcut_segment(scene: SceneSpec, seg: Segment, arrangement: frozenset) -> Segment:
    wps = list(seg.waypoints)
    i = 0
    while i < len(wps) - 2:
        for j in range(len(wps) - 1, i + 1, -1):
            probe = Segment(seg.mode, seg.action, tuple(wps), seg.moved)
            if shortcut_free(scene, probe, arrangement, i, j):
                del wps[i + 1:j]
                break
        i += 1
    return Segment(seg.mode, seg.action, tuple(wps), seg.moved)


def smooth_phase2(plan: ManipulationPlan, scene: SceneSpec,
                  timeline: list[frozenset] | None = None) -> ManipulationPlan:
    """Straight-line shortcuts inside each reach, carry and retract segment.

    `timeline` is the arrangement before each move followed by the final
    one, as returned by ManipulationPlan.arrangements().
    """
    timeline = plan.arrangements() if timeline is None else timeline
    segs = []
    for m, triple in enumerate(plan.triples()):
        before, after = timeline[m], timeline[m + 1]
        reach, carry, retract = triple
        segs.append(_shortcut_segment(scene, reach, before))
        segs.append(_shortcut_segment(scene, carry, before))
        segs.append(_shortcut_segment(scene, retract, after))
    return ManipulationPlan(plan.start, plan.goal, segs)


def shortcut_junctions(plan: ManipulationPlan, scene: SceneSpec) -> ManipulationPlan:
    """Shortcut across a retract and the following reach (skipping the safe pose)."""
    segs = list(plan.segments)
    arrs = plan.arrangements()
    for m in range(len(arrs) - 2):
        r_idx, q_idx = 3 * m + 2, 3 * m + 3
        retract, reach = segs[r_idx], segs[q_idx]
        world = arrs[m + 1]
        W = list(retract.waypoints) + list(reach.waypoints[1:])
        s = len(retract.waypoints) - 1
        done = False
        for i in range(0, s):
            # never shortcut into the final grasp point; that pair belongs to the reach
            for j in range(len(W) - 2, s, -1):
                ignore = retract.moved[1] if i == 0 else None
                if sweep_violation(scene, W[i], W[j], scene.gripper_radius, world, ignore) is None:
                    segs[r_idx] = Segment(retract.mode, retract.action,
                                          tuple(W[:i + 1] + [W[j]]), retract.moved)
                    segs[q_idx] = Segment(reach.mode, reach.action, tuple(W[j:]), reach.moved)
                    done = True
                    break
            if done:
                break
    return ManipulationPlan(plan.start, plan.goal, segs)


def smooth_phase3(plan: ManipulationPlan, scene: SceneSpec, rm: Roadmap) -> ManipulationPlan:
    """Remove intermediate placements of an object where conditions allow."""
    tried: set = set()
    while True:
        changed = False
        moves = plan.moves()
        labels = plan.object_labels()
        arrs = plan.arrangements()
        triples = plan.triples()
        # nearest pairs first, earliest first
        pairs = []
        for m1 in range(len(moves)):
            for m2 in range(m1 + 1, len(moves)):
                if labels[m2] == labels[m1]:
                    pairs.append((m2 - m1, m1, m2))
                    break
        for _, m1, m2 in sorted(pairs):
            src, mid = moves[m1]
            dst = moves[m2][1]
            key = (tuple(moves), m1, m2)
            if key in tried:
                continue
            tried.add(key)
            between = triples[m1 + 1:m2]
            if any(dst in t[1].moved for t in between):
                continue
            if src == dst:
                new_move: list[Segment] = []
            else:
                if dst in arrs[m1]:
                    continue
                try:
                    path = min_conflict_path(rm, src, dst, arrs[m1] - {src})
                except (UnreachablePoseError, ValueError):
                    continue
                if path is None or path.conflict_set:
                    continue
                new_move = segments_for_move(rm, path)
            segs = [s for t in triples[:m1] for s in t] + new_move
            segs += [s for t in between for s in t]
            segs += [s for t in triples[m2 + 1:] for s in t]
            candidate = ManipulationPlan(plan.start, plan.goal, segs)
            if candidate.length > plan.length:
                continue
            if not replay(scene, candidate, plan.start, plan.goal):
                continue
            log.debug("phase 3: moves %d and %d fused (%s -> %s)", m1, m2, src, dst)
            plan = candidate
            changed = True
            break
        if not changed:
            return plan


def smooth(plan: ManipulationPlan, scene: SceneSpec, rm: Roadmap, passes: int = 1,
           history: list | None = None) -> ManipulationPlan:
    """Phases 1-3 per pass, then one final whole-trajectory shortcut pass."""
    if passes < 1:
        raise ValueError("passes must be >= 1")
    if history is not None:
        history.append(("input", plan.length))

    def step(name, new):
        nonlocal plan
        if new.length <= plan.length + 1e-12:
            plan = new
        if history is not None:
            history.append((name, plan.length))

    for _ in range(passes):
        step("phase1", smooth_phase1(plan))
        step("phase2", smooth_phase2(plan, scene))
        step("phase3", smooth_phase3(plan, scene, rm))
    step("final", smooth_phase2(shortcut_junctions(plan, scene), scene))
    return plan
