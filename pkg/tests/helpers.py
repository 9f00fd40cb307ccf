"""Shared test helpers."""
from pebblegraph.plan import segment_violation, segments_for_move


def replay_free(scene, rm, path, occupied):
    """Replay a move with objects at `occupied` (source included before the carry)."""
    reach, carry, retract = segments_for_move(rm, path)
    before = frozenset(occupied) | {path.source}
    after = (before - {path.source}) | {path.target}
    return (segment_violation(scene, reach, before) is None
            and segment_violation(scene, carry, before) is None
            and segment_violation(scene, retract, after) is None)


def plan_from_moves(scene, rm, moves, start=None):
    """Chain conflict-free roadmap paths for a list of (from, to) pose moves."""
    from pebblegraph.minconflict import min_conflict_path
    from pebblegraph.plan import ManipulationPlan

    cur = frozenset(scene.start if start is None else start)
    start = cur
    segs = []
    for a, b in moves:
        path = min_conflict_path(rm, a, b, cur - {a})
        assert path is not None and not path.conflict_set, (a, b)
        segs.extend(segments_for_move(rm, path))
        cur = (cur - {a}) | {b}
    return ManipulationPlan(start, cur, segs)
