"""Offline two-mode manipulation roadmap with per-edge pose conflicts.

Node layout per reachable library pose ``p``:

* a Transit transition node at ``p`` (the gripper closed around the object),
  connected only to its approach node and its Transfer twin;
* a Transfer transition node at ``p``, connected to nearby Transfer nodes;
* a Transit approach node at standoff ``gripper_radius + object_radius``
  from ``p``, pointing towards the safe configuration where possible.

Free samples in each mode and the safe node fill in the rest. Edges store
the set of library poses whose object disc the swept footprint would
penetrate, minus the anchor poses of the edge's own endpoints.
"""
from __future__ import annotations

import enum
import heapq
import json
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import (
    EPS,
    Point,
    capsule_in_bounds,
    distance,
    point_segment_distance,
    swept_disc_hits_polygon,
)
from .scene import SceneSpec, scene_hash

log = logging.getLogger(__name__)

FORMAT_VERSION = 1


class Mode(str, enum.Enum):
    TRANSIT = "transit"
    TRANSFER = "transfer"


class RoadmapCacheError(ValueError):
    pass


class UnreachablePoseError(LookupError):
    """A pose has no transition pair in the roadmap."""


@dataclass(frozen=True)
class RoadmapNode:
    id: int
    config: Point
    mode: Mode
    anchor_pose: int | None = None
    kind: str = "sample"  # safe | sample | approach | transition


@dataclass(frozen=True)
class RoadmapEdge:
    u: int
    v: int
    length: float
    conflicts: frozenset = frozenset()


@dataclass
class Roadmap:
    nodes: list[RoadmapNode]
    edges: list[RoadmapEdge]
    safe_node: int
    transitions: dict[int, tuple[int, int]]
    unreachable: frozenset
    scene_hash: str = ""
    params: dict = field(default_factory=dict)
    _adj: dict = field(default=None, init=False, repr=False, compare=False)
    _dist_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _search_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def edge_mode(self, e: RoadmapEdge) -> Mode | None:
        """Mode of an edge; None for the transit/transfer switch edge."""
        mu, mv = self.nodes[e.u].mode, self.nodes[e.v].mode
        return mu if mu == mv else None

    def adjacency(self, mode: Mode) -> list[list[tuple[int, int]]]:
        """Per-node list of (neighbor, edge index) for same-mode edges."""
        if self._adj is None:
            adj = {m: [[] for _ in self.nodes] for m in Mode}
            for i, e in enumerate(self.edges):
                m = self.edge_mode(e)
                if m is None:
                    continue
                adj[m][e.u].append((e.v, i))
                adj[m][e.v].append((e.u, i))
            self._adj = adj
        return self._adj[mode]

    def distances_to(self, mode: Mode, target: int) -> list[float]:
        """Conflict-free shortest distances to `target` within one mode."""
        key = (mode, target)
        if key not in self._dist_cache:
            adj = self.adjacency(mode)
            dist = [math.inf] * len(self.nodes)
            dist[target] = 0.0
            heap = [(0.0, target)]
            while heap:
                d, u = heapq.heappop(heap)
                if d > dist[u]:
                    continue
                for v, ei in adj[u]:
                    nd = d + self.edges[ei].length
                    if nd < dist[v]:
                        dist[v] = nd
                        heapq.heappush(heap, (nd, v))
            self._dist_cache[key] = dist
        return self._dist_cache[key]

    def transition(self, pid: int) -> tuple[int, int]:
        try:
            return self.transitions[pid]
        except KeyError:
            raise UnreachablePoseError(f"pose {pid} has no transition pair") from None

    def transit_components(self) -> list[set[int]]:
        return _components(len(self.nodes), [
            (e.u, e.v) for e in self.edges if self.edge_mode(e) is Mode.TRANSIT])

    def structure(self):
        """Hashable summary used for equality/round-trip checks."""
        return (
            tuple(self.nodes),
            tuple(self.edges),
            self.safe_node,
            tuple(sorted(self.transitions.items())),
            self.unreachable,
            self.scene_hash,
        )


def _components(n: int, pairs) -> list[set[int]]:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, set[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), set()).add(i)
    return list(groups.values())


CORRIDOR_STEPS = 4
APPROACH_FAN = 16  # half-circle split into this many steps


def _static_free(scene: SceneSpec, a: Point, b: Point, radius: float) -> bool:
    if not capsule_in_bounds(a, b, radius, scene.bounds):
        return False
    return not any(swept_disc_hits_polygon(a, b, radius, ob) for ob in scene.obstacles)


def _approach_directions(scene: SceneSpec, p: Point):
    dx, dy = scene.safe_config.x - p.x, scene.safe_config.y - p.y
    base = math.atan2(dy, dx)
    # safe-facing first, then alternatives fanning out
    for step in range(APPROACH_FAN + 1):
        for sign in ((1,) if step in (0, APPROACH_FAN) else (1, -1)):
            a = base + sign * step * math.pi / APPROACH_FAN
            yield math.cos(a), math.sin(a)


def _sample_free(scene: SceneSpec, rng, radius: float, count: int) -> list[Point]:
    xmin, ymin, xmax, ymax = scene.bounds
    pts = []
    budget = 100 * max(count, 1)
    while len(pts) < count and budget > 0:
        budget -= 1
        c = Point(float(rng.uniform(xmin + radius, xmax - radius)),
                  float(rng.uniform(ymin + radius, ymax - radius)))
        if _static_free(scene, c, c, radius):
            pts.append(c)
    return pts


def build_roadmap(scene: SceneSpec, samples_per_mode: int = 250, connection_neighbors: int = 8,
                  seed=0, annotate: bool = True) -> Roadmap:
    if samples_per_mode < 0:
        raise ValueError("samples_per_mode must be >= 0")
    if connection_neighbors < 1:
        raise ValueError("connection_neighbors must be >= 1")
    rng = np.random.default_rng(seed)
    g, o, rt = scene.gripper_radius, scene.object_radius, scene.transfer_radius
    nodes: list[RoadmapNode] = []

    def add(config, mode, anchor=None, kind="sample"):
        nodes.append(RoadmapNode(len(nodes), Point(float(config[0]), float(config[1])),
                                 mode, anchor, kind))
        return nodes[-1].id

    safe = add(scene.safe_config, Mode.TRANSIT, kind="safe")
    transitions: dict[int, tuple[int, int]] = {}
    approach_of: dict[int, int] = {}
    corridor = []
    standoff = g + o
    for pose in scene.poses:
        c = pose.position
        if not (_static_free(scene, c, c, g) and _static_free(scene, c, c, rt)):
            continue
        approach = None
        for ux, uy in _approach_directions(scene, c):
            a = Point(c.x + ux * standoff, c.y + uy * standoff)
            if _static_free(scene, a, c, g):
                approach = a
                break
        if approach is None:
            continue
        t = add(c, Mode.TRANSIT, pose.id, "transition")
        tt = add(c, Mode.TRANSFER, pose.id, "transition")
        approach_of[pose.id] = add(approach, Mode.TRANSIT, pose.id, "approach")
        transitions[pose.id] = (t, tt)
        corridor.append((c, ux, uy))

    # Extra samples along each approach ray so that narrow pockets get connected.
    for c, ux, uy in corridor:
        for mode, radius, first in ((Mode.TRANSIT, g, 2), (Mode.TRANSFER, rt, 1)):
            prev = c
            for m in range(first, CORRIDOR_STEPS + 1):
                pt = Point(c.x + ux * standoff * m, c.y + uy * standoff * m)
                if not _static_free(scene, prev, pt, radius):
                    break
                add(pt, mode)
                prev = pt

    for pt in _sample_free(scene, rng, g, samples_per_mode):
        add(pt, Mode.TRANSIT)
    for pt in _sample_free(scene, rng, rt, samples_per_mode):
        add(pt, Mode.TRANSFER)

    edge_pairs: dict[tuple[int, int], float] = {}
    for pid, (t, tt) in transitions.items():
        edge_pairs[(t, tt)] = 0.0
        a = approach_of[pid]
        edge_pairs[(min(a, t), max(a, t))] = distance(nodes[a].config, nodes[t].config)

    def own_object_clear(n: RoadmapNode, other: Point) -> bool:
        # Non-radial edges leaving an approach node must not dip into its own object.
        if n.kind != "approach":
            return True
        pc = scene.position(n.anchor_pose)
        return point_segment_distance(pc, n.config, other) >= g + o - EPS

    for mode, radius in ((Mode.TRANSIT, g), (Mode.TRANSFER, rt)):
        if mode is Mode.TRANSIT:
            ids = [n.id for n in nodes if n.mode is mode and n.kind != "transition"]
        else:
            ids = [n.id for n in nodes if n.mode is mode]
        if len(ids) < 2:
            continue
        pts = np.array([nodes[i].config for i in ids])
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
        np.fill_diagonal(d, np.inf)
        kk = min(connection_neighbors, len(ids) - 1)
        order = np.argsort(d, axis=1, kind="stable")[:, :kk]
        for row, i in enumerate(ids):
            for col in order[row]:
                j = ids[int(col)]
                key = (min(i, j), max(i, j))
                if key in edge_pairs:
                    continue
                a, b = nodes[i], nodes[j]
                if not _static_free(scene, a.config, b.config, radius):
                    continue
                if not (own_object_clear(a, b.config) and own_object_clear(b, a.config)):
                    continue
                edge_pairs[key] = float(d[row, col])

    edges = [RoadmapEdge(u, v, length) for (u, v), length in sorted(edge_pairs.items())]
    rm = Roadmap(nodes, edges, safe, transitions, frozenset(), scene_hash(scene), {
        "samples_per_mode": samples_per_mode,
        "connection_neighbors": connection_neighbors,
        "seed": seed if seed is None or isinstance(seed, int) else str(seed),
    })
    comp_of_safe = next(c for c in rm.transit_components() if safe in c)
    unreachable = {p.id for p in scene.poses if p.id not in transitions}
    unreachable |= {pid for pid, (t, _) in transitions.items() if t not in comp_of_safe}
    rm.unreachable = frozenset(unreachable)
    if annotate:
        rm = annotate_conflicts(rm, scene)
    log.info("roadmap: %d nodes, %d edges, %d/%d poses reachable", len(nodes), len(edges),
             len(scene.poses) - len(unreachable), len(scene.poses))
    return rm


def edge_radius(rm: Roadmap, scene: SceneSpec, e: RoadmapEdge) -> float:
    mode = rm.edge_mode(e)
    return scene.gripper_radius if mode is Mode.TRANSIT else scene.transfer_radius


def annotate_conflicts(rm: Roadmap, scene: SceneSpec) -> Roadmap:
    """Return a copy of `rm` whose edges carry their pose-conflict sets."""
    ids = np.array(scene.pose_ids, dtype=int)
    if len(ids) == 0:
        return replace(rm, edges=[replace(e, conflicts=frozenset()) for e in rm.edges])
    centers = np.array([scene.position(int(i)) for i in ids], dtype=float)
    o = scene.object_radius
    new_edges = []
    for e in rm.edges:
        a = np.array(rm.nodes[e.u].config)
        b = np.array(rm.nodes[e.v].config)
        ab = b - a
        L2 = float(ab @ ab)
        if L2 == 0.0:
            closest = np.broadcast_to(a, centers.shape)
        else:
            t = np.clip(((centers - a) @ ab) / L2, 0.0, 1.0)
            closest = a + t[:, None] * ab
        dist = np.sqrt(((centers - closest) ** 2).sum(axis=1))
        hit = dist < edge_radius(rm, scene, e) + o - EPS
        anchors = {rm.nodes[e.u].anchor_pose, rm.nodes[e.v].anchor_pose}
        conflicts = frozenset(int(p) for p in ids[hit] if int(p) not in anchors)
        new_edges.append(replace(e, conflicts=conflicts))
    out = replace(rm, edges=new_edges)
    return out


def save_roadmap(rm: Roadmap) -> str:
    payload = {
        "format_version": FORMAT_VERSION,
        "scene_hash": rm.scene_hash,
        "params": rm.params,
        "safe_node": rm.safe_node,
        "nodes": [[n.id, n.config.x, n.config.y, n.mode.value, n.anchor_pose, n.kind]
                  for n in rm.nodes],
        "edges": [[e.u, e.v, e.length, sorted(e.conflicts)] for e in rm.edges],
        "transitions": [[pid, t, tt] for pid, (t, tt) in sorted(rm.transitions.items())],
        "unreachable": sorted(rm.unreachable),
    }
    return json.dumps(payload, separators=(",", ":"))


def load_roadmap(content: str, scene: SceneSpec) -> Roadmap:
    try:
        data = json.loads(content)
    except json.JSONDecodeError as exc:
        raise RoadmapCacheError(f"corrupt roadmap cache: {exc}") from None
    if not isinstance(data, dict) or "format_version" not in data:
        raise RoadmapCacheError("corrupt roadmap cache: missing header")
    if data["format_version"] != FORMAT_VERSION:
        raise RoadmapCacheError(f"unsupported roadmap format {data['format_version']}")
    expected = scene_hash(scene)
    if data.get("scene_hash") != expected:
        raise RoadmapCacheError("scene hash mismatch: roadmap was built for a different scene")
    try:
        nodes = [RoadmapNode(int(i), Point(float(x), float(y)), Mode(m), a, kind)
                 for i, x, y, m, a, kind in data["nodes"]]
        edges = [RoadmapEdge(int(u), int(v), float(length), frozenset(int(c) for c in cs))
                 for u, v, length, cs in data["edges"]]
        transitions = {int(p): (int(t), int(tt)) for p, t, tt in data["transitions"]}
        rm = Roadmap(nodes, edges, int(data["safe_node"]), transitions,
                     frozenset(int(p) for p in data["unreachable"]), data["scene_hash"],
                     dict(data.get("params", {})))
    except (KeyError, TypeError, ValueError) as exc:
        raise RoadmapCacheError(f"corrupt roadmap cache: {exc}") from None
    if any(n.id != i for i, n in enumerate(rm.nodes)):
        raise RoadmapCacheError("corrupt roadmap cache: node ids out of order")
    return rm
