"""Pumped arrangements and rearrangement pebble graphs (RPGs).

An RPG edge (p, p') stores a manipulation path that moves an object between
the two poses while every other pose of the pumped arrangement is occupied.
Pairs whose cheapest path is blocked only by some of those poses become
constrained edges instead.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .geometry import disc_disc_overlap
from .minconflict import SegmentedPath, min_conflict_path
from .roadmap import Roadmap
from .scene import SamplingExhausted, SceneSpec


@dataclass(frozen=True)
class PumpedArrangement:
    poses: frozenset
    k: int
    b: int

    @property
    def n(self) -> int:
        return len(self.poses)


@dataclass(frozen=True)
class ConstrainedEdge:
    source: int
    target: int
    path: SegmentedPath
    constraints: frozenset

    @property
    def pair(self) -> tuple[int, int]:
        return (self.source, self.target)


@dataclass
class Rpg:
    id: int
    nodes: frozenset
    edges: dict[tuple[int, int], SegmentedPath | None]
    components: list[frozenset] = field(default_factory=list)
    component_of: dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_edges(cls, rpg_id: int, nodes: Iterable[int], edges) -> "Rpg":
        """Build an RPG; `edges` is a mapping or an iterable of pose pairs."""
        nodes = frozenset(nodes)
        if not isinstance(edges, dict):
            edges = {pair: None for pair in edges}
        norm = {}
        for (a, b), path in edges.items():
            if a == b or a not in nodes or b not in nodes:
                raise ValueError(f"bad RPG edge {(a, b)}")
            norm[(min(a, b), max(a, b))] = path
        rpg = cls(rpg_id, nodes, norm)
        rpg.components = _connected_components(nodes, norm)
        rpg.component_of = {p: i for i, comp in enumerate(rpg.components) for p in comp}
        return rpg

    def neighbors(self, p: int) -> list[int]:
        adj = self._adjacency()
        return adj[p]

    def _adjacency(self) -> dict[int, list[int]]:
        if not hasattr(self, "_adj_cache"):
            adj = {p: [] for p in self.nodes}
            for a, b in self.edges:
                adj[a].append(b)
                adj[b].append(a)
            for p in adj:
                adj[p].sort()
            self._adj_cache = adj
        return self._adj_cache

    def path_for(self, source: int, target: int) -> SegmentedPath | None:
        path = self.edges[(min(source, target), max(source, target))]
        return None if path is None else path.oriented(source, target)


def _connected_components(nodes, edges) -> list[frozenset]:
    adj = {p: set() for p in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen: set[int] = set()
    comps = []
    for p in sorted(nodes):
        if p in seen:
            continue
        stack, comp = [p], set()
        seen.add(p)
        while stack:
            u = stack.pop()
            comp.add(u)
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        comps.append(frozenset(comp))
    # sorted by smallest member, which the loop above already guarantees
    return comps


def components(rpg: Rpg) -> list[frozenset]:
    return list(rpg.components)


def _compatible(scene: SceneSpec, a: int, b: int) -> bool:
    return not disc_disc_overlap(scene.object_disc(a), scene.object_disc(b))


def sample_pumped_arrangement(scene: SceneSpec, k: int, b: int, seed_arrangement=None,
                              rng=None, poses: Iterable[int] | None = None,
                              attempts: int = 100) -> PumpedArrangement:
    """Draw k + b pairwise non-overlapping poses, containing the seed if given.

    Each attempt is a randomized greedy fill; SamplingExhausted is raised
    after `attempts` failed fills.
    """
    if k < 1 or b < 1:
        raise ValueError("k and b must both be >= 1")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    seed = frozenset(seed_arrangement or ())
    if seed and len(seed) != k:
        raise ValueError(f"seed arrangement must have {k} poses")
    pool = sorted(set(poses) if poses is not None else set(scene.pose_ids))
    for x, y in itertools.combinations(sorted(seed), 2):
        if not _compatible(scene, x, y):
            raise ValueError("seed arrangement has overlapping poses")
    n = k + b
    for _ in range(attempts):
        chosen = list(seed)
        order = rng.permutation(len(pool))
        for idx in order:
            pid = pool[int(idx)]
            if pid in seed:
                continue
            if all(_compatible(scene, pid, c) for c in chosen):
                chosen.append(pid)
                if len(chosen) == n:
                    return PumpedArrangement(frozenset(chosen), k, b)
        if len(chosen) < n and not seed and len(chosen) == len(pool):
            break
    raise SamplingExhausted(f"could not find {n} compatible poses after {attempts} attempts")


def create_rpg(rm: Roadmap, pumped: PumpedArrangement | Iterable[int],
               rpg_id: int = 0) -> tuple[Rpg, list[ConstrainedEdge]]:
    poses = pumped.poses if isinstance(pumped, PumpedArrangement) else frozenset(pumped)
    edges: dict[tuple[int, int], SegmentedPath] = {}
    constrained: list[ConstrainedEdge] = []
    for p, q in itertools.combinations(sorted(poses), 2):
        path = min_conflict_path(rm, p, q, poses - {p, q})
        if path is None:
            continue
        if path.conflict_set:
            constrained.append(ConstrainedEdge(p, q, path, path.conflict_set))
        else:
            edges[(p, q)] = path
    return Rpg.from_edges(rpg_id, poses, edges), constrained
