"""Hypernodes (RPG + signature), their connections, growth and query answering."""
from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .minconflict import SegmentedPath
from .pebbles import Move, Signature, enumerate_signatures, signature_of, solve_pebble_problem
from .plan import ManipulationPlan, segments_for_move
from .roadmap import Roadmap
from .rpg import ConstrainedEdge, PumpedArrangement, Rpg, create_rpg, sample_pumped_arrangement
from .scene import SamplingExhausted, SceneSpec

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Hypernode:
    id: int
    rpg_id: int
    signature: Signature


@dataclass(frozen=True)
class Hyperedge:
    u: int
    v: int
    kind: str  # "cross" (undirected) or "sibling" (u -> v)
    handoff: frozenset | None = None
    edge: ConstrainedEdge | None = None
    pre: frozenset | None = None
    post: frozenset | None = None

    def other(self, n: int) -> int:
        return self.v if n == self.u else self.u


class PlanningTimeout(RuntimeError):
    def __init__(self, message: str, hypergraph: "Hypergraph"):
        super().__init__(message)
        self.hypergraph = hypergraph


@dataclass
class Hypergraph:
    k: int
    start: frozenset
    goal: frozenset
    rpgs: dict[int, Rpg] = field(default_factory=dict)
    constrained: dict[int, list[ConstrainedEdge]] = field(default_factory=dict)
    nodes: list[Hypernode] = field(default_factory=list)
    edges: list[Hyperedge] = field(default_factory=list)
    out_edges: dict[int, list[int]] = field(default_factory=dict)
    in_edges: dict[int, list[int]] = field(default_factory=dict)
    by_rpg: dict[int, list[int]] = field(default_factory=dict)
    pose_index: dict[int, set[int]] = field(default_factory=dict)
    start_id: int | None = None
    goal_id: int | None = None
    start_ids: set[int] = field(default_factory=set)
    goal_ids: set[int] = field(default_factory=set)
    iterations: int = 0

    def rpg_of(self, node: Hypernode | int) -> Rpg:
        if isinstance(node, int):
            node = self.nodes[node]
        return self.rpgs[node.rpg_id]

    def add_edge(self, e: Hyperedge) -> Hyperedge:
        idx = len(self.edges)
        self.edges.append(e)
        self.out_edges.setdefault(e.u, []).append(idx)
        self.in_edges.setdefault(e.v, []).append(idx)
        if e.kind == "cross":
            self.out_edges.setdefault(e.v, []).append(idx)
            self.in_edges.setdefault(e.u, []).append(idx)
        return e

    def _holds(self, node: Hypernode, arrangement: frozenset) -> bool:
        rpg = self.rpgs[node.rpg_id]
        return arrangement <= rpg.nodes and signature_of(rpg, arrangement) == node.signature

    def register(self, node: Hypernode) -> None:
        self.out_edges.setdefault(node.id, [])
        self.in_edges.setdefault(node.id, [])
        if self._holds(node, self.start):
            self.start_ids.add(node.id)
        if self._holds(node, self.goal):
            self.goal_ids.add(node.id)

    def forward_reach(self, sources: Iterable[int]) -> dict[int, tuple[int, int] | None]:
        """BFS over traversable hyperedges; maps node -> (previous node, edge)."""
        prev: dict[int, tuple[int, int] | None] = {}
        queue = deque()
        for s in sorted(sources):
            prev[s] = None
            queue.append(s)
        while queue:
            u = queue.popleft()
            for ei in self.out_edges.get(u, ()):
                v = self.edges[ei].other(u)
                if v not in prev:
                    prev[v] = (u, ei)
                    queue.append(v)
        return prev

    def backward_reach(self, sinks: Iterable[int]) -> set[int]:
        seen = set(sinks)
        queue = deque(sorted(seen))
        while queue:
            v = queue.popleft()
            for ei in self.in_edges.get(v, ()):
                u = self.edges[ei].other(v)
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        return seen

    def find_path(self) -> tuple[list[int], list[int]] | None:
        """Fewest-hyperedge path from any start node to any goal node."""
        prev = self.forward_reach(self.start_ids)
        hits = [g for g in sorted(self.goal_ids) if g in prev]
        if not hits:
            return None
        # BFS order: the first goal discovered is the closest one
        order = {n: i for i, n in enumerate(prev)}
        target = min(hits, key=order.get)
        nodes, edges = [target], []
        while prev[nodes[-1]] is not None:
            u, ei = prev[nodes[-1]]
            nodes.append(u)
            edges.append(ei)
        return nodes[::-1], edges[::-1]


def _handoff(H: Hypergraph, v: Hypernode, u: Hypernode) -> frozenset | None:
    rv, ru = H.rpgs[v.rpg_id], H.rpgs[u.rpg_id]
    shared = rv.nodes & ru.nodes
    if len(shared) < H.k:
        return None
    classes: dict[tuple[int, int], list[int]] = {}
    for p in sorted(shared):
        classes.setdefault((rv.component_of[p], ru.component_of[p]), []).append(p)
    keys = sorted(classes)
    need_v = list(v.signature)
    need_u = list(u.signature)
    # quick reject: each component's quota must fit in its shared poses
    for need, idx in ((need_v, 0), (need_u, 1)):
        avail = [0] * len(need)
        for key in keys:
            avail[key[idx]] += len(classes[key])
        if any(n > a for n, a in zip(need, avail)):
            return None
    chosen: list[int] = []

    def rec(i: int) -> bool:
        if i == len(keys):
            return not any(need_v) and not any(need_u)
        cv, cu = keys[i]
        top = min(len(classes[keys[i]]), need_v[cv], need_u[cu])
        for c in range(top, -1, -1):
            need_v[cv] -= c
            need_u[cu] -= c
            chosen.append(c)
            if rec(i + 1):
                return True
            chosen.pop()
            need_v[cv] += c
            need_u[cu] += c
        return False

    if not rec(0):
        return None
    handoff = set()
    for key, c in zip(keys, chosen):
        handoff.update(classes[key][:c])
    return frozenset(handoff)


def connect_node(H: Hypergraph, v: Hypernode, u: Hypernode) -> Hyperedge | None:
    """Cross-RPG edge when some k shared poses fit both signatures."""
    if v.rpg_id == u.rpg_id:
        raise ValueError("connect_node joins hypernodes of different RPGs")
    handoff = _handoff(H, v, u)
    if handoff is None:
        return None
    e = Hyperedge(v.id, u.id, "cross", handoff=handoff)
    assert H._holds(v, handoff) and H._holds(u, handoff)
    return H.add_edge(e)


def sibling_move(rpg: Rpg, sig: Signature, ce: ConstrainedEdge):
    """Witness (pre, post, new signature) for moving along ce under sig, or None."""
    s, t = ce.source, ce.target
    cs, ct = rpg.component_of[s], rpg.component_of[t]
    if cs == ct:
        return None
    forced_empty = {t} | set(ce.constraints)
    empty_per = [0] * len(rpg.components)
    for p in forced_empty:
        empty_per[rpg.component_of[p]] += 1
    for c, comp in enumerate(rpg.components):
        lo = 1 if c == cs else 0
        if not lo <= sig[c] <= len(comp) - empty_per[c]:
            return None
    pre = set()
    for c, comp in enumerate(rpg.components):
        pool = [p for p in sorted(comp) if p not in forced_empty and p != s]
        want = sig[c]
        if c == cs:
            pre.add(s)
            want -= 1
        pre.update(pool[:want])
    pre = frozenset(pre)
    post = (pre - {s}) | {t}
    new_sig = list(sig)
    new_sig[cs] -= 1
    new_sig[ct] += 1
    return pre, post, tuple(new_sig)


def connect_siblings(H: Hypergraph, siblings: list[Hypernode],
                     constrained: list[ConstrainedEdge]) -> list[Hyperedge]:
    if not siblings:
        return []
    rpg = H.rpgs[siblings[0].rpg_id]
    by_sig = {n.signature: n for n in siblings}
    added = []
    for ce in constrained:
        for s, t in ((ce.source, ce.target), (ce.target, ce.source)):
            oriented = ConstrainedEdge(s, t, ce.path.oriented(s, t), ce.constraints)
            for v in siblings:
                witness = sibling_move(rpg, v.signature, oriented)
                if witness is None:
                    continue
                pre, post, new_sig = witness
                w = by_sig.get(new_sig)
                if w is None:
                    continue
                # witness must be a legal arrangement of v's hypernode
                assert signature_of(rpg, pre) == v.signature
                assert oriented.target not in pre and not (pre & oriented.constraints)
                added.append(H.add_edge(Hyperedge(v.id, w.id, "sibling", edge=oriented,
                                                  pre=pre, post=post)))
    return added


def create_hypernodes(H: Hypergraph, rm: Roadmap, scene: SceneSpec, k: int, b: int,
                      seed: Iterable[int] | None = None, rng=None, poses=None,
                      pumped: PumpedArrangement | None = None) -> list[Hypernode]:
    if pumped is None:
        pumped = sample_pumped_arrangement(scene, k, b, seed, rng, poses)
    rpg, constrained = create_rpg(rm, pumped, len(H.rpgs))
    return add_rpg(H, rpg, constrained)


def add_rpg(H: Hypergraph, rpg: Rpg, constrained: list[ConstrainedEdge]) -> list[Hypernode]:
    """Register an RPG: one hypernode per signature, then cross and sibling edges."""
    rpg_id = rpg.id
    if rpg_id in H.rpgs:
        raise ValueError(f"RPG id {rpg_id} already in use")
    H.rpgs[rpg_id] = rpg
    H.constrained[rpg_id] = constrained
    # existing RPGs sharing at least k poses
    counts: dict[int, int] = {}
    for p in rpg.nodes:
        for rid in H.pose_index.get(p, ()):
            counts[rid] = counts.get(rid, 0) + 1
    neighbours = sorted(rid for rid, c in counts.items() if c >= H.k)
    for p in rpg.nodes:
        H.pose_index.setdefault(p, set()).add(rpg_id)
    new_nodes = []
    for sig in enumerate_signatures(rpg, H.k):
        node = Hypernode(len(H.nodes), rpg_id, sig)
        H.nodes.append(node)
        H.by_rpg.setdefault(rpg_id, []).append(node.id)
        H.register(node)
        new_nodes.append(node)
        for rid in neighbours:
            for uid in H.by_rpg[rid]:
                connect_node(H, node, H.nodes[uid])
    connect_siblings(H, new_nodes, constrained)
    return new_nodes


def _seed_for(H: Hypergraph, node: Hypernode, rng) -> frozenset:
    rpg = H.rpgs[node.rpg_id]
    seed = []
    for comp, count in zip(rpg.components, node.signature):
        if count:
            members = sorted(comp)
            pick = rng.choice(len(members), size=count, replace=False)
            seed.extend(members[int(i)] for i in pick)
    return frozenset(seed)


def reachable_poses(rm: Roadmap, scene: SceneSpec) -> list[int]:
    return [p for p in scene.pose_ids if p in rm.transitions and p not in rm.unreachable]


def grow_hypergraph(scene: SceneSpec, rm: Roadmap, k: int, b: int, time_budget: float | None = None,
                    rng=None, max_iterations: int | None = None,
                    start_pumped: PumpedArrangement | None = None) -> Hypergraph:
    """Grow hypernodes from the start and goal sides until they connect.

    Raises PlanningTimeout (carrying the partial hypergraph) when the time
    budget or iteration cap runs out first.
    """
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    t0 = time.perf_counter()
    start, goal = frozenset(scene.start), frozenset(scene.goal)
    H = Hypergraph(k, start, goal)
    pool = reachable_poses(rm, scene)

    def out_of_budget():
        if time_budget is not None and time.perf_counter() - t0 > time_budget:
            return True
        return max_iterations is not None and H.iterations >= max_iterations

    try:
        create_hypernodes(H, rm, scene, k, b, seed=start, rng=rng, poses=pool, pumped=start_pumped)
    except SamplingExhausted as exc:
        raise PlanningTimeout(f"cannot pump the start arrangement: {exc}", H) from None
    H.start_id = min(H.start_ids)
    if not H.goal_ids:
        try:
            create_hypernodes(H, rm, scene, k, b, seed=goal, rng=rng, poses=pool)
        except SamplingExhausted as exc:
            raise PlanningTimeout(f"cannot pump the goal arrangement: {exc}", H) from None
    H.goal_id = min(H.goal_ids)
    while True:
        reached = H.forward_reach(H.start_ids)
        if any(g in reached for g in H.goal_ids):
            log.info("hypergraph connected after %d iterations: %d nodes, %d edges",
                     H.iterations, len(H.nodes), len(H.edges))
            return H
        if out_of_budget():
            raise PlanningTimeout(
                f"start and goal not connected after {H.iterations} iterations", H)
        if H.iterations % 2 == 0:
            side = sorted(reached)
        else:
            side = sorted(H.backward_reach(H.goal_ids))
        node = H.nodes[side[int(rng.integers(len(side)))]]
        H.iterations += 1
        try:
            create_hypernodes(H, rm, scene, k, b, seed=_seed_for(H, node, rng), rng=rng,
                              poses=pool)
        except SamplingExhausted:
            continue


def answer_query(H: Hypergraph, rm: Roadmap, path: tuple[list[int], list[int]] | None = None
                 ) -> ManipulationPlan:
    """Turn a start-to-goal hypernode path into a concrete manipulation plan."""
    if path is None:
        path = H.find_path()
        if path is None:
            raise ValueError("start and goal are not connected in the hypergraph")
    node_ids, edge_ids = path
    cur = H.start
    steps: list[tuple[Move, SegmentedPath]] = []

    def pebble(rpg: Rpg, target: frozenset):
        moves = solve_pebble_problem(rpg, cur, target)
        assert moves is not None, (
            f"pebble problem infeasible on RPG {rpg.id}: {sorted(cur)} -> {sorted(target)}")
        for m in moves:
            path_ = rpg.path_for(m.source, m.target)
            assert path_ is not None
            steps.append((m, path_))
        return target

    for i, nid in enumerate(node_ids):
        rpg = H.rpg_of(nid)
        if i == len(node_ids) - 1:
            cur = pebble(rpg, H.goal)
            break
        e = H.edges[edge_ids[i]]
        if e.kind == "cross":
            cur = pebble(rpg, e.handoff)
        else:
            assert e.u == nid
            cur = pebble(rpg, e.pre)
            ce = e.edge
            steps.append((Move(ce.source, ce.target, ("constrained", ce.pair)), ce.path))
            cur = e.post
    plan = ManipulationPlan(H.start, H.goal)
    for _, seg_path in steps:
        plan.segments.extend(segments_for_move(rm, seg_path))
    return plan
