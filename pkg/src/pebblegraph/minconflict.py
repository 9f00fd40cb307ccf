"""Minimum-conflict reach/transfer/retract search on the manipulation roadmap.

The search runs over three chained layers:

0. Transit from the safe node to the transit transition node of ``p``. The
   object still rests at ``p``, so edges conflicting with ``p`` are forbidden.
1. Transfer from ``p`` to ``p_target``.
2. Transit from the transition node of ``p_target`` back to the safe node;
   edges conflicting with ``p_target`` are forbidden.

The objective is lexicographic: fewest distinct candidate poses hit, then
shortest length. Passing through another pose's transition node counts as
hitting that pose.
"""
from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .roadmap import Mode, Roadmap

MAX_CANDIDATES = 64
LAYER_MODES = (Mode.TRANSIT, Mode.TRANSFER, Mode.TRANSIT)


@dataclass(frozen=True)
class SegmentedPath:
    source: int
    target: int
    reach: tuple[int, ...]
    transfer: tuple[int, ...]
    retract: tuple[int, ...]
    total_length: float
    conflict_set: frozenset = frozenset()

    def reversed(self) -> "SegmentedPath":
        """The same motion replayed from target back to source."""
        return SegmentedPath(self.target, self.source, self.retract[::-1], self.transfer[::-1],
                             self.reach[::-1], self.total_length, self.conflict_set)

    def oriented(self, source: int, target: int) -> "SegmentedPath":
        if (source, target) == (self.source, self.target):
            return self
        if (source, target) == (self.target, self.source):
            return self.reversed()
        raise ValueError(f"path joins {self.source}->{self.target}, not {source}->{target}")


class _Problem:
    """Per-query bookkeeping shared by the search and the exhaustive oracle."""

    def __init__(self, rm: Roadmap, p: int, p_target: int, candidates: Iterable[int]):
        cands = sorted(set(candidates))
        if p in cands or p_target in cands:
            raise ValueError("candidates must exclude the source and target poses")
        if p == p_target:
            raise ValueError("source and target poses must differ")
        if len(cands) > MAX_CANDIDATES:
            raise ValueError(f"at most {MAX_CANDIDATES} candidate poses are supported")
        self.rm = rm
        self.p, self.q = p, p_target
        self.t_p, self.tt_p = rm.transition(p)
        self.t_q, self.tt_q = rm.transition(p_target)
        self.bit = {pid: 1 << i for i, pid in enumerate(cands)}
        self.cands = cands
        self._edge_mask: dict[int, int] = {}

    def edge_mask(self, ei: int) -> int:
        m = self._edge_mask.get(ei)
        if m is None:
            m = 0
            for pid in self.rm.edges[ei].conflicts:
                m |= self.bit.get(pid, 0)
            self._edge_mask[ei] = m
        return m

    def node_mask(self, n: int) -> int:
        node = self.rm.nodes[n]
        if node.kind == "transition":
            return self.bit.get(node.anchor_pose, 0)
        return 0

    def forbidden(self, layer: int, ei: int) -> bool:
        conflicts = self.rm.edges[ei].conflicts
        if layer == 0:
            return self.p in conflicts
        if layer == 2:
            return self.q in conflicts
        return False

    def successors(self, layer: int, n: int):
        """Yield (next layer, next node, edge index or None, length)."""
        if layer == 0 and n == self.t_p:
            yield 1, self.tt_p, self.switch_idx_p, 0.0
        elif layer == 1 and n == self.tt_q:
            yield 2, self.t_q, self.switch_idx_q, 0.0
        adj = self.rm.adjacency(LAYER_MODES[layer])
        for v, ei in adj[n]:
            if not self.forbidden(layer, ei):
                yield layer, v, ei, self.rm.edges[ei].length

    def prepare(self):
        self.switch_idx_p = _switch_index(self.rm, self.t_p, self.tt_p)
        self.switch_idx_q = _switch_index(self.rm, self.t_q, self.tt_q)
        return self

    def poses_of(self, mask: int) -> frozenset:
        return frozenset(pid for pid, b in self.bit.items() if mask & b)


def _switch_index(rm: Roadmap, t: int, tt: int) -> int:
    key = ("switch", t)
    cache = rm._dist_cache
    if key not in cache:
        for ei, e in enumerate(rm.edges):
            if {e.u, e.v} == {t, tt}:
                cache[key] = ei
                break
        else:
            raise LookupError(f"no mode switch edge between {t} and {tt}")
    return cache[key]


def _heuristics(rm: Roadmap, pr: _Problem):
    h2 = rm.distances_to(Mode.TRANSIT, rm.safe_node)
    d1 = rm.distances_to(Mode.TRANSFER, pr.tt_q)
    d0 = rm.distances_to(Mode.TRANSIT, pr.t_p)
    base1 = h2[pr.t_q]
    base0 = d1[pr.tt_p] + base1
    return (
        lambda n: d0[n] + base0,
        lambda n: d1[n] + base1,
        lambda n: h2[n],
    )


def min_conflict_path(rm: Roadmap, p: int, p_target: int,
                      candidates: Iterable[int] = ()) -> SegmentedPath | None:
    """Chained path from the safe node, through p and p_target, back to safe.

    Returns None when no chained path exists even ignoring conflicts. Raises
    UnreachablePoseError when either pose has no transition pair.
    """
    candidates = frozenset(candidates)
    key = (p, p_target, candidates)
    cache = rm._search_cache
    if key in cache:
        return cache[key]
    pr = _Problem(rm, p, p_target, candidates).prepare()
    result = _search(rm, pr)
    cache[key] = result
    return result


def _search(rm: Roadmap, pr: _Problem) -> SegmentedPath | None:
    hs = _heuristics(rm, pr)
    start = (0, rm.safe_node)
    h0 = hs[0](rm.safe_node)
    if math.isinf(h0):
        return None
    goal = (2, rm.safe_node)
    labels: dict[tuple[int, int], list] = {}
    # label: [mask, g, parent label, state, alive]
    root = [pr.node_mask(rm.safe_node), 0.0, None, start, True]
    labels[start] = [root]
    heap = [(bin(root[0]).count("1"), round(h0, 12), (rm.safe_node,), 0, root)]
    counter = 1
    while heap:
        _, _, seq, _, lab = heapq.heappop(heap)
        if not lab[4]:
            continue
        mask, g, _, state, _ = lab
        if state == goal:
            return _assemble(rm, pr, lab)
        layer, n = state
        for nl, v, ei, length in pr.successors(layer, n):
            h = hs[nl](v)
            if math.isinf(h):
                continue
            nmask = mask | pr.node_mask(v)
            if ei is not None:
                nmask |= pr.edge_mask(ei)
            ng = g + length
            nstate = (nl, v)
            bucket = labels.setdefault(nstate, [])
            if any(o[4] and (o[0] & ~nmask) == 0 and o[1] <= ng + 1e-12 for o in bucket):
                continue
            for o in bucket:
                if o[4] and (nmask & ~o[0]) == 0 and ng <= o[1]:
                    o[4] = False
            new = [nmask, ng, lab, nstate, True]
            bucket[:] = [o for o in bucket if o[4]]
            bucket.append(new)
            heapq.heappush(heap, (bin(nmask).count("1"), round(ng + h, 12), seq + (v,),
                                  counter, new))
            counter += 1
    return None


def _assemble(rm: Roadmap, pr: _Problem, lab) -> SegmentedPath:
    states = []
    node = lab
    while node is not None:
        states.append(node[3])
        node = node[2]
    states.reverse()
    segs = ([], [], [])
    for layer, n in states:
        segs[layer].append(n)
    return SegmentedPath(pr.p, pr.q, tuple(segs[0]), tuple(segs[1]), tuple(segs[2]),
                         lab[1], pr.poses_of(lab[0]))


def _reachable_within(pr: _Problem, allowed: int) -> bool:
    """Plain reachability using only steps whose conflicts lie inside `allowed`."""
    rm = pr.rm
    start = (0, rm.safe_node)
    if pr.node_mask(rm.safe_node) & ~allowed:
        return False
    seen = {start}
    queue = deque([start])
    while queue:
        layer, n = queue.popleft()
        if layer == 2 and n == rm.safe_node:
            return True
        for nl, v, ei, _ in pr.successors(layer, n):
            m = pr.node_mask(v) | (pr.edge_mask(ei) if ei is not None else 0)
            if m & ~allowed or (nl, v) in seen:
                continue
            seen.add((nl, v))
            queue.append((nl, v))
    return False


def exhaustive_min_conflicts(rm: Roadmap, p: int, p_target: int,
                             candidates: Iterable[int] = ()) -> int | None:
    """Oracle: smallest candidate subset S such that a chained path avoids all others.

    Tries every subset in order of size with a plain breadth-first search that
    only uses steps conflicting inside S. No lengths, no pruning; the first
    size that connects is the minimum. Returns None when no chained path
    exists even with every candidate allowed.
    """
    pr = _Problem(rm, p, p_target, candidates).prepare()
    full = (1 << len(pr.cands)) - 1
    if not _reachable_within(pr, full):
        return None
    bits = list(pr.bit.values())
    for size in range(len(bits) + 1):
        for combo in combinations(bits, size):
            if _reachable_within(pr, sum(combo)):
                return size
    raise AssertionError("unreachable: the full set connects")
