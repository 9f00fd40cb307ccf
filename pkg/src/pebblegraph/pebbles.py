"""Signatures and unlabeled pebble motion inside a single RPG."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .rpg import Rpg

Signature = tuple  # object count per RPG component, components ordered by min pose id

ORACLE_MAX_NODES = 12


@dataclass(frozen=True)
class Move:
    source: int
    target: int
    via: tuple  # ("rpg", (a, b)) or ("constrained", (a, b))


def signature_of(rpg: Rpg, arrangement: Iterable[int]) -> Signature:
    counts = [0] * len(rpg.components)
    for p in arrangement:
        if p not in rpg.component_of:
            raise KeyError(f"pose {p} is not a node of RPG {rpg.id}")
        counts[rpg.component_of[p]] += 1
    return tuple(counts)


def enumerate_signatures(rpg: Rpg, k: int) -> list[Signature]:
    caps = [len(c) for c in rpg.components]
    out: list[Signature] = []
    suffix = [0] * (len(caps) + 1)
    for i in range(len(caps) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + caps[i]

    def rec(i, left, acc):
        if i == len(caps):
            if left == 0:
                out.append(tuple(acc))
            return
        lo = max(0, left - suffix[i + 1])
        for c in range(lo, min(caps[i], left) + 1):
            acc.append(c)
            rec(i + 1, left - c, acc)
            acc.pop()

    if k <= sum(caps):
        rec(0, k, [])
    return out


def _spanning_tree(rpg: Rpg, comp: frozenset):
    root = min(comp)
    parent = {root: None}
    depth = {root: 0}
    queue = deque([root])
    tree = {root: []}
    while queue:
        u = queue.popleft()
        for v in rpg.neighbors(u):
            if v not in parent:
                parent[v] = u
                depth[v] = depth[u] + 1
                tree[v] = [u]
                tree[u].append(v)
                queue.append(v)
    return tree, depth


def _tree_path(tree, alive, src, want):
    """BFS inside `alive` from src to the nearest vertex satisfying want()."""
    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u != src and want(u):
            path = [u]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return path[::-1]
        for v in sorted(tree[u]):
            if v in alive and v not in prev:
                prev[v] = u
                queue.append(v)
    return None


def solve_pebble_problem(rpg: Rpg, start: Iterable[int], goal: Iterable[int]) -> list[Move] | None:
    """Move sequence along RPG edges taking start to goal, or None if infeasible.

    Per component, vertices of a BFS spanning tree are retired deepest first.
    A retiring goal vertex pulls in the nearest object; a retiring non-goal
    vertex pushes its object towards the nearest blank. Objects on retired
    vertices never move again.
    """
    start, goal = frozenset(start), frozenset(goal)
    if len(start) != len(goal):
        return None
    if signature_of(rpg, start) != signature_of(rpg, goal):
        return None
    occupied = set(start)
    moves: list[Move] = []

    def move(a, b):
        assert a in occupied and b not in occupied
        occupied.remove(a)
        occupied.add(b)
        moves.append(Move(a, b, ("rpg", (min(a, b), max(a, b)))))

    for comp in rpg.components:
        if not (start & comp) ^ (goal & comp):
            continue
        tree, depth = _spanning_tree(rpg, comp)
        alive = set(comp)
        for leaf in sorted(comp, key=lambda v: (-depth[v], v)):
            if leaf in goal and leaf not in occupied:
                path = _tree_path(tree, alive, leaf, lambda u: u in occupied)
                for i in range(len(path) - 1, 0, -1):
                    move(path[i], path[i - 1])
            elif leaf not in goal and leaf in occupied:
                path = _tree_path(tree, alive, leaf, lambda u: u not in occupied)
                for i in range(len(path) - 2, -1, -1):
                    move(path[i], path[i + 1])
            alive.discard(leaf)
    assert occupied == set(goal), "pebble solver failed to reach the goal"
    return moves


def apply_moves(start: Iterable[int], moves: Iterable[Move]) -> frozenset:
    """Replay moves, checking that each source is occupied and target empty."""
    occ = set(start)
    for m in moves:
        if m.source not in occ:
            raise ValueError(f"move {m.source}->{m.target}: source is empty")
        if m.target in occ:
            raise ValueError(f"move {m.source}->{m.target}: target is occupied")
        occ.remove(m.source)
        occ.add(m.target)
    return frozenset(occ)


def reachable_oracle(rpg: Rpg, start: Iterable[int], goal: Iterable[int]) -> bool:
    """Exact reachability by BFS over k-subsets of the RPG's nodes."""
    if len(rpg.nodes) > ORACLE_MAX_NODES:
        raise ValueError(f"oracle limited to {ORACLE_MAX_NODES} nodes")
    start, goal = frozenset(start), frozenset(goal)
    if len(start) != len(goal):
        return False
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if cur == goal:
            return True
        for a in cur:
            for b in rpg.neighbors(a):
                if b not in cur:
                    nxt = (cur - {a}) | {b}
                    if nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
    return False
