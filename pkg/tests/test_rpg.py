import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pebblegraph.geometry import disc_disc_overlap
from pebblegraph.roadmap import build_roadmap
from pebblegraph.rpg import PumpedArrangement, Rpg, components, create_rpg, sample_pumped_arrangement
from pebblegraph.scene import SamplingExhausted, load_scene, load_scene_file

from helpers import replay_free

REAR, FRONT, SIDE = 0, 2, 4


def far_pair_scene():
    return load_scene(json.dumps({
        "workspace": [0, 0, 1, 1], "obstacles": [], "object_radius": 0.04,
        "gripper_radius": 0.03, "safe": [0.5, 0.85], "k": 1, "start": [0], "goal": [1],
        "poses": [{"id": 0, "x": 0.2, "y": 0.3}, {"id": 1, "x": 0.8, "y": 0.3}]}))


def test_two_visible_poses_one_edge():
    sc = far_pair_scene()
    rm = build_roadmap(sc, samples_per_mode=60, seed=0)
    rpg, ec = create_rpg(rm, PumpedArrangement(frozenset({0, 1}), 1, 1))
    assert list(rpg.edges) == [(0, 1)] and ec == []
    assert components(rpg) == [frozenset({0, 1})]


def test_shelf_rear_pose_constrained_by_front(shelf_rm):
    rpg, ec = create_rpg(shelf_rm, {REAR, FRONT, SIDE})
    assert (FRONT, SIDE) in rpg.edges
    assert [(c.pair, c.constraints) for c in ec] == [((REAR, SIDE), frozenset({FRONT}))]
    # rear <-> front is a clean move, so all three poses share one component
    assert (REAR, FRONT) in rpg.edges
    assert components(rpg) == [frozenset({REAR, FRONT, SIDE})]


def test_mutually_sealed_poses(sealed):
    rm = build_roadmap(sealed, seed=0)
    rpg, ec = create_rpg(rm, {0, 1})
    assert rpg.edges == {} and ec == []
    assert components(rpg) == [frozenset({0}), frozenset({1})]


def test_components_from_edges():
    assert components(Rpg.from_edges(0, {1, 2}, [(2, 1)])) == [frozenset({1, 2})]
    assert components(Rpg.from_edges(0, {5, 3, 4}, [])) == [frozenset({3}), frozenset({4}), frozenset({5})]
    with pytest.raises(ValueError):
        Rpg.from_edges(0, {1, 2}, [(1, 3)])


def test_sample_only_choice():
    sc = far_pair_scene()
    pa = sample_pumped_arrangement(sc, 1, 1, rng=0)
    assert pa.poses == {0, 1} and pa.n == 2


def test_sample_exhausts(shelf):
    # seven poses requested from a six-pose library
    with pytest.raises(SamplingExhausted):
        sample_pumped_arrangement(shelf, 2, 5, seed_arrangement={0, 2}, rng=0)


def test_sample_exhausts_when_seed_blocks_all():
    sc = load_scene(json.dumps({
        "workspace": [0, 0, 1, 1], "obstacles": [], "object_radius": 0.04,
        "gripper_radius": 0.03, "safe": [0.5, 0.85], "k": 1, "start": [0], "goal": [0],
        "poses": [{"id": 0, "x": 0.3, "y": 0.3}, {"id": 1, "x": 0.33, "y": 0.3},
                  {"id": 2, "x": 0.3, "y": 0.34}]}))
    with pytest.raises(SamplingExhausted):
        sample_pumped_arrangement(sc, 1, 1, seed_arrangement={0}, rng=0)


def test_sample_with_seed(scenes_dir):
    sc = load_scene_file(scenes_dir / "bench" / "shelf20.json")
    seed = {0, 6, 17}
    pa = sample_pumped_arrangement(sc, 3, 2, seed_arrangement=seed, rng=np.random.default_rng(5))
    assert len(pa.poses) == 5 and seed <= pa.poses
    for a, b in itertools.combinations(pa.poses, 2):
        assert not disc_disc_overlap(sc.object_disc(a), sc.object_disc(b))
    again = sample_pumped_arrangement(sc, 3, 2, seed_arrangement=seed, rng=np.random.default_rng(5))
    assert again == pa


def test_sample_argument_checks(shelf):
    with pytest.raises(ValueError):
        sample_pumped_arrangement(shelf, 0, 1)
    with pytest.raises(ValueError):
        sample_pumped_arrangement(shelf, 2, 1, seed_arrangement={0})


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_edge_and_constraint_soundness(shelf, shelf_rm, seed):
    pa = sample_pumped_arrangement(shelf, 2, 1, rng=seed)
    rpg, ec = create_rpg(shelf_rm, pa)
    for (p, q), path in rpg.edges.items():
        assert path.conflict_set == frozenset()
        others = pa.poses - {p, q}
        assert replay_free(shelf, shelf_rm, path, others)
        assert replay_free(shelf, shelf_rm, rpg.path_for(q, p), others)
    for c in ec:
        assert c.constraints and c.constraints <= pa.poses - set(c.pair)
        assert replay_free(shelf, shelf_rm, c.path, pa.poses - set(c.pair) - c.constraints)
        assert c.pair not in rpg.edges
    for comp in rpg.components:
        for p in comp:
            assert rpg.component_of[p] == rpg.components.index(comp)
