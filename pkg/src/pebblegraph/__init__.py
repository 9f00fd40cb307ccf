"""Planar rearrangement planning with rearrangement pebble graphs."""
from .planner import InfeasibleProblem, PlannerConfig, PlanResult, plan_rearrangement
from .roadmap import build_roadmap, load_roadmap, save_roadmap
from .scene import InvalidArrangement, SceneError, load_scene, load_scene_file

__version__ = "0.1.0"

__all__ = [
    "InfeasibleProblem", "InvalidArrangement", "PlanResult", "PlannerConfig", "SceneError",
    "build_roadmap", "load_roadmap", "load_scene", "load_scene_file", "plan_rearrangement",
    "save_roadmap",
]
