"""Per-phase path length on random solvable instances."""
import argparse

import numpy as np

from pebblegraph.generate import random_instance
from pebblegraph.planner import PlannerConfig, plan_rearrangement


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=30)
    ap.add_argument("--seed", type=int, default=1000)
    args = ap.parse_args()

    ratios = {}
    for i in range(args.instances):
        k, b = (2, 3, 4)[i % 3], (1, 2, 3)[(i // 3) % 3]
        scene, rm = random_instance(args.seed + i, k)
        res = plan_rearrangement(scene, rm, PlannerConfig(b=b, seed=i))
        if not res.history:
            continue
        base = res.history[0][1]
        steps = "  ".join(f"{name} {length:.3f}" for name, length in res.history)
        print(f"#{i:3d} k={k} b={b}  {steps}")
        for name, length in res.history[1:]:
            ratios.setdefault(name, []).append(length / base)
    print()
    for name, vals in ratios.items():
        print(f"{name:8s} mean length ratio {np.mean(vals):.3f}")


if __name__ == "__main__":
    main()
