#!/usr/bin/env python3
"""Generate the cross-boundary fidelity fixture.

Runs (seed, action-sequence) pairs directly against the primary engine and
dumps the full traces; the TypeScript test replays them through the bridge
and demands identical observations, rewards, and flags.

    python3 bridge/gen_golden.py --pairs 300 --out test/golden_traces.json
"""

import argparse
import json
import random

from memrw import config_from_dict
from memrw.evaluation import make_env

TMAZE = {"family": "tmaze", "regime": "uniform", "corridor_length": 5, "corridor_count": 3}
CUBES = {
    "family": "color_cubes",
    "mode": "extreme",
    "grid_size": 5,
    "cube_count": 3,
    "subepisode_count": 2,
    "teleport_prob": 0.4,
}


def trace_pair(raw_config, seed, actions):
    env = make_env(config_from_dict(raw_config))
    obs = env.reset(seed)
    steps = []
    for action in actions:
        result = env.step(action)
        steps.append(
            {
                "action": action,
                "obs": result.obs.tolist(),
                "reward": result.reward,
                "terminated": result.terminated,
                "truncated": result.truncated,
            }
        )
        if result.done:
            break
    return {"config": raw_config, "seed": seed, "initial_obs": obs.tolist(), "steps": steps}


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--pairs", type=int, default=300)
    parser.add_argument("--out", required=True)
    args = parser.parse_args()

    rng = random.Random(0)
    pairs = []
    for i in range(args.pairs):
        raw = TMAZE if i % 2 == 0 else CUBES
        n_actions = 3 if raw["family"] == "tmaze" else 5
        actions = [rng.randrange(n_actions) for _ in range(40)]
        pairs.append(trace_pair(raw, seed=i, actions=actions))
    with open(args.out, "w") as fh:
        json.dump(pairs, fh)
    print(f"wrote {len(pairs)} traces to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
