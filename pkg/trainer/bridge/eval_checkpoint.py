#!/usr/bin/env python3
"""Evaluate an externally served policy through the primary eval pipeline.

The parent process (the trainer) acts as the policy: this script sends it
{"op": "reset", "seed"} / {"op": "act", "obs"} requests on stdout and reads
{"action"} answers from stdin, while memrw's run_eval drives the episodes.
Learned agents therefore share the exact metric pipeline (derived seeds,
mean +/- SEM aggregation) used for the scripted baselines. The final line is
{"op": "result", "report": <EvalReport JSON>}.
"""

import argparse
import json
import sys

from memrw import load_config
from memrw.evaluation import EvalSpec, run_eval


class ServedPolicy:
    """Agent proxy: every decision is answered by the parent process."""

    def __init__(self, family):
        self.family = family

    def _ask(self, payload):
        sys.stdout.write(json.dumps(payload) + "\n")
        sys.stdout.flush()
        line = sys.stdin.readline()
        if not line:
            raise RuntimeError("policy server closed the pipe")
        return json.loads(line)

    def reset(self, seed):
        self._ask({"op": "reset", "seed": int(seed)})

    def act(self, obs):
        return int(self._ask({"op": "act", "obs": obs.values.tolist()})["action"])


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--config", required=True)
    parser.add_argument("--runs", type=int, default=1)
    parser.add_argument("--episodes", type=int, default=100)
    parser.add_argument("--base-seed", type=int, default=0)
    args = parser.parse_args()

    config = load_config(args.config)
    spec = EvalSpec(config, [config], "oracle", n_runs=args.runs, episodes_per_run=args.episodes)
    report = run_eval(
        spec,
        base_seed=args.base_seed,
        agent_factory=lambda name, family: ServedPolicy(family),
    )
    payload = report.to_json_dict()
    payload["agent"] = "served-policy"
    sys.stdout.write(json.dumps({"op": "result", "report": payload}) + "\n")
    sys.stdout.flush()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
