#!/usr/bin/env python3
"""JSON-lines environment bridge over stdio.

Every transition is computed by the installed memrw package; this process
only serializes. One request object per line on stdin, one response per line
on stdout. Observation vectors cross as JSON numbers (float64 both sides, so
values survive bit-exactly).

Requests:
  {"id", "op": "make",  "config": {...}}            -> {"env", "obs_dim", "n_actions"}
  {"id", "op": "reset", "env", "seed"}              -> {"obs"}
  {"id", "op": "step",  "env", "action"}            -> {"obs", "reward", "terminated", "truncated", "info"}
  {"id", "op": "step_batch", "envs": [..], "actions": [..]}
                                                    -> {"results": [{...} per env]}
  {"id", "op": "derive_seed", "base", "run", "episode"} -> {"seed"}
  {"id", "op": "close"}                             -> {"ok": true} and exit
"""

import json
import sys

from memrw import Family, config_from_dict
from memrw.evaluation import derive_episode_seed, make_env

N_ACTIONS = {Family.TMAZE: 3, Family.COLOR_CUBES: 5}


def obs_dim(config):
    if config.family is Family.TMAZE:
        return 3
    return 2 + 3 * config.cube_count + 1


def step_payload(result):
    return {
        "obs": result.obs.tolist(),
        "reward": result.reward,
        "terminated": result.terminated,
        "truncated": result.truncated,
        "info": {k: (v.value if hasattr(v, "value") else v) for k, v in result.info.items()},
    }


def main() -> int:
    envs = []
    out = sys.stdout
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        req = json.loads(line)
        resp = {"id": req.get("id"), "ok": True}
        try:
            op = req["op"]
            if op == "make":
                config = config_from_dict(req["config"])
                envs.append(make_env(config))
                resp.update(env=len(envs) - 1, obs_dim=obs_dim(config), n_actions=N_ACTIONS[config.family])
            elif op == "reset":
                seed = req.get("seed")
                if seed is not None:
                    seed = int(seed)  # may arrive as a string: 64-bit seeds overflow JS floats
                obs = envs[req["env"]].reset(seed)
                resp.update(obs=obs.tolist())
            elif op == "step":
                resp.update(step_payload(envs[req["env"]].step(req["action"])))
            elif op == "step_batch":
                resp.update(results=[step_payload(envs[e].step(a)) for e, a in zip(req["envs"], req["actions"])])
            elif op == "derive_seed":
                # Stringified: 64-bit values do not survive JSON floats.
                resp.update(seed=str(derive_episode_seed(req["base"], req["run"], req["episode"])))
            elif op == "close":
                out.write(json.dumps(resp) + "\n")
                out.flush()
                return 0
            else:
                raise ValueError(f"unknown op {op!r}")
        except Exception as exc:  # noqa: BLE001 - protocol boundary
            resp = {"id": req.get("id"), "ok": False, "error": f"{type(exc).__name__}: {exc}"}
        out.write(json.dumps(resp) + "\n")
        out.flush()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
