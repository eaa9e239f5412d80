#!/usr/bin/env python3
"""Endless T-Maze walkthrough.

One corridor at a time: the cue shows on the corridor's first step, vanishes,
and must be carried to the junction — where the next corridor's cue replaces
it. Run: python3 demos/01_endless_tmaze.py
"""

from memrw import EnvConfig, Family, Regime, correlation_horizon, make_agent, record_episode, validate_config
from memrw.tmaze import event_windows, trace_lines

cfg = validate_config(
    EnvConfig(family=Family.TMAZE, regime=Regime.FIXED, corridor_length=5, corridor_count=3, seed=42)
)

print("== one perfect episode, fixed l=5, n=3, seed=42 ==")
log = record_episode(cfg, make_agent("oracle", Family.TMAZE), seed=42)
print("\n".join(trace_lines(log)))
print(f"\nsuccess={log.success}  corridors passed={log.progress}  return={log.total_return:.2f}")
print("(perfect return is n - 0.01*n*l = 3 - 0.15 = 2.85)")

print("\n== correlation horizons ==")
for w in event_windows(log):
    print(f"cue at t={w.t_e}, decision at t={w.t_r}  ->  horizon {correlation_horizon(w)}")
print("every corridor's horizon equals its length: the cue must be carried the whole way")

print("\n== retention is not enough ==")
stale = record_episode(cfg, make_agent("stale", Family.TMAZE), seed=42)
print(f"stale agent (keeps only the first cue): success={stale.success}, corridors passed={stale.progress}")

print("\n== uniform regime resamples corridor lengths per episode ==")
ucfg = validate_config(
    EnvConfig(family=Family.TMAZE, regime=Regime.UNIFORM, corridor_length=5, corridor_count=3, seed=42)
)
for seed in range(4):
    ulog = record_episode(ucfg, make_agent("oracle", Family.TMAZE), seed=seed)
    lengths = [correlation_horizon(w) for w in event_windows(ulog)]
    print(f"seed={seed}: corridor lengths {lengths}")
