"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line. Run with `pytest tests/test_acceptance.py -v -s`.

Tolerances are pinned here, not calibrated later: Monte-Carlo estimates must
fall within 3 sigma of their analytic binomial values; everything scripted
and deterministic must be exact.
"""

import itertools
import json
import math
import time

import numpy as np
import pytest
import scipy.stats

from memrw import (
    EnvConfig,
    Family,
    Mode,
    Regime,
    correlation_horizon,
    latch_cell_construct,
    make_agent,
    make_env,
    rollout,
    validate_config,
)
from memrw.cli import CUBES_DEFAULTS, TMAZE_GRID_COUNTS, TMAZE_GRID_LENGTHS, main
from memrw.cubes import ColorCubesEnv, CubesAction
from memrw.evaluation import EvalSpec, run_eval
from memrw.tmaze import event_windows, run_episode, tmaze_reset

from .reference import perfect_actions


def tmaze_cfg(regime, l, n, **kw):
    return validate_config(EnvConfig(family=Family.TMAZE, regime=regime, corridor_length=l, corridor_count=n, **kw))


def cubes_cfg(mode, **kw):
    base = dict(family=Family.COLOR_CUBES, mode=mode, **CUBES_DEFAULTS)
    base.update(kw)
    return validate_config(EnvConfig(**base))


def grid_configs():
    for regime in (Regime.FIXED, Regime.UNIFORM):
        for l in TMAZE_GRID_LENGTHS:
            for n in TMAZE_GRID_COUNTS:
                yield tmaze_cfg(regime, l, n)


def three_sigma(p, episodes):
    return 3 * math.sqrt(p * (1 - p) / episodes)


def announce(name, ok=True):
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}")


def test_environment_solvability_oracle_grid():
    """Oracles score 1.00 +/- 0.00 on every published configuration,
    10 runs x 100 episodes each, in under a minute."""
    t0 = time.perf_counter()
    configs = list(grid_configs()) + [cubes_cfg(m) for m in Mode]
    for cfg in configs:
        report = run_eval(EvalSpec(cfg, [cfg], "oracle", n_runs=10, episodes_per_run=100))
        result = report.results[0]
        assert result.success_mean == 1.0, cfg
        assert result.success_sem == 0.0, cfg
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0, f"oracle suite took {elapsed:.1f} s"
    announce(f"environment solvability (19 configs, 10x100 episodes, {elapsed:.1f} s)")


def test_rewriting_witness_latch_cell():
    """The hand-constructed latch solves the maze at the grid's far corner in
    both regimes, and its state argmax equals the last nonzero cue on every
    cue stream of length <= 12."""
    for regime in (Regime.FIXED, Regime.UNIFORM):
        for l, n in [(5, 5), (10, 10)]:
            cfg = tmaze_cfg(regime, l, n)
            env = make_env(cfg)
            agent = make_agent("latch", Family.TMAZE)
            assert all(rollout(env, agent, seed).success for seed in range(100)), (regime, l, n)

    # Exhaustive streams, vectorized over all 3^k streams of each length k.
    cell = latch_cell_construct()
    w = cell.weights
    symbols = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    failures = 0
    for length in range(1, 13):
        streams = np.array(list(itertools.product(range(3), repeat=length)), dtype=np.int8)
        states = np.zeros((len(streams), 2))
        for t in range(length):
            x = symbols[streams[:, t]]
            f = 1.0 / (1.0 + np.exp(-(x @ w.forget_w.T + w.forget_b)))
            g = 1.0 / (1.0 + np.exp(-(x @ w.write_w.T + w.write_b)))
            states = f * states + g * x
        has_cue = (streams != 0).any(axis=1)
        last_idx = length - 1 - np.argmax(streams[:, ::-1] != 0, axis=1)
        last_cue = streams[np.arange(len(streams)), last_idx] - 1
        predicted = np.argmax(states, axis=1)
        failures += int(np.sum(predicted[has_cue] != last_cue[has_cue]))
    assert failures == 0
    announce("rewriting witness (latch 1.00 on l,n<=10; exhaustive streams <=12, 0 failures)")


def stale_progress_distribution(n):
    """Exact progress distribution of first-cue retention over all equally
    likely cue sequences: enumerate and count."""
    hist = {}
    for cues in itertools.product((0, 1), repeat=n):
        progress = 1
        for c in cues[1:]:
            if c != cues[0]:
                break
            progress += 1
        hist[progress] = hist.get(progress, 0) + 1
    total = 2**n
    return {k: v / total for k, v in hist.items()}


def test_retention_only_failure_mode():
    """Stale-cue success matches 0.5^(n-1) within 3 sigma, and its progress
    histogram shows the one-corridor-short pattern at the analytic rate."""
    episodes = 10_000
    for n in (1, 3, 5, 10):
        cfg = tmaze_cfg(Regime.FIXED, 5, n)
        env = make_env(cfg)
        agent = make_agent("stale", Family.TMAZE)
        wins = sum(rollout(env, agent, s).success for s in range(episodes))
        p = 0.5 ** (n - 1)
        assert abs(wins / episodes - p) <= three_sigma(p, episodes), f"n={n}"

    for n in (3, 5):
        exact = stale_progress_distribution(n)
        cfg = tmaze_cfg(Regime.FIXED, 5, n)
        env = make_env(cfg)
        agent = make_agent("stale", Family.TMAZE)
        outcomes = [rollout(env, agent, s).progress for s in range(episodes)]
        mass = sum(1 for o in outcomes if o == n - 1) / episodes
        assert abs(mass - exact[n - 1]) <= three_sigma(exact[n - 1], episodes), f"n={n}"
        mean = sum(outcomes) / episodes
        exact_mean = sum(k * p for k, p in exact.items())
        assert abs(mean - exact_mean) <= 0.05, f"n={n}"
    announce("retention-only failure mode (stale = 0.5^(n-1), mass at n-1 analytic)")


def test_memoryless_baseline():
    """Random turns succeed at 0.5^n within 3 sigma; at n=1 that brackets
    one half."""
    episodes = 10_000
    for n in (1, 3, 5, 10):
        cfg = tmaze_cfg(Regime.FIXED, 5, n)
        env = make_env(cfg)
        agent = make_agent("random", Family.TMAZE)
        wins = sum(rollout(env, agent, s).success for s in range(episodes))
        p = 0.5**n
        assert abs(wins / episodes - p) <= three_sigma(p, episodes), f"n={n}"
        if n == 1:
            assert abs(wins / episodes - 0.5) <= three_sigma(0.5, episodes)
    announce("memoryless baseline (random = 0.5^n, n=1 brackets 0.50)")


def test_sweep_determinism(tmp_path):
    """Two full paper_grid sweeps with one base seed are byte-identical."""
    outputs = []
    for name in ("first", "second"):
        out = tmp_path / name
        code = main(["sweep", "--manifest", "paper_grid", "--agent", "oracle", "--out", str(out)])
        assert code == 0
        outputs.append((out / "sweep.csv").read_bytes())
    assert outputs[0] == outputs[1]
    assert outputs[0].count(b"1.00,0.00") == 19
    announce("sweep determinism (paper_grid twice, byte-identical CSV)")


def test_distributional_checks():
    """Uniform-regime lengths pass chi-square uniformity; Medium teleport
    counts match Binomial(10, 0.3) moments."""
    episodes = 10_000
    l_max, n = 10, 5
    cfg = tmaze_cfg(Regime.UNIFORM, l_max, n)
    counts = np.zeros(l_max, dtype=int)
    for seed in range(episodes):
        state, _ = tmaze_reset(cfg, seed)
        for length in state.corridor_lengths:
            counts[length - 1] += 1
    chi = scipy.stats.chisquare(counts)
    assert chi.pvalue > 0.01, f"chi-square p={chi.pvalue}"

    steps, p = 10, CUBES_DEFAULTS["teleport_prob"]
    cfg = cubes_cfg(Mode.MEDIUM)
    teleports = np.empty(episodes)
    wiggle = [CubesAction.MOVE_LEFT, CubesAction.MOVE_RIGHT]
    for seed in range(episodes):
        env = ColorCubesEnv(cfg)
        env.reset(seed)
        teleports[seed] = sum(env.step(wiggle[t % 2]).info["teleport_occurred"] for t in range(steps))
    mean, var = teleports.mean(), teleports.var(ddof=1)
    exact_mean, exact_var = steps * p, steps * p * (1 - p)
    mean_sigma = math.sqrt(exact_var / episodes)
    mu4 = exact_var**2 * 3 + exact_var * (1 - 6 * p * (1 - p))
    var_sigma = math.sqrt((mu4 - exact_var**2) / episodes)
    assert abs(mean - exact_mean) <= 3 * mean_sigma, f"teleport mean {mean}"
    assert abs(var - exact_var) <= 3 * var_sigma, f"teleport variance {var}"
    announce(f"distributional checks (chi-square p={chi.pvalue:.3f}; teleports {mean:.3f}~{exact_mean})")


def test_extreme_inference_soundness():
    """The cubes oracle finishes 100/100 Extreme episodes; the ambiguity
    tripwire never fires (it would raise and fail the test)."""
    cfg = cubes_cfg(Mode.EXTREME)
    env = make_env(cfg)
    agent = make_agent("oracle", Family.COLOR_CUBES)
    outcomes = [rollout(env, agent, seed) for seed in range(100)]
    assert all(o.success for o in outcomes)
    announce("extreme-mode inference soundness (100/100, zero ambiguity events)")


def test_correlation_horizon_equals_corridor_length():
    """On fixed-regime traces every corridor's horizon is exactly l."""
    for l in TMAZE_GRID_LENGTHS:
        for n in TMAZE_GRID_COUNTS:
            cfg = tmaze_cfg(Regime.FIXED, l, n)
            for seed in range(5):
                state, _ = tmaze_reset(cfg, seed)
                log = run_episode(cfg, perfect_actions(state.corridor_lengths, state.cues), seed)
                assert log.success
                horizons = [correlation_horizon(w) for w in event_windows(log)]
                assert horizons == [l] * n, (l, n, seed)
    announce("correlation horizon (fixed traces: xi == l per corridor)")
