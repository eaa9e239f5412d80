"""Endless T-Maze: a chain of corridors, each opening with a binary cue that
invalidates the previous one, ending in a left/right junction.

Observation is the 3-vector (cue_left, cue_right, normalized position). The
cue is one-hot on the first step of each corridor and (0, 0) afterwards, so
acting correctly at a junction requires carrying the latest cue across the
corridor — and discarding every earlier one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .core import (
    EnvConfig,
    EpisodeLog,
    EventWindow,
    Family,
    Observation,
    Regime,
    RngStream,
    StepRecord,
    SteppedAfterDone,
    StepResult,
    Stream,
    validate_config,
)

STEP_PENALTY = -0.01
CORRECT_TURN_REWARD = 1.0
WRONG_TURN_REWARD = -1.0


class TMazeAction(IntEnum):
    MOVE_FORWARD = 0
    TURN_LEFT = 1
    TURN_RIGHT = 2


LEFT = 0
RIGHT = 1

# Cue encoding: (1, 0) means "turn left", (0, 1) means "turn right".
_CUE_ROW = {LEFT: (1.0, 0.0), RIGHT: (0.0, 1.0)}
_TURN_FOR_CUE = {LEFT: TMazeAction.TURN_LEFT, RIGHT: TMazeAction.TURN_RIGHT}


@dataclass
class TMazeState:
    corridor_lengths: list[int]
    cues: list[int]  # LEFT/RIGHT per corridor
    max_steps: int
    corridor: int = 0
    position: int = 0
    steps_elapsed: int = 0
    done: bool = False
    corridors_passed: int = 0

    @property
    def current_length(self) -> int:
        return self.corridor_lengths[self.corridor]

    @property
    def at_junction(self) -> bool:
        return self.position == self.current_length


def tmaze_reset(config: EnvConfig, seed: int | None = None) -> tuple[TMazeState, Observation]:
    """Sample corridor lengths per regime and one uniform cue per corridor."""
    config = validate_config(config)
    if seed is None:
        seed = config.seed
    n = config.corridor_count
    if config.regime is Regime.FIXED:
        lengths = [config.corridor_length] * n
    else:
        draw = RngStream(seed, Stream.LENGTHS).integers(1, config.corridor_length + 1, size=n)
        lengths = [int(v) for v in np.atleast_1d(draw)]
    cue_draw = RngStream(seed, Stream.CUES).integers(0, 2, size=n)
    cues = [int(v) for v in np.atleast_1d(cue_draw)]
    state = TMazeState(corridor_lengths=lengths, cues=cues, max_steps=config.max_steps or 0)
    return state, tmaze_observe(state)


def tmaze_observe(state: TMazeState) -> Observation:
    """(cue_left, cue_right, position / corridor length).

    The cue pair is one-hot only on the corridor's first step (position 0).
    """
    if state.position == 0:
        c1, c2 = _CUE_ROW[state.cues[state.corridor]]
    else:
        c1, c2 = 0.0, 0.0
    return Observation(np.array([c1, c2, state.position / state.current_length]))


def tmaze_step(state: TMazeState, action: int) -> StepResult:
    """Advance one step, mutating ``state``.

    Mid-corridor, MOVE_FORWARD advances and TURN_* idles, both at the living
    penalty. At a junction, the turn matching the corridor's cue pays +1 and
    either ends the episode (last corridor) or enters the next corridor; the
    opposite turn pays -1 and terminates. A wrong turn ends progress.
    """
    if state.done:
        raise SteppedAfterDone("episode already finished")
    action = TMazeAction(action)

    info: dict = {"corridor": state.corridor, "position": state.position, "cue_visible": state.position == 0}
    terminated = False
    reward = STEP_PENALTY

    if state.at_junction and action is not TMazeAction.MOVE_FORWARD:
        correct = action is _TURN_FOR_CUE[state.cues[state.corridor]]
        info["junction_correct"] = correct
        if correct:
            reward = CORRECT_TURN_REWARD
            state.corridors_passed += 1
            if state.corridor == len(state.corridor_lengths) - 1:
                terminated = True
                info["success"] = True
            else:
                state.corridor += 1
                state.position = 0
        else:
            reward = WRONG_TURN_REWARD
            terminated = True
            info["success"] = False
    elif action is TMazeAction.MOVE_FORWARD and not state.at_junction:
        state.position += 1
    # else: forward at the junction, or a turn mid-corridor — idle.

    state.steps_elapsed += 1
    truncated = not terminated and state.steps_elapsed >= state.max_steps
    if truncated:
        info["success"] = False
    state.done = terminated or truncated
    return StepResult(tmaze_observe(state), reward, terminated, truncated, info)


class TMazeEnv:
    """Episodic wrapper holding a config and the current state."""

    def __init__(self, config: EnvConfig) -> None:
        self.config = validate_config(config)
        self.state: TMazeState | None = None

    def reset(self, seed: int | None = None) -> Observation:
        self.state, obs = tmaze_reset(self.config, seed)
        return obs

    def step(self, action: int) -> StepResult:
        if self.state is None:
            raise RuntimeError("reset() must be called before step()")
        return tmaze_step(self.state, action)


# ---------------------------------------------------------------------------
# Trace dump and correlation-horizon extraction
# ---------------------------------------------------------------------------


def trace_lines(log: EpisodeLog) -> list[str]:
    """One line per step: t, corridor, position, action, reward, cue flag."""
    lines = ["t corridor position action reward cue"]
    for s in log.steps:
        lines.append(
            f"{s.t} {s.info['corridor']} {s.info['position']} "
            f"{TMazeAction(s.action).name} {s.reward:+.2f} {int(s.info['cue_visible'])}"
        )
    return lines


def event_windows(log: EpisodeLog) -> list[EventWindow]:
    """Cue/decision windows for every corridor that reached its junction.

    A corridor's cue is shown for exactly one step (its first observation),
    so delta_t is always 1; the decision is the turn taken at the junction.
    """
    cue_step: dict[int, int] = {}
    windows: list[EventWindow] = []
    for s in log.steps:
        corridor = s.info["corridor"]
        if s.info["cue_visible"]:
            cue_step.setdefault(corridor, s.t)
        if "junction_correct" in s.info:
            windows.append(EventWindow(t_e=cue_step[corridor], delta_t=1, t_r=s.t))
    return windows


def run_episode(config: EnvConfig, actions: list[int], seed: int | None = None) -> EpisodeLog:
    """Replay a fixed action sequence, stopping when the episode ends."""
    config = validate_config(config)
    env = TMazeEnv(config)
    obs = env.reset(seed)
    log = EpisodeLog(
        family=Family.TMAZE,
        config=config,
        seed=config.seed if seed is None else seed,
        initial_observation=obs.values,
    )
    for t, action in enumerate(actions):
        result = env.step(action)
        log.steps.append(
            StepRecord(t, int(action), result.reward, result.terminated, result.truncated, result.obs.values, result.info)
        )
        log.total_return += result.reward
        if result.done:
            log.success = bool(result.info.get("success", False))
            break
    assert env.state is not None
    log.progress = env.state.corridors_passed
    return log
