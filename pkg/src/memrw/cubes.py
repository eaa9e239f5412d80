"""Color-Cubes: a G x G grid with N uniquely colored cubes, K target phases,
and stochastic teleportation of non-target cubes.

Observability is event-gated, not spatial. Cube data is revealed only when
something happens: the start of a phase shows positions and colors, a
teleport shows positions and colors in Medium mode but positions only in
Extreme mode, and quiet steps show nothing. The agent's own position and the
target color are always visible.

Cube entries in the observation are listed in canonical position order, not
by cube identity. After a positions-only update the agent can recover the
moved cube's color only by diffing the previous position set against the new
one — the inference Extreme mode is built to demand. Stable per-cube slots
would leak identity and make that inference unnecessary.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np

from .core import (
    HIDDEN,
    EnvConfig,
    EpisodeLog,
    Family,
    InvalidDimension,
    Mode,
    Observation,
    RngStream,
    StepRecord,
    SteppedAfterDone,
    StepResult,
    Stream,
    validate_config,
)

INTERACT_REWARD = 1.0
AWAY_PENALTY = -0.01
BAD_INTERACT_PENALTY = -0.01


class CubesAction(IntEnum):
    MOVE_UP = 0
    MOVE_DOWN = 1
    MOVE_LEFT = 2
    MOVE_RIGHT = 3
    INTERACT = 4


# (dx, dy) per movement action; y grows downward.
_MOVES = {
    CubesAction.MOVE_UP: (0, -1),
    CubesAction.MOVE_DOWN: (0, 1),
    CubesAction.MOVE_LEFT: (-1, 0),
    CubesAction.MOVE_RIGHT: (1, 0),
}


class Update(Enum):
    NONE = "none"
    FULL = "full"
    POSITIONS = "positions_only"


@dataclass
class CubesState:
    grid_size: int
    agent: tuple[int, int]
    cube_pos: list[tuple[int, int]]  # by cube id
    cube_color: list[int]  # color id by cube id; a permutation of 0..N-1
    target_color: int
    max_steps: int
    teleport_prob: float
    subepisode_count: int
    mode: Mode
    rng_teleport: RngStream
    rng_target: RngStream
    subepisodes_done: int = 0
    steps_elapsed: int = 0
    pending: Update = Update.FULL
    done: bool = False

    @property
    def target_cube(self) -> int:
        return self.cube_color.index(self.target_color)


def cubes_reset(config: EnvConfig, seed: int | None = None) -> tuple[CubesState, Observation]:
    """Place cubes on distinct cells, the agent on a cube-free cell, and
    sample the first target; the first observation is a full state update."""
    config = validate_config(config)
    if seed is None:
        seed = config.seed
    g, n = config.grid_size, config.cube_count
    if n > g * g - 1:
        raise InvalidDimension(f"{n} cubes leave no free spawn cell on a {g}x{g} grid")
    layout = RngStream(seed, Stream.LAYOUT)
    cells = layout.permutation(g * g)
    cube_pos = [(int(c) % g, int(c) // g) for c in cells[:n]]
    agent = (int(cells[n]) % g, int(cells[n]) // g)
    cube_color = [int(c) for c in layout.permutation(n)]
    target = RngStream(seed, Stream.TARGET).choice_index(n)
    state = CubesState(
        grid_size=g,
        agent=agent,
        cube_pos=cube_pos,
        cube_color=cube_color,
        target_color=target,
        max_steps=config.max_steps or 0,
        teleport_prob=config.teleport_prob,
        subepisode_count=config.subepisode_count,
        mode=config.mode or Mode.MEDIUM,
        rng_teleport=RngStream(seed, Stream.TELEPORT),
        rng_target=RngStream(seed, Stream.TARGET, counter=1),
    )
    return state, cubes_observe(state)


def cubes_observe(state: CubesState, mode: Mode | None = None) -> Observation:
    """[agent x, y; one (x, y, color-or-hidden) triple per cube; target color].

    Cube triples are sorted by position. The pending update decides what the
    triples carry and is consumed by this call: full -> positions and colors,
    positions_only -> positions with colors hidden, none -> all hidden.
    """
    mode = state.mode if mode is None else mode
    n = len(state.cube_pos)
    values = np.empty(2 + 3 * n + 1)
    values[0], values[1] = state.agent
    pending, state.pending = state.pending, Update.NONE
    if pending is Update.NONE:
        values[2 : 2 + 3 * n] = HIDDEN
    else:
        order = sorted(range(n), key=lambda i: state.cube_pos[i])
        for slot, i in enumerate(order):
            base = 2 + 3 * slot
            values[base], values[base + 1] = state.cube_pos[i]
            values[base + 2] = state.cube_color[i] if pending is Update.FULL else HIDDEN
    values[-1] = state.target_color
    return Observation(values)


def _free_cells(state: CubesState) -> list[tuple[int, int]]:
    occupied = set(state.cube_pos)
    g = state.grid_size
    return [(x, y) for y in range(g) for x in range(g) if (x, y) not in occupied]


def _teleport(state: CubesState, cube: int) -> None:
    free = _free_cells(state)
    state.cube_pos[cube] = free[state.rng_teleport.choice_index(len(free))]


def cubes_step(state: CubesState, action: int) -> StepResult:
    """Advance one step, mutating ``state``.

    Movement is clamped at the grid edge and penalized only when it strictly
    increases Manhattan distance to the target cube. INTERACT on the target
    completes a sub-episode: the collected cube respawns elsewhere, a new
    target color is drawn from the other colors, and a full update is issued.
    On every step without a successful interaction one uniformly chosen
    non-target cube teleports with probability teleport_prob; the update it
    triggers is full in Medium mode but positions-only in Extreme mode.
    """
    if state.done:
        raise SteppedAfterDone("episode already finished")
    action = CubesAction(action)

    info: dict = {"teleport_occurred": False, "interaction_success": False}
    reward = 0.0
    terminated = False
    interacted = False

    if action is CubesAction.INTERACT:
        target = state.target_cube
        if state.agent == state.cube_pos[target]:
            interacted = True
            reward = INTERACT_REWARD
            state.subepisodes_done += 1
            info["interaction_success"] = True
            if state.subepisodes_done >= state.subepisode_count:
                terminated = True
                info["success"] = True
            else:
                _teleport(state, target)
                if len(state.cube_color) > 1:
                    others = [c for c in state.cube_color if c != state.target_color]
                    state.target_color = others[state.rng_target.choice_index(len(others))]
            state.pending = Update.FULL
        else:
            reward = BAD_INTERACT_PENALTY
    else:
        dx, dy = _MOVES[action]
        g = state.grid_size
        x = min(max(state.agent[0] + dx, 0), g - 1)
        y = min(max(state.agent[1] + dy, 0), g - 1)
        tx, ty = state.cube_pos[state.target_cube]
        before = abs(state.agent[0] - tx) + abs(state.agent[1] - ty)
        after = abs(x - tx) + abs(y - ty)
        state.agent = (x, y)
        if after > before:
            reward = AWAY_PENALTY

    if not interacted and len(state.cube_pos) > 1 and state.rng_teleport.random() < state.teleport_prob:
        non_targets = [i for i in range(len(state.cube_pos)) if i != state.target_cube]
        _teleport(state, non_targets[state.rng_teleport.choice_index(len(non_targets))])
        state.pending = Update.FULL if state.mode is not Mode.EXTREME else Update.POSITIONS
        info["teleport_occurred"] = True

    state.steps_elapsed += 1
    truncated = not terminated and state.steps_elapsed >= state.max_steps
    if truncated:
        info["success"] = False
    state.done = terminated or truncated

    obs = cubes_observe(state)
    info["full_state_update"] = bool(obs.values[4] != HIDDEN) if state.cube_pos else False
    info["positions_update"] = bool(obs.values[2] != HIDDEN and obs.values[4] == HIDDEN)
    info["subepisodes_done"] = state.subepisodes_done
    return StepResult(obs, reward, terminated, truncated, info)


class ColorCubesEnv:
    """Episodic wrapper holding a config and the current state."""

    def __init__(self, config: EnvConfig) -> None:
        self.config = validate_config(config)
        self.state: CubesState | None = None

    def reset(self, seed: int | None = None) -> Observation:
        self.state, obs = cubes_reset(self.config, seed)
        return obs

    def step(self, action: int) -> StepResult:
        if self.state is None:
            raise RuntimeError("reset() must be called before step()")
        return cubes_step(self.state, action)


# ---------------------------------------------------------------------------
# Rendering and episode replay
# ---------------------------------------------------------------------------


def render_observation(obs: Observation, grid_size: int) -> str:
    """Agent's-eye grid: @ agent, digits colors, ? position-only cubes,
    . empty. Cubes absent from the observation simply do not appear."""
    n = (len(obs.values) - 3) // 3
    grid = [["." for _ in range(grid_size)] for _ in range(grid_size)]
    for slot in range(n):
        x, y, color = obs.values[2 + 3 * slot : 5 + 3 * slot]
        if x == HIDDEN:
            continue
        grid[int(y)][int(x)] = "?" if color == HIDDEN else str(int(color))
    ax, ay = int(obs.values[0]), int(obs.values[1])
    grid[ay][ax] = "@"
    header = f"target={int(obs.values[-1])}"
    return "\n".join([header] + ["".join(row) for row in grid])


def render_state(state: CubesState) -> str:
    """Ground-truth grid for debugging; ignores observability gating."""
    grid = [["." for _ in range(state.grid_size)] for _ in range(state.grid_size)]
    for (x, y), color in zip(state.cube_pos, state.cube_color):
        grid[y][x] = str(color)
    ax, ay = state.agent
    grid[ay][ax] = "@"
    header = f"target={state.target_color} done={state.subepisodes_done}/{state.subepisode_count}"
    return "\n".join([header] + ["".join(row) for row in grid])


def run_episode(config: EnvConfig, actions: list[int], seed: int | None = None) -> EpisodeLog:
    """Replay a fixed action sequence, stopping when the episode ends."""
    config = validate_config(config)
    env = ColorCubesEnv(config)
    obs = env.reset(seed)
    log = EpisodeLog(
        family=Family.COLOR_CUBES,
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
    log.progress = env.state.subepisodes_done
    return log
