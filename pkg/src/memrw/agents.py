"""Scripted and hand-constructed reference agents.

The oracles bound each benchmark's difficulty from above (they certify a
configuration is solvable under the declared observability, reading only the
observation vector); the stale/random/amnesiac baselines bound it from below.
The latch cell is a gated recurrence whose weights are written in closed form
rather than learned: it stores the most recent nonzero cue, a training-free
witness that gating suffices for memory rewriting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Protocol, runtime_checkable

import numpy as np

from .core import HIDDEN, Family, MemoryState, Observation, RngStream, Stream, memory_update
from .cubes import CubesAction
from .tmaze import LEFT, RIGHT, TMazeAction

_JUNCTION = 1.0  # normalized position at a junction


class AgentEnvMismatch(ValueError):
    """Agent family does not match the environment family."""


class InferenceAmbiguous(RuntimeError):
    """More than one cube moved between position updates.

    The environment guarantees at most one; raising this is a tripwire for a
    broken trace, never an expected runtime condition.
    """


@runtime_checkable
class Agent(Protocol):
    family: Family

    def reset(self, seed: int) -> None: ...

    def act(self, obs: Observation) -> int: ...


# ---------------------------------------------------------------------------
# T-Maze agents
# ---------------------------------------------------------------------------


class OracleTMazeAgent:
    """Stores the cue whenever one is shown, overwriting any prior cue, and
    turns accordingly at each junction. Succeeds on every configuration."""

    family = Family.TMAZE

    def __init__(self) -> None:
        self._cue = LEFT

    def reset(self, seed: int) -> None:
        self._cue = LEFT

    def act(self, obs: Observation) -> int:
        c1, c2, pos = obs.values
        if c1 or c2:
            self._cue = LEFT if c1 else RIGHT
        if pos == _JUNCTION:
            return TMazeAction.TURN_LEFT if self._cue == LEFT else TMazeAction.TURN_RIGHT
        return TMazeAction.MOVE_FORWARD


class StaleCueAgent:
    """Retention without rewriting: keeps the first cue of the episode and
    turns per that cue at every junction."""

    family = Family.TMAZE

    def __init__(self) -> None:
        self._cue: int | None = None

    def reset(self, seed: int) -> None:
        self._cue = None

    def act(self, obs: Observation) -> int:
        c1, c2, pos = obs.values
        if self._cue is None and (c1 or c2):
            self._cue = LEFT if c1 else RIGHT
        if pos == _JUNCTION:
            return TMazeAction.TURN_LEFT if self._cue == LEFT else TMazeAction.TURN_RIGHT
        return TMazeAction.MOVE_FORWARD


class RandomTurnAgent:
    """Memoryless: forward mid-corridor, a fair coin at each junction."""

    family = Family.TMAZE

    def __init__(self) -> None:
        self._rng = RngStream(0, Stream.AGENT)

    def reset(self, seed: int) -> None:
        self._rng = RngStream(seed, Stream.AGENT)

    def act(self, obs: Observation) -> int:
        if obs.values[2] == _JUNCTION:
            return TMazeAction.TURN_LEFT if self._rng.integers(0, 2) == 0 else TMazeAction.TURN_RIGHT
        return TMazeAction.MOVE_FORWARD


# ---------------------------------------------------------------------------
# Latch cell: closed-form gated recurrence
# ---------------------------------------------------------------------------

# Pre-activation magnitude at which the gates saturate. sigmoid(20) is within
# 2.1e-9 of 1, so the stored unit's argmax survives > 1e6 retention steps in
# double precision.
GATE_SATURATION = 20.0


@dataclass(frozen=True)
class LatchCellWeights:
    """Gate weights of a two-unit gated recurrence (one unit per direction).

    forget gate  f(x) = sigmoid(forget_w @ x + forget_b): ~1 on a zero input
    (keep everything), ~0 on a one-hot cue (erase before rewriting).
    write gate   g(x) = sigmoid(write_w @ x + write_b): the mirror image.
    """

    forget_w: np.ndarray
    forget_b: np.ndarray
    write_w: np.ndarray
    write_b: np.ndarray


def latch_cell_construct(saturation: float = GATE_SATURATION) -> "LatchCell":
    """Closed-form weights for a cue latch; nothing is learned.

    On a one-hot cue the forget gate saturates closed (old state zeroed) and
    the write gate saturates open (new cue written); on a (0, 0) input the
    forget gate saturates open (state preserved) and the write gate
    contributes nothing. The induced policy solves Endless T-Maze perfectly.
    """
    s = float(saturation)
    ones = np.ones((2, 2))
    weights = LatchCellWeights(
        forget_w=-2.0 * s * ones,
        forget_b=np.full(2, s),
        write_w=2.0 * s * ones,
        write_b=np.full(2, -s),
    )
    return LatchCell(weights)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


class LatchCell:
    """Gated memory cell over 2-d cue inputs with state width 2."""

    state_width = 2

    def __init__(self, weights: LatchCellWeights) -> None:
        self.weights = weights

    def forget(self, m: np.ndarray, eta: Any) -> np.ndarray:
        x = np.asarray(eta, dtype=float)
        return _sigmoid(self.weights.forget_w @ x + self.weights.forget_b) * m

    def encode(self, eta: Any) -> np.ndarray:
        x = np.asarray(eta, dtype=float)
        return _sigmoid(self.weights.write_w @ x + self.weights.write_b) * x

    def integrate(self, kept: np.ndarray, encoded: np.ndarray) -> np.ndarray:
        return kept + encoded


class LatchAgent:
    """Drives the maze with the constructed latch cell as its only memory:
    argmax of the cell state picks the turn at junctions."""

    family = Family.TMAZE

    def __init__(self) -> None:
        self.cell = latch_cell_construct()
        self._m = MemoryState(np.zeros(2))

    def reset(self, seed: int) -> None:
        self._m = MemoryState(np.zeros(2))

    def act(self, obs: Observation) -> int:
        self._m = memory_update(self._m, obs.values[:2], self.cell)
        if obs.values[2] == _JUNCTION:
            return TMazeAction.TURN_LEFT if int(np.argmax(self._m.values)) == LEFT else TMazeAction.TURN_RIGHT
        return TMazeAction.MOVE_FORWARD


# ---------------------------------------------------------------------------
# Color-Cubes agents
# ---------------------------------------------------------------------------


def _parse_cubes_obs(values: np.ndarray) -> tuple[tuple[int, int], list[tuple[int, int, float]], int]:
    n = (len(values) - 3) // 3
    agent = (int(values[0]), int(values[1]))
    triples = [(int(values[2 + 3 * i]), int(values[3 + 3 * i]), float(values[4 + 3 * i])) for i in range(n)]
    return agent, triples, int(values[-1])


def _step_toward(agent: tuple[int, int], goal: tuple[int, int]) -> int:
    """Greedy Manhattan descent, x axis before y."""
    ax, ay = agent
    gx, gy = goal
    if ax != gx:
        return CubesAction.MOVE_RIGHT if gx > ax else CubesAction.MOVE_LEFT
    return CubesAction.MOVE_DOWN if gy > ay else CubesAction.MOVE_UP


class OracleCubesAgent:
    """Maintains a position-to-color map from the observation stream alone.

    Full updates overwrite the map. Positions-only updates (Extreme
    teleports) are resolved by set difference: the one vanished position's
    color is reassigned to the one new position. It then walks the shortest
    path to the believed target cell and interacts.
    """

    family = Family.COLOR_CUBES

    def __init__(self) -> None:
        self._map: dict[tuple[int, int], int] = {}

    def reset(self, seed: int) -> None:
        self._map = {}

    def act(self, obs: Observation) -> int:
        agent, triples, target = _parse_cubes_obs(obs.values)
        if triples and triples[0][0] != HIDDEN:
            if triples[0][2] != HIDDEN:
                self._map = {(x, y): int(c) for x, y, c in triples}
            else:
                new_positions = {(x, y) for x, y, _ in triples}
                old_positions = set(self._map)
                vanished = old_positions - new_positions
                appeared = new_positions - old_positions
                if len(vanished) > 1 or len(appeared) > 1:
                    raise InferenceAmbiguous(f"{len(vanished)} cubes vanished, {len(appeared)} appeared")
                if vanished:
                    color = self._map.pop(vanished.pop())
                    self._map[appeared.pop()] = color
        goal = next(pos for pos, color in self._map.items() if color == target)
        if agent == goal:
            return CubesAction.INTERACT
        return _step_toward(agent, goal)


class AmnesiacCubesAgent:
    """Lower bound: trusts only the latest data-bearing observation.

    While that observation carried positions and colors it walks to the
    target cell it names. A positions-only update breaks the color binding,
    after which the agent random-walks and interacts whenever it stands on a
    cell the latest snapshot listed as occupied (each such cell is tried
    once per snapshot).
    """

    family = Family.COLOR_CUBES

    def __init__(self) -> None:
        self._rng = RngStream(0, Stream.AGENT)
        self._goal: tuple[int, int] | None = None
        self._occupied: set[tuple[int, int]] = set()

    def reset(self, seed: int) -> None:
        self._rng = RngStream(seed, Stream.AGENT)
        self._goal = None
        self._occupied = set()

    def act(self, obs: Observation) -> int:
        agent, triples, target = _parse_cubes_obs(obs.values)
        if triples and triples[0][0] != HIDDEN:
            self._occupied = {(x, y) for x, y, _ in triples}
            if triples[0][2] != HIDDEN:
                self._goal = next((x, y) for x, y, c in triples if int(c) == target)
            else:
                self._goal = None
        if self._goal is not None:
            if agent == self._goal:
                return CubesAction.INTERACT
            return _step_toward(agent, self._goal)
        if agent in self._occupied:
            self._occupied.discard(agent)
            return CubesAction.INTERACT
        return int(self._rng.integers(0, 4))


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

AGENT_NAMES = ("oracle", "stale", "random", "latch", "amnesiac")

_TMAZE_AGENTS = {
    "oracle": OracleTMazeAgent,
    "stale": StaleCueAgent,
    "random": RandomTurnAgent,
    "latch": LatchAgent,
}
_CUBES_AGENTS = {
    "oracle": OracleCubesAgent,
    "amnesiac": AmnesiacCubesAgent,
}


def make_agent(name: str, family: Family) -> Agent:
    """Instantiate a registered agent for the given environment family."""
    table = _TMAZE_AGENTS if Family(family) is Family.TMAZE else _CUBES_AGENTS
    if name not in table:
        if name in AGENT_NAMES:
            raise AgentEnvMismatch(f"agent {name!r} does not play {Family(family).value}")
        raise ValueError(f"unknown agent {name!r}; choose from {AGENT_NAMES}")
    return table[name]()


def agent_supports(name: str, family: Family) -> bool:
    table = _TMAZE_AGENTS if Family(family) is Family.TMAZE else _CUBES_AGENTS
    return name in table
