"""Shared domain types: configs, observations, counter-based randomness, the
episodic environment contract, the three-stage memory-update contract, and the
correlation-horizon diagnostic.

Everything downstream (the two environments, the scripted agents, the
evaluation harness) builds on the types in this module and nothing here
depends on them.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum, IntEnum
from pathlib import Path
from typing import Any, Iterable, Mapping, Protocol, Sequence, runtime_checkable

import numpy as np

# Reserved observation value meaning "this entry is hidden from the agent".
HIDDEN = -1.0


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class ConfigError(ValueError):
    """A configuration is malformed or inconsistent."""


class InvalidDimension(ConfigError):
    """More cubes than grid cells, or a non-positive size."""


class InvalidProbability(ConfigError):
    """A probability field outside [0, 1]."""


class InvalidRegimeForFamily(ConfigError):
    """Corridor-length regime given for (or missing from) the wrong family."""


class SteppedAfterDone(RuntimeError):
    """step() was called on a finished episode."""


class DimensionMismatch(ValueError):
    """Memory vector width does not match the cell's state width."""


# ---------------------------------------------------------------------------
# Enumerations
# ---------------------------------------------------------------------------


class Family(str, Enum):
    TMAZE = "tmaze"
    COLOR_CUBES = "color_cubes"


class Regime(str, Enum):
    FIXED = "fixed"
    UNIFORM = "uniform"


class Mode(str, Enum):
    TRIVIAL = "trivial"
    MEDIUM = "medium"
    EXTREME = "extreme"


# ---------------------------------------------------------------------------
# Environment configuration
# ---------------------------------------------------------------------------

# Default step budgets, generous enough that the scripted oracles never
# truncate: 4*n*l for the maze, 8*G per sub-episode for the grid.
TMAZE_STEP_BUDGET_FACTOR = 4
CUBES_STEP_BUDGET_FACTOR = 8


@dataclass(frozen=True)
class EnvConfig:
    """Declarative description of one benchmark instance.

    Fields not used by the configured family are ignored by validation.
    ``max_steps=None`` means "use the family default budget"; it is filled
    in by :func:`validate_config`.
    """

    family: Family
    regime: Regime | None = None
    corridor_length: int = 5
    corridor_count: int = 1
    grid_size: int = 5
    cube_count: int = 1
    subepisode_count: int = 1
    teleport_prob: float = 0.0
    mode: Mode | None = None
    max_steps: int | None = None
    seed: int = 0


def validate_config(config: EnvConfig) -> EnvConfig:
    """Check and normalize a config.

    Returns a new config with mode-implied fields applied (Trivial forces a
    single cube and a single sub-episode) and the default step budget filled
    in. Raises a :class:`ConfigError` subclass otherwise.
    """
    family = Family(config.family)
    if family is Family.TMAZE:
        if config.regime is None:
            raise InvalidRegimeForFamily("tmaze config requires a corridor-length regime")
        regime = Regime(config.regime)
        if config.corridor_length < 1:
            raise InvalidDimension(f"corridor_length must be >= 1, got {config.corridor_length}")
        if config.corridor_count < 1:
            raise InvalidDimension(f"corridor_count must be >= 1, got {config.corridor_count}")
        max_steps = config.max_steps
        if max_steps is None:
            max_steps = TMAZE_STEP_BUDGET_FACTOR * config.corridor_count * config.corridor_length
        if max_steps < 1:
            raise InvalidDimension(f"max_steps must be >= 1, got {max_steps}")
        return replace(config, family=family, regime=regime, max_steps=max_steps)

    # Color-Cubes
    if config.regime is not None:
        raise InvalidRegimeForFamily("regime is a tmaze-only field; remove it from cubes configs")
    if config.mode is None:
        raise ConfigError("color_cubes config requires a mode (trivial/medium/extreme)")
    mode = Mode(config.mode)
    cube_count = config.cube_count
    subepisodes = config.subepisode_count
    if mode is Mode.TRIVIAL:
        cube_count = 1
        subepisodes = 1
    if config.grid_size < 1:
        raise InvalidDimension(f"grid_size must be >= 1, got {config.grid_size}")
    if cube_count < 1:
        raise InvalidDimension(f"cube_count must be >= 1, got {cube_count}")
    if subepisodes < 1:
        raise InvalidDimension(f"subepisode_count must be >= 1, got {subepisodes}")
    cells = config.grid_size * config.grid_size
    if cube_count > cells:
        raise InvalidDimension(f"{cube_count} cubes cannot fit a {config.grid_size}x{config.grid_size} grid")
    if not 0.0 <= config.teleport_prob <= 1.0:
        raise InvalidProbability(f"teleport_prob must lie in [0, 1], got {config.teleport_prob}")
    max_steps = config.max_steps
    if max_steps is None:
        max_steps = CUBES_STEP_BUDGET_FACTOR * config.grid_size * subepisodes
    if max_steps < 1:
        raise InvalidDimension(f"max_steps must be >= 1, got {max_steps}")
    return replace(
        config,
        family=family,
        mode=mode,
        cube_count=cube_count,
        subepisode_count=subepisodes,
        max_steps=max_steps,
    )


_CONFIG_FIELDS = {f.name for f in fields(EnvConfig)}
_ENUM_FIELDS = {"family": Family, "regime": Regime, "mode": Mode}


def config_from_dict(raw: Mapping[str, Any]) -> EnvConfig:
    """Build and validate an EnvConfig from a plain key/value mapping.

    Keys mirror the EnvConfig field names exactly; unknown keys are an error.
    """
    unknown = set(raw) - _CONFIG_FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "family" not in raw:
        raise ConfigError("config is missing the 'family' key")
    kwargs: dict[str, Any] = {}
    for key, value in raw.items():
        enum_type = _ENUM_FIELDS.get(key)
        if enum_type is not None and value is not None:
            try:
                value = enum_type(value)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
        kwargs[key] = value
    return validate_config(EnvConfig(**kwargs))


def config_to_dict(config: EnvConfig) -> dict[str, Any]:
    """Plain-value mapping, suitable for JSON."""
    out = asdict(config)
    for key in _ENUM_FIELDS:
        if out[key] is not None:
            out[key] = out[key].value
    return out


def load_config(path: str | Path) -> EnvConfig:
    """Load and validate a JSON config file."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {p} must contain a JSON object")
    return config_from_dict(raw)


# ---------------------------------------------------------------------------
# Observations and step results
# ---------------------------------------------------------------------------


@dataclass(slots=True)
class Observation:
    """Fixed-width numeric vector; entries equal to HIDDEN are masked."""

    values: np.ndarray

    def tolist(self) -> list[float]:
        return [float(v) for v in self.values]


@dataclass(slots=True)
class StepResult:
    obs: Observation
    reward: float
    terminated: bool
    truncated: bool
    info: dict[str, Any]

    def __post_init__(self) -> None:
        if self.terminated and self.truncated:
            raise ValueError("terminated and truncated cannot both be set")

    @property
    def done(self) -> bool:
        return self.terminated or self.truncated


@runtime_checkable
class Env(Protocol):
    """Episodic environment contract shared by both families.

    A single instance is single-threaded; distinct instances are independent
    and may be advanced in parallel.
    """

    config: EnvConfig

    def reset(self, seed: int | None = None) -> Observation: ...

    def step(self, action: int) -> StepResult: ...


# ---------------------------------------------------------------------------
# Episode logs
# ---------------------------------------------------------------------------


@dataclass(slots=True)
class StepRecord:
    t: int
    action: int
    reward: float
    terminated: bool
    truncated: bool
    observation: np.ndarray
    info: dict[str, Any]


@dataclass
class EpisodeLog:
    """Per-step trace of one episode plus derived counters.

    ``progress`` counts corridors passed (tmaze) or sub-episodes completed
    (cubes). ``steps[t]`` holds the action taken after seeing observation t
    and the observation it produced (which becomes observation t+1).
    """

    family: Family
    config: EnvConfig
    seed: int
    initial_observation: np.ndarray
    steps: list[StepRecord] = field(default_factory=list)
    success: bool = False
    progress: int = 0
    total_return: float = 0.0

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "family": self.family.value,
            "config": config_to_dict(self.config),
            "seed": self.seed,
            "success": self.success,
            "progress": self.progress,
            "total_return": self.total_return,
            "initial_observation": [float(v) for v in self.initial_observation],
            "steps": [
                {
                    "t": s.t,
                    "action": s.action,
                    "reward": s.reward,
                    "terminated": s.terminated,
                    "truncated": s.truncated,
                    "observation": [float(v) for v in s.observation],
                    "info": s.info,
                }
                for s in self.steps
            ],
        }

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Counter-based randomness
# ---------------------------------------------------------------------------


class Stream(IntEnum):
    """Named independent random streams derived from one episode seed."""

    LAYOUT = 0
    LENGTHS = 1
    CUES = 2
    TELEPORT = 3
    TARGET = 4
    AGENT = 5


class RngStream:
    """Counter-based random stream keyed by (seed, stream_id).

    Each logical draw is generated from its own Philox counter block, so a
    stream reconstructed at any (seed, stream_id, counter) reproduces the
    exact draw sequence from that point, and distinct stream_ids never share
    randomness no matter how many draws either consumes.
    """

    __slots__ = ("seed", "stream_id", "counter", "_bg", "_gen")

    def __init__(self, seed: int, stream_id: int, counter: int = 0) -> None:
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.stream_id = int(stream_id) & 0xFFFFFFFFFFFFFFFF
        self.counter = int(counter)
        self._bg = np.random.Philox(key=np.array([self.seed, self.stream_id], dtype=np.uint64))
        self._gen = np.random.Generator(self._bg)

    def _next(self) -> np.random.Generator:
        # Seek to the counter-th 2^64-sized block; one block region per draw
        # keeps draws of different sizes from ever overlapping.
        st = self._bg.state
        st["state"]["counter"] = np.array([0, self.counter, 0, 0], dtype=np.uint64)
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bg.state = st
        self.counter += 1
        return self._gen

    def integers(self, low: int, high: int, size: int | None = None):
        """Draw from [low, high) — numpy's half-open convention."""
        out = self._next().integers(low, high, size=size)
        return int(out) if size is None else out

    def random(self) -> float:
        return float(self._next().random())

    def permutation(self, n: int) -> np.ndarray:
        return self._next().permutation(n)

    def choice_index(self, n: int) -> int:
        """Uniform index into a sequence of length n."""
        return int(self._next().integers(0, n))


# ---------------------------------------------------------------------------
# Memory-update contract
# ---------------------------------------------------------------------------


@dataclass(slots=True)
class MemoryState:
    """Fixed-width real vector summarizing history for a policy."""

    values: np.ndarray

    @property
    def width(self) -> int:
        return int(self.values.shape[0])


@runtime_checkable
class MemoryCell(Protocol):
    """Three-stage memory update: select/forget, encode, integrate.

    ``forget`` receives the new input as well as the old state because
    practical gated cells condition what they keep on what just arrived;
    constant-behavior cells simply ignore it.
    """

    state_width: int

    def forget(self, m: np.ndarray, eta: Any) -> np.ndarray: ...

    def encode(self, eta: Any) -> np.ndarray: ...

    def integrate(self, kept: np.ndarray, encoded: np.ndarray) -> np.ndarray: ...


def memory_update(m: MemoryState, eta: Any, cell: MemoryCell) -> MemoryState:
    """One memory transition: integrate(forget(m, eta), encode(eta)).

    The three stages are separately invokable on the cell so tests can probe
    each in isolation.
    """
    if m.width != cell.state_width:
        raise DimensionMismatch(f"memory width {m.width} != cell state width {cell.state_width}")
    kept = cell.forget(m.values, eta)
    encoded = cell.encode(eta)
    return MemoryState(cell.integrate(kept, encoded))


# ---------------------------------------------------------------------------
# Correlation-horizon diagnostic
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class EventWindow:
    """An informative event (start t_e, duration delta_t) and the later
    decision at t_r that depends on it."""

    t_e: int
    delta_t: int
    t_r: int

    def __post_init__(self) -> None:
        if self.delta_t < 1:
            raise ValueError(f"delta_t must be >= 1, got {self.delta_t}")
        if self.t_r < self.t_e + self.delta_t:
            raise ValueError(f"decision at t={self.t_r} precedes the end of the event (t_e={self.t_e}, delta_t={self.delta_t})")


def correlation_horizon(w: EventWindow) -> int:
    """Temporal gap between an event and the decision depending on it.

    Equals 1 exactly when the decision immediately follows the event.
    """
    return w.t_r - w.t_e - w.delta_t + 1


def is_memory_intensive(windows: Iterable[EventWindow]) -> bool:
    """True when every event-decision gap exceeds one step.

    An empty window collection is not memory-intensive.
    """
    horizons = [correlation_horizon(w) for w in windows]
    return bool(horizons) and min(horizons) > 1
