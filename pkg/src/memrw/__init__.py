"""Memory-rewriting benchmarks: Endless T-Maze and Color-Cubes, scripted
reference agents, and a deterministic evaluation harness."""

from .agents import (
    AGENT_NAMES,
    Agent,
    AgentEnvMismatch,
    AmnesiacCubesAgent,
    InferenceAmbiguous,
    LatchAgent,
    LatchCell,
    LatchCellWeights,
    OracleCubesAgent,
    OracleTMazeAgent,
    RandomTurnAgent,
    StaleCueAgent,
    latch_cell_construct,
    make_agent,
)
from .core import (
    HIDDEN,
    ConfigError,
    DimensionMismatch,
    EnvConfig,
    EpisodeLog,
    EventWindow,
    Family,
    InvalidDimension,
    InvalidProbability,
    InvalidRegimeForFamily,
    MemoryCell,
    MemoryState,
    Mode,
    Observation,
    Regime,
    RngStream,
    SteppedAfterDone,
    StepResult,
    Stream,
    config_from_dict,
    config_to_dict,
    correlation_horizon,
    is_memory_intensive,
    load_config,
    memory_update,
    validate_config,
)
from .cubes import ColorCubesEnv, CubesAction, cubes_observe, cubes_reset, cubes_step
from .evaluation import (
    ConfigResult,
    EvalReport,
    EvalSpec,
    FamilyMismatch,
    GeneralizationGrid,
    Tag,
    build_generalization_grid,
    classify_generalization,
    derive_episode_seed,
    make_env,
    progress_metric,
    record_episode,
    rollout,
    run_eval,
)
from .tmaze import TMazeAction, TMazeEnv, event_windows, tmaze_observe, tmaze_reset, tmaze_step

__version__ = "0.1.0"
