"""Evaluation protocol: seeded episode rollouts, success-rate aggregation as
mean +/- SEM over independent runs, generalization tagging of eval configs
against the training config, and report export as JSON and CSV.

Episode seeds are derived deterministically from (base seed, run index,
episode index), so every agent evaluated under the same base seed faces
identical episode layouts. That makes per-seed dominance comparisons between
agents meaningful.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Mapping

import numpy as np

from .agents import Agent, AgentEnvMismatch, agent_supports, make_agent
from .core import Env, EnvConfig, EpisodeLog, Family, config_from_dict, config_to_dict, validate_config
from .cubes import ColorCubesEnv
from .tmaze import TMazeEnv


class FamilyMismatch(ValueError):
    """Train and eval configs are not comparable (family or regime differ)."""


class Tag(str, Enum):
    MATCHED = "matched"
    INTERPOLATION = "interpolation"
    EXTRAPOLATION = "extrapolation"
    MIXED = "mixed"


def make_env(config: EnvConfig) -> Env:
    config = validate_config(config)
    if config.family is Family.TMAZE:
        return TMazeEnv(config)
    return ColorCubesEnv(config)


def derive_episode_seed(base_seed: int, run_idx: int, episode_idx: int) -> int:
    """Stable 64-bit seed for one (run, episode) cell of an evaluation."""
    ss = np.random.SeedSequence((int(base_seed), int(run_idx), int(episode_idx)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# ---------------------------------------------------------------------------
# Rollouts
# ---------------------------------------------------------------------------


@dataclass(slots=True)
class EpisodeOutcome:
    success: bool
    progress: int
    total_return: float
    steps: int


def rollout(env: Env, agent: Agent, seed: int) -> EpisodeOutcome:
    """Run one episode to completion; the env's own step budget bounds it."""
    obs = env.reset(seed)
    agent.reset(seed)
    total = 0.0
    steps = 0
    progress = 0
    while True:
        result = env.step(agent.act(obs))
        total += result.reward
        steps += 1
        if "subepisodes_done" in result.info:
            progress = result.info["subepisodes_done"]
        elif result.info.get("junction_correct"):
            progress += 1
        if result.done:
            return EpisodeOutcome(bool(result.info.get("success", False)), progress, total, steps)
        obs = result.obs


def record_episode(config: EnvConfig, agent: Agent, seed: int) -> EpisodeLog:
    """Like rollout, but keeps the full per-step trace."""
    from .core import StepRecord

    config = validate_config(config)
    env = make_env(config)
    obs = env.reset(seed)
    agent.reset(seed)
    log = EpisodeLog(family=config.family, config=config, seed=seed, initial_observation=obs.values)
    t = 0
    while True:
        action = agent.act(obs)
        result = env.step(action)
        log.steps.append(
            StepRecord(t, int(action), result.reward, result.terminated, result.truncated, result.obs.values, result.info)
        )
        log.total_return += result.reward
        t += 1
        if result.done:
            log.success = bool(result.info.get("success", False))
            break
        obs = result.obs
    log.progress = progress_metric(log)
    return log


def progress_metric(log: EpisodeLog) -> int:
    """Corridors passed (tmaze) or sub-episodes completed (cubes)."""
    if log.family is Family.TMAZE:
        return sum(1 for s in log.steps if s.info.get("junction_correct") is True)
    done = 0
    for s in log.steps:
        done = max(done, int(s.info.get("subepisodes_done", 0)))
    return done


# ---------------------------------------------------------------------------
# Specs and reports
# ---------------------------------------------------------------------------


@dataclass
class EvalSpec:
    """One evaluation job: an agent, a training config, and the configs to
    evaluate it on (the training config itself for matched evaluation)."""

    train_config: EnvConfig
    eval_configs: list[EnvConfig]
    agent: str
    n_runs: int = 10
    episodes_per_run: int = 100

    def validate(self) -> "EvalSpec":
        self.train_config = validate_config(self.train_config)
        self.eval_configs = [validate_config(c) for c in self.eval_configs]
        if self.n_runs < 1 or self.episodes_per_run < 1:
            raise ValueError("n_runs and episodes_per_run must be >= 1")
        for cfg in self.eval_configs:
            if not agent_supports(self.agent, cfg.family):
                raise AgentEnvMismatch(f"agent {self.agent!r} does not play {cfg.family.value}")
        return self


@dataclass
class ConfigResult:
    """Aggregated outcome of one eval config under one agent."""

    config: EnvConfig
    tag: Tag
    per_run_success: list[float]
    success_mean: float
    success_sem: float
    progress_histogram: dict[int, int]

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "config": config_to_dict(self.config),
            "tag": self.tag.value,
            "per_run_success": self.per_run_success,
            "success_mean": self.success_mean,
            "success_sem": self.success_sem,
            "progress_histogram": {str(k): v for k, v in sorted(self.progress_histogram.items())},
        }


@dataclass
class EvalReport:
    """All ConfigResults of one EvalSpec plus the provenance to rerun it."""

    agent: str
    train_config: EnvConfig
    n_runs: int
    episodes_per_run: int
    base_seed: int
    results: list[ConfigResult] = field(default_factory=list)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "agent": self.agent,
            "train_config": config_to_dict(self.train_config),
            "n_runs": self.n_runs,
            "episodes_per_run": self.episodes_per_run,
            "base_seed": self.base_seed,
            "results": [r.to_json_dict() for r in self.results],
        }

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n")


def report_from_json_dict(raw: Mapping[str, Any]) -> EvalReport:
    report = EvalReport(
        agent=raw["agent"],
        train_config=config_from_dict(raw["train_config"]),
        n_runs=int(raw["n_runs"]),
        episodes_per_run=int(raw["episodes_per_run"]),
        base_seed=int(raw["base_seed"]),
    )
    for entry in raw["results"]:
        report.results.append(
            ConfigResult(
                config=config_from_dict(entry["config"]),
                tag=Tag(entry["tag"]),
                per_run_success=[float(v) for v in entry["per_run_success"]],
                success_mean=float(entry["success_mean"]),
                success_sem=float(entry["success_sem"]),
                progress_histogram={int(k): int(v) for k, v in entry["progress_histogram"].items()},
            )
        )
    return report


def mean_sem(per_run: list[float]) -> tuple[float, float]:
    """Mean and standard error of the mean across runs; SEM is 0 for a
    single run and whenever all runs agree."""
    arr = np.asarray(per_run)
    mean = float(arr.mean())
    sem = float(arr.std(ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return mean, sem


def classify_generalization(train: EnvConfig, eval_config: EnvConfig) -> Tag:
    """Interpolation means every varied axis got easier (shorter corridors,
    fewer rewrites); extrapolation means every varied axis got harder; a
    split is Mixed and excluded from paper-style plots."""
    train = validate_config(train)
    eval_config = validate_config(eval_config)
    if train.family is not eval_config.family:
        raise FamilyMismatch(f"{train.family.value} vs {eval_config.family.value}")
    if train.family is Family.TMAZE:
        if train.regime is not eval_config.regime:
            raise FamilyMismatch(f"regimes differ: {train.regime} vs {eval_config.regime}")
        axes = (
            (eval_config.corridor_length, train.corridor_length),
            (eval_config.corridor_count, train.corridor_count),
        )
    else:
        if train.mode is not eval_config.mode:
            raise FamilyMismatch(f"modes differ: {train.mode} vs {eval_config.mode}")
        axes = (
            (eval_config.cube_count, train.cube_count),
            (eval_config.subepisode_count, train.subepisode_count),
        )
    if all(e == t for e, t in axes):
        return Tag.MATCHED
    if all(e <= t for e, t in axes):
        return Tag.INTERPOLATION
    if all(e >= t for e, t in axes):
        return Tag.EXTRAPOLATION
    return Tag.MIXED


# ---------------------------------------------------------------------------
# The evaluation loop
# ---------------------------------------------------------------------------


def _run_block(config: EnvConfig, agent_name: str, base_seed: int, run_idx: int, episodes: int) -> tuple[float, list[int]]:
    """One run: `episodes` episodes with derived seeds; returns (success
    rate, per-episode progress)."""
    env = make_env(config)
    agent = make_agent(agent_name, config.family)
    successes = 0
    progress: list[int] = []
    for ep in range(episodes):
        outcome = rollout(env, agent, derive_episode_seed(base_seed, run_idx, ep))
        successes += outcome.success
        progress.append(outcome.progress)
    return successes / episodes, progress


def run_eval(
    spec: EvalSpec,
    base_seed: int = 0,
    workers: int = 1,
    env_factory: Callable[[EnvConfig], Env] | None = None,
    agent_factory: Callable[[str, Family], Agent] | None = None,
) -> EvalReport:
    """Execute n_runs x episodes_per_run episodes per eval config.

    An episode counts as a success iff the environment sets its success flag
    (all junctions correct / all sub-episodes done before truncation).
    Aggregation is a deterministic fold over (run, episode) order, so the
    report is bit-identical for identical inputs regardless of `workers`.
    """
    spec = spec.validate()
    report = EvalReport(
        agent=spec.agent,
        train_config=spec.train_config,
        n_runs=spec.n_runs,
        episodes_per_run=spec.episodes_per_run,
        base_seed=base_seed,
    )
    env_factory = env_factory or make_env
    agent_factory = agent_factory or make_agent
    for config in spec.eval_configs:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                blocks = list(
                    pool.map(
                        _run_block,
                        [config] * spec.n_runs,
                        [spec.agent] * spec.n_runs,
                        [base_seed] * spec.n_runs,
                        range(spec.n_runs),
                        [spec.episodes_per_run] * spec.n_runs,
                    )
                )
        else:
            env = env_factory(config)
            agent = agent_factory(spec.agent, config.family)
            blocks = []
            for run_idx in range(spec.n_runs):
                successes = 0
                progress: list[int] = []
                for ep in range(spec.episodes_per_run):
                    outcome = rollout(env, agent, derive_episode_seed(base_seed, run_idx, ep))
                    successes += outcome.success
                    progress.append(outcome.progress)
                blocks.append((successes / spec.episodes_per_run, progress))
        per_run = [rate for rate, _ in blocks]
        histogram: dict[int, int] = {}
        for _, progresses in blocks:
            for p in progresses:
                histogram[p] = histogram.get(p, 0) + 1
        mean, sem = mean_sem(per_run)
        report.results.append(
            ConfigResult(
                config=config,
                tag=classify_generalization(spec.train_config, config),
                per_run_success=per_run,
                success_mean=mean,
                success_sem=sem,
                progress_histogram=histogram,
            )
        )
    return report


# ---------------------------------------------------------------------------
# CSV export and the generalization grid
# ---------------------------------------------------------------------------

CSV_COLUMNS = [
    "agent",
    "family",
    "regime",
    "mode",
    "corridor_length",
    "corridor_count",
    "grid_size",
    "cube_count",
    "subepisode_count",
    "teleport_prob",
    "tag",
    "success_mean",
    "success_sem",
    "n_runs",
    "episodes_per_run",
]


def report_csv_rows(report: EvalReport) -> list[dict[str, str]]:
    """One CSV row per eval config; success numbers fixed to 2 decimals to
    match the tables (full precision lives in the JSON report)."""
    rows = []
    for r in report.results:
        c = r.config
        rows.append(
            {
                "agent": report.agent,
                "family": c.family.value,
                "regime": c.regime.value if c.regime else "",
                "mode": c.mode.value if c.mode else "",
                "corridor_length": str(c.corridor_length) if c.family is Family.TMAZE else "",
                "corridor_count": str(c.corridor_count) if c.family is Family.TMAZE else "",
                "grid_size": str(c.grid_size) if c.family is Family.COLOR_CUBES else "",
                "cube_count": str(c.cube_count) if c.family is Family.COLOR_CUBES else "",
                "subepisode_count": str(c.subepisode_count) if c.family is Family.COLOR_CUBES else "",
                "teleport_prob": f"{c.teleport_prob:.2f}" if c.family is Family.COLOR_CUBES else "",
                "tag": r.tag.value,
                "success_mean": f"{r.success_mean:.2f}",
                "success_sem": f"{r.success_sem:.2f}",
                "n_runs": str(report.n_runs),
                "episodes_per_run": str(report.episodes_per_run),
            }
        )
    return rows


def write_csv(rows: list[dict[str, str]], path: str | Path) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue())


@dataclass
class GeneralizationGrid:
    """ConfigResults indexed by (train config, eval config), one agent."""

    agent: str
    cells: dict[tuple[str, str], ConfigResult] = field(default_factory=dict)

    @staticmethod
    def config_key(config: EnvConfig) -> str:
        c = validate_config(config)
        if c.family is Family.TMAZE:
            return f"{c.regime.value}:l={c.corridor_length}:n={c.corridor_count}"
        return f"{c.mode.value}:G={c.grid_size}:N={c.cube_count}:K={c.subepisode_count}"

    def matrix_csv(self) -> str:
        """Train configs as rows, eval configs as columns, mean+/-sem cells."""
        train_keys = sorted({t for t, _ in self.cells})
        eval_keys = sorted({e for _, e in self.cells})
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["train\\eval"] + eval_keys)
        for t in train_keys:
            row = [t]
            for e in eval_keys:
                cell = self.cells.get((t, e))
                row.append(f"{cell.success_mean:.2f}+/-{cell.success_sem:.2f}" if cell else "")
            writer.writerow(row)
        return buf.getvalue()


def build_generalization_grid(reports: list[EvalReport]) -> GeneralizationGrid:
    """Combine one agent's reports into a grid; every train config must have
    its matched cell."""
    agents = {r.agent for r in reports}
    if len(agents) != 1:
        raise ValueError(f"grid needs a single agent, got {sorted(agents)}")
    grid = GeneralizationGrid(agent=agents.pop())
    for report in reports:
        t_key = GeneralizationGrid.config_key(report.train_config)
        for result in report.results:
            grid.cells[(t_key, GeneralizationGrid.config_key(result.config))] = result
    for t_key in {t for t, _ in grid.cells}:
        if (t_key, t_key) not in grid.cells:
            raise ValueError(f"train config {t_key} has no matched cell")
    return grid
