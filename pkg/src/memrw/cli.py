"""Command-line front end.

    memrw run    --env cfg.json --agent oracle --seed 7 [--out DIR]
    memrw sweep  --manifest paper_grid --agent oracle --out DIR [...]
    memrw report --results DIR --out DIR [--plots]

Exit codes: 0 success, 2 usage/config error, 3 runtime error. Sweep output is
byte-identical across repeated invocations with the same manifest and base
seed. The bundled ``paper_grid`` manifest covers the full published
configuration grid: corridor lengths {5, 10} x corridor counts {1, 3, 5, 10}
under both length regimes, plus the three cube modes at their standard
parameters (grid 5, 3 cubes, 3 sub-episodes, teleport chance 0.3).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .agents import AGENT_NAMES, AgentEnvMismatch, agent_supports, make_agent
from .core import ConfigError, EnvConfig, Family, Mode, Regime, config_from_dict, load_config
from .cubes import render_observation
from .evaluation import (
    EvalReport,
    EvalSpec,
    GeneralizationGrid,
    build_generalization_grid,
    record_episode,
    report_csv_rows,
    report_from_json_dict,
    run_eval,
    write_csv,
)
from .tmaze import trace_lines

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

DEFAULT_BASE_SEED = 0
BASE_SEED_ENV_VAR = "MEMRW_BASE_SEED"


class ManifestError(ValueError):
    pass


@dataclass
class SweepManifest:
    name: str
    specs: list[EvalSpec] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Bundled manifests
# ---------------------------------------------------------------------------

TMAZE_GRID_LENGTHS = (5, 10)
TMAZE_GRID_COUNTS = (1, 3, 5, 10)
CUBES_DEFAULTS = dict(grid_size=5, cube_count=3, subepisode_count=3, teleport_prob=0.3)


def _tmaze_config(regime: Regime, length: int, count: int) -> EnvConfig:
    return EnvConfig(family=Family.TMAZE, regime=regime, corridor_length=length, corridor_count=count)


def _cubes_config(mode: Mode) -> EnvConfig:
    return EnvConfig(family=Family.COLOR_CUBES, mode=mode, **CUBES_DEFAULTS)


def paper_grid(agent: str, n_runs: int = 10, episodes_per_run: int = 100) -> SweepManifest:
    """The 16 maze configurations and 3 cube modes, matched evaluation."""
    specs = []
    for regime in (Regime.FIXED, Regime.UNIFORM):
        for length in TMAZE_GRID_LENGTHS:
            for count in TMAZE_GRID_COUNTS:
                cfg = _tmaze_config(regime, length, count)
                specs.append(EvalSpec(cfg, [cfg], agent, n_runs, episodes_per_run))
    for mode in Mode:
        cfg = _cubes_config(mode)
        specs.append(EvalSpec(cfg, [cfg], agent, n_runs, episodes_per_run))
    return SweepManifest("paper_grid", specs)


def paper_generalization(agent: str, n_runs: int = 10, episodes_per_run: int = 100) -> SweepManifest:
    """Fixed-regime cross-evaluation: train on each (l, n), evaluate across
    every corridor count at the same length."""
    specs = []
    for length in TMAZE_GRID_LENGTHS:
        for count in (3, 5, 10):
            train = _tmaze_config(Regime.FIXED, length, count)
            evals = [_tmaze_config(Regime.FIXED, length, c) for c in TMAZE_GRID_COUNTS]
            specs.append(EvalSpec(train, evals, agent, n_runs, episodes_per_run))
    return SweepManifest("paper_generalization", specs)


BUNDLED_MANIFESTS = {
    "paper_grid": paper_grid,
    "paper_generalization": paper_generalization,
}


def load_manifest(source: str, agent: str | None, n_runs: int | None, episodes_per_run: int | None) -> SweepManifest:
    """Resolve a bundled manifest name or a manifest JSON file.

    The --agent flag fills or overrides the per-spec agent; --runs and
    --episodes override the paper defaults (10 x 100).
    """
    if source in BUNDLED_MANIFESTS:
        if agent is None:
            raise ManifestError(f"bundled manifest {source!r} needs --agent")
        return BUNDLED_MANIFESTS[source](agent, n_runs or 10, episodes_per_run or 100)
    path = Path(source)
    if not path.exists():
        raise ManifestError(f"manifest not found: {source} (bundled: {sorted(BUNDLED_MANIFESTS)})")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or not isinstance(raw.get("specs"), list):
        raise ManifestError(f"manifest {path} must be an object with a 'specs' array")
    if not raw["specs"]:
        raise ManifestError(f"manifest {path} contains no specs")
    specs = []
    for i, entry in enumerate(raw["specs"]):
        spec_agent = agent or entry.get("agent")
        if spec_agent is None:
            raise ManifestError(f"spec {i} has no agent and no --agent was given")
        train = config_from_dict(entry["train_config"])
        evals = [config_from_dict(c) for c in entry.get("eval_configs", [entry["train_config"]])]
        specs.append(
            EvalSpec(
                train_config=train,
                eval_configs=evals,
                agent=spec_agent,
                n_runs=n_runs or int(entry.get("n_runs", 10)),
                episodes_per_run=episodes_per_run or int(entry.get("episodes_per_run", 100)),
            )
        )
    return SweepManifest(raw.get("name", path.stem), specs)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _base_seed(args: argparse.Namespace) -> int:
    if args.base_seed is not None:
        return args.base_seed
    return int(os.environ.get(BASE_SEED_ENV_VAR, DEFAULT_BASE_SEED))


def cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.env)
    if not agent_supports(args.agent, config.family):
        raise AgentEnvMismatch(f"agent {args.agent!r} does not play {config.family.value}")
    agent = make_agent(args.agent, config.family)
    log = record_episode(config, agent, args.seed)
    if config.family is Family.TMAZE:
        print("\n".join(trace_lines(log)))
    else:
        print(render_observation_sequence(log))
    print(f"success={str(log.success).lower()} progress={log.progress} return={log.total_return:.2f}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"episode_{config.family.value}_seed{args.seed}.json"
    log.to_json(out_path)
    print(f"wrote {out_path}")
    return EXIT_OK


def render_observation_sequence(log) -> str:
    from .core import Observation

    frames = [f"t=reset\n{render_observation(Observation(log.initial_observation), log.config.grid_size)}"]
    for s in log.steps:
        frames.append(f"t={s.t} action={s.action} reward={s.reward:+.2f}\n" + render_observation(Observation(s.observation), log.config.grid_size))
    return "\n\n".join(frames)


def cmd_sweep(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest, args.agent, args.runs, args.episodes)
    # Mixed-family manifests (paper_grid bundles both) are filtered down to
    # the specs this agent can play; a manifest it can play none of is an
    # error. Every surviving spec is checked before any episode runs.
    playable = [s for s in manifest.specs if all(agent_supports(s.agent, c.family) for c in s.eval_configs)]
    skipped = len(manifest.specs) - len(playable)
    if skipped:
        print(f"skipping {skipped} spec(s) outside the agent's family", file=sys.stderr)
    if not playable:
        raise ManifestError(f"no spec in {manifest.name!r} is playable by the requested agent")
    manifest.specs = playable
    for spec in manifest.specs:
        spec.validate()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    base_seed = _base_seed(args)
    rows: list[dict[str, str]] = []
    reports: list[EvalReport] = []
    interrupted = False
    try:
        for i, spec in enumerate(manifest.specs):
            report = run_eval(spec, base_seed=base_seed, workers=args.workers)
            reports.append(report)
            rows.extend(report_csv_rows(report))
            if args.format in ("json", "both"):
                report.to_json(out_dir / f"report_{i:03d}_{spec.agent}.json")
    except KeyboardInterrupt:
        interrupted = True
    if args.format in ("csv", "both"):
        write_csv(rows, out_dir / "sweep.csv")
    for report in reports:
        for result in report.results:
            print(
                f"{report.agent} {GeneralizationGrid.config_key(result.config)} "
                f"{result.success_mean:.2f}+/-{result.success_sem:.2f} [{result.tag.value}]"
            )
    if interrupted:
        print("interrupted: partial results flushed", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    results_dir = Path(args.results)
    if not results_dir.is_dir():
        raise ConfigError(f"results directory not found: {results_dir}")
    paths = sorted(results_dir.glob("*.json"))
    if not paths:
        raise ConfigError(f"no report JSON files in {results_dir}")
    reports = []
    for path in paths:
        try:
            reports.append(report_from_json_dict(json.loads(path.read_text())))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed report file {path}: {exc}") from exc
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    table_csv = aggregate_table(reports)
    (out_dir / "table.csv").write_text(table_csv)
    print(table_csv, end="")
    by_agent: dict[str, list[EvalReport]] = {}
    for r in reports:
        by_agent.setdefault(r.agent, []).append(r)
    for agent, agent_reports in sorted(by_agent.items()):
        grid = build_generalization_grid(agent_reports)
        (out_dir / f"grid_{agent}.csv").write_text(grid.matrix_csv())
    if args.plots:
        written = plot_reports(reports, out_dir)
        for p in written:
            print(f"wrote {p}")
    return EXIT_OK


def aggregate_table(reports: list[EvalReport]) -> str:
    """Published-table layout: one row per eval configuration, one value
    column ('mean+/-sem', 2 decimals) per agent."""
    import csv as _csv
    import io as _io

    agents = sorted({r.agent for r in reports})
    cells: dict[str, dict[str, str]] = {}
    for report in reports:
        for result in report.results:
            key = GeneralizationGrid.config_key(result.config)
            cells.setdefault(key, {})[report.agent] = f"{result.success_mean:.2f}+/-{result.success_sem:.2f}"
    buf = _io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    writer.writerow(["config"] + agents)
    for key in sorted(cells):
        writer.writerow([key] + [cells[key].get(a, "") for a in agents])
    return buf.getvalue()


def plot_reports(reports: list[EvalReport], out_dir: Path) -> list[Path]:
    """Success vs. evaluated corridor count, one panel per train config, SEM
    error bars, vector output. Needs the optional matplotlib dependency."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    panels: dict[str, dict[str, tuple[list[int], list[float], list[float]]]] = {}
    for report in reports:
        maze_results = [r for r in report.results if r.config.family is Family.TMAZE and r.tag.value != "mixed"]
        if not maze_results:
            continue
        key = GeneralizationGrid.config_key(report.train_config)
        series = panels.setdefault(key, {})
        xs = [r.config.corridor_count for r in maze_results]
        ys = [r.success_mean for r in maze_results]
        es = [r.success_sem for r in maze_results]
        order = sorted(range(len(xs)), key=lambda i: xs[i])
        series[report.agent] = ([xs[i] for i in order], [ys[i] for i in order], [es[i] for i in order])
    for key, series in sorted(panels.items()):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        for agent, (xs, ys, es) in sorted(series.items()):
            ax.errorbar(xs, ys, yerr=es, marker="o", capsize=3, label=agent)
        ax.set_xlabel("corridors at evaluation")
        ax.set_ylabel("success rate")
        ax.set_ylim(-0.05, 1.05)
        ax.set_title(f"train {key}")
        ax.legend()
        fig.tight_layout()
        path = out_dir / f"success_vs_n_{key.replace(':', '_').replace('=', '')}.svg"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memrw", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one episode and dump its trace")
    run_p.add_argument("--env", required=True, help="environment config JSON file")
    run_p.add_argument("--agent", required=True, choices=AGENT_NAMES)
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--out", default=".", help="directory for the episode log JSON")
    run_p.set_defaults(func=cmd_run)

    sweep_p = sub.add_parser("sweep", help="evaluate a manifest of configurations")
    sweep_p.add_argument("--manifest", required=True, help="bundled manifest name or JSON file")
    sweep_p.add_argument("--agent", choices=AGENT_NAMES, help="agent for every spec (overrides the manifest)")
    sweep_p.add_argument("--out", default="results", help="output directory")
    sweep_p.add_argument("--workers", type=int, default=1)
    sweep_p.add_argument("--runs", type=int, default=None, help="override n_runs")
    sweep_p.add_argument("--episodes", type=int, default=None, help="override episodes_per_run")
    sweep_p.add_argument("--format", choices=("csv", "json", "both"), default="both")
    sweep_p.add_argument("--base-seed", type=int, default=None, help=f"default {DEFAULT_BASE_SEED}, or ${BASE_SEED_ENV_VAR}")
    sweep_p.set_defaults(func=cmd_sweep)

    report_p = sub.add_parser("report", help="aggregate report JSONs into tables and plots")
    report_p.add_argument("--results", required=True, help="directory of EvalReport JSON files")
    report_p.add_argument("--out", default="report")
    report_p.add_argument("--plots", action="store_true", help="also write SVG figures (needs matplotlib)")
    report_p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, ManifestError, AgentEnvMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
