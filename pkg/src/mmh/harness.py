"""Scenario execution and batch evaluation."""

from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .agent import OraclePolicy, RandomPolicy, goal_text_for, iteration_cap, llm_policy, run_graph_agent
from .compiler.client import ChatClient
from .compiler.llm import compile_with_llm, compile_with_rules
from .config import Config, Scenario, Settings, load_config
from .corpus import load_bundled_controlled, load_bundled_corpus
from .errors import CompileError, ConfigError, LlmError, MmhError, StageError
from .kinematics import initial_state
from .metrics import Episode, MetricsReport, aggregate, evaluate_episode
from .navgraph import build_grid_graph, build_nav_graph, snap
from .navscript import ParseError, execute, parse_source
from .render import render_trajectory_svg
from .world import WorldMap, resolve_map, with_goal

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2


@dataclass
class RunReport:
    scenario_id: str
    group: tuple
    compilation: dict | None = None
    execution: dict | None = None
    metrics: MetricsReport | None = None
    wall_ms: float = 0.0
    error: str | None = None
    stage: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def as_dict(self, timing: bool = False) -> dict:
        doc = {
            "scenario": self.scenario_id,
            "group": list(self.group),
            "compilation": self.compilation,
            "execution": self.execution,
            "metrics": self.metrics.as_dict() if self.metrics else None,
            "error": self.error,
            "stage": self.stage,
        }
        if timing:
            doc["wall_ms"] = self.wall_ms
        return doc


def bundled_program_path(name: str) -> Path:
    return Path(str(resources.files("mmh") / "data" / "programs" / name))


def _program_text(ref: str) -> str:
    p = Path(ref)
    if not p.exists():
        bundled = bundled_program_path(ref if ref.endswith(".nav") else f"{ref}.nav")
        if not bundled.exists():
            raise FileNotFoundError(f"no NavScript file at {ref}")
        p = bundled
    return p.read_text(encoding="utf-8")


def _instruction_text(ref: str) -> str:
    """Instruction text; ``@<id>`` looks the id up in the bundled corpora."""
    if not ref.startswith("@"):
        return ref
    rid = ref[1:]
    for rec in load_bundled_controlled():
        if rec.id == rid:
            return rec.text
    for rec in load_bundled_corpus():
        if rec.id == rid:
            return rec.text
    raise KeyError(f"no bundled instruction with id {rid!r}")


def scenario_world(scenario: Scenario) -> WorldMap:
    world = resolve_map(scenario.map)
    if scenario.goal is not None or scenario.reference is not None:
        goal = scenario.goal or world.goal
        ref = scenario.reference or ([world.start.point, goal] if scenario.goal is not None else None)
        world = with_goal(world, goal, ref)
    return world


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def run_scenario(
    scenario: Scenario,
    settings: Settings = Settings(),
    out_dir: str | Path | None = None,
    client: ChatClient | None = None,
) -> RunReport:
    """Compile (if needed), execute and score one scenario.

    Artifacts go to ``out_dir`` when given. Failures raise StageError tagged
    with the stage (load, compile, exec, metrics).
    """
    t0 = time.perf_counter()
    report = RunReport(scenario.id, scenario.group)
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    try:
        world = scenario_world(scenario)
    except (OSError, MmhError, ValueError) as exc:
        raise StageError("load", exc) from exc

    heading = math.radians(scenario.heading_deg) if scenario.heading_deg is not None else None
    if scenario.kind == "agent":
        try:
            trajectory, run_doc = _run_agent(scenario, world, settings, heading, client)
        except (MmhError, KeyError, ValueError) as exc:
            raise StageError("exec", exc) from exc
        report.execution = run_doc
        if out is not None:
            _write(out / "agent.json", json.dumps(run_doc, indent=2) + "\n")
    else:
        try:
            if scenario.kind == "program":
                source = _program_text(scenario.program)
            else:
                text = _instruction_text(scenario.instruction)
                if scenario.backend == "rules":
                    record = compile_with_rules(text)
                    if record.status != "Success":
                        exc = CompileError(record.errors[0])
                        exc.record = record
                        raise exc
                else:
                    if client is None:
                        client = ChatClient(settings.llm)
                    record = compile_with_llm(text, None, client, use_parser=scenario.backend == "llm")
                report.compilation = record.as_dict()
                source = record.navscript
            program = parse_source(source)
        except (OSError, KeyError, ParseError, LlmError, MmhError) as exc:
            if report.compilation is None and hasattr(exc, "record"):
                report.compilation = exc.record.as_dict()
            raise StageError("compile", exc) from exc
        if out is not None:
            _write(out / "program.nav", source if source.endswith("\n") else source + "\n")
        try:
            init = initial_state(world, settings.sim, heading)
            result = execute(
                program, world, init, scenario.budget, scenario.seed,
                sim=settings.sim, pid=settings.pid, perception=settings.perception,
            )
        except (MmhError, ValueError) as exc:
            raise StageError("exec", exc) from exc
        trajectory = result.trajectory
        report.execution = result.summary()

    if out is not None:
        _write(out / "trajectory.jsonl", trajectory.to_jsonl())
    try:
        grid = build_grid_graph(world)
        episode = Episode(trajectory, world.reference_route(), world.goal, world)
        report.metrics = evaluate_episode(episode, grid, settings.metrics)
    except (MmhError, ValueError) as exc:
        raise StageError("metrics", exc) from exc
    if out is not None:
        _write(out / "metrics.json", json.dumps(report.metrics.as_dict(), indent=2, sort_keys=True) + "\n")
        _write(out / "run.svg", render_trajectory_svg(world, [trajectory], title=scenario.id))
    report.wall_ms = (time.perf_counter() - t0) * 1000.0
    return report


def _run_agent(scenario: Scenario, world: WorldMap, settings: Settings, heading, client):
    graph = build_nav_graph(world, seed=scenario.graph_seed)
    start = snap(graph, world.start.point)
    goal = snap(graph, world.goal)
    cap = iteration_cap(graph, start, goal)
    if scenario.agent == "oracle":
        policy = OraclePolicy(graph, goal)
    elif scenario.agent == "random":
        policy = RandomPolicy(scenario.seed)
    else:
        policy = llm_policy(client if client is not None else ChatClient(settings.llm))
    h = world.start.heading if heading is None else heading
    run = run_graph_agent(graph, world, policy, start, h, goal, cap, goal_text_for(world), settings.perception)
    doc = {
        "status": run.stop_reason,
        "visited": run.visited,
        "decisions": run.decisions,
        "annotation": run.annotation,
        "cap": cap,
        "graph_seed": scenario.graph_seed,
    }
    return run.to_trajectory(graph), doc


# --- batches -------------------------------------------------------------------


@dataclass
class BatchReport:
    batch_id: str
    runs: list[RunReport]
    groups: list[dict] = field(default_factory=list)

    @property
    def failures(self) -> list[RunReport]:
        return [r for r in self.runs if not r.ok]

    @property
    def exit_code(self) -> int:
        return EXIT_FAILURES if self.failures else EXIT_OK

    def to_json(self) -> str:
        doc = {
            "batch": self.batch_id,
            "groups": self.groups,
            "runs": [r.as_dict() for r in self.runs],
            "failures": [{"scenario": r.scenario_id, "stage": r.stage, "error": r.error} for r in self.failures],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def to_table(self) -> str:
        head = f"{'method':<14} {'route':<14} {'study':<8} {'it':>2} {'n':>3} {'SR':>5} {'OSR':>5} {'SPD':>7} {'CLS':>5} {'err':>3}"
        lines = [head, "-" * len(head)]
        for g in self.groups:
            spd = "-" if g["spd"] is None else f"{g['spd']:.2f}"
            lines.append(
                f"{g['method']:<14} {g['route']:<14} {g['study']:<8} {g['iteration']:>2} {g['n']:>3} "
                f"{g['sr']:>5.2f} {g['osr']:>5.2f} {spd:>7} {g['cls']:>5.2f} {g['errors']:>3}"
            )
        for r in self.failures:
            lines.append(f"FAILED {r.scenario_id} [{r.stage}]: {r.error}")
        return "\n".join(lines) + "\n"


def _group_rows(runs: list[RunReport]) -> list[dict]:
    keys = sorted({r.group for r in runs})
    rows = []
    for key in keys:
        members = [r for r in runs if r.group == key]
        scored = [r.metrics for r in members if r.metrics is not None]
        row = {"method": key[0], "route": key[1], "study": key[2], "iteration": key[3], "errors": len(members) - len(scored)}
        if scored:
            agg = aggregate(scored).as_dict()
        else:
            agg = {"n": 0, "sr": 0.0, "osr": 0.0, "spd": None, "cls": 0.0, "spd_unreachable": 0}
        row.update(agg)
        rows.append(row)
    return rows


def run_batch(
    config: Config | str | Path,
    out_root: str | Path | None = None,
    workers: int | None = None,
    client: ChatClient | None = None,
) -> BatchReport:
    """Run every scenario, aggregate per (method, route, study, iteration) and write
    ``report.json`` and ``report.txt`` under ``<out_root>/<batch id>/``."""
    if not isinstance(config, Config):
        config = load_config(config)
    if not config.scenarios:
        raise ConfigError("scenario list is empty")
    root = Path(out_root if out_root is not None else config.batch.out_dir) / config.batch.id
    root.mkdir(parents=True, exist_ok=True)
    n_workers = workers or config.batch.workers
    if config.settings.llm and client is None and any(
        s.backend != "rules" or s.agent == "llm" for s in config.scenarios
    ):
        client = ChatClient(config.settings.llm)

    def one(s: Scenario) -> RunReport:
        try:
            return run_scenario(s, config.settings, root / s.id, client)
        except StageError as exc:
            log.warning("scenario %s failed in %s: %s", s.id, exc.stage, exc)
            rep = RunReport(s.id, s.group, error=f"{type(exc.cause).__name__}: {exc.cause}", stage=exc.stage)
            rec = getattr(exc.cause, "record", None)
            if rec is not None:
                rep.compilation = rec.as_dict()
            return rep

    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        runs = list(pool.map(one, config.scenarios))
    report = BatchReport(config.batch.id, runs, _group_rows(runs))
    _write(root / "report.json", report.to_json())
    _write(root / "report.txt", report.to_table())
    return report
