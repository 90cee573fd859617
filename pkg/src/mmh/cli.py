"""Command-line entry point: ``mmh <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from .config import Scenario, Settings, load_config
from .errors import ConfigError, MmhError, StageError
from .harness import EXIT_FAILURES, EXIT_OK, EXIT_USAGE, run_batch, run_scenario

log = logging.getLogger("mmh")


def _settings(path: str | None) -> Settings:
    if path is None:
        return Settings()
    return load_config(path, require_scenarios=False).settings


def _print_json(doc) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def cmd_run(args) -> int:
    settings = _settings(args.config)
    scenario = Scenario(
        id=args.id,
        map=args.map,
        instruction=args.instruction,
        program=args.program,
        agent=args.agent,
        backend=args.backend,
        heading_deg=args.heading,
        seed=args.seed,
        budget=args.budget,
        goal=tuple(args.goal) if args.goal else None,
    )
    out = Path(args.out) / scenario.id
    try:
        report = run_scenario(scenario, settings, out)
    except StageError as exc:
        print(f"error [{exc.stage}]: {type(exc.cause).__name__}: {exc.cause}", file=sys.stderr)
        return EXIT_FAILURES
    _print_json(report.as_dict(timing=True))
    print(f"artifacts in {out}", file=sys.stderr)
    return EXIT_OK


def cmd_batch(args) -> int:
    config = load_config(args.config)
    report = run_batch(config, args.out, args.workers)
    sys.stdout.write(report.to_table())
    return report.exit_code


def cmd_compile(args) -> int:
    from .compiler import ChatClient, compile_with_llm, compile_with_rules

    text = args.text if args.text != "-" else sys.stdin.read()
    if args.backend == "rules":
        record = compile_with_rules(text)
        if record.status != "Success":
            print(f"error: {record.errors[0]}", file=sys.stderr)
            return EXIT_FAILURES
    else:
        with ChatClient(_settings(args.config).llm) as client:
            record = compile_with_llm(text, None, client, use_parser=args.backend == "llm")
    if args.record:
        _print_json(record.as_dict())
    else:
        sys.stdout.write(record.navscript)
    return EXIT_OK


def cmd_exec(args) -> int:
    from .kinematics import initial_state
    from .navscript import execute, parse_source
    from .world import resolve_map

    settings = _settings(args.config)
    world = resolve_map(args.map)
    program = parse_source(Path(args.program).read_bytes())
    heading = math.radians(args.heading) if args.heading is not None else None
    result = execute(
        program, world, initial_state(world, settings.sim, heading), args.budget, args.seed,
        sim=settings.sim, pid=settings.pid, perception=settings.perception,
    )
    if args.trajectory:
        Path(args.trajectory).write_text(result.trajectory.to_jsonl(), encoding="utf-8")
    _print_json(result.summary())
    return EXIT_OK if result.status == "Success" else EXIT_FAILURES


def cmd_graph(args) -> int:
    from .navgraph import build_grid_graph, build_nav_graph, graph_stats
    from .world import resolve_map

    world = resolve_map(args.map)
    if args.grid:
        g = build_grid_graph(world, args.cell)
    else:
        g = build_nav_graph(world, args.candidates, args.min_dist, args.seed)
    if args.json:
        Path(args.json).write_text(g.to_json(), encoding="utf-8")
    _print_json(graph_stats(g))
    return EXIT_OK


def cmd_metrics(args) -> int:
    from .kinematics import Trajectory
    from .metrics import Episode, MetricsConfig, evaluate_episode
    from .navgraph import build_grid_graph
    from .world import resolve_map, with_goal

    world = resolve_map(args.map)
    if args.goal:
        world = with_goal(world, tuple(args.goal), [world.start.point, tuple(args.goal)])
    traj = Trajectory.from_jsonl(Path(args.trajectory).read_text(encoding="utf-8"))
    cfg = MetricsConfig(args.tau, args.sigma)
    report = evaluate_episode(Episode(traj, world.reference_route(), world.goal, world), build_grid_graph(world), cfg)
    _print_json(report.as_dict())
    return EXIT_OK


def cmd_stats(args) -> int:
    from .corpus import load_bundled_corpus, load_corpus_file, vocabulary_size, word_count_stats

    records = load_bundled_corpus() if args.corpus == "synthetic" else load_corpus_file(args.corpus)
    stats = word_count_stats(records)
    if args.json:
        _print_json({"groups": [s.as_dict() for s in stats], "vocabulary": vocabulary_size(records),
                     "notes": "population SD; lower median for even n"})
        return EXIT_OK
    print(f"{'study':<8} {'route':<8} {'it':>2} {'n':>3} {'mean':>7} {'median':>6} {'sd':>7} {'fail':>5}")
    for s in stats:
        fail = "-" if s.failure_rate is None else f"{s.failure_rate:.2f}"
        print(f"{s.key[0]:<8} {s.key[1]:<8} {s.key[2]:>2} {s.n:>3} {s.mean:>7.2f} {s.median:>6.0f} {s.sd:>7.2f} {fail:>5}")
    for study in ("online", "onsite"):
        subset = [r for r in records if r.study == study]
        if subset:
            print(f"vocabulary {study}: {vocabulary_size(subset)}")
    print(f"vocabulary total: {vocabulary_size(records)}")
    return EXIT_OK


def cmd_render(args) -> int:
    from .kinematics import Trajectory
    from .render import render_trajectory_svg
    from .world import resolve_map

    world = resolve_map(args.map)
    trajs = [Trajectory.from_jsonl(Path(p).read_text(encoding="utf-8")) for p in args.trajectory]
    svg = render_trajectory_svg(world, trajs)
    if args.output:
        Path(args.output).write_text(svg, encoding="utf-8")
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mmh", description="Instruction-guided corridor navigation harness.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="compile, execute and score one scenario")
    r.add_argument("map", help="map file or bundled map name")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--instruction", help="instruction text, or @id for a bundled record")
    src.add_argument("--program", help="NavScript file or bundled program name")
    src.add_argument("--agent", choices=("oracle", "random", "llm"), help="graph-walking baseline policy")
    r.add_argument("--backend", default="rules", choices=("rules", "llm", "llm-direct"))
    r.add_argument("--id", default="run")
    r.add_argument("--heading", type=float, help="initial heading in degrees")
    r.add_argument("--goal", type=float, nargs=2, metavar=("X", "Y"))
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--budget", type=float, default=900.0)
    r.add_argument("--config")
    r.add_argument("--out", default="out/single")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("batch", help="run all scenarios in a config")
    b.add_argument("config")
    b.add_argument("--out", help="output root (overrides batch.out_dir)")
    b.add_argument("--workers", type=int, help="overrides batch.workers")
    b.set_defaults(func=cmd_batch)

    c = sub.add_parser("compile", help="instruction text to NavScript")
    c.add_argument("text", help="instruction, or - for stdin")
    c.add_argument("--backend", default="rules", choices=("rules", "llm", "llm-direct"))
    c.add_argument("--config")
    c.add_argument("--record", action="store_true", help="print the full compilation record as JSON")
    c.set_defaults(func=cmd_compile)

    e = sub.add_parser("exec", help="execute a NavScript file on a map")
    e.add_argument("map")
    e.add_argument("program")
    e.add_argument("--trajectory", help="write trajectory JSONL here")
    e.add_argument("--heading", type=float)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--budget", type=float, default=900.0)
    e.add_argument("--config")
    e.set_defaults(func=cmd_exec)

    g = sub.add_parser("graph", help="build a navigation or grid graph and print its stats")
    g.add_argument("map")
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--candidates", type=int, default=1000)
    g.add_argument("--min-dist", type=float, default=2.5)
    g.add_argument("--grid", action="store_true", help="build the 0.5 m metric grid instead")
    g.add_argument("--cell", type=float, default=0.5)
    g.add_argument("--json", help="write the graph as JSON")
    g.set_defaults(func=cmd_graph)

    m = sub.add_parser("metrics", help="score a trajectory JSONL against a map")
    m.add_argument("map")
    m.add_argument("trajectory")
    m.add_argument("--goal", type=float, nargs=2, metavar=("X", "Y"))
    m.add_argument("--tau", type=float, default=3.0)
    m.add_argument("--sigma", type=float, default=3.0)
    m.set_defaults(func=cmd_metrics)

    s = sub.add_parser("stats", help="word-count statistics of an instruction corpus")
    s.add_argument("corpus", nargs="?", default="synthetic", help="JSONL path or 'synthetic'")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_stats)

    v = sub.add_parser("render", help="SVG of a map with trajectories")
    v.add_argument("map")
    v.add_argument("trajectory", nargs="*")
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_render)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MmhError, OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURES


if __name__ == "__main__":
    sys.exit(main())
