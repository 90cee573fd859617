import json
import math
import xml.etree.ElementTree as ET

import pytest

from mmh.cli import main
from mmh.config import Scenario, Settings, load_config, parse_config
from mmh.errors import ConfigError, StageError
from mmh.harness import run_batch, run_scenario
from mmh.kinematics import Trajectory
from mmh.render import decimate, render_trajectory_svg
from mmh.world import load_bundled_map

SVG_NS = "{http://www.w3.org/2000/svg}"


def write_config(tmp_path, scenarios, **sections):
    doc = {"scenarios": scenarios, **sections}
    path = tmp_path / "batch.json"
    path.write_text(json.dumps(doc))
    return path


def test_golden_route_1_succeeds(tmp_path):
    rep = run_scenario(Scenario(id="g1", map="route_1", program="route_1"), Settings(), tmp_path / "g1")
    assert rep.metrics.sr == 1.0
    assert rep.metrics.cls >= 0.95
    for name in ("program.nav", "trajectory.jsonl", "metrics.json", "run.svg"):
        assert (tmp_path / "g1" / name).exists()


def test_quoted_instruction_compiles_and_runs():
    s = Scenario(id="i", map="straight_100", instruction="Go straight for 100m and then turn right.")
    rep = run_scenario(s)
    assert rep.compilation["status"] == "Success"
    assert rep.compilation["navscript"] == "forward 100\nturn right\nstop\n"
    assert rep.execution["status"] == "Success"


def test_stage_tags(tmp_path):
    with pytest.raises(StageError) as exc:
        run_scenario(Scenario(id="x", map=str(tmp_path / "missing.map.json"), program="route_1"))
    assert exc.value.stage == "load"
    with pytest.raises(StageError) as exc:
        run_scenario(Scenario(id="x", map="l_turn", instruction="Dance a little."))
    assert exc.value.stage == "compile"
    assert exc.value.cause.record.status == "NoMatch"
    bad = tmp_path / "bad.nav"
    bad.write_text("turn upward\n")
    with pytest.raises(StageError) as exc:
        run_scenario(Scenario(id="x", map="l_turn", program=str(bad)))
    assert exc.value.stage == "compile"


def test_missing_map_cli_exit_code(tmp_path, capsys):
    code = main(["run", str(tmp_path / "nope.map.json"), "--program", "route_1", "--out", str(tmp_path)])
    assert code == 1
    assert "[load]" in capsys.readouterr().err


@pytest.mark.parametrize(
    "doc",
    [
        {"id": "a", "map": "l_turn"},
        {"id": "a", "map": "l_turn", "program": "x", "instruction": "y"},
        {"id": "a/b", "map": "l_turn", "program": "x"},
        {"id": "a", "map": "l_turn", "program": "x", "budget": 0},
        {"id": "a", "map": "l_turn", "instruction": "x", "backend": "magic"},
        {"id": "a", "map": "l_turn", "agent": "wizard"},
        {"id": "a", "map": "l_turn", "program": "x", "colour": "red"},
    ],
)
def test_scenario_invariants(doc):
    with pytest.raises(ConfigError):
        Scenario.from_dict(doc)


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        parse_config({"scenarios": []})
    with pytest.raises(ConfigError):
        parse_config({"scenarios": [{"id": "a", "map": "m", "program": "p"}] * 2})
    with pytest.raises(ConfigError):
        parse_config({"pid": {"kq": 1}, "scenarios": [{"id": "a", "map": "m", "program": "p"}]})
    with pytest.raises(ConfigError):
        parse_config({"sim": {"dt": -1}}, require_scenarios=False)
    with pytest.raises(ConfigError):
        parse_config({"extras": {}}, require_scenarios=False)
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_empty_batch_exit_code(tmp_path):
    path = write_config(tmp_path, [])
    assert main(["batch", str(path), "--out", str(tmp_path / "out")]) == 2


def test_group_mean_with_partial_failures(tmp_path):
    (tmp_path / "idle.nav").write_text("stop\n")
    common = {"method": "m", "route": "r"}
    scenarios = [
        {"id": "ok", "map": "route_1", "program": "route_1", **common},
        {"id": "idle", "map": "route_1", "program": "idle.nav", **common},
        {"id": "nomap", "map": "no_such_map", "program": "route_1", **common},
        {"id": "nomatch", "map": "route_1", "instruction": "Sing a song.", **common},
    ]
    report = run_batch(write_config(tmp_path, scenarios), tmp_path / "out")
    (row,) = report.groups
    assert row["n"] == 2 and row["errors"] == 2
    assert row["sr"] == pytest.approx(0.5)
    assert report.exit_code == 1
    stages = {f.scenario_id: f.stage for f in report.failures}
    assert stages == {"nomap": "load", "nomatch": "compile"}
    doc = json.loads((tmp_path / "out" / "batch" / "report.json").read_text())
    assert {f["scenario"] for f in doc["failures"]} == {"nomap", "nomatch"}
    nomatch = next(r for r in doc["runs"] if r["scenario"] == "nomatch")
    assert nomatch["compilation"]["status"] == "NoMatch"
    assert "FAILED nomap [load]" in (tmp_path / "out" / "batch" / "report.txt").read_text()


def test_batch_is_deterministic(tmp_path):
    scenarios = [
        {"id": "p", "map": "l_turn", "program": "forward_until.nav"},
        {"id": "i", "map": "l_turn", "instruction": "Turn right. Go straight for 5 m."},
        {"id": "r", "map": "route_1", "agent": "random", "seed": 3},
        {"id": "o", "map": "route_1", "agent": "oracle"},
    ]
    (tmp_path / "forward_until.nav").write_text("forward_until turning_point\nturn right\nforward 5\nstop\n")
    cfg = write_config(tmp_path, scenarios)
    run_batch(cfg, tmp_path / "a", workers=4)
    run_batch(cfg, tmp_path / "b", workers=1)
    reordered = write_config(tmp_path, list(reversed(scenarios)))
    run_batch(reordered, tmp_path / "c", workers=3)
    a = (tmp_path / "a" / "batch" / "report.json").read_bytes()
    assert a == (tmp_path / "b" / "batch" / "report.json").read_bytes()
    runs_a = {r["scenario"]: r for r in json.loads(a)["runs"]}
    runs_c = {r["scenario"]: r for r in json.loads((tmp_path / "c" / "batch" / "report.json").read_text())["runs"]}
    assert runs_a == runs_c
    assert (tmp_path / "a" / "batch" / "o" / "agent.json").exists()


def test_bundled_example_batch(tmp_path, capsys):
    from importlib import resources

    path = resources.files("mmh") / "data" / "example_batch.json"
    assert main(["batch", str(path), "--out", str(tmp_path)]) == 0
    table = capsys.readouterr().out
    assert table.splitlines()[0].split()[:3] == ["method", "route", "study"]


def test_render_empty_and_structure():
    w = load_bundled_map("door_hall")
    root = ET.fromstring(render_trajectory_svg(w).split("\n", 1)[1])
    assert root.tag == SVG_NS + "svg"
    assert root.get("viewBox")
    assert root.find(f"{SVG_NS}g[@id='trajectories']") is not None
    assert len(root.findall(f".//{SVG_NS}polyline")) == 1  # reference only
    b = w.bounds
    assert float(root.get("width")) == pytest.approx((b.width + 4) * 10)


def test_render_decimation_count():
    w = load_bundled_map("l_turn")
    pts = [(i / 8, 0.0) for i in range(161)]  # 20 m at 12.5 cm, exact in binary
    traj = Trajectory.from_points(pts)
    kept = decimate(traj.points())
    assert kept == pts[::2]
    root = ET.fromstring(render_trajectory_svg(w, [traj]).split("\n", 1)[1])
    line = root.find(f".//{SVG_NS}polyline[@id='trajectory-0']")
    assert len(line.get("points").split()) == len(kept)


def test_render_scale_and_flip():
    w = load_bundled_map("l_turn")
    root = ET.fromstring(render_trajectory_svg(w, [[(0.0, 0.0), (1.0, 0.0)]]).split("\n", 1)[1])
    b = w.bounds
    first, second = root.find(f".//{SVG_NS}polyline[@id='trajectory-0']").get("points").split()
    x0, y0 = map(float, first.split(","))
    x1, _ = map(float, second.split(","))
    assert x1 - x0 == pytest.approx(10.0)
    assert x0 == pytest.approx((0 - b.xmin + 2) * 10)
    assert y0 == pytest.approx((b.ymax + 2 - 0) * 10)


def test_cli_compile(capsys):
    assert main(["compile", "Turn left after passing two chairs."]) == 0
    assert capsys.readouterr().out == 'forward_until object "chair" count=2 overshoot=1.0\nturn left\nstop\n'
    assert main(["compile", "Sing.", "--record"]) == 1


def test_cli_exec_metrics_render(tmp_path, capsys):
    traj = tmp_path / "t.jsonl"
    prog = tmp_path / "p.nav"
    prog.write_text("forward_until turning_point\nturn right\nforward 5\nstop\n")
    assert main(["exec", "l_turn", str(prog), "--trajectory", str(traj)]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "Success"
    assert main(["metrics", "l_turn", str(traj)]) == 0
    assert json.loads(capsys.readouterr().out)["sr"] == 1.0
    svg = tmp_path / "run.svg"
    assert main(["render", "l_turn", str(traj), "-o", str(svg)]) == 0
    ET.parse(svg)


def test_cli_graph_and_stats(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert main(["graph", "route_2", "--json", str(out)]) == 0
    stats = json.loads(capsys.readouterr().out)
    golden = json.loads((__import__("pathlib").Path(__file__).parent / "golden" / "navgraph_seed42.json").read_text())
    assert stats == golden["route_2"]
    assert len(json.loads(out.read_text())["nodes"]) == stats["nodes"]
    assert main(["graph", "l_turn", "--grid"]) == 0
    assert json.loads(capsys.readouterr().out)["edges"] > 0
    assert main(["stats", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["groups"]) == 8
    assert main(["stats"]) == 0
    assert "vocabulary total" in capsys.readouterr().out


def test_cli_run_agent(tmp_path, capsys):
    assert main(["run", "route_1", "--agent", "oracle", "--out", str(tmp_path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["metrics"]["sr"] == 1.0
    assert doc["execution"]["status"] == "PolicyStop"


def test_cli_config_overrides_metrics(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"metrics": {"success_radius": 0.5}}))
    assert main(["run", "route_1", "--program", "route_1", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["metrics"]["spd"] <= 0.5 or doc["metrics"]["sr"] == 0.0
