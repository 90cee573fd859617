"""Iterative graph-walking baseline: observe four views, ask a policy, move along an edge."""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass, field
from string import Template
from typing import Callable, Protocol, Sequence

from .errors import LlmError
from .kinematics import Trajectory
from .navgraph import Graph, shortest_path
from .perception import PerceptionConfig, visible
from .world import Pose, WorldMap, normalize_angle

VIEWS = ("front", "left", "back", "right")
# heading offset of each view's centre
VIEW_OFFSET = {"front": 0.0, "left": math.pi / 2, "back": math.pi, "right": -math.pi / 2}

POLICY_STOP = "PolicyStop"
ITERATION_CAP = "IterationCap"
NO_MOVE = "NoMove"


def view_of(bearing: float) -> str:
    """Heading-relative view for a bearing: front [-45, 45), left [45, 135), back, right [-135, -45)."""
    deg = math.degrees(normalize_angle(bearing))
    if -45.0 <= deg < 45.0:
        return "front"
    if 45.0 <= deg < 135.0:
        return "left"
    if -135.0 <= deg < -45.0:
        return "right"
    return "back"


@dataclass(frozen=True)
class View:
    neighbor: int | None = None
    edge_length: float | None = None
    objects: tuple[str, ...] = ()


@dataclass(frozen=True)
class Observation:
    node: int
    heading: float
    views: dict[str, View]
    goal_text: str = ""

    def to_text(self) -> str:
        lines = [f"You are at waypoint {self.node}. {self.goal_text}".rstrip()]
        for name in VIEWS:
            v = self.views[name]
            path = f"a path {v.edge_length:.1f} m long" if v.neighbor is not None else "no path"
            seen = ", ".join(v.objects) if v.objects else "nothing notable"
            lines.append(f"{name}: {path}; you see {seen}.")
        return "\n".join(lines)


@dataclass(frozen=True)
class Move:
    view: str


@dataclass(frozen=True)
class StopHere:
    reason: str = ""


Decision = Move | StopHere


class Policy(Protocol):
    def __call__(self, obs: Observation) -> Decision: ...


def observe(
    graph: Graph,
    world: WorldMap,
    node: int,
    heading: float,
    goal_text: str = "",
    perception: PerceptionConfig = PerceptionConfig(),
) -> Observation:
    """Assign each neighbour to its view (nearest one wins a shared view) and list visible objects."""
    if not 0 <= node < len(graph):
        raise KeyError(f"node {node} not in graph")
    x, y = graph.point(node)
    best: dict[str, tuple[float, int]] = {}
    for nb, w in graph.neighbors(node):
        nx, ny = graph.point(nb)
        view = view_of(math.atan2(ny - y, nx - x) - heading)
        if view not in best or (w, nb) < best[view]:
            best[view] = (w, nb)
    pose = Pose(x, y, heading)
    views = {}
    for name in VIEWS:
        look = heading + VIEW_OFFSET[name]
        seen = sorted({o.label for o in world.objects if visible(world, pose, o, perception, view_heading=look)})
        w_nb = best.get(name)
        views[name] = View(
            neighbor=w_nb[1] if w_nb else None,
            edge_length=w_nb[0] if w_nb else None,
            objects=tuple(seen),
        )
    return Observation(node, normalize_angle(heading), views, goal_text)


def iteration_cap(graph: Graph, start: int, goal_node: int) -> int:
    """Twice the number of nodes on the shortest start-goal path; raises Unreachable."""
    path, _ = shortest_path(graph, start, goal_node)
    return 2 * len(path)


@dataclass
class AgentRun:
    visited: list[int]
    stop_reason: str
    decisions: list[str] = field(default_factory=list)
    annotation: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {"visited": self.visited, "decisions": self.decisions, "stop_reason": self.stop_reason, "annotation": self.annotation}
        )

    def points(self, graph: Graph) -> list[tuple[float, float]]:
        return [graph.point(n) for n in self.visited]

    def to_trajectory(self, graph: Graph, speed: float = 1.0, spacing: float = 0.25) -> Trajectory:
        """Straight node-to-node segments sampled every ``spacing`` metres."""
        pts = self.points(graph)
        dense = pts[:1]
        for (ax, ay), (bx, by) in zip(pts, pts[1:]):
            k = max(1, math.ceil(math.hypot(bx - ax, by - ay) / spacing))
            dense += [(ax + (bx - ax) * i / k, ay + (by - ay) * i / k) for i in range(1, k + 1)]
        return Trajectory.from_points(dense, speed)


def run_graph_agent(
    graph: Graph,
    world: WorldMap,
    policy: Policy,
    start: int,
    heading: float,
    goal_node: int | None,
    cap: int,
    goal_text: str = "",
    perception: PerceptionConfig = PerceptionConfig(),
) -> AgentRun:
    """Query ``policy`` at most ``cap`` times, moving along the chosen edge each time."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if not 0 <= start < len(graph):
        raise KeyError(f"start node {start} not in graph")
    node, visited, decisions = start, [start], []
    for _ in range(cap):
        obs = observe(graph, world, node, heading, goal_text, perception)
        decision = policy(obs)
        if isinstance(decision, StopHere):
            decisions.append("STOP")
            return AgentRun(visited, POLICY_STOP, decisions, decision.reason)
        decisions.append(f"MOVE {decision.view}")
        view = obs.views.get(decision.view)
        if view is None or view.neighbor is None:
            return AgentRun(visited, NO_MOVE, decisions, f"no path to the {decision.view}")
        nxt = view.neighbor
        assert graph.has_edge(node, nxt)
        (ax, ay), (bx, by) = graph.point(node), graph.point(nxt)
        heading = math.atan2(by - ay, bx - ax)
        node = nxt
        visited.append(node)
    return AgentRun(visited, ITERATION_CAP, decisions)


# --- policies ---------------------------------------------------------------


class OraclePolicy:
    """Follows the shortest path to the goal node and stops there.

    When the next path node is hidden behind a nearer neighbour in the same
    view, it takes the visible neighbour closest to the goal and replans.
    """

    def __init__(self, graph: Graph, goal_node: int):
        self.graph = graph
        self.goal = goal_node
        self.plan: list[int] = []

    def _to_goal(self, node: int) -> float:
        return shortest_path(self.graph, node, self.goal)[1]

    def __call__(self, obs: Observation) -> Decision:
        if obs.node == self.goal:
            return StopHere("at goal")
        if not self.plan or self.plan[0] != obs.node:
            self.plan = shortest_path(self.graph, obs.node, self.goal)[0]
        nxt = self.plan[1]
        for name in VIEWS:
            if obs.views[name].neighbor == nxt:
                self.plan = self.plan[1:]
                return Move(name)
        options = [(v.edge_length + self._to_goal(v.neighbor), name) for name, v in obs.views.items() if v.neighbor is not None]
        if not options:
            return StopHere("no visible path")
        _, name = min(options)
        self.plan = []
        return Move(name)


class RandomPolicy:
    """Uniform over views that have a path; stops with probability ``stop_prob``."""

    def __init__(self, seed: int = 0, stop_prob: float = 0.05):
        self.rng = random.Random(seed)
        self.stop_prob = stop_prob

    def __call__(self, obs: Observation) -> Decision:
        if self.rng.random() < self.stop_prob:
            return StopHere("random stop")
        options = [name for name in VIEWS if obs.views[name].neighbor is not None]
        return Move(self.rng.choice(options) if options else "front")


DEFAULT_DECISION_PROMPT = """You are guiding a robot through a building along a waypoint graph.
$observation

Reply with exactly one of: MOVE front, MOVE left, MOVE right, MOVE back, or STOP if you have reached the destination."""

_DECISION = re.compile(r"\bMOVE\s+(front|left|right|back)\b|\bSTOP\b", re.I)


def parse_decision(reply: str) -> Decision:
    """First MOVE <view> or STOP token in the reply; anything else stops as malformed."""
    m = _DECISION.search(reply)
    if m is None:
        return StopHere(f"MalformedDecision: {reply[:80]!r}")
    return Move(m.group(1).lower()) if m.group(1) else StopHere("policy chose STOP")


def llm_policy(client, template: str = DEFAULT_DECISION_PROMPT) -> Callable[[Observation], Decision]:
    """Policy that asks a chat client for each decision."""

    def decide(obs: Observation) -> Decision:
        prompt = Template(template).safe_substitute(observation=obs.to_text(), goal=obs.goal_text)
        try:
            reply = client.chat([{"role": "user", "content": prompt}])
        except LlmError as exc:
            return StopHere(f"{type(exc).__name__}: {exc}")
        return parse_decision(reply)

    return decide


def goal_text_for(world: WorldMap) -> str:
    return f"Your destination is the {world.goal_label}." if world.goal_label else ""


def walk_path(graph: Graph, nodes: Sequence[int]) -> bool:
    return all(graph.has_edge(a, b) for a, b in zip(nodes, nodes[1:]))
