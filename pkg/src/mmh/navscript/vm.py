"""Executes NavScript programs on the simulated robot."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace

from ..errors import ValidationFailed
from ..kinematics import (
    MotionOutcome,
    PidConfig,
    RobotState,
    SimConfig,
    Trajectory,
    initial_state,
    move_forward,
    resolve_corridor,
    travel_direction,
    turn,
)
from ..perception import ObjectTracker, PerceptionConfig, detect_objects, detect_turning_point
from ..world import WorldMap
from .ast import Forward, ForwardUntilObject, ForwardUntilTurningPoint, NavProgram, Stop, Turn
from .checker import validate

SUCCESS = "Success"
STOPPED_EARLY = "StoppedEarly"
STUCK = "Stuck"
BUDGET_EXCEEDED = "BudgetExceeded"

# travel needed after leaving a zone before it can be counted again
ZONE_REENTRY_M = 2.0


@dataclass
class ExecutionResult:
    status: str
    final: RobotState
    trajectory: Trajectory
    executed: int = 0
    detail: str = ""

    def summary(self) -> dict:
        p = self.final.pose
        return {
            "status": self.status,
            "executed": self.executed,
            "detail": self.detail,
            "final": {"x": p.x, "y": p.y, "heading": p.heading, "t": self.final.t},
            "samples": len(self.trajectory.samples),
            "events": len(self.trajectory.events),
        }


def _direction(world: WorldMap, state: RobotState) -> tuple[float, float]:
    corridor = resolve_corridor(world, state.pose, state.current_corridor)
    if corridor is not None:
        return travel_direction(corridor, state.pose.heading)
    return (math.cos(state.pose.heading), math.sin(state.pose.heading))


def _along(world: WorldMap, state: RobotState, target: tuple[float, float]) -> float:
    d = _direction(world, state)
    return (target[0] - state.pose.x) * d[0] + (target[1] - state.pose.y) * d[1]


class _Run:
    def __init__(self, world, state, budget, seed, sim, pid, perception):
        self.world = world
        self.state = state
        self.sim = sim
        self.pid = pid
        self.perception = perception
        self.deadline = state.t + budget
        self.rng = random.Random(seed)
        self.tracker = ObjectTracker()
        self.trajectory = Trajectory()
        self.trajectory.add(state.t, state.pose)
        self.extra_events: list = []

    def absorb(self, outcome: MotionOutcome) -> str | None:
        """Merge a primitive's outcome; returns a terminal status if it ended the run."""
        self.state = outcome.state
        self.trajectory.extend(outcome.trajectory)
        if outcome.reason == "budget":
            return BUDGET_EXCEEDED
        if outcome.reason == "stuck":
            return STUCK
        return None

    def forward(self, distance: float, monitor=None) -> MotionOutcome:
        return move_forward(
            self.world, self.state, distance, monitor, sim=self.sim, pid=self.pid, deadline=self.deadline
        )

    def until_turning_point(self, stmt: ForwardUntilTurningPoint) -> str | None:
        start = detect_turning_point(self.world, self.state.pose)
        current = start.zone_id if start else None
        counted: set[str] = set()
        last_exit: dict[str, float] = {}
        odo = [0.0, self.state.pose.point]
        hit: list[str] = []

        def monitor(s: RobotState) -> bool:
            nonlocal current
            px, py = odo[1]
            odo[0] += math.hypot(s.pose.x - px, s.pose.y - py)
            odo[1] = s.pose.point
            obs = detect_turning_point(self.world, s.pose)
            zid = obs.zone_id if obs else None
            if zid == current:
                return False
            if current is not None:
                last_exit[current] = odo[0]
            current = zid
            if zid is None:
                return False
            self.extra_events.append((s.t, "ZoneEntered", zid))
            if zid in counted:
                return False
            if zid in last_exit and odo[0] - last_exit[zid] < ZONE_REENTRY_M:
                return False
            if zid == (start.zone_id if start else None) and zid not in last_exit:
                return False
            counted.add(zid)
            if len(counted) >= stmt.skip:
                hit.append(zid)
                return True
            return False

        outcome = self.forward(self.sim.max_search_m, monitor)
        status = self.absorb(outcome)
        if status:
            return status
        if not hit:
            return STOPPED_EARLY
        remaining = _along(self.world, self.state, self.world.zone(hit[0]).rect.center)
        if remaining > 1e-9:
            return self.absorb(self.forward(remaining))
        return None

    def until_object(self, stmt: ForwardUntilObject) -> str | None:
        found = []

        def monitor(s: RobotState) -> bool:
            for det in detect_objects(self.world, s.pose, stmt.label, self.tracker, self.perception, self.rng):
                found.append(det)
                self.extra_events.append((s.t, "ObjectCounted", det.object_id))
            return len(found) >= stmt.count

        if not monitor(self.state):
            outcome = self.forward(self.sim.max_search_m, monitor)
            status = self.absorb(outcome)
            if status:
                return status
            if len(found) < stmt.count:
                return STOPPED_EARLY
        target = next(o for o in self.world.objects if o.id == found[stmt.count - 1].object_id)
        # continue until the target is abeam, then the overshoot
        remaining = max(0.0, _along(self.world, self.state, target.position)) + stmt.overshoot
        if remaining > 1e-9:
            return self.absorb(self.forward(remaining))
        return None

    def finish(self, status: str, executed: int, detail: str = "") -> ExecutionResult:
        for t, kind, detail_ in self.extra_events:
            self.trajectory.event(t, kind, detail_)
        self.trajectory.events.sort(key=lambda e: e.t)
        return ExecutionResult(status, self.state, self.trajectory, executed, detail)


def execute(
    program: NavProgram,
    world: WorldMap,
    initial: RobotState | None = None,
    budget: float = 900.0,
    seed: int = 0,
    *,
    sim: SimConfig = SimConfig(),
    pid: PidConfig = PidConfig(),
    perception: PerceptionConfig = PerceptionConfig(),
) -> ExecutionResult:
    """Run ``program`` statement by statement from ``initial`` (map start by default)."""
    errors = validate(program)
    if errors:
        raise ValidationFailed(errors)
    if budget <= 0:
        raise ValueError("budget must be positive")
    if initial is None:
        initial = initial_state(world, sim)
    run = _Run(world, replace(initial, speed=0.0), budget, seed, sim, pid, perception)
    for i, stmt in enumerate(program.statements):
        if isinstance(stmt, Stop):
            return run.finish(SUCCESS, i + 1)
        if isinstance(stmt, Forward):
            status = run.absorb(run.forward(stmt.distance))
        elif isinstance(stmt, ForwardUntilTurningPoint):
            status = run.until_turning_point(stmt)
        elif isinstance(stmt, ForwardUntilObject):
            status = run.until_object(stmt)
        elif isinstance(stmt, Turn):
            status = run.absorb(
                turn(world, run.state, stmt.direction, sim=sim, deadline=run.deadline)
            )
        else:  # pragma: no cover - validate() rejects unknown nodes
            raise TypeError(stmt)
        if status:
            return run.finish(status, i, f"statement {i} ended: {status}")
    return run.finish(SUCCESS, len(program.statements))
