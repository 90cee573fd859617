"""Unicycle robot simulation and the low-level motion primitives.

``move_forward`` tracks the current corridor's centerline with a PID loop on
a combined cross-track/heading error; ``turn`` rotates in place and snaps the
heading to the nearest cardinal direction.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

from .world import (
    CARDINAL_ANGLE,
    Corridor,
    Pose,
    WorldMap,
    corridors_at,
    is_passable,
    nearest_cardinal,
    normalize_angle,
)


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.05
    v_max: float = 1.0
    omega_max: float = 1.5
    radius: float = 0.3
    stuck_window_s: float = 2.0
    stuck_min_progress: float = 0.05
    # upper bound on open-ended searches (forward_until ...)
    max_search_m: float = 500.0
    # odometry/actuation noise hook; only 0.0 is supported
    noise_std: float = 0.0

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.noise_std != 0.0:
            raise NotImplementedError("noise injection is not implemented")


@dataclass(frozen=True)
class PidConfig:
    kp: float = 1.2
    ki: float = 0.0
    kd: float = 0.4
    heading_weight: float = 1.0
    integral_limit: float = 1.0


@dataclass(frozen=True)
class PidState:
    integral: float = 0.0
    prev_error: float | None = None


@dataclass(frozen=True)
class RobotState:
    pose: Pose
    speed: float = 0.0
    radius: float = 0.3
    current_corridor: str | None = None
    t: float = 0.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.speed < 0:
            raise ValueError("speed must be non-negative")


@dataclass(frozen=True)
class ControlCommand:
    v: float
    omega: float


@dataclass(frozen=True)
class Event:
    t: float
    kind: str  # TurnDone, ObjectCounted, ZoneEntered, Collision, Stuck
    detail: str = ""


@dataclass
class Trajectory:
    samples: list[tuple[float, Pose]] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)

    def add(self, t: float, pose: Pose) -> None:
        if self.samples and t <= self.samples[-1][0]:
            raise ValueError("sample times must be strictly increasing")
        self.samples.append((t, pose))

    def event(self, t: float, kind: str, detail: str = "") -> None:
        self.events.append(Event(t, kind, detail))

    def extend(self, other: "Trajectory") -> None:
        """Append another trajectory, dropping samples not later than ours."""
        last = self.samples[-1][0] if self.samples else -math.inf
        for t, pose in other.samples:
            if t > last:
                self.samples.append((t, pose))
                last = t
        self.events.extend(other.events)

    @property
    def duration(self) -> float:
        if not self.samples:
            return 0.0
        return self.samples[-1][0] - self.samples[0][0]

    def points(self) -> list[tuple[float, float]]:
        return [(p.x, p.y) for _, p in self.samples]

    def events_of(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def to_jsonl(self) -> str:
        records = [(t, 0, i, {"t": t, "x": p.x, "y": p.y, "heading": p.heading}) for i, (t, p) in enumerate(self.samples)]
        records += [(e.t, 1, i, {"t": e.t, "event": e.kind, "detail": e.detail}) for i, e in enumerate(self.events)]
        records.sort(key=lambda r: r[:3])
        return "".join(json.dumps(r[3]) + "\n" for r in records)

    @classmethod
    def from_jsonl(cls, text: str) -> "Trajectory":
        traj = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            if "event" in rec:
                traj.events.append(Event(float(rec["t"]), rec["event"], rec.get("detail", "")))
            else:
                traj.add(float(rec["t"]), Pose(float(rec["x"]), float(rec["y"]), float(rec["heading"])))
        return traj

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]], speed: float = 1.0) -> "Trajectory":
        """Trajectory visiting the points at constant speed."""
        traj = cls()
        t = 0.0
        prev = None
        for x, y in points:
            if prev is not None:
                step = math.hypot(x - prev[0], y - prev[1])
                if step == 0.0:
                    continue
                t += step / speed
                heading = math.atan2(y - prev[1], x - prev[0])
            else:
                heading = 0.0
            traj.add(t, Pose(x, y, heading))
            prev = (x, y)
        return traj


# body-disc collision check resolution
_DISC_SAMPLES = 24
_DISC_OFFSETS = [
    (math.cos(2 * math.pi * k / _DISC_SAMPLES), math.sin(2 * math.pi * k / _DISC_SAMPLES)) for k in range(_DISC_SAMPLES)
]


def disc_clear(world: WorldMap, x: float, y: float, radius: float) -> bool:
    """True when the body disc lies inside passable space (sampled boundary)."""
    if not is_passable(world, (x, y)):
        return False
    for ux, uy in _DISC_OFFSETS:
        if not is_passable(world, (x + radius * ux, y + radius * uy)):
            return False
        if not is_passable(world, (x + 0.5 * radius * ux, y + 0.5 * radius * uy)):
            return False
    return True


def step(world: WorldMap, state: RobotState, cmd: ControlCommand, dt: float, sim: SimConfig = SimConfig()) -> tuple[RobotState, bool]:
    """Integrate one unicycle step. Returns (new state, collided)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    v = max(-sim.v_max, min(sim.v_max, cmd.v))
    omega = max(-sim.omega_max, min(sim.omega_max, cmd.omega))
    p = state.pose
    x = p.x + v * math.cos(p.heading) * dt
    y = p.y + v * math.sin(p.heading) * dt
    heading = normalize_angle(p.heading + omega * dt)
    collided = False
    if v != 0.0 and not disc_clear(world, x, y, state.radius):
        x, y = p.x, p.y
        collided = True
    speed = 0.0 if collided else abs(v)
    return replace(state, pose=Pose(x, y, heading), speed=speed, t=state.t + dt), collided


def pid_heading(
    cross_track_error: float,
    heading_error: float,
    pid_state: PidState,
    gains: PidConfig = PidConfig(),
    dt: float = 0.05,
    omega_max: float = 1.5,
) -> tuple[float, PidState]:
    """Steering rate from the combined error ``cte + weight * heading_error``.

    Errors are signed so that a positive value calls for a left (CCW) turn.
    """
    e = cross_track_error + gains.heading_weight * heading_error
    integral = pid_state.integral + e * dt
    integral = max(-gains.integral_limit, min(gains.integral_limit, integral))
    deriv = 0.0 if pid_state.prev_error is None else (e - pid_state.prev_error) / dt
    omega = gains.kp * e + gains.ki * integral + gains.kd * deriv
    omega = max(-omega_max, min(omega_max, omega))
    return omega, PidState(integral=integral, prev_error=e)


def travel_direction(corridor: Corridor, heading: float) -> tuple[float, float]:
    """Unit vector along the corridor axis, signed to agree with heading."""
    if corridor.axis == "x":
        return (1.0, 0.0) if math.cos(heading) >= 0 else (-1.0, 0.0)
    return (0.0, 1.0) if math.sin(heading) >= 0 else (0.0, -1.0)


def tracking_errors(corridor: Corridor, pose: Pose) -> tuple[float, float]:
    """(cross-track, heading) errors relative to the corridor centerline."""
    d = travel_direction(corridor, pose.heading)
    cx, cy = corridor.rect.center
    # offset of the centerline from the robot, measured to the robot's left
    cte = d[0] * (cy - pose.y) - d[1] * (cx - pose.x)
    heading_error = normalize_angle(math.atan2(d[1], d[0]) - pose.heading)
    return cte, heading_error


def resolve_corridor(world: WorldMap, pose: Pose, prefer: str | None = None) -> Corridor | None:
    """Corridor the robot is travelling along, given its position and heading."""
    card = nearest_cardinal(pose.heading)
    axis = "x" if card in ("E", "W") else "y"
    candidates = [c for c in corridors_at(world, pose.point) if c.axis == axis]
    if not candidates:
        return None
    for c in candidates:
        if c.id == prefer:
            return c
    d = travel_direction(candidates[0], pose.heading)

    def reach(c: Corridor) -> float:
        r = c.rect
        if axis == "x":
            return r.xmax - pose.x if d[0] > 0 else pose.x - r.xmin
        return r.ymax - pose.y if d[1] > 0 else pose.y - r.ymin

    return min(candidates, key=lambda c: (-reach(c), c.id))


Monitor = Callable[[RobotState], bool]


@dataclass
class MotionOutcome:
    state: RobotState
    trajectory: Trajectory
    reason: str  # distance | monitor | stuck | budget
    travelled: float = 0.0


def move_forward(
    world: WorldMap,
    state: RobotState,
    distance: float,
    monitor: Monitor | None = None,
    *,
    sim: SimConfig = SimConfig(),
    pid: PidConfig = PidConfig(),
    deadline: float = math.inf,
) -> MotionOutcome:
    """Drive along the current corridor's centerline for ``distance`` metres.

    Stops early when ``monitor(state)`` returns True, when no progress is made
    for ``sim.stuck_window_s`` (Stuck event), or when the next step would
    pass ``deadline`` in simulated time.
    """
    if distance < 0:
        raise ValueError("distance must be non-negative")
    traj = Trajectory()
    traj.add(state.t, state.pose)
    pid_state = PidState()
    travelled = 0.0
    corridor = resolve_corridor(world, state.pose, state.current_corridor)
    state = replace(state, current_corridor=corridor.id if corridor else None)
    window_len = max(1, int(round(sim.stuck_window_s / sim.dt)))
    history: deque[tuple[float, float]] = deque([state.pose.point], maxlen=window_len + 1)
    blocked = False
    reason = "distance"
    while travelled < distance - 1e-9:
        if state.t + sim.dt > deadline + 1e-9:
            reason = "budget"
            break
        corridor = resolve_corridor(world, state.pose, state.current_corridor)
        if corridor is not None:
            cte, he = tracking_errors(corridor, state.pose)
        else:
            cte = 0.0
            he = normalize_angle(CARDINAL_ANGLE[nearest_cardinal(state.pose.heading)] - state.pose.heading)
        omega, pid_state = pid_heading(cte, he, pid_state, pid, sim.dt, sim.omega_max)
        v = min(sim.v_max, (distance - travelled) / sim.dt)
        prev = state.pose
        state, collided = step(world, state, ControlCommand(v, omega), sim.dt, sim)
        state = replace(state, current_corridor=corridor.id if corridor else None)
        travelled += math.hypot(state.pose.x - prev.x, state.pose.y - prev.y)
        traj.add(state.t, state.pose)
        if collided and not blocked:
            traj.event(state.t, "Collision", corridor.id if corridor else "")
        blocked = collided
        history.append(state.pose.point)
        if monitor is not None and monitor(state):
            reason = "monitor"
            break
        if len(history) > window_len:
            ox, oy = history[0]
            if math.hypot(state.pose.x - ox, state.pose.y - oy) < sim.stuck_min_progress:
                traj.event(state.t, "Stuck", f"{travelled:.3f}")
                reason = "stuck"
                break
    state = replace(state, speed=0.0)
    return MotionOutcome(state, traj, reason, travelled)


TURN_ANGLE = {"left": math.pi / 2, "right": -math.pi / 2, "around": math.pi}


def turn(
    world: WorldMap,
    state: RobotState,
    direction: str,
    *,
    sim: SimConfig = SimConfig(),
    deadline: float = math.inf,
) -> MotionOutcome:
    """Rotate in place by +90 (left), -90 (right) or 180 (around) degrees."""
    if direction not in TURN_ANGLE:
        raise ValueError(f"unknown turn direction {direction!r}")
    target = TURN_ANGLE[direction]
    sign = 1.0 if target > 0 else -1.0
    traj = Trajectory()
    traj.add(state.t, state.pose)
    rotated = 0.0
    reason = "distance"
    while abs(target) - rotated > 1e-12:
        if state.t + sim.dt > deadline + 1e-9:
            reason = "budget"
            break
        rate = min(sim.omega_max, (abs(target) - rotated) / sim.dt)
        state, _ = step(world, state, ControlCommand(0.0, sign * rate), sim.dt, sim)
        rotated += rate * sim.dt
        traj.add(state.t, state.pose)
    if reason != "budget":
        intended = state.pose.heading
        snapped = CARDINAL_ANGLE[nearest_cardinal(intended)]
        pose = Pose(state.pose.x, state.pose.y, snapped)
        state = replace(state, pose=pose)
        traj.samples[-1] = (state.t, pose)
        traj.event(state.t, "TurnDone", direction)
    corridor = resolve_corridor(world, state.pose)
    state = replace(state, current_corridor=corridor.id if corridor else None, speed=0.0)
    return MotionOutcome(state, traj, reason, 0.0)


def initial_state(world: WorldMap, sim: SimConfig = SimConfig(), heading: float | None = None) -> RobotState:
    pose = world.start if heading is None else Pose(world.start.x, world.start.y, heading)
    corridor = resolve_corridor(world, pose)
    return RobotState(pose=pose, radius=sim.radius, current_corridor=corridor.id if corridor else None)
