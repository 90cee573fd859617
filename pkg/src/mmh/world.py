"""2D corridor world: map loading, validation and geometric queries.

Passable space is the union of axis-aligned corridor rectangles. Walls are
implicit at the union boundary, and boundary points count as passable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidOrigin, SchemaError, UnknownCorridor, ValidationError

Point = tuple[float, float]

CARDINALS = ("N", "E", "S", "W")
CARDINAL_ANGLE = {"E": 0.0, "N": math.pi / 2, "W": -math.pi, "S": -math.pi / 2}

MIN_CORRIDOR_WIDTH = 1.0
WALL_MOUNT_TOLERANCE = 0.5


def normalize_angle(a: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    a = math.fmod(a + math.pi, 2.0 * math.pi)
    if a < 0.0:
        a += 2.0 * math.pi
    a -= math.pi
    # fmod round-off can land exactly on +pi
    if a >= math.pi:
        a -= 2.0 * math.pi
    return a


def nearest_cardinal(heading: float) -> str:
    best = min(CARDINALS, key=lambda c: abs(normalize_angle(heading - CARDINAL_ANGLE[c])))
    return best


@dataclass(frozen=True)
class Rect:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def center(self) -> Point:
        return ((self.xmin + self.xmax) / 2.0, (self.ymin + self.ymax) / 2.0)

    def contains(self, p: Point) -> bool:
        return self.xmin <= p[0] <= self.xmax and self.ymin <= p[1] <= self.ymax

    def intersects(self, other: "Rect") -> bool:
        """Overlap with positive area."""
        return (
            min(self.xmax, other.xmax) > max(self.xmin, other.xmin)
            and min(self.ymax, other.ymax) > max(self.ymin, other.ymin)
        )

    def distance_to(self, p: Point) -> float:
        dx = max(self.xmin - p[0], 0.0, p[0] - self.xmax)
        dy = max(self.ymin - p[1], 0.0, p[1] - self.ymax)
        return math.hypot(dx, dy)

    def clamp(self, p: Point) -> Point:
        return (min(max(p[0], self.xmin), self.xmax), min(max(p[1], self.ymin), self.ymax))

    def ray_interval(self, origin: Point, direction: Point) -> tuple[float, float] | None:
        """Closed parameter interval [t_in, t_out] where origin + t*direction is inside."""
        t_lo, t_hi = -math.inf, math.inf
        for o, d, lo, hi in (
            (origin[0], direction[0], self.xmin, self.xmax),
            (origin[1], direction[1], self.ymin, self.ymax),
        ):
            if d == 0.0:
                if o < lo or o > hi:
                    return None
                continue
            a, b = (lo - o) / d, (hi - o) / d
            if a > b:
                a, b = b, a
            t_lo, t_hi = max(t_lo, a), min(t_hi, b)
        if t_lo > t_hi:
            return None
        return t_lo, t_hi


@dataclass(frozen=True)
class Corridor:
    id: str
    rect: Rect
    axis: str  # "x" or "y"

    @property
    def width(self) -> float:
        return self.rect.height if self.axis == "x" else self.rect.width

    @property
    def length(self) -> float:
        return self.rect.width if self.axis == "x" else self.rect.height


@dataclass(frozen=True)
class TurningPointZone:
    id: str
    rect: Rect
    navigable: frozenset[str]


@dataclass(frozen=True)
class PlacedObject:
    id: str
    label: str
    position: Point
    synonyms: frozenset[str] = frozenset()
    facing: str | None = None


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "heading", normalize_angle(self.heading))

    @property
    def point(self) -> Point:
        return (self.x, self.y)


@dataclass(frozen=True)
class WorldMap:
    corridors: tuple[Corridor, ...]
    zones: tuple[TurningPointZone, ...]
    objects: tuple[PlacedObject, ...]
    start: Pose
    goal: Point
    goal_label: str = ""
    name: str = ""
    reference: tuple[Point, ...] = ()
    _rects: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        rects = np.array(
            [[c.rect.xmin, c.rect.ymin, c.rect.xmax, c.rect.ymax] for c in self.corridors],
            dtype=float,
        ).reshape(-1, 4)
        object.__setattr__(self, "_rects", rects)

    def corridor(self, corridor_id: str) -> Corridor:
        for c in self.corridors:
            if c.id == corridor_id:
                return c
        raise UnknownCorridor(corridor_id)

    def zone(self, zone_id: str) -> TurningPointZone:
        for z in self.zones:
            if z.id == zone_id:
                return z
        raise KeyError(zone_id)

    @property
    def bounds(self) -> Rect:
        r = self._rects
        return Rect(float(r[:, 0].min()), float(r[:, 1].min()), float(r[:, 2].max()), float(r[:, 3].max()))

    def reference_route(self) -> list[Point]:
        """Waypoints of the ground-truth route; start-goal line when unannotated."""
        if self.reference:
            return list(self.reference)
        return [self.start.point, self.goal]


# --- geometric queries ---------------------------------------------------


def is_passable(world: WorldMap, p: Point) -> bool:
    x, y = p
    for c in world.corridors:
        r = c.rect
        if r.xmin <= x <= r.xmax and r.ymin <= y <= r.ymax:
            return True
    return False


def passable_mask(world: WorldMap, pts) -> np.ndarray:
    """Vectorised is_passable over an (n, 2) array of points."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    r = world._rects
    x = pts[:, 0:1]
    y = pts[:, 1:2]
    inside = (x >= r[:, 0]) & (x <= r[:, 2]) & (y >= r[:, 1]) & (y <= r[:, 3])
    return inside.any(axis=1)


def distance_to_union(world: WorldMap, p: Point) -> float:
    return min(c.rect.distance_to(p) for c in world.corridors)


def nearest_passable_point(world: WorldMap, p: Point) -> Point:
    best = min(world.corridors, key=lambda c: (c.rect.distance_to(p), c.id))
    return best.rect.clamp(p)


_MERGE_EPS = 1e-9


def raycast(world: WorldMap, origin: Point, direction: Point, max_range: float) -> float | None:
    """Distance along ``direction`` until the ray leaves passable space.

    Returns None (no hit) when the ray is still inside the corridor union at
    ``max_range``.
    """
    if max_range <= 0:
        raise ValueError("max_range must be positive")
    if not is_passable(world, origin):
        raise InvalidOrigin(f"origin {origin} is not passable")
    norm = math.hypot(direction[0], direction[1])
    if norm == 0.0:
        raise ValueError("direction must be non-zero")
    d = (direction[0] / norm, direction[1] / norm)
    intervals = []
    for c in world.corridors:
        iv = c.rect.ray_interval(origin, d)
        if iv is not None and iv[1] >= 0.0:
            intervals.append(iv)
    reach = 0.0
    changed = True
    while changed:
        changed = False
        for t_in, t_out in intervals:
            if t_in <= reach + _MERGE_EPS and t_out > reach:
                reach = t_out
                changed = True
    if reach >= max_range:
        return None
    return reach


def segment_clear(world: WorldMap, a: Point, b: Point, tol: float = 1e-6) -> bool:
    """True when the straight segment a->b stays inside passable space."""
    if not is_passable(world, a):
        return False
    length = math.hypot(b[0] - a[0], b[1] - a[1])
    if length == 0.0:
        return True
    hit = raycast(world, a, (b[0] - a[0], b[1] - a[1]), length)
    return hit is None or hit >= length - tol


def centerline(world: WorldMap, corridor_id: str) -> tuple[Point, Point]:
    r = world.corridor(corridor_id).rect
    c = world.corridor(corridor_id)
    if c.axis == "x":
        ym = (r.ymin + r.ymax) / 2.0
        return (r.xmin, ym), (r.xmax, ym)
    xm = (r.xmin + r.xmax) / 2.0
    return (xm, r.ymin), (xm, r.ymax)


def corridors_at(world: WorldMap, p: Point) -> list[Corridor]:
    return [c for c in world.corridors if c.rect.contains(p)]


def union_corners(world: WorldMap, eps: float = 1e-4) -> list[Point]:
    """Reflex (inner) corner points of the corridor union boundary.

    A point is a reflex corner when exactly three of the four diagonal
    quadrants around it are passable.
    """
    xs: set[float] = set()
    ys: set[float] = set()
    for c in world.corridors:
        xs.update((c.rect.xmin, c.rect.xmax))
        ys.update((c.rect.ymin, c.rect.ymax))
    found = []
    for x in sorted(xs):
        for y in sorted(ys):
            if not is_passable(world, (x, y)):
                continue
            quads = passable_mask(
                world, [(x + eps, y + eps), (x - eps, y + eps), (x - eps, y - eps), (x + eps, y - eps)]
            )
            if int(quads.sum()) == 3:
                found.append((x, y))
    return found


# --- loading ---------------------------------------------------------------


def _point(value, element: str) -> Point:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise SchemaError(f"expected [x, y], got {value!r}", element=element)
    x, y = float(value[0]), float(value[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise SchemaError("coordinates must be finite", element=element)
    return (x, y)


def _require(obj: dict, key: str, element: str):
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", element=element)
    if key not in obj:
        raise SchemaError(f"missing key {key!r}", element=element)
    return obj[key]


def _rect(obj: dict, element: str) -> Rect:
    lo = _point(_require(obj, "min", element), element)
    hi = _point(_require(obj, "max", element), element)
    return Rect(lo[0], lo[1], hi[0], hi[1])


def _unique_id(obj: dict, element: str, seen: set[str]) -> str:
    ident = _require(obj, "id", element)
    if not isinstance(ident, str) or not ident:
        raise SchemaError("id must be a non-empty string", element=element)
    if ident in seen:
        raise ValidationError(ident, "duplicate id")
    seen.add(ident)
    return ident


def parse_map(doc: dict, name: str = "") -> WorldMap:
    if not isinstance(doc, dict):
        raise SchemaError("map document must be a JSON object")
    for key in ("corridors", "start", "goal"):
        if key not in doc:
            raise SchemaError(f"missing top-level key {key!r}")

    corridors = []
    seen: set[str] = set()
    raw = doc["corridors"]
    if not isinstance(raw, list) or not raw:
        raise SchemaError("corridors must be a non-empty array", element="corridors")
    for i, c in enumerate(raw):
        element = f"corridors[{i}]"
        ident = _unique_id(c, element, seen)
        rect = _rect(c, ident)
        axis = _require(c, "axis", ident)
        if axis not in ("x", "y"):
            raise SchemaError(f"axis must be 'x' or 'y', got {axis!r}", element=ident)
        if rect.width <= 0 or rect.height <= 0:
            raise ValidationError(ident, "corridor rectangle must have positive extent")
        corridor = Corridor(ident, rect, axis)
        if corridor.width < MIN_CORRIDOR_WIDTH:
            raise ValidationError(ident, f"width {corridor.width:g} m below {MIN_CORRIDOR_WIDTH:g} m")
        corridors.append(corridor)

    zones = []
    seen_z: set[str] = set()
    raw_zones = doc.get("zones", [])
    if not isinstance(raw_zones, list):
        raise SchemaError("zones must be an array", element="zones")
    for i, z in enumerate(raw_zones):
        ident = _unique_id(z, f"zones[{i}]", seen_z)
        rect = _rect(z, ident)
        nav = _require(z, "navigable", ident)
        if not isinstance(nav, list) or any(d not in CARDINALS for d in nav):
            raise SchemaError("navigable must be a subset of N/E/S/W", element=ident)
        if not nav:
            raise ValidationError(ident, "navigable set is empty")
        if rect.width <= 0 or rect.height <= 0:
            raise ValidationError(ident, "zone rectangle must have positive area")
        zones.append(TurningPointZone(ident, rect, frozenset(nav)))

    objects = []
    seen_o: set[str] = set()
    raw_objects = doc.get("objects", [])
    if not isinstance(raw_objects, list):
        raise SchemaError("objects must be an array", element="objects")
    for i, o in enumerate(raw_objects):
        ident = _unique_id(o, f"objects[{i}]", seen_o)
        label = _require(o, "label", ident)
        if not isinstance(label, str) or not label.strip():
            raise ValidationError(ident, "label must be non-empty")
        synonyms = o.get("synonyms", [])
        if not isinstance(synonyms, list) or not all(isinstance(s, str) for s in synonyms):
            raise SchemaError("synonyms must be an array of strings", element=ident)
        facing = o.get("facing")
        if facing is not None and facing not in CARDINALS:
            raise SchemaError(f"facing must be one of N/E/S/W, got {facing!r}", element=ident)
        pos = _point(_require(o, "pos", ident), ident)
        objects.append(PlacedObject(ident, label, pos, frozenset(synonyms), facing))

    start = doc["start"]
    spos = _point(_require(start, "pos", "start"), "start")
    heading_deg = _require(start, "heading_deg", "start")
    if not isinstance(heading_deg, (int, float)) or isinstance(heading_deg, bool):
        raise SchemaError("heading_deg must be a number", element="start")
    goal = doc["goal"]
    gpos = _point(_require(goal, "pos", "goal"), "goal")
    glabel = goal.get("label", "")
    if not isinstance(glabel, str):
        raise SchemaError("label must be a string", element="goal")

    reference = tuple(_point(p, "reference") for p in doc.get("reference", []))

    world = WorldMap(
        corridors=tuple(corridors),
        zones=tuple(zones),
        objects=tuple(objects),
        start=Pose(spos[0], spos[1], math.radians(heading_deg)),
        goal=gpos,
        goal_label=glabel,
        name=str(doc.get("name", name)),
        reference=reference,
    )
    validate_map(world)
    return world


def validate_map(world: WorldMap) -> None:
    if not is_passable(world, world.start.point):
        raise ValidationError("start", "start position lies outside all corridors")
    if not is_passable(world, world.goal):
        raise ValidationError("goal", "goal lies outside all corridors")
    for z in world.zones:
        overlapping = [c for c in world.corridors if c.rect.intersects(z.rect)]
        if len(overlapping) >= 2:
            continue
        if not any(_touches_corridor_end(c, z.rect) for c in overlapping):
            raise ValidationError(z.id, "zone must intersect two corridors or one corridor end")
    for o in world.objects:
        if distance_to_union(world, o.position) > WALL_MOUNT_TOLERANCE + 1e-9:
            raise ValidationError(o.id, "object is more than 0.5 m from passable space")
    for i, p in enumerate(world.reference):
        if not is_passable(world, p):
            raise ValidationError(f"reference[{i}]", "reference waypoint is not passable")


def _touches_corridor_end(c: Corridor, zone: Rect) -> bool:
    r = c.rect
    if c.axis == "x":
        ends = [Rect(r.xmin, r.ymin, r.xmin, r.ymax), Rect(r.xmax, r.ymin, r.xmax, r.ymax)]
    else:
        ends = [Rect(r.xmin, r.ymin, r.xmax, r.ymin), Rect(r.xmin, r.ymax, r.xmax, r.ymax)]
    for e in ends:
        if (
            min(e.xmax, zone.xmax) >= max(e.xmin, zone.xmin)
            and min(e.ymax, zone.ymax) >= max(e.ymin, zone.ymin)
        ):
            return True
    return False


def load_map(text: str, name: str = "") -> WorldMap:
    """Parse a JSON map document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return parse_map(doc, name=name)


def load_map_file(path: str | Path) -> WorldMap:
    path = Path(path)
    return load_map(path.read_text(encoding="utf-8"), name=path.name.split(".")[0])


def bundled_map_names() -> list[str]:
    root = resources.files("mmh") / "data" / "maps"
    return sorted(p.name[: -len(".map.json")] for p in root.iterdir() if p.name.endswith(".map.json"))


def bundled_map_path(name: str) -> Path:
    return Path(str(resources.files("mmh") / "data" / "maps" / f"{name}.map.json"))


def load_bundled_map(name: str) -> WorldMap:
    return load_map_file(bundled_map_path(name))


def resolve_map(ref: str | Path) -> WorldMap:
    """Load a map from a path, or by bundled name such as ``route_1``."""
    p = Path(ref)
    if p.exists():
        return load_map_file(p)
    name = str(ref)
    if name.endswith(".map.json"):
        name = name[: -len(".map.json")]
    if name in bundled_map_names():
        return load_bundled_map(name)
    raise FileNotFoundError(f"no map at {ref}")


def map_to_doc(world: WorldMap) -> dict:
    doc = {
        "name": world.name,
        "corridors": [
            {"id": c.id, "min": [c.rect.xmin, c.rect.ymin], "max": [c.rect.xmax, c.rect.ymax], "axis": c.axis}
            for c in world.corridors
        ],
        "zones": [
            {"id": z.id, "min": [z.rect.xmin, z.rect.ymin], "max": [z.rect.xmax, z.rect.ymax],
             "navigable": sorted(z.navigable, key=CARDINALS.index)}
            for z in world.zones
        ],
        "objects": [
            {"id": o.id, "label": o.label, "synonyms": sorted(o.synonyms), "pos": list(o.position),
             **({"facing": o.facing} if o.facing else {})}
            for o in world.objects
        ],
        "start": {"pos": [world.start.x, world.start.y], "heading_deg": math.degrees(world.start.heading)},
        "goal": {"pos": list(world.goal), "label": world.goal_label},
    }
    if world.reference:
        doc["reference"] = [list(p) for p in world.reference]
    return doc


def with_goal(world: WorldMap, goal: Point | None = None, reference: Sequence[Point] | None = None) -> WorldMap:
    """Copy of ``world`` with a different goal and/or reference route."""
    from dataclasses import replace

    changes = {}
    if goal is not None:
        changes["goal"] = (float(goal[0]), float(goal[1]))
    if reference is not None:
        changes["reference"] = tuple((float(p[0]), float(p[1])) for p in reference)
    if not changes:
        return world
    w = replace(world, **changes)
    validate_map(w)
    return w


def make_map(
    corridors: Iterable[tuple[str, Point, Point, str]],
    start: tuple[float, float, float],
    goal: Point,
    zones: Iterable[tuple[str, Point, Point, Iterable[str]]] = (),
    objects: Iterable[dict] = (),
    reference: Sequence[Point] = (),
) -> WorldMap:
    """Build a map in code; ``start`` is (x, y, heading_deg)."""
    doc = {
        "corridors": [{"id": i, "min": list(lo), "max": list(hi), "axis": ax} for i, lo, hi, ax in corridors],
        "zones": [{"id": i, "min": list(lo), "max": list(hi), "navigable": list(nav)} for i, lo, hi, nav in zones],
        "objects": list(objects),
        "start": {"pos": [start[0], start[1]], "heading_deg": start[2]},
        "goal": {"pos": list(goal), "label": "goal"},
    }
    if reference:
        doc["reference"] = [list(p) for p in reference]
    return parse_map(doc)
