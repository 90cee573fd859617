"""Simulated sensing: turning-point zones and range-limited object detection.

Object detection is geometric visibility: a matching object is seen when it
is within the depth threshold, inside the forward field of view and not
hidden behind a wall. A tracker ensures each object is counted once.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field

from .world import PlacedObject, Pose, WorldMap, is_passable, nearest_passable_point, normalize_angle, raycast


@dataclass(frozen=True)
class PerceptionConfig:
    depth_threshold_m: float = 4.0
    fov_deg: float = 90.0
    miss_prob: float = 0.0


@dataclass(frozen=True)
class TurningPointObservation:
    zone_id: str
    navigable: frozenset[str]


@dataclass(frozen=True)
class Detection:
    object_id: str
    label: str
    distance: float
    bearing: float


@dataclass
class ObjectTracker:
    counted_ids: set[str] = field(default_factory=set)
    counts: dict[str, int] = field(default_factory=dict)

    def add(self, obj: PlacedObject) -> None:
        if obj.id in self.counted_ids:
            return
        self.counted_ids.add(obj.id)
        key = normalize_label(obj.label)
        self.counts[key] = self.counts.get(key, 0) + 1

    def count(self, label: str) -> int:
        return self.counts.get(normalize_label(label), 0)


def detect_turning_point(world: WorldMap, pose: Pose) -> TurningPointObservation | None:
    hits = [z for z in world.zones if z.rect.contains(pose.point)]
    if not hits:
        return None
    z = min(hits, key=lambda z: z.id)
    return TurningPointObservation(z.id, z.navigable)


_IRREGULAR = {"people": "person", "men": "man", "women": "woman", "children": "child", "feet": "foot", "shelves": "shelf"}
_KEEP_S = ("ss", "us", "is")


def singularize(word: str) -> str:
    if word in _IRREGULAR:
        return _IRREGULAR[word]
    if len(word) > 3 and word.endswith("ies"):
        return word[:-3] + "y"
    if len(word) > 3 and word.endswith(("ches", "shes", "sses", "xes", "zes")):
        return word[:-2]
    if len(word) > 2 and word.endswith("s") and not word.endswith(_KEEP_S):
        return word[:-1]
    return word


def normalize_label(text: str) -> str:
    """Case-fold, collapse whitespace and singularize the head noun."""
    words = re.sub(r"\s+", " ", text.casefold()).strip().split(" ")
    if words and words[-1]:
        words[-1] = singularize(words[-1])
    return " ".join(words)


def match_label(query: str, obj: PlacedObject) -> bool:
    q = normalize_label(query)
    if not q:
        return False
    return q == normalize_label(obj.label) or any(q == normalize_label(s) for s in obj.synonyms)


def sight_point(world: WorldMap, obj: PlacedObject) -> tuple[float, float]:
    """Point used for occlusion tests; wall-mounted objects use the nearest passable point."""
    if is_passable(world, obj.position):
        return obj.position
    return nearest_passable_point(world, obj.position)


def visible(world: WorldMap, pose: Pose, obj: PlacedObject, cfg: PerceptionConfig, view_heading: float | None = None) -> Detection | None:
    """Detection for ``obj`` if it is in range, in view and unoccluded."""
    heading = pose.heading if view_heading is None else view_heading
    dx, dy = obj.position[0] - pose.x, obj.position[1] - pose.y
    dist = math.hypot(dx, dy)
    if dist > cfg.depth_threshold_m:
        return None
    bearing = normalize_angle(math.atan2(dy, dx) - heading) if dist > 0 else 0.0
    if abs(bearing) > math.radians(cfg.fov_deg) / 2 + 1e-12:
        return None
    if not is_passable(world, pose.point):
        return None
    sx, sy = sight_point(world, obj)
    span = math.hypot(sx - pose.x, sy - pose.y)
    if span > 1e-9:
        hit = raycast(world, pose.point, (sx - pose.x, sy - pose.y), span)
        if hit is not None and hit < span - 1e-6:
            return None
    return Detection(obj.id, obj.label, dist, bearing)


def detect_objects(
    world: WorldMap,
    pose: Pose,
    query: str,
    tracker: ObjectTracker,
    cfg: PerceptionConfig = PerceptionConfig(),
    rng: random.Random | None = None,
) -> list[Detection]:
    """New sightings of objects matching ``query``; they are added to ``tracker``.

    Results are ordered by distance, then object id.
    """
    found = []
    for obj in world.objects:
        if obj.id in tracker.counted_ids or not match_label(query, obj):
            continue
        det = visible(world, pose, obj, cfg)
        if det is None:
            continue
        if cfg.miss_prob > 0.0 and (rng or random).random() < cfg.miss_prob:
            continue
        found.append((det, obj))
    found.sort(key=lambda d: (d[0].distance, d[0].object_id))
    for _, obj in found:
        tracker.add(obj)
    return [d for d, _ in found]
