"""SVG rendering of a map with trajectories and the reference route."""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from typing import Sequence

from .kinematics import Trajectory
from .world import Point, WorldMap

SCALE = 10.0  # SVG units per metre
MARGIN_M = 2.0
DECIMATE_M = 0.2
COLORS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def decimate(points: Sequence[Point], min_step: float = DECIMATE_M) -> list[Point]:
    """Keep the first point and every point at least ``min_step`` from the last kept one."""
    out: list[Point] = []
    for p in points:
        if not out or math.hypot(p[0] - out[-1][0], p[1] - out[-1][1]) >= min_step:
            out.append((float(p[0]), float(p[1])))
    return out


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def render_trajectory_svg(
    world: WorldMap,
    trajectories: Sequence[Trajectory | Sequence[Point]] = (),
    reference: Sequence[Point] | None = None,
    title: str = "",
) -> str:
    """Standalone SVG: corridors outlined, zones shaded, objects labelled,
    reference dashed, one polyline per trajectory."""
    b = world.bounds
    xmin, ymax = b.xmin - MARGIN_M, b.ymax + MARGIN_M
    width = (b.width + 2 * MARGIN_M) * SCALE
    height = (b.height + 2 * MARGIN_M) * SCALE

    def sx(x: float) -> str:
        return _fmt((x - xmin) * SCALE)

    def sy(y: float) -> str:
        return _fmt((ymax - y) * SCALE)

    def pts(points) -> str:
        return " ".join(f"{sx(x)},{sy(y)}" for x, y in points)

    svg = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=_fmt(width),
        height=_fmt(height),
        viewBox=f"0 0 {_fmt(width)} {_fmt(height)}",
    )
    ET.SubElement(svg, "title").text = title or world.name or "map"
    ET.SubElement(svg, "rect", x="0", y="0", width=_fmt(width), height=_fmt(height), fill="#ffffff")

    g = ET.SubElement(svg, "g", id="corridors", fill="#f4f4f4", stroke="#444444")
    g.set("stroke-width", "1")
    for c in world.corridors:
        r = c.rect
        ET.SubElement(g, "rect", id=f"corridor-{c.id}", x=sx(r.xmin), y=sy(r.ymax), width=_fmt(r.width * SCALE), height=_fmt(r.height * SCALE))

    g = ET.SubElement(svg, "g", id="zones", fill="#ffd54f")
    g.set("fill-opacity", "0.45")
    for z in world.zones:
        r = z.rect
        ET.SubElement(g, "rect", id=f"zone-{z.id}", x=sx(r.xmin), y=sy(r.ymax), width=_fmt(r.width * SCALE), height=_fmt(r.height * SCALE))

    g = ET.SubElement(svg, "g", id="objects")
    g.set("font-size", "6")
    for o in world.objects:
        x, y = o.position
        ET.SubElement(g, "circle", cx=sx(x), cy=sy(y), r="3", fill="#555555")
        ET.SubElement(g, "text", x=_fmt(float(sx(x)) + 4), y=sy(y)).text = o.label

    ref = list(reference) if reference is not None else world.reference_route()
    if len(ref) >= 2:
        line = ET.SubElement(svg, "polyline", id="reference", points=pts(ref), fill="none", stroke="#888888")
        line.set("stroke-width", "2")
        line.set("stroke-dasharray", "6 4")

    g = ET.SubElement(svg, "g", id="trajectories", fill="none")
    g.set("stroke-width", "2")
    for i, traj in enumerate(trajectories):
        raw = traj.points() if isinstance(traj, Trajectory) else list(traj)
        kept = decimate(raw)
        if kept:
            ET.SubElement(g, "polyline", id=f"trajectory-{i}", points=pts(kept), stroke=COLORS[i % len(COLORS)])

    sxs, sys_ = world.start.x, world.start.y
    ET.SubElement(svg, "circle", id="start", cx=sx(sxs), cy=sy(sys_), r="4", fill="#2ca02c")
    gx, gy = world.goal
    ET.SubElement(svg, "circle", id="goal", cx=sx(gx), cy=sy(gy), r="4", fill="#d62728")

    ET.indent(svg)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(svg, encoding="unicode") + "\n"
