"""Regenerate the bundled corridor maps under src/mmh/data/maps/.

Corridors are 2.5 m wide and laid out along integer centerlines; each junction
square is annotated as a turning-point zone.
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "mmh" / "data" / "maps"
HALF = 1.25
W = HALF  # wall offset from a centerline


def hall(cid, x0, x1, y):
    """East-west corridor whose centerline runs from x0 to x1 (walls extend HALF past each end)."""
    return {"id": cid, "min": [x0 - HALF, y - HALF], "max": [x1 + HALF, y + HALF], "axis": "x"}


def shaft(cid, x, y0, y1):
    """North-south corridor whose centerline runs from y0 to y1."""
    return {"id": cid, "min": [x - HALF, y0 - HALF], "max": [x + HALF, y1 + HALF], "axis": "y"}


def zone(zid, x, y, nav):
    return {"id": zid, "min": [x - HALF, y - HALF], "max": [x + HALF, y + HALF], "navigable": list(nav)}


def obj(oid, label, x, y, synonyms=(), facing=None):
    d = {"id": oid, "label": label, "synonyms": list(synonyms), "pos": [x, y]}
    if facing:
        d["facing"] = facing
    return d


DOOR = ("doorway", "entrance")
CHAIR = ("seat",)
BIN = ("trash can", "garbage bin", "bin")


def route_1():
    return {
        "name": "route_1",
        "corridors": [
            hall("c1", -1, 25, 0),
            shaft("c2", 25, 0, 18),
            hall("c3", 25, 37, 18),
            shaft("d1", 10, 0, 7),
            hall("d2", 15, 25, 9),
        ],
        "zones": [
            zone("z1", 10, 0, "EWN"),
            zone("z2", 25, 0, "WN"),
            zone("z3", 25, 9, "NSW"),
            zone("z4", 25, 18, "SE"),
        ],
        "objects": [
            obj("door1", "door", 4, W, DOOR, "S"),
            obj("door2", "door", 7, -W, DOOR, "N"),
            obj("chair1", "chair", 13, -1.0, CHAIR),
            obj("door3", "door", 16, W, DOOR, "S"),
            obj("door4", "door", 20, -W, DOOR, "N"),
            obj("statue", "statue", 25 + W, 12, ("sculpture",), "W"),
            obj("bin1", "trash can", 25 - W, 14, BIN),
            obj("door5", "door", 30, 18 + W, DOOR, "S"),
            obj("elevator", "elevator", 35, 18 + W, ("lift",), "S"),
        ],
        "start": {"pos": [0, 0], "heading_deg": 0},
        "goal": {"pos": [35, 18], "label": "elevator"},
        "reference": [[0, 0], [25, 0], [25, 18], [35, 18]],
    }


def route_2(goal_x=84.0):
    return {
        "name": "route_2",
        "corridors": [
            hall("a", -1, 30, 0),
            shaft("b", 30, 0, 20),
            hall("c", 16, 30, 20),
            shaft("d", 16, 20, 44),
            hall("e", 16, 56, 44),
            shaft("f", 56, 28, 44),
            hall("g", 56, goal_x + 2, 28),
            shaft("xa", 10, -8, 0),
            hall("xb", 30, 39, 10),
            hall("xd", 5, 16, 32),
            shaft("xe", 36, 44, 51),
            shaft("xg", 66, 21, 28),
        ],
        "zones": [
            zone("t01", 10, 0, "EWS"),
            zone("t02", 30, 0, "WN"),
            zone("t03", 30, 10, "NSE"),
            zone("t04", 30, 20, "SW"),
            zone("t05", 16, 20, "EN"),
            zone("t06", 16, 32, "NSW"),
            zone("t07", 16, 44, "SE"),
            zone("t08", 36, 44, "EWN"),
            zone("t09", 56, 44, "WS"),
            zone("t10", 56, 28, "NE"),
            zone("t11", 66, 28, "EWS"),
        ],
        "objects": [
            obj("door01", "door", 5, W, DOOR, "S"),
            obj("door02", "door", 18, -W, DOOR, "N"),
            obj("door03", "door", 22, W, DOOR, "S"),
            obj("chair01", "chair", 29.0, 5, CHAIR),
            obj("vending", "vending machine", 30 + W, 15, ("drink machine",), "W"),
            obj("door04", "door", 24, 20 - W, DOOR, "N"),
            obj("bin01", "trash can", 16 - W, 26, BIN),
            obj("door05", "door", 16 + W, 38, DOOR, "W"),
            obj("statue", "statue", 26, 44 + W, ("sculpture",), "S"),
            obj("door06", "door", 44, 44 - W, DOOR, "N"),
            obj("door07", "door", 48, 44 + W, DOOR, "S"),
            obj("chair02", "chair", 55.0, 36, CHAIR),
            obj("door08", "door", 61, 28 + W, DOOR, "S"),
            obj("door09", "door", 70, 28 - W, DOOR, "N"),
            obj("bench", "bench", 74, 29.0, ()),
            obj("office", "office door", goal_x, 28 + W, ("office",), "S"),
        ],
        "start": {"pos": [0, 0], "heading_deg": 0},
        "goal": {"pos": [goal_x, 28], "label": "office"},
        "reference": [[0, 0], [30, 0], [30, 20], [16, 20], [16, 44], [56, 44], [56, 28], [goal_x, 28]],
    }


def l_turn():
    return {
        "name": "l_turn",
        "corridors": [hall("c1", 0, 10, 0), shaft("c2", 10, -10, 0)],
        "zones": [zone("z1", 10, 0, "WS")],
        "objects": [obj("chair1", "chair", 5, -1.0, CHAIR)],
        "start": {"pos": [0, 0], "heading_deg": 0},
        "goal": {"pos": [10, -5], "label": "end of corridor"},
        "reference": [[0, 0], [10, 0], [10, -5]],
    }


def three_junction():
    corridors = [hall("main", 0, 40, 0)]
    zones = []
    for k, x in enumerate((10, 20, 30), start=1):
        corridors.append(shaft(f"s{k}", x, -11, 0))
        zones.append(zone(f"j{k}", x, 0, "EWS"))
    return {
        "name": "three_junction",
        "corridors": corridors,
        "zones": zones,
        "objects": [obj("door1", "door", 15, W, DOOR, "S"), obj("door2", "door", 25, W, DOOR, "S")],
        "start": {"pos": [0, 0], "heading_deg": 0},
        "goal": {"pos": [20, -6], "label": "room"},
        "reference": [[0, 0], [20, 0], [20, -6]],
    }


def door_hall():
    return {
        "name": "door_hall",
        "corridors": [hall("c1", 0, 21, 0), shaft("c2", 13, 0, 11)],
        "zones": [zone("z1", 13, 0, "EWN")],
        "objects": [obj(f"door{i}", "door", x, W if i % 2 else -W, DOOR) for i, x in enumerate((3, 6, 9, 12), start=1)]
        + [obj("chair1", "chair", 17, -1.0, CHAIR)],
        "start": {"pos": [0, 0], "heading_deg": 0},
        "goal": {"pos": [13, 6], "label": "stairs"},
        "reference": [[0, 0], [13, 0], [13, 6]],
    }


def straight_100():
    return {
        "name": "straight_100",
        "corridors": [hall("c1", 0, 105, 0), shaft("c2", 100, -19, 0)],
        "zones": [zone("z1", 100, 0, "EWS")],
        "objects": [obj("door1", "door", 50, W, DOOR, "S")],
        "start": {"pos": [0, 0], "heading_deg": 0},
        "goal": {"pos": [100, -1.5], "label": "restroom"},
        "reference": [[0, 0], [100, 0], [100, -1.5]],
    }


MAPS = {
    "route_1": route_1,
    "route_2": route_2,
    "l_turn": l_turn,
    "three_junction": three_junction,
    "door_hall": door_hall,
    "straight_100": straight_100,
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, build in MAPS.items():
        (OUT / f"{name}.map.json").write_text(json.dumps(build(), indent=1) + "\n", encoding="utf-8")
        print("wrote", name)


if __name__ == "__main__":
    main()
