"""Small maps shared across the test modules."""

import pytest

from mmh.world import make_map


def straight(length=50.0, width=2.5, objects=(), goal=None):
    """One x-axis corridor from -1 to ``length``, centred on y=0."""
    h = width / 2
    return make_map(
        [("c1", (-1.0, -h), (length, h), "x")],
        start=(0.0, 0.0, 0.0),
        goal=goal or (length - 1.0, 0.0),
        objects=objects,
    )


def l_map():
    """East leg 0..10 then south leg 10..-10, joined by zone z1."""
    return make_map(
        [("c1", (-1.25, -1.25), (11.25, 1.25), "x"), ("c2", (8.75, -11.25), (11.25, 1.25), "y")],
        start=(0.0, 0.0, 0.0),
        goal=(10.0, -5.0),
        zones=[("z1", (8.75, -1.25), (11.25, 1.25), ["W", "S"])],
    )


@pytest.fixture
def corridor():
    return straight()


@pytest.fixture
def lmap():
    return l_map()


LABELS = ("door", "chair", "trash can", 'odd "quoted" sign', "café", "back\\slash")


def random_program(rng):
    """A valid NavProgram built from a seeded ``random.Random``."""
    from mmh.navscript import Forward, ForwardUntilObject, ForwardUntilTurningPoint, NavProgram, Stop, Turn

    stmts = []
    for _ in range(rng.randint(0, 8)):
        kind = rng.randrange(4)
        if kind == 0:
            stmts.append(Forward(rng.choice([0.0, 1.0, 2.5, 100.0, round(rng.uniform(0, 500), rng.randint(0, 6))])))
        elif kind == 1:
            stmts.append(ForwardUntilTurningPoint(rng.randint(1, 9)))
        elif kind == 2:
            stmts.append(ForwardUntilObject(rng.choice(LABELS), rng.randint(1, 12), round(rng.uniform(0, 3), rng.randint(0, 3))))
        else:
            stmts.append(Turn(rng.choice(["left", "right", "around"])))
    stmts.append(Stop())
    return NavProgram(tuple(stmts))


def stats_oracle(rows):
    """Group word-count stats recomputed by hand from raw dicts: {key: (n, mean, median, sd)}."""
    import math
    import re

    groups = {}
    for r in rows:
        words = [w for w in re.sub(r'[.,!?;:"()]', "", r["text"]).lower().split() if w]
        groups.setdefault((r["study"], r["route_id"], r["iteration"]), []).append(len(words))
    out = {}
    for key, counts in groups.items():
        n = len(counts)
        mean = sum(counts) / n
        median = sorted(counts)[(n - 1) // 2]
        sd = math.sqrt(sum((c - mean) ** 2 for c in counts) / n)
        out[key] = (n, mean, median, sd)
    return out


def bundled_corpus_rows(name="synthetic"):
    import json
    from importlib import resources

    text = (resources.files("mmh") / "data" / "corpus" / f"{name}.jsonl").read_text(encoding="utf-8")
    return [json.loads(line) for line in text.splitlines() if line.strip()]
