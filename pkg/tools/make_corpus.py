"""Writes the bundled synthetic instruction corpus (deterministic).

Five records per (study, route, iteration) group. Online-style texts are
short route summaries; onsite-style texts add landmark chatter, so they are
longer and vary more in length.
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "mmh" / "data" / "corpus" / "synthetic.jsonl"

CORE = {
    "route_1": [
        "Go straight and turn left at the second intersection.",
        "Turn right at the second corner.",
        "Go straight for 10 meters.",
        "The elevator is on your left.",
    ],
    "route_2": [
        "Turn left at the second intersection.",
        "Turn left at the second corner.",
        "Turn right at the first intersection.",
        "Turn right at the second intersection, then turn right again.",
        "Turn right at the next corner and turn left.",
        "Walk straight for 28 meters to reach the office.",
    ],
}

CHATTER = [
    "You will see a chair on the right.",
    "There is a statue near the corner.",
    "Keep going past the doors.",
    "Do not take the small side corridor.",
    "It is a fairly long hallway so keep walking.",
    "You might notice a trash bin by the wall.",
    "If you reach a dead end you went too far.",
    "The corridor gets a little darker here.",
    "Ignore the first opening on your left.",
    "There are several doors along this part.",
]

ONLINE_TAILS = ["", " That's the destination.", " You have arrived."]


def make(seed: int = 7) -> list[dict]:
    rng = random.Random(seed)
    records = []
    for study in ("online", "onsite"):
        for route in ("route_1", "route_2"):
            for iteration in (1, 2):
                for k in range(5):
                    core = CORE[route]
                    if study == "online":
                        keep = core[: max(2, len(core) - rng.randint(0, 2))]
                        text = " ".join(keep) + rng.choice(ONLINE_TAILS)
                    else:
                        parts = []
                        for sentence in core:
                            parts.append(sentence)
                            parts.extend(rng.sample(CHATTER, rng.randint(0, 3 + k % 3)))
                        text = " ".join(parts)
                    records.append(
                        {
                            "id": f"{study}-{route}-it{iteration}-{k + 1}",
                            "route_id": route,
                            "study": study,
                            "iteration": iteration,
                            "text": text,
                            "failure_flag": rng.random() < (0.3 if study == "onsite" else 0.15),
                        }
                    )
    return records


if __name__ == "__main__":
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", encoding="utf-8") as fh:
        for rec in make():
            fh.write(json.dumps(rec) + "\n")
    print(f"wrote {OUT}")
