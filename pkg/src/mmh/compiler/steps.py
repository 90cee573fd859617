"""Intermediate step lists and the controlled-English rule backend."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import InvalidSteps
from ..navscript.ast import Forward, ForwardUntilObject, ForwardUntilTurningPoint, NavProgram, Stop, Turn, pretty_print
from ..perception import singularize

GO_STRAIGHT = "go_straight"
TURN = "turn"
PASS_OBJECTS = "pass_objects"
AT_TURNING_POINT = "at_turning_point"
STOP = "stop"
STEP_KINDS = (GO_STRAIGHT, TURN, PASS_OBJECTS, AT_TURNING_POINT, STOP)
TURN_DIRECTIONS = ("left", "right", "around")


@dataclass(frozen=True)
class Step:
    kind: str
    distance: float | None = None
    direction: str | None = None
    label: str | None = None
    count: int | None = None
    ordinal: int | None = None

    def to_text(self) -> str:
        args = [
            f"{name}={value}"
            for name, value in (
                ("distance", self.distance),
                ("direction", self.direction),
                ("label", self.label),
                ("count", self.count),
                ("ordinal", self.ordinal),
            )
            if value is not None
        ]
        return " ".join([self.kind, *args])


@dataclass(frozen=True)
class StepList:
    steps: tuple[Step, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise InvalidSteps("step list is empty")
        for i, s in enumerate(self.steps):
            if s.kind not in STEP_KINDS:
                raise InvalidSteps(f"step {i}: unknown kind {s.kind!r}")
            if s.kind == TURN and s.direction not in TURN_DIRECTIONS:
                raise InvalidSteps(f"step {i}: turn needs a direction, got {s.direction!r}")
            if s.kind == GO_STRAIGHT and (s.distance is None or not s.distance >= 0):
                raise InvalidSteps(f"step {i}: go_straight needs a non-negative distance")
            if s.kind == PASS_OBJECTS and (not s.label or not s.label.strip() or (s.count or 0) < 1):
                raise InvalidSteps(f"step {i}: pass_objects needs a label and count >= 1")
            if s.kind == AT_TURNING_POINT and (s.ordinal or 0) < 1:
                raise InvalidSteps(f"step {i}: at_turning_point needs ordinal >= 1")

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def to_text(self) -> str:
        return "".join(f"{i}. {s.to_text()}\n" for i, s in enumerate(self.steps, 1))


@dataclass(frozen=True)
class NoMatch:
    """Returned (not raised) when a sentence falls outside the controlled subset."""

    sentence: str
    index: int = 0

    def __bool__(self) -> bool:
        return False


# --- rule backend -----------------------------------------------------------

ORDINALS = {
    "first": 1, "second": 2, "third": 3, "fourth": 4, "fifth": 5,
    "sixth": 6, "seventh": 7, "eighth": 8, "ninth": 9,
    "1st": 1, "2nd": 2, "3rd": 3, "4th": 4, "5th": 5, "6th": 6, "7th": 7, "8th": 8, "9th": 9,
}
NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
}

_NUM = r"\d+(?:\.\d+)?"
_ORD = "|".join(sorted(ORDINALS, key=len, reverse=True))
_COUNT = r"\d+|" + "|".join(NUMBER_WORDS)

_RULES: list[tuple[str, re.Pattern]] = [
    ("go", re.compile(rf"^(?:go|walk|head) straight(?: for)? (?P<d>{_NUM}) ?(?:m|meters?|metres?)$")),
    (
        "turn_at",
        re.compile(
            rf"^turn (?P<dir>left|right) (?:at|after) the (?P<ord>{_ORD}) "
            r"(?:intersection|corner|turning point)$"
        ),
    ),
    (
        "turn_pass",
        re.compile(rf"^turn (?P<dir>left|right|around) after passing (?P<n>{_COUNT}) (?P<label>[a-z][a-z ]*)$"),
    ),
    ("turn", re.compile(r"^turn (?P<dir>left|right|around)$")),
    ("stop", re.compile(r"^(?:stop|you have arrived|that's the destination|that is the destination)$")),
]

_SPLIT = re.compile(r"(?<!\d)\.|\.(?!\d)|;|\bthen\b")
_EDGE_FILLER = re.compile(r"^(?:(?:and|,)\s*)+|(?:\s*(?:,|\band))+$")


def split_sentences(text: str) -> list[str]:
    """Normalized clauses: split on '.', ';' and 'then'; lower-cased with single spaces."""
    text = text.replace("\u2019", "'").casefold()
    out = []
    for part in _SPLIT.split(text):
        part = " ".join(part.replace(",", " , ").split())
        part = _EDGE_FILLER.sub("", part).strip()
        part = " ".join(part.replace(" ,", ",").split())
        if part:
            out.append(part)
    return out


def _label(words: str) -> str:
    parts = words.split()
    parts[-1] = singularize(parts[-1])
    if parts[0] in ("the", "a", "an") and len(parts) > 1:
        parts = parts[1:]
    return " ".join(parts)


def _match(sentence: str) -> list[Step] | None:
    for name, pattern in _RULES:
        m = pattern.match(sentence)
        if not m:
            continue
        if name == "go":
            return [Step(GO_STRAIGHT, distance=float(m["d"]))]
        if name == "turn_at":
            return [Step(AT_TURNING_POINT, ordinal=ORDINALS[m["ord"]]), Step(TURN, direction=m["dir"])]
        if name == "turn_pass":
            n = m["n"]
            count = int(n) if n.isdigit() else NUMBER_WORDS[n]
            if count < 1:
                return None
            return [Step(PASS_OBJECTS, label=_label(m["label"]), count=count), Step(TURN, direction=m["dir"])]
        if name == "turn":
            return [Step(TURN, direction=m["dir"])]
        return [Step(STOP)]
    return None


def parse_instruction_rules(text: str) -> StepList | NoMatch:
    """Controlled-English instruction to a StepList, or NoMatch naming the first unhandled sentence."""
    sentences = split_sentences(text)
    if not sentences:
        return NoMatch(text.strip(), 0)
    steps: list[Step] = []
    for i, sentence in enumerate(sentences):
        matched = _match(sentence)
        if matched is None:
            return NoMatch(sentence, i)
        steps.extend(matched)
    return StepList(tuple(steps))


# --- emission ---------------------------------------------------------------

_MOTION = (GO_STRAIGHT, AT_TURNING_POINT, PASS_OBJECTS)


def steps_to_navscript(steps: StepList) -> str:
    """NavScript text for a step list; always ends with ``stop``.

    A turn with no motion step before it (first step, or right after another
    turn) first drives to the next turning point. ``around`` never gets the
    default since it is meant to happen on the spot.
    """
    if not isinstance(steps, StepList):
        raise InvalidSteps(f"expected a StepList, got {type(steps).__name__}")
    out: list = []
    prev: str | None = None
    for s in steps:
        if s.kind == STOP:
            break
        if s.kind == GO_STRAIGHT:
            out.append(Forward(float(s.distance)))
        elif s.kind == AT_TURNING_POINT:
            out.append(ForwardUntilTurningPoint(s.ordinal))
        elif s.kind == PASS_OBJECTS:
            out.append(ForwardUntilObject(s.label, s.count, 1.0))
        elif s.kind == TURN:
            if prev not in _MOTION and s.direction != "around":
                out.append(ForwardUntilTurningPoint(1))
            out.append(Turn(s.direction))
        prev = s.kind
    out.append(Stop())
    return pretty_print(NavProgram(tuple(out)))
