"""Instruction datasets and their word-count statistics."""

from __future__ import annotations

import json
import logging
import statistics
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

from .errors import SchemaError

log = logging.getLogger(__name__)

ROUTES = ("route_1", "route_2")
STUDIES = ("online", "onsite")
ITERATIONS = (1, 2)
GROUP_FIELDS = ("study", "route_id", "iteration")
_STRIP = str.maketrans("", "", '.,!?;:"()')


@dataclass(frozen=True)
class InstructionRecord:
    id: str
    route_id: str
    study: str
    iteration: int
    text: str
    failure_flag: bool | None = None


@dataclass(frozen=True)
class GroupStats:
    key: tuple
    n: int
    mean: float
    median: float
    sd: float
    failure_rate: float | None = None

    def as_dict(self, group_by: Sequence[str] = GROUP_FIELDS) -> dict:
        return {
            **dict(zip(group_by, self.key)),
            "n": self.n,
            "mean": self.mean,
            "median": self.median,
            "sd": self.sd,
            "failure_rate": self.failure_rate,
        }


def _record(doc, line: int) -> InstructionRecord:
    if not isinstance(doc, dict):
        raise SchemaError("record must be a JSON object", line=line)
    for key, kind in (("id", str), ("route_id", str), ("study", str), ("text", str)):
        if not isinstance(doc.get(key), kind):
            raise SchemaError(f"field {key!r} must be a string", element=key, line=line)
    if doc["route_id"] not in ROUTES:
        raise SchemaError(f"route_id must be one of {ROUTES}", element="route_id", line=line)
    if doc["study"] not in STUDIES:
        raise SchemaError(f"study must be one of {STUDIES}", element="study", line=line)
    it = doc.get("iteration")
    if isinstance(it, bool) or it not in ITERATIONS:
        raise SchemaError(f"iteration must be 1 or 2, got {it!r}", element="iteration", line=line)
    if not doc["text"].strip():
        raise SchemaError("text must be non-empty", element="text", line=line)
    flag = doc.get("failure_flag")
    if flag is not None and not isinstance(flag, bool):
        raise SchemaError("failure_flag must be a boolean", element="failure_flag", line=line)
    extra = set(doc) - {"id", "route_id", "study", "iteration", "text", "failure_flag"}
    if extra:
        raise SchemaError(f"unknown fields {sorted(extra)}", line=line)
    return InstructionRecord(doc["id"], doc["route_id"], doc["study"], it, doc["text"], flag)


def load_corpus(text: str) -> list[InstructionRecord]:
    """Parse a JSON-lines corpus; blank lines are skipped, ids must be unique."""
    records: list[InstructionRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", line=lineno) from exc
        rec = _record(doc, lineno)
        if rec.id in seen:
            raise SchemaError(f"duplicate id {rec.id!r}", element=rec.id, line=lineno)
        seen.add(rec.id)
        records.append(rec)
    return records


def load_corpus_file(path) -> list[InstructionRecord]:
    with open(path, encoding="utf-8") as fh:
        return load_corpus(fh.read())


def load_bundled_corpus(name: str = "synthetic") -> list[InstructionRecord]:
    text = (resources.files("mmh") / "data" / "corpus" / f"{name}.jsonl").read_text(encoding="utf-8")
    return load_corpus(text)


def tokenize(text: str) -> list[str]:
    """Strip .,!?;:"() then case-fold and split on whitespace."""
    return text.translate(_STRIP).casefold().split()


def word_count(text: str) -> int:
    return len(tokenize(text))


def word_count_stats(
    records: Iterable[InstructionRecord], group_by: Sequence[str] = GROUP_FIELDS
) -> list[GroupStats]:
    """Per-group mean, lower median and population SD of word counts, sorted by key."""
    groups: dict[tuple, list[InstructionRecord]] = {}
    for r in records:
        groups.setdefault(tuple(getattr(r, f) for f in group_by), []).append(r)
    out = []
    for key in sorted(groups):
        members = groups[key]
        if not members:  # pragma: no cover - groups are built from records
            log.warning("empty group %s skipped", key)
            continue
        counts = [word_count(r.text) for r in members]
        flags = [r.failure_flag for r in members if r.failure_flag is not None]
        out.append(
            GroupStats(
                key=key,
                n=len(counts),
                mean=statistics.fmean(counts),
                median=float(statistics.median_low(counts)),
                sd=statistics.pstdev(counts),
                failure_rate=(sum(flags) / len(flags)) if flags else None,
            )
        )
    return out


def vocabulary_size(records: Iterable[InstructionRecord | str]) -> int:
    vocab: set[str] = set()
    for r in records:
        vocab.update(tokenize(r if isinstance(r, str) else r.text))
    return len(vocab)


# --- controlled-English instructions bound to maps ----------------------------


@dataclass(frozen=True)
class ControlledInstruction:
    """An instruction for the rule backend, tied to a bundled map.

    ``goal``/``reference`` override the map's own; a goal without a reference
    is scored against the shortest route from the start.
    """

    id: str
    map: str
    text: str
    goal: tuple[float, float] | None = None
    reference: tuple[tuple[float, float], ...] | None = None


def _xy(value, element: str, line: int) -> tuple[float, float]:
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise SchemaError("expected [x, y]", element=element, line=line)
    return (float(value[0]), float(value[1]))


def load_controlled(text: str) -> list[ControlledInstruction]:
    out: list[ControlledInstruction] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", line=lineno) from exc
        if not isinstance(doc, dict):
            raise SchemaError("record must be a JSON object", line=lineno)
        for key in ("id", "map", "text"):
            if not isinstance(doc.get(key), str) or not doc[key].strip():
                raise SchemaError(f"field {key!r} must be a non-empty string", element=key, line=lineno)
        extra = set(doc) - {"id", "map", "text", "goal", "reference"}
        if extra:
            raise SchemaError(f"unknown fields {sorted(extra)}", line=lineno)
        if doc["id"] in seen:
            raise SchemaError(f"duplicate id {doc['id']!r}", element=doc["id"], line=lineno)
        seen.add(doc["id"])
        goal = _xy(doc["goal"], "goal", lineno) if "goal" in doc else None
        ref = None
        if "reference" in doc:
            if not isinstance(doc["reference"], list) or len(doc["reference"]) < 2:
                raise SchemaError("reference needs at least two points", element="reference", line=lineno)
            ref = tuple(_xy(p, "reference", lineno) for p in doc["reference"])
        out.append(ControlledInstruction(doc["id"], doc["map"], doc["text"], goal, ref))
    return out


def load_bundled_controlled() -> list[ControlledInstruction]:
    text = (resources.files("mmh") / "data" / "corpus" / "controlled.jsonl").read_text(encoding="utf-8")
    return load_controlled(text)
