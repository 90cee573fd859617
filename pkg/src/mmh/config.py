"""Batch/scenario configuration (a JSON document)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .compiler.client import LlmClientConfig
from .errors import ConfigError
from .kinematics import PidConfig, SimConfig
from .metrics import MetricsConfig
from .perception import PerceptionConfig

BACKENDS = ("rules", "llm", "llm-direct")
AGENTS = ("oracle", "random", "llm")
SECTIONS = ("sim", "perception", "pid", "metrics", "llm", "scenarios", "batch")


def _section(cls, doc, name: str):
    if doc is None:
        return cls()
    if not isinstance(doc, dict):
        raise ConfigError(f"section {name!r} must be an object")
    known = {f.name for f in fields(cls)}
    extra = set(doc) - known
    if extra:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(extra)}")
    try:
        return cls(**doc)
    except (TypeError, ValueError, NotImplementedError) as exc:
        raise ConfigError(f"invalid {name!r} section: {exc}") from exc


@dataclass(frozen=True)
class Scenario:
    """One episode: a map plus exactly one of instruction text, NavScript file or agent policy."""

    id: str
    map: str
    instruction: str | None = None
    program: str | None = None
    agent: str | None = None
    backend: str = "rules"
    heading_deg: float | None = None
    seed: int = 0
    budget: float = 900.0
    goal: tuple[float, float] | None = None
    reference: tuple[tuple[float, float], ...] | None = None
    graph_seed: int = 42
    method: str = ""
    route: str = ""
    study: str = ""
    iteration: int = 0

    def __post_init__(self):
        if not self.id or any(c in self.id for c in "/\\") or self.id in (".", ".."):
            raise ConfigError(f"scenario id {self.id!r} is not a valid directory name")
        given = [k for k in ("instruction", "program", "agent") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ConfigError(f"scenario {self.id}: give exactly one of instruction/program/agent, got {given}")
        if not self.budget > 0:
            raise ConfigError(f"scenario {self.id}: budget must be > 0")
        if self.backend not in BACKENDS:
            raise ConfigError(f"scenario {self.id}: unknown backend {self.backend!r}")
        if self.agent is not None and self.agent not in AGENTS:
            raise ConfigError(f"scenario {self.id}: unknown agent {self.agent!r}")

    @property
    def kind(self) -> str:
        return "instruction" if self.instruction is not None else "program" if self.program is not None else "agent"

    @property
    def group(self) -> tuple[str, str, str, int]:
        method = self.method or (self.backend if self.kind == "instruction" else self.kind if self.kind == "program" else f"agent-{self.agent}")
        return (method, self.route or self.map, self.study, self.iteration)

    @classmethod
    def from_dict(cls, doc: dict, base: Path | None = None) -> "Scenario":
        if not isinstance(doc, dict):
            raise ConfigError("scenario must be an object")
        known = {f.name for f in fields(cls)}
        extra = set(doc) - known
        if extra:
            raise ConfigError(f"scenario {doc.get('id')!r}: unknown keys {sorted(extra)}")
        if not isinstance(doc.get("id"), str) or not isinstance(doc.get("map"), str):
            raise ConfigError("scenario needs string 'id' and 'map'")
        doc = dict(doc)
        if base is not None:
            for key in ("map", "program"):
                value = doc.get(key)
                # paths are relative to the config file; bare names fall back to bundled data
                if isinstance(value, str) and not Path(value).is_absolute() and (base / value).exists():
                    doc[key] = str(base / value)
        try:
            if doc.get("goal") is not None:
                doc["goal"] = (float(doc["goal"][0]), float(doc["goal"][1]))
            if doc.get("reference") is not None:
                doc["reference"] = tuple((float(x), float(y)) for x, y in doc["reference"])
            return cls(**doc)
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigError(f"scenario {doc.get('id')!r}: {exc}") from exc


@dataclass(frozen=True)
class BatchConfig:
    id: str = "batch"
    workers: int = 4
    out_dir: str = "out"

    def __post_init__(self):
        if self.workers < 1:
            raise ConfigError("batch.workers must be >= 1")


@dataclass(frozen=True)
class Settings:
    sim: SimConfig = field(default_factory=SimConfig)
    perception: PerceptionConfig = field(default_factory=PerceptionConfig)
    pid: PidConfig = field(default_factory=PidConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    llm: LlmClientConfig = field(default_factory=LlmClientConfig)


@dataclass(frozen=True)
class Config:
    settings: Settings
    scenarios: tuple[Scenario, ...]
    batch: BatchConfig = field(default_factory=BatchConfig)


def parse_config(doc: dict, base: Path | None = None, require_scenarios: bool = True) -> Config:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    extra = set(doc) - set(SECTIONS)
    if extra:
        raise ConfigError(f"unknown sections: {sorted(extra)}")
    settings = Settings(
        sim=_section(SimConfig, doc.get("sim"), "sim"),
        perception=_section(PerceptionConfig, doc.get("perception"), "perception"),
        pid=_section(PidConfig, doc.get("pid"), "pid"),
        metrics=_section(MetricsConfig, doc.get("metrics"), "metrics"),
        llm=_section(LlmClientConfig, doc.get("llm"), "llm"),
    )
    raw = doc.get("scenarios", [])
    if not isinstance(raw, list):
        raise ConfigError("'scenarios' must be a list")
    if require_scenarios and not raw:
        raise ConfigError("scenario list is empty")
    scenarios = tuple(Scenario.from_dict(s, base) for s in raw)
    ids = [s.id for s in scenarios]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise ConfigError(f"duplicate scenario ids: {dupes}")
    return Config(settings, scenarios, _section(BatchConfig, doc.get("batch"), "batch"))


def load_config(path: str | Path, require_scenarios: bool = True) -> Config:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_config(doc, path.parent, require_scenarios)
