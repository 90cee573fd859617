from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import Union

DIRECTIONS = ("left", "right", "around")
DEFAULT_OVERSHOOT = 1.0


@dataclass(frozen=True)
class Forward:
    distance: float
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ForwardUntilTurningPoint:
    skip: int = 1
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ForwardUntilObject:
    label: str
    count: int = 1
    overshoot: float = DEFAULT_OVERSHOOT
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Turn:
    direction: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Stop:
    line: int = field(default=0, compare=False)


Stmt = Union[Forward, ForwardUntilTurningPoint, ForwardUntilObject, Turn, Stop]


@dataclass(frozen=True)
class NavProgram:
    statements: tuple[Stmt, ...]

    def __iter__(self):
        return iter(self.statements)

    def __len__(self):
        return len(self.statements)

    def __getitem__(self, i):
        return self.statements[i]


def format_number(x: float, keep_point: bool = False) -> str:
    """Positional decimal text that parses back to exactly ``x``.

    Whole numbers print without a fraction unless ``keep_point`` is set.
    """
    if float(x).is_integer():
        return f"{int(x)}.0" if keep_point else str(int(x))
    return format(Decimal(repr(float(x))), "f")


def _quote(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


def format_stmt(stmt: Stmt) -> str:
    if isinstance(stmt, Forward):
        return f"forward {format_number(stmt.distance)}"
    if isinstance(stmt, ForwardUntilTurningPoint):
        return f"forward_until turning_point skip={stmt.skip}"
    if isinstance(stmt, ForwardUntilObject):
        return (
            f"forward_until object {_quote(stmt.label)} count={stmt.count} "
            f"overshoot={format_number(stmt.overshoot, keep_point=True)}"
        )
    if isinstance(stmt, Turn):
        return f"turn {stmt.direction}"
    if isinstance(stmt, Stop):
        return "stop"
    raise TypeError(f"not a statement: {stmt!r}")


def pretty_print(program: NavProgram) -> str:
    return "".join(format_stmt(s) + "\n" for s in program.statements)
