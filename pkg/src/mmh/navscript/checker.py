from __future__ import annotations

from dataclasses import dataclass

from .ast import DIRECTIONS, Forward, ForwardUntilObject, ForwardUntilTurningPoint, NavProgram, Stop, Turn


@dataclass(frozen=True)
class SemanticError:
    kind: str
    index: int
    message: str = ""

    def __str__(self) -> str:
        text = f"{self.kind}@{self.index}"
        return f"{text}: {self.message}" if self.message else text


def validate(program: NavProgram) -> list[SemanticError]:
    """Static checks that the parser cannot express."""
    errors: list[SemanticError] = []
    stopped_at = None
    for i, stmt in enumerate(program.statements):
        if stopped_at is not None:
            errors.append(SemanticError("UnreachableStatement", i, f"follows stop at {stopped_at}"))
        if isinstance(stmt, Forward) and not stmt.distance >= 0:
            errors.append(SemanticError("NegativeDistance", i, f"forward {stmt.distance}"))
        elif isinstance(stmt, ForwardUntilTurningPoint) and stmt.skip < 1:
            errors.append(SemanticError("NonPositiveSkip", i, f"skip={stmt.skip}"))
        elif isinstance(stmt, ForwardUntilObject):
            if stmt.count < 1:
                errors.append(SemanticError("NonPositiveCount", i, f"count={stmt.count}"))
            if not stmt.overshoot >= 0:
                errors.append(SemanticError("NegativeOvershoot", i, f"overshoot={stmt.overshoot}"))
            if not stmt.label.strip():
                errors.append(SemanticError("EmptyLabel", i))
        elif isinstance(stmt, Turn) and stmt.direction not in DIRECTIONS:
            errors.append(SemanticError("UnknownDirection", i, stmt.direction))
        elif isinstance(stmt, Stop) and stopped_at is None:
            stopped_at = i
    if stopped_at is None:
        errors.append(SemanticError("MissingStop", len(program.statements)))
    return errors
