"""Exception types shared across the harness."""

from __future__ import annotations


class MmhError(Exception):
    """Base class for every error raised by this package."""


# world model
class MapError(MmhError):
    pass


class SchemaError(MapError):
    """A document does not match its schema (maps, corpus lines, configs)."""

    def __init__(self, message: str, *, element: str | None = None, line: int | None = None):
        self.element = element
        self.line = line
        prefix = ""
        if line is not None:
            prefix = f"line {line}: "
        elif element is not None:
            prefix = f"{element}: "
        super().__init__(prefix + message)


class ValidationError(MapError):
    """A well-formed map violates a geometric invariant."""

    def __init__(self, element: str, message: str = ""):
        self.element = element
        super().__init__(f"{element}: {message}" if message else element)


class InvalidOrigin(MapError):
    pass


class UnknownCorridor(MapError, KeyError):
    pass


# graphs
class DegenerateMap(MmhError):
    pass


class Unreachable(MmhError):
    pass


# navscript
class ValidationFailed(MmhError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors))


# instruction compiler
class InvalidSteps(MmhError):
    pass


class LlmError(MmhError):
    pass


class TransportError(LlmError):
    pass


class AuthError(LlmError):
    pass


class ProtocolError(LlmError):
    pass


class ExtractionError(LlmError):
    pass


class CompileError(LlmError):
    pass


# harness
class ConfigError(MmhError):
    pass


class StageError(MmhError):
    """Failure inside one stage of a scenario run (compile, exec, metrics)."""

    def __init__(self, stage: str, cause: BaseException | str):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")
