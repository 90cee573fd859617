"""NavScript: the closed navigation language that instructions compile to."""

from .ast import (
    DIRECTIONS,
    Forward,
    ForwardUntilObject,
    ForwardUntilTurningPoint,
    NavProgram,
    Stop,
    Turn,
    format_number,
    pretty_print,
)
from .checker import SemanticError, validate
from .lexer import ParseError, Token, tokenize
from .parser import parse, parse_source
from .vm import BUDGET_EXCEEDED, STOPPED_EARLY, STUCK, SUCCESS, ExecutionResult, execute

__all__ = [
    "DIRECTIONS", "Forward", "ForwardUntilObject", "ForwardUntilTurningPoint", "NavProgram", "Stop",
    "Turn", "format_number", "pretty_print", "SemanticError", "validate", "ParseError", "Token",
    "tokenize", "parse", "parse_source", "ExecutionResult", "execute", "SUCCESS", "STOPPED_EARLY",
    "STUCK", "BUDGET_EXCEEDED",
]
