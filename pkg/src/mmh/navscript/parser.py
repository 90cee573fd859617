"""Recursive-descent parser for NavScript.

    program := (stmt NEWLINE)*
    stmt    := "forward" NUM
             | "forward_until" "turning_point" ["skip" "=" INT]
             | "forward_until" "object" STRING "count" "=" INT ["overshoot" "=" NUM]
             | "turn" ("left" | "right" | "around")
             | "stop"
"""

from __future__ import annotations

from .ast import (
    DEFAULT_OVERSHOOT,
    Forward,
    ForwardUntilObject,
    ForwardUntilTurningPoint,
    NavProgram,
    Stmt,
    Stop,
    Turn,
)
from .lexer import EQ, NEWLINE, NUM, STRING, ParseError, Token, tokenize


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _end_position(self) -> tuple[int, int]:
        if not self.tokens:
            return 1, 1
        last = self.tokens[-1]
        return last.line, last.column + max(1, len(last.text))

    def error(self, expected: str) -> ParseError:
        tok = self.peek()
        if tok is None:
            line, col = self._end_position()
            return ParseError(line, col, expected, "end of input")
        return ParseError(tok.line, tok.column, expected, tok.describe())

    def expect(self, *kinds: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok is None or tok.kind not in kinds:
            raise self.error(what or " | ".join(kinds))
        self.pos += 1
        return tok

    def accept(self, kind: str) -> Token | None:
        tok = self.peek()
        if tok is not None and tok.kind == kind:
            self.pos += 1
            return tok
        return None

    def integer(self) -> int:
        tok = self.expect(NUM, what="integer")
        if "." in tok.text:
            self.pos -= 1
            raise self.error("integer")
        return int(tok.text)

    def number(self) -> float:
        return float(self.expect(NUM, what="number").value)

    def program(self) -> NavProgram:
        stmts: list[Stmt] = []
        while self.peek() is not None:
            stmts.append(self.statement())
            if self.peek() is not None:
                self.expect(NEWLINE, what="end of line")
        if not stmts or not isinstance(stmts[-1], Stop):
            stmts.append(Stop(line=0))
        return NavProgram(tuple(stmts))

    def statement(self) -> Stmt:
        tok = self.expect(
            "KW_FORWARD", "KW_FORWARD_UNTIL", "KW_TURN", "KW_STOP",
            what="{forward, forward_until, turn, stop}",
        )
        line = tok.line
        if tok.kind == "KW_FORWARD":
            return Forward(self.number(), line=line)
        if tok.kind == "KW_STOP":
            return Stop(line=line)
        if tok.kind == "KW_TURN":
            d = self.expect("KW_LEFT", "KW_RIGHT", "KW_AROUND", what="{left, right, around}")
            return Turn(d.text, line=line)
        target = self.expect("KW_TURNING_POINT", "KW_OBJECT", what="{turning_point, object}")
        if target.kind == "KW_TURNING_POINT":
            skip = 1
            if self.accept("KW_SKIP"):
                self.expect(EQ, what="'='")
                skip = self.integer()
            return ForwardUntilTurningPoint(skip, line=line)
        label = self.expect(STRING, what="quoted label").value
        self.expect("KW_COUNT", what="count")
        self.expect(EQ, what="'='")
        count = self.integer()
        overshoot = DEFAULT_OVERSHOOT
        if self.accept("KW_OVERSHOOT"):
            self.expect(EQ, what="'='")
            overshoot = self.number()
        return ForwardUntilObject(label, count, overshoot, line=line)


def parse(tokens: list[Token]) -> NavProgram:
    """Build a NavProgram from tokens; a trailing ``stop`` is implied."""
    return _Parser(tokens).program()


def parse_source(source: str | bytes) -> NavProgram:
    """Tokenize and parse; undecodable bytes are reported as a ParseError."""
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            prefix = bytes(source)[: exc.start]
            line = prefix.count(b"\n") + 1
            col = len(prefix) - (prefix.rfind(b"\n") + 1) + 1
            raise ParseError(line, col, "UTF-8 text", f"byte 0x{bytes(source)[exc.start]:02x}") from None
    return parse(tokenize(source))
