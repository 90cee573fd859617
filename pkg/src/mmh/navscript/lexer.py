from __future__ import annotations

from dataclasses import dataclass

KEYWORDS = {
    "forward": "KW_FORWARD",
    "forward_until": "KW_FORWARD_UNTIL",
    "turning_point": "KW_TURNING_POINT",
    "object": "KW_OBJECT",
    "turn": "KW_TURN",
    "left": "KW_LEFT",
    "right": "KW_RIGHT",
    "around": "KW_AROUND",
    "stop": "KW_STOP",
    "skip": "KW_SKIP",
    "count": "KW_COUNT",
    "overshoot": "KW_OVERSHOOT",
}

EQ = "EQ"
NUM = "NUM"
STRING = "STRING"
IDENT = "IDENT"
NEWLINE = "NEWLINE"

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


class ParseError(ValueError):
    """Lexical or syntax error with a 1-based source position."""

    def __init__(self, line: int, column: int, expected: str, found: str):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        super().__init__(f"line {line}, col {column}: expected {expected}, found {found}")


@dataclass(frozen=True)
class Token:
    kind: str
    value: object
    line: int
    column: int
    text: str = ""

    def describe(self) -> str:
        if self.kind == NEWLINE:
            return "end of line"
        return repr(self.text) if self.text else self.kind


def _is_ident_start(ch: str) -> bool:
    return ch.isascii() and (ch.isalpha() or ch == "_")


def _is_ident_char(ch: str) -> bool:
    return ch.isascii() and (ch.isalnum() or ch == "_")


def _is_number_char(ch: str) -> bool:
    return ch in "0123456789."


def tokenize(source: str) -> list[Token]:
    """Split NavScript source into tokens.

    Statements are separated by NEWLINE tokens; comments, blank lines and a
    trailing newline produce no tokens.
    """
    tokens: list[Token] = []
    for lineno, line in enumerate(source.split("\n"), start=1):
        if line.endswith("\r"):
            line = line[:-1]
        line_tokens: list[Token] = []
        i = 0
        n = len(line)
        while i < n:
            ch = line[i]
            col = i + 1
            if ch in " \t":
                i += 1
            elif ch == "#":
                break
            elif ch == "=":
                line_tokens.append(Token(EQ, "=", lineno, col, "="))
                i += 1
            elif _is_number_char(ch):
                j = i
                while j < n and _is_number_char(line[j]):
                    j += 1
                text = line[i:j]
                if not _valid_number(text) or (j < n and _is_ident_char(line[j])):
                    end = j
                    while end < n and (_is_ident_char(line[end]) or _is_number_char(line[end])):
                        end += 1
                    raise ParseError(lineno, col, "number", repr(line[i:end]))
                line_tokens.append(Token(NUM, float(text), lineno, col, text))
                i = j
            elif _is_ident_start(ch):
                j = i
                while j < n and _is_ident_char(line[j]):
                    j += 1
                word = line[i:j]
                kind = KEYWORDS.get(word, IDENT)
                line_tokens.append(Token(kind, word, lineno, col, word))
                i = j
            elif ch == '"':
                j = i + 1
                chars = []
                while True:
                    if j >= n:
                        raise ParseError(lineno, col, "closing '\"'", "end of line")
                    c = line[j]
                    if c == '"':
                        break
                    if c == "\\":
                        if j + 1 >= n or line[j + 1] not in _ESCAPES:
                            raise ParseError(lineno, j + 1, "escape sequence", repr(line[j : j + 2]))
                        chars.append(_ESCAPES[line[j + 1]])
                        j += 2
                        continue
                    chars.append(c)
                    j += 1
                line_tokens.append(Token(STRING, "".join(chars), lineno, col, line[i : j + 1]))
                i = j + 1
            else:
                raise ParseError(lineno, col, "token", repr(ch))
        if line_tokens:
            if tokens:
                last = tokens[-1]
                tokens.append(Token(NEWLINE, "\n", last.line, last.column + max(1, len(last.text)), ""))
            tokens.extend(line_tokens)
    return tokens


def _valid_number(text: str) -> bool:
    head, dot, tail = text.partition(".")
    if not head.isdigit():
        return False
    if dot:
        return tail.isdigit()
    return True
