"""Source positions, diagnostics and parse errors."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Pos:
    line: int
    col: int

    def __repr__(self):
        return f"{self.line}:{self.col}"


NO_POS = Pos(0, 0)


@dataclass(frozen=True)
class Diagnostic:
    pos: Pos
    message: str
    filename: str = "<input>"

    def __str__(self):
        return f"{self.filename}:{self.pos.line}:{self.pos.col}: {self.message}"


class ParseError(Exception):
    def __init__(self, message: str, pos: Pos, filename: str = "<input>"):
        self.message = message
        self.pos = pos
        self.filename = filename
        super().__init__(f"{filename}:{pos.line}:{pos.col}: {message}")
