"""Errors raised while lexing, parsing and validating BDDL problems."""

from __future__ import annotations

from typing import Optional

from utils.errors import EngineError


def _where(line: Optional[int], column: Optional[int]) -> str:
    if line is None or column is None:
        return ""
    return f"{line}:{column}: "


class BddlSyntaxError(EngineError):
    """Malformed s-expression structure."""

    def __init__(self, line: int, column: int, expected: str, found: Optional[str] = None):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        got = f", found {found!r}" if found is not None else ""
        super().__init__(f"{_where(line, column)}expected {expected}{got}")


class IllegalCharacter(BddlSyntaxError):
    """A character outside the s-expression alphabet."""

    def __init__(self, line: int, column: int, char: str):
        self.char = char
        super().__init__(line, column, "a symbol, variable, keyword or parenthesis", char)


class SemanticError(EngineError):
    """Well-formed text that violates an Activity rule."""

    def __init__(self, term: str, reason: str, line: Optional[int] = None, column: Optional[int] = None):
        self.term = term
        self.reason = reason
        self.line = line
        self.column = column
        super().__init__(f"{_where(line, column)}{term}: {reason}")
