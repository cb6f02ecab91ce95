"""Lexical grammar for BDDL s-expression text, built from pyparsing elements.

The token elements double as the leaves of the list grammar in
``bddl_parser``; each one turns its match into a positioned ``Token``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List

from pyparsing import Literal, ParseException, ParserElement, Regex, StringEnd, ZeroOrMore, col, lineno, rest_of_line

from .errors import IllegalCharacter

SYMBOL_CHARS = r"[A-Za-z0-9_.\-+*/<>=!]"


class TokenKind(Enum):
    OPEN_PAREN = "open-paren"
    CLOSE_PAREN = "close-paren"
    SYMBOL = "symbol"
    VARIABLE = "variable"
    KEYWORD = "keyword"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    column: int

    @property
    def position(self) -> tuple:
        return (self.line, self.column)


def _token(kind: TokenKind, element: ParserElement) -> ParserElement:
    def build(source: str, loc: int, matched) -> Token:
        text = matched[0].lower() if kind is TokenKind.KEYWORD else matched[0]
        return Token(kind, text, lineno(loc, source), col(loc, source))

    return element.set_parse_action(build).set_name(kind.value)


OPEN_PAREN = _token(TokenKind.OPEN_PAREN, Literal("("))
CLOSE_PAREN = _token(TokenKind.CLOSE_PAREN, Literal(")"))
ATOM = (
    _token(TokenKind.VARIABLE, Regex(rf"\?{SYMBOL_CHARS}+"))
    | _token(TokenKind.KEYWORD, Regex(rf":{SYMBOL_CHARS}+"))
    | _token(TokenKind.SYMBOL, Regex(rf"{SYMBOL_CHARS}+"))
)
COMMENT = ";" + rest_of_line

_TOKEN_STREAM = (ZeroOrMore(OPEN_PAREN | CLOSE_PAREN | ATOM) + StringEnd()).ignore(COMMENT).parse_with_tabs()


def tokenize(source: str) -> List[Token]:
    """Scan the whole source; comments and whitespace are dropped.

    Lines and columns are 1-based. Keywords are lower-cased; symbols keep their
    case so term and synset names survive unchanged.
    """
    try:
        return list(_TOKEN_STREAM.parse_string(source))
    except ParseException as err:
        raise IllegalCharacter(err.lineno, err.col, source[err.loc]) from None
