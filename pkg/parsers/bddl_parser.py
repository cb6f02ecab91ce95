"""Parse BDDL problem text into a validated Activity and write it back out.

Supported subset: ``define``/``problem``, ``:domain``, ``:objects`` (with
``- synset`` typing), ``:init`` and ``:goal``; connectives ``and``, ``or``,
``not``, ``imply`` and quantifiers ``forall``, ``exists``, ``forn``. Anything
else is rejected with an error that names the construct.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple, Union

from pyparsing import Forward, Group, ParseException, StringEnd, ZeroOrMore, col, lineno

from .conditions import (
    INROOM,
    Activity,
    And,
    Atom,
    Condition,
    Exists,
    ForAll,
    ForN,
    Imply,
    Not,
    Or,
    to_sexpr,
)
from .errors import BddlSyntaxError, SemanticError
from .tokenizer import ATOM, CLOSE_PAREN, COMMENT, OPEN_PAREN, Token, TokenKind, tokenize

logger = logging.getLogger(__name__)

SECTIONS = (":domain", ":objects", ":init", ":goal")
CONNECTIVES = frozenset({"and", "or", "not", "imply", "forall", "exists", "forn"})
# Known BDDL constructs outside the supported subset.
UNSUPPORTED_CONSTRUCTS = frozenset({"forpairs", "fornpairs", "when", "either", "increase", "decrease"})
BINARY_PREDICATES = frozenset({"nextto", "inside", "onfloor", "ontop", "touching", "under", INROOM})


@dataclass
class SList:
    items: List[Union["SList", Token]]
    line: int
    column: int


SNode = Union[SList, Token]


# === s-expressions ===

def _build_list(source: str, loc: int, matched) -> SList:
    opener, *items, _ = matched[0]
    return SList(items, opener.line, opener.column)


def _unclosed(source: str, loc: int, element, err) -> None:
    # the text is lexically valid here, so a list that opens and fails never closes
    if source.startswith("(", loc):
        raise BddlSyntaxError(lineno(loc, source), col(loc, source), "')' closing this list", "end of input")


_SEXPR = Forward()
_SEXPR <<= (
    Group(OPEN_PAREN + ZeroOrMore(ATOM | _SEXPR) + CLOSE_PAREN)
    .set_parse_action(_build_list)
    .set_fail_action(_unclosed)
)
_DOCUMENT = (_SEXPR + StringEnd()).ignore(COMMENT).parse_with_tabs()


def read_sexpr(source: str) -> SList:
    """Read exactly one top-level list; lexical errors are reported first."""
    tokens = tokenize(source)
    if not tokens:
        raise BddlSyntaxError(1, 1, "'('", "end of input")
    first = tokens[0]
    if first.kind is not TokenKind.OPEN_PAREN:
        raise BddlSyntaxError(first.line, first.column, "'('", first.text)
    try:
        return _DOCUMENT.parse_string(source)[0]
    except ParseException as err:
        found = next((t.text for t in tokens if t.position == (err.lineno, err.col)), source[err.loc:err.loc + 1])
        raise BddlSyntaxError(err.lineno, err.col, "end of input", found) from None


def _pos(node: SNode) -> Tuple[int, int]:
    return node.line, node.column


def _describe(node: SNode) -> str:
    return node.text if isinstance(node, Token) else "(...)"


def _expect_symbol(node: SNode, what: str) -> Token:
    if not isinstance(node, Token) or node.kind is not TokenKind.SYMBOL:
        raise BddlSyntaxError(*_pos(node), what, _describe(node))
    return node


def _expect_list(node: SNode, what: str) -> SList:
    if not isinstance(node, SList):
        raise BddlSyntaxError(*_pos(node), what, _describe(node))
    return node


# === activity ===

class _ActivityBuilder:
    """Interprets the s-expression tree; keeps declared terms for validation."""

    def __init__(self, root: SList):
        self.root = root
        self.declared: Dict[str, str] = {}

    def build(self) -> Activity:
        items = self.root.items
        if not items:
            raise BddlSyntaxError(self.root.line, self.root.column, "'define'", ")")
        head = _expect_symbol(items[0], "'define'")
        if head.text.lower() != "define":
            raise BddlSyntaxError(head.line, head.column, "'define'", head.text)
        if len(items) < 2:
            raise BddlSyntaxError(head.line, head.column, "(problem <name>)", "end of list")

        problem = _expect_list(items[1], "(problem <name>)")
        if len(problem.items) != 2:
            raise BddlSyntaxError(problem.line, problem.column, "(problem <name>)")
        problem_head = _expect_symbol(problem.items[0], "'problem'")
        if problem_head.text.lower() != "problem":
            raise SemanticError(problem_head.text, "expected a problem definition (domain files are not supported)",
                                problem_head.line, problem_head.column)
        problem_name = _expect_symbol(problem.items[1], "problem name").text

        sections: Dict[str, SList] = {}
        for node in items[2:]:
            section = _expect_list(node, "a section such as (:init ...)")
            if not section.items or not isinstance(section.items[0], Token) \
                    or section.items[0].kind is not TokenKind.KEYWORD:
                raise BddlSyntaxError(section.line, section.column, "a section keyword")
            keyword = section.items[0]
            if keyword.text not in SECTIONS:
                raise SemanticError(keyword.text, "unknown top-level section", keyword.line, keyword.column)
            if keyword.text in sections:
                raise SemanticError(keyword.text, "duplicate section", keyword.line, keyword.column)
            sections[keyword.text] = section

        for required in (":domain", ":init", ":goal"):
            if required not in sections:
                raise SemanticError(required, "missing section", self.root.line, self.root.column)

        domain = sections[":domain"]
        if len(domain.items) != 2:
            raise BddlSyntaxError(domain.line, domain.column, "(:domain <name>)")
        domain_name = _expect_symbol(domain.items[1], "domain name").text

        objects = self._objects(sections.get(":objects"))
        init = self._init(sections[":init"])
        goal_section = sections[":goal"]
        if len(goal_section.items) != 2:
            raise BddlSyntaxError(goal_section.line, goal_section.column, "exactly one goal condition")
        goal = self._condition(goal_section.items[1], frozenset())

        return Activity(problem_name, domain_name, tuple(objects), tuple(init), goal)

    def _objects(self, section: Optional[SList]) -> List[Tuple[str, str]]:
        if section is None:
            return []
        objects: List[Tuple[str, str]] = []
        pending: List[Token] = []
        nodes = section.items[1:]
        i = 0
        while i < len(nodes):
            token = _expect_symbol(nodes[i], "an object term")
            if token.text == "-":
                if not pending:
                    raise BddlSyntaxError(token.line, token.column, "an object term before '-'", "-")
                if i + 1 >= len(nodes):
                    raise BddlSyntaxError(token.line, token.column, "a synset after '-'", "end of list")
                synset = _expect_symbol(nodes[i + 1], "a synset after '-'")
                for term in pending:
                    if term.text in self.declared:
                        raise SemanticError(term.text, "declared more than once", term.line, term.column)
                    self.declared[term.text] = synset.text
                    objects.append((term.text, synset.text))
                pending = []
                i += 2
                continue
            pending.append(token)
            i += 1
        if pending:
            term = pending[0]
            raise SemanticError(term.text, "object term without a synset", term.line, term.column)
        return objects

    def _init(self, section: SList) -> List[Condition]:
        entries = section.items[1:]
        if not entries:
            raise SemanticError(":init", "must contain at least one literal", section.line, section.column)
        literals: List[Condition] = []
        for node in entries:
            entry = _expect_list(node, "an init literal")
            head = _expect_symbol(entry.items[0], "a predicate") if entry.items else None
            if head is None:
                raise BddlSyntaxError(entry.line, entry.column, "a predicate")
            if head.text.lower() == "not":
                if len(entry.items) != 2:
                    raise BddlSyntaxError(head.line, head.column, "(not <atom>)")
                inner = _expect_list(entry.items[1], "an atom under 'not'")
                literals.append(Not(self._atom(inner, frozenset(), init=True)))
            else:
                literals.append(self._atom(entry, frozenset(), init=True))
        return literals

    def _condition(self, node: SNode, bound: frozenset) -> Condition:
        slist = _expect_list(node, "a condition")
        if not slist.items:
            raise BddlSyntaxError(slist.line, slist.column, "a predicate or connective", ")")
        head = _expect_symbol(slist.items[0], "a predicate or connective")
        name = head.text.lower()
        args = slist.items[1:]

        if name in UNSUPPORTED_CONSTRUCTS:
            raise SemanticError(name, "unsupported construct", head.line, head.column)
        if name in ("and", "or"):
            if not args:
                raise SemanticError(name, "needs at least one child", head.line, head.column)
            children = tuple(self._condition(a, bound) for a in args)
            return And(children) if name == "and" else Or(children)
        if name == "not":
            if len(args) != 1:
                raise BddlSyntaxError(head.line, head.column, "(not <condition>)")
            return Not(self._condition(args[0], bound))
        if name == "imply":
            if len(args) != 2:
                raise BddlSyntaxError(head.line, head.column, "(imply <antecedent> <consequent>)")
            return Imply(self._condition(args[0], bound), self._condition(args[1], bound))
        if name in ("forall", "exists"):
            if len(args) != 2:
                raise BddlSyntaxError(head.line, head.column, f"({name} (?var - synset) <body>)")
            var, synset = self._var_decl(args[0])
            body = self._condition(args[1], bound | {var})
            return ForAll(var, synset, body) if name == "forall" else Exists(var, synset, body)
        if name == "forn":
            if len(args) != 3:
                raise BddlSyntaxError(head.line, head.column, "(forn (N) (?var - synset) <body>)")
            count = _expect_list(args[0], "(N)")
            if len(count.items) != 1:
                raise BddlSyntaxError(count.line, count.column, "(N)")
            n_token = _expect_symbol(count.items[0], "a positive integer")
            if not n_token.text.isdigit() or int(n_token.text) < 1:
                raise SemanticError(n_token.text, "forn count must be a positive integer",
                                    n_token.line, n_token.column)
            var, synset = self._var_decl(args[1])
            body = self._condition(args[2], bound | {var})
            return ForN(int(n_token.text), var, synset, body)
        return self._atom(slist, bound, init=False)

    def _var_decl(self, node: SNode) -> Tuple[str, str]:
        decl = _expect_list(node, "(?var - synset)")
        items = decl.items
        if len(items) != 3:
            raise BddlSyntaxError(decl.line, decl.column, "(?var - synset)")
        var = items[0]
        if not isinstance(var, Token) or var.kind is not TokenKind.VARIABLE:
            raise BddlSyntaxError(*_pos(var), "a variable starting with '?'", _describe(var))
        dash = _expect_symbol(items[1], "'-'")
        if dash.text != "-":
            raise BddlSyntaxError(dash.line, dash.column, "'-'", dash.text)
        synset = _expect_symbol(items[2], "a synset")
        return var.text, synset.text

    def _atom(self, slist: SList, bound: frozenset, init: bool) -> Atom:
        if not slist.items:
            raise BddlSyntaxError(slist.line, slist.column, "a predicate", ")")
        head = _expect_symbol(slist.items[0], "a predicate")
        predicate = head.text.lower()
        if predicate in CONNECTIVES or predicate in UNSUPPORTED_CONSTRUCTS:
            raise SemanticError(predicate, "init entries must be atoms or negated atoms" if init
                                else "unexpected connective", head.line, head.column)

        raw_args = slist.items[1:]
        if predicate in BINARY_PREDICATES and len(raw_args) != 2:
            raise SemanticError(predicate, f"expects 2 arguments, got {len(raw_args)}", head.line, head.column)
        if not raw_args:
            raise SemanticError(predicate, "atom without arguments", head.line, head.column)

        args: List[str] = []
        for index, node in enumerate(raw_args):
            if not isinstance(node, Token) or node.kind not in (TokenKind.SYMBOL, TokenKind.VARIABLE):
                raise BddlSyntaxError(*_pos(node), "a term or variable", _describe(node))
            if predicate == INROOM and index == 1:
                # Room type, not an object term.
                args.append(node.text)
                continue
            args.append(self._resolve(node, bound))
        return Atom(predicate, tuple(args))

    def _resolve(self, token: Token, bound: frozenset) -> str:
        if token.kind is TokenKind.VARIABLE:
            if token.text in bound:
                return token.text
            name = token.text[1:]
            if name in self.declared:
                return name
            raise SemanticError(token.text, "unbound variable", token.line, token.column)
        if token.text not in self.declared:
            raise SemanticError(token.text, "undeclared term", token.line, token.column)
        return token.text


def parse_activity(source: str) -> Activity:
    """Parse and validate one BDDL problem."""
    return _ActivityBuilder(read_sexpr(source)).build()


def load_activity(path: Union[str, Path]) -> Activity:
    path = Path(path)
    logger.debug(f"Parsing {path}")
    return parse_activity(path.read_text(encoding="utf-8"))


# === serialization ===

def _condition_lines(condition: Condition, depth: int) -> List[str]:
    pad = "  " * depth
    if isinstance(condition, Atom) or (isinstance(condition, Not) and isinstance(condition.child, Atom)):
        return [pad + to_sexpr(condition)]
    if isinstance(condition, Not):
        return [pad + "(not"] + _condition_lines(condition.child, depth + 1) + [pad + ")"]
    if isinstance(condition, (And, Or)):
        keyword = "and" if isinstance(condition, And) else "or"
        lines = [pad + f"({keyword}"]
        for child in condition.children:
            lines += _condition_lines(child, depth + 1)
        return lines + [pad + ")"]
    if isinstance(condition, Imply):
        return ([pad + "(imply"] + _condition_lines(condition.antecedent, depth + 1)
                + _condition_lines(condition.consequent, depth + 1) + [pad + ")"])
    if isinstance(condition, ForN):
        header = f"(forn ({condition.n}) ({condition.var} - {condition.synset})"
    elif isinstance(condition, ForAll):
        header = f"(forall ({condition.var} - {condition.synset})"
    else:
        header = f"(exists ({condition.var} - {condition.synset})"
    return [pad + header] + _condition_lines(condition.body, depth + 1) + [pad + ")"]


def serialize_activity(activity: Activity) -> str:
    """Canonical BDDL text; parsing it yields an equal Activity."""
    lines = [f"(define (problem {activity.problem_name})", f"  (:domain {activity.domain_name})", ""]

    lines.append("  (:objects")
    run: List[str] = []
    run_synset: Optional[str] = None
    for term, synset in activity.objects:
        if run and synset != run_synset:
            lines.append("    " + " ".join(run) + f" - {run_synset}")
            run = []
        run.append(term)
        run_synset = synset
    if run:
        lines.append("    " + " ".join(run) + f" - {run_synset}")
    lines.append("  )")
    lines.append("")

    lines.append("  (:init")
    for entry in activity.init:
        lines.append("    " + to_sexpr(entry))
    lines.append("  )")
    lines.append("")

    lines.append("  (:goal")
    lines += _condition_lines(activity.goal, 2)
    lines.append("  )")
    lines.append(")")
    return "\n".join(lines) + "\n"


def discover_activities(root: Union[str, Path]) -> List[Path]:
    """Find ``<root>/<activity_name>/problem<N>.bddl`` files in sorted order."""
    root = Path(root)
    return sorted(p for p in root.glob("*/problem*.bddl") if p.is_file())
