"""Condition trees and the Activity record produced by the BDDL parser."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Set, Tuple, Union

from .errors import SemanticError

INROOM = "inroom"


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: Tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def term_args(self) -> Tuple[str, ...]:
        """Arguments that name objects (inroom's room type is excluded)."""
        if self.predicate == INROOM:
            return self.args[:1]
        return self.args


@dataclass(frozen=True)
class Not:
    child: "Condition"


@dataclass(frozen=True)
class And:
    children: Tuple["Condition", ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise SemanticError("and", "needs at least one child")


@dataclass(frozen=True)
class Or:
    children: Tuple["Condition", ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise SemanticError("or", "needs at least one child")


@dataclass(frozen=True)
class Imply:
    antecedent: "Condition"
    consequent: "Condition"


@dataclass(frozen=True)
class ForAll:
    var: str
    synset: str
    body: "Condition"

    def __post_init__(self) -> None:
        _check_quantifier("forall", self.var, self.synset)


@dataclass(frozen=True)
class Exists:
    var: str
    synset: str
    body: "Condition"

    def __post_init__(self) -> None:
        _check_quantifier("exists", self.var, self.synset)


@dataclass(frozen=True)
class ForN:
    n: int
    var: str
    synset: str
    body: "Condition"

    def __post_init__(self) -> None:
        _check_quantifier("forn", self.var, self.synset)
        if self.n < 1:
            raise SemanticError("forn", f"count must be >= 1, got {self.n}")


Condition = Union[Atom, Not, And, Or, Imply, ForAll, Exists, ForN]


def _check_quantifier(kind: str, var: str, synset: str) -> None:
    if not var.startswith("?") or len(var) < 2:
        raise SemanticError(var, f"{kind} variable must start with '?'")
    if not synset:
        raise SemanticError(var, f"{kind} variable has an empty synset")


def children_of(condition: Condition) -> Tuple[Condition, ...]:
    if isinstance(condition, Atom):
        return ()
    if isinstance(condition, Not):
        return (condition.child,)
    if isinstance(condition, (And, Or)):
        return condition.children
    if isinstance(condition, Imply):
        return (condition.antecedent, condition.consequent)
    return (condition.body,)


def iter_atoms(condition: Condition) -> Iterator[Atom]:
    """Yield every atom in the tree, depth first, left to right."""
    if isinstance(condition, Atom):
        yield condition
        return
    for child in children_of(condition):
        yield from iter_atoms(child)


def referenced_terms(condition: Condition, bound: Optional[Set[str]] = None) -> Iterator[str]:
    """Yield atom arguments that are not bound by an enclosing quantifier."""
    bound = bound or set()
    if isinstance(condition, Atom):
        for arg in condition.term_args:
            if arg not in bound:
                yield arg
        return
    if isinstance(condition, (ForAll, Exists, ForN)):
        yield from referenced_terms(condition.body, bound | {condition.var})
        return
    for child in children_of(condition):
        yield from referenced_terms(child, bound)


def substitute(condition: Condition, mapping: Dict[str, str]) -> Condition:
    """Replace atom arguments by mapping; quantifiers shadow their own variable."""
    if isinstance(condition, Atom):
        return Atom(condition.predicate, tuple(mapping.get(a, a) for a in condition.args))
    if isinstance(condition, Not):
        return Not(substitute(condition.child, mapping))
    if isinstance(condition, And):
        return And(tuple(substitute(c, mapping) for c in condition.children))
    if isinstance(condition, Or):
        return Or(tuple(substitute(c, mapping) for c in condition.children))
    if isinstance(condition, Imply):
        return Imply(substitute(condition.antecedent, mapping), substitute(condition.consequent, mapping))
    inner = {k: v for k, v in mapping.items() if k != condition.var}
    body = substitute(condition.body, inner)
    if isinstance(condition, ForN):
        return ForN(condition.n, condition.var, condition.synset, body)
    return type(condition)(condition.var, condition.synset, body)


def to_sexpr(condition: Condition) -> str:
    """Single-line BDDL rendering of a condition."""
    if isinstance(condition, Atom):
        return "(" + " ".join((condition.predicate,) + condition.args) + ")"
    if isinstance(condition, Not):
        return f"(not {to_sexpr(condition.child)})"
    if isinstance(condition, And):
        return "(and " + " ".join(to_sexpr(c) for c in condition.children) + ")"
    if isinstance(condition, Or):
        return "(or " + " ".join(to_sexpr(c) for c in condition.children) + ")"
    if isinstance(condition, Imply):
        return f"(imply {to_sexpr(condition.antecedent)} {to_sexpr(condition.consequent)})"
    if isinstance(condition, ForN):
        return f"(forn ({condition.n}) ({condition.var} - {condition.synset}) {to_sexpr(condition.body)})"
    keyword = "forall" if isinstance(condition, ForAll) else "exists"
    return f"({keyword} ({condition.var} - {condition.synset}) {to_sexpr(condition.body)})"


@dataclass(frozen=True)
class Activity:
    """A parsed BDDL problem: typed object terms, init literals and a goal tree."""

    problem_name: str
    domain_name: str
    objects: Tuple[Tuple[str, str], ...]
    init: Tuple[Condition, ...]
    goal: Condition

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects", tuple((t, s) for t, s in self.objects))
        object.__setattr__(self, "init", tuple(self.init))

        seen: Set[str] = set()
        for term, synset in self.objects:
            if term in seen:
                raise SemanticError(term, "declared more than once")
            if not synset:
                raise SemanticError(term, "empty synset")
            seen.add(term)

        if not self.init:
            raise SemanticError(":init", "must contain at least one literal")
        for entry in self.init:
            atom = entry.child if isinstance(entry, Not) else entry
            if not isinstance(atom, Atom):
                raise SemanticError(to_sexpr(entry), "init entries must be atoms or negated atoms")

        for condition in (*self.init, self.goal):
            for term in referenced_terms(condition):
                if term not in seen:
                    raise SemanticError(term, "undeclared term")

    @property
    def name(self) -> str:
        return self.problem_name

    @property
    def terms(self) -> List[str]:
        return [term for term, _ in self.objects]

    def synset_of(self, term: str) -> str:
        for declared, synset in self.objects:
            if declared == term:
                return synset
        raise SemanticError(term, "undeclared term")

    def inroom_directives(self) -> Dict[str, str]:
        """Map of term -> room type from positive inroom atoms in init."""
        return {
            entry.args[0]: entry.args[1]
            for entry in self.init
            if isinstance(entry, Atom) and entry.predicate == INROOM and len(entry.args) == 2
        }
