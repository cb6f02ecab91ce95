"""Compile condition trees against a grounding, evaluate them and score progress.

Compilation expands quantifiers over the candidate instances of the current
scene and pushes negations down to literals, so every report leaf is a literal,
a constant, or the vacuous marker of an implication with a false antecedent.

Q score: the fraction of satisfied leaves. Every compiled leaf counts, except
under a disjunction that came from an existential quantifier: there only the
best instance contributes (most satisfied leaves, ties to the lowest index).
An implication contributes its consequent's leaves when the antecedent holds
and a single satisfied marker otherwise.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Tuple, Union

from parsers.conditions import (
    INROOM,
    Activity,
    And,
    Atom,
    Condition,
    ForAll,
    ForN,
    Imply,
    Not,
    Or,
    substitute,
    to_sexpr,
)
from world.scene import SceneState
from world.taxonomy import GroundScope, Taxonomy, resolve_candidates

from .predicates import DEFAULT_PARAMS, PredicateParams, UnboundTerm, eval_bound


# === compiled tree ===

@dataclass(frozen=True)
class Literal:
    index: int
    predicate: str
    args: Tuple[str, ...]
    negated: bool
    expr: str


@dataclass(frozen=True)
class Constant:
    index: int
    value: bool
    expr: str


@dataclass(frozen=True)
class AllOf:
    children: Tuple["CompiledNode", ...]


@dataclass(frozen=True)
class AnyOf:
    children: Tuple["CompiledNode", ...]
    from_exists: bool = False


@dataclass(frozen=True)
class AtLeast:
    n: int
    children: Tuple["CompiledNode", ...]


@dataclass(frozen=True)
class Implies:
    index: int
    antecedent: "CompiledNode"
    consequent: "CompiledNode"
    expr: str


CompiledNode = Union[Literal, Constant, AllOf, AnyOf, AtLeast, Implies]
LeafNode = Union[Literal, Constant]
TruthFn = Callable[[LeafNode], bool]


@dataclass(frozen=True)
class CompiledCondition:
    root: CompiledNode
    leaf_count: int

    def leaves(self) -> List[LeafNode]:
        found: List[LeafNode] = []

        def walk(node: CompiledNode) -> None:
            if isinstance(node, (Literal, Constant)):
                found.append(node)
            elif isinstance(node, Implies):
                walk(node.antecedent)
                walk(node.consequent)
            else:
                for child in node.children:
                    walk(child)

        walk(self.root)
        return found


class _Compiler:
    def __init__(self, scope: GroundScope, taxonomy: Optional[Taxonomy], scene: SceneState):
        self.scope = scope
        self.taxonomy = taxonomy
        self.scene = scene
        self.next_index = 0
        self._candidates: Dict[str, List[str]] = {}

    def _index(self) -> int:
        index = self.next_index
        self.next_index += 1
        return index

    def candidates(self, synset: str) -> List[str]:
        if synset not in self._candidates:
            if self.taxonomy is None:
                raise UnboundTerm(f"<quantifier over {synset} without a taxonomy>")
            self._candidates[synset] = resolve_candidates(self.taxonomy, synset, self.scene)
        return self._candidates[synset]

    def _constant(self, value: bool, condition: Condition, env: Mapping[str, str], negated: bool) -> Constant:
        text = to_sexpr(substitute(condition, dict(env)))
        return Constant(self._index(), value, f"(not {text})" if negated else text)

    def compile(self, condition: Condition, env: Mapping[str, str], negated: bool) -> CompiledNode:
        if isinstance(condition, Atom):
            ids, shown = [], []
            for arg in condition.args:
                if arg in env:
                    ids.append(env[arg])
                    shown.append(env[arg])
                elif arg.startswith("?") or arg not in self.scope:
                    raise UnboundTerm(arg)
                else:
                    ids.append(self.scope[arg])
                    shown.append(arg)
            text = "(" + " ".join([condition.predicate] + shown) + ")"
            if negated:
                text = f"(not {text})"
            return Literal(self._index(), condition.predicate, tuple(ids), negated, text)

        if isinstance(condition, Not):
            return self.compile(condition.child, env, not negated)

        if isinstance(condition, (And, Or)):
            children = tuple(self.compile(c, env, negated) for c in condition.children)
            conjunctive = isinstance(condition, And) != negated
            return AllOf(children) if conjunctive else AnyOf(children)

        if isinstance(condition, Imply):
            if negated:
                return AllOf((self.compile(condition.antecedent, env, False),
                              self.compile(condition.consequent, env, True)))
            index = self._index()
            antecedent = self.compile(condition.antecedent, env, False)
            consequent = self.compile(condition.consequent, env, False)
            text = to_sexpr(substitute(condition, dict(env)))
            return Implies(index, antecedent, consequent, text)

        candidates = self.candidates(condition.synset)
        children = tuple(
            self.compile(condition.body, {**env, condition.var: candidate}, negated)
            for candidate in candidates
        )

        if isinstance(condition, ForN):
            k = len(children)
            if not negated:
                if k < condition.n:
                    return self._constant(False, condition, env, negated)
                return AtLeast(condition.n, children)
            # not (at least n of k)  ==  at least k-n+1 of the negations
            needed = k - condition.n + 1
            if needed <= 0:
                return self._constant(True, condition, env, negated)
            return AtLeast(needed, children)

        universal = isinstance(condition, ForAll) != negated
        if not children:
            return self._constant(universal, condition, env, negated)
        if universal:
            return AllOf(children)
        return AnyOf(children, from_exists=True)


def compile_condition(condition: Condition, scope: GroundScope, taxonomy: Optional[Taxonomy],
                      scene: SceneState) -> CompiledCondition:
    """Expand quantifiers against ``scene`` and bind terms through ``scope``."""
    compiler = _Compiler(scope, taxonomy, scene)
    root = compiler.compile(condition, {}, False)
    return CompiledCondition(root, compiler.next_index)


# === evaluation ===

def scene_truth(scene: SceneState, p: PredicateParams = DEFAULT_PARAMS) -> TruthFn:
    """Leaf truth from the kinematic predicates, memoized per leaf."""
    cache: Dict[int, bool] = {}

    def truth(leaf: LeafNode) -> bool:
        if isinstance(leaf, Constant):
            return leaf.value
        if leaf.index not in cache:
            cache[leaf.index] = eval_bound(leaf.predicate, leaf.args, scene, p) != leaf.negated
        return cache[leaf.index]

    return truth


def evaluate_node(node: CompiledNode, truth: TruthFn) -> bool:
    if isinstance(node, (Literal, Constant)):
        return truth(node)
    if isinstance(node, AllOf):
        return all(evaluate_node(c, truth) for c in node.children)
    if isinstance(node, AnyOf):
        return any(evaluate_node(c, truth) for c in node.children)
    if isinstance(node, AtLeast):
        return sum(1 for c in node.children if evaluate_node(c, truth)) >= node.n
    return (not evaluate_node(node.antecedent, truth)) or evaluate_node(node.consequent, truth)


def evaluate(compiled: CompiledCondition, scene: SceneState, p: PredicateParams = DEFAULT_PARAMS) -> bool:
    return evaluate_node(compiled.root, scene_truth(scene, p))


# === scoring ===

@dataclass(frozen=True)
class GoalReport:
    satisfied: bool
    leaf_results: Tuple[Tuple[str, bool], ...]
    q_score: float

    @property
    def failed_leaves(self) -> List[str]:
        return [expr for expr, ok in self.leaf_results if not ok]

    def to_dict(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "q_score": self.q_score,
            "leaves": [{"expr": expr, "ok": ok} for expr, ok in self.leaf_results],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()


_Selection = Tuple[int, int, List[Tuple[int, str, bool]]]


def _select(node: CompiledNode, truth: TruthFn) -> _Selection:
    """(satisfied, total, [(leaf index, expr, ok)]) for the leaves this node contributes."""
    if isinstance(node, (Literal, Constant)):
        ok = truth(node)
        return (1 if ok else 0, 1, [(node.index, node.expr, ok)])
    if isinstance(node, Implies):
        if evaluate_node(node.antecedent, truth):
            return _select(node.consequent, truth)
        return (1, 1, [(node.index, f"{node.expr} [vacuous]", True)])

    selections = [_select(child, truth) for child in node.children]
    if isinstance(node, AnyOf) and node.from_exists:
        best = min(range(len(selections)), key=lambda i: (-selections[i][0], i))
        return selections[best]

    satisfied = sum(selection[0] for selection in selections)
    total = sum(selection[1] for selection in selections)
    leaves = [leaf for selection in selections for leaf in selection[2]]
    return satisfied, total, leaves


def score_with_truth(compiled: CompiledCondition, truth: TruthFn) -> GoalReport:
    satisfied, total, leaves = _select(compiled.root, truth)
    return GoalReport(
        satisfied=evaluate_node(compiled.root, truth),
        leaf_results=tuple((expr, ok) for _, expr, ok in leaves),
        q_score=satisfied / total,
    )


def selected_leaf_indices(compiled: CompiledCondition, truth: TruthFn) -> List[int]:
    """Indices of the leaves that the report for ``truth`` is built from."""
    return [index for index, _, _ in _select(compiled.root, truth)[2]]


def score_goal(compiled: CompiledCondition, scene: SceneState,
               p: PredicateParams = DEFAULT_PARAMS) -> GoalReport:
    return score_with_truth(compiled, scene_truth(scene, p))


def init_condition(activity: Activity) -> Optional[Condition]:
    """The init list as one conjunction; inroom directives are left to grounding."""
    literals = [
        entry for entry in activity.init
        if not (isinstance(entry, Atom) and entry.predicate == INROOM)
        and not (isinstance(entry, Not) and isinstance(entry.child, Atom) and entry.child.predicate == INROOM)
    ]
    if not literals:
        return None
    return And(tuple(literals))


def compile_init(activity: Activity, scope: GroundScope, taxonomy: Optional[Taxonomy],
                 scene: SceneState) -> CompiledCondition:
    condition = init_condition(activity)
    if condition is None:
        return CompiledCondition(Constant(0, True, "(and)"), 1)
    return compile_condition(condition, scope, taxonomy, scene)


def check_init(activity: Activity, scope: GroundScope, taxonomy: Optional[Taxonomy], scene: SceneState,
               p: PredicateParams = DEFAULT_PARAMS) -> GoalReport:
    return score_goal(compile_init(activity, scope, taxonomy, scene), scene, p)
