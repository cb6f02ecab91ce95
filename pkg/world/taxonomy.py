"""Synset hierarchy and grounding of activity terms to scene instances.

The hierarchy is a forest (single parent per synset) kept in a networkx
DiGraph with edges child -> parent.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import networkx as nx
import numpy as np

from parsers.conditions import Activity
from utils.errors import EngineError, FormatError

from .scene import SceneState

logger = logging.getLogger(__name__)

FLOOR_SYNSET = "floor.n.01"


class CycleDetected(EngineError):
    def __init__(self, path: Sequence[str]):
        self.path = list(path)
        super().__init__("synset cycle: " + " -> ".join(self.path))


class DanglingReference(EngineError):
    def __init__(self, name: str, reason: str = "refers to an unknown synset"):
        self.name = name
        super().__init__(f"{name}: {reason}")


class UnknownSynset(EngineError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown synset {name!r}")


class Unsatisfiable(EngineError):
    def __init__(self, term: str, reason: str = "no injective assignment exists"):
        self.term = term
        super().__init__(f"cannot ground {term}: {reason}")


@dataclass(frozen=True)
class Taxonomy:
    nodes: frozenset
    parent_of: Dict[str, Optional[str]]
    category_to_synset: Dict[str, str]

    def __post_init__(self) -> None:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        for child, parent in self.parent_of.items():
            if child not in self.nodes:
                raise DanglingReference(child)
            if parent is not None:
                if parent not in self.nodes:
                    raise DanglingReference(parent)
                graph.add_edge(child, parent)
        try:
            cycle = nx.find_cycle(graph)
        except nx.NetworkXNoCycle:
            cycle = None
        if cycle:
            raise CycleDetected([edge[0] for edge in cycle] + [cycle[0][0]])
        for category, synset in self.category_to_synset.items():
            if synset not in self.nodes:
                raise DanglingReference(category, f"maps to unknown synset {synset!r}")
        object.__setattr__(self, "_graph", graph)

    def __contains__(self, synset: str) -> bool:
        return synset in self.nodes

    def ancestors(self, synset: str) -> List[str]:
        """synset followed by its parents up to the root."""
        if synset not in self.nodes:
            raise UnknownSynset(synset)
        chain = [synset]
        parent = self.parent_of.get(synset)
        while parent is not None:
            chain.append(parent)
            parent = self.parent_of.get(parent)
        return chain

    def descendants(self, synset: str) -> Set[str]:
        if synset not in self.nodes:
            raise UnknownSynset(synset)
        # Edges point child -> parent, so descendants are graph ancestors.
        return nx.ancestors(self._graph, synset) | {synset}

    def synset_of_category(self, category: str) -> Optional[str]:
        return self.category_to_synset.get(category)


def build_taxonomy(hierarchy: Iterable[Tuple[str, Optional[str]]],
                   categories: Iterable[Tuple[str, str]]) -> Taxonomy:
    """Build from (child, parent) and (category, synset) pairs; a None parent declares a root."""
    parent_of: Dict[str, Optional[str]] = {}
    nodes: Set[str] = set()
    graph = nx.DiGraph()
    for child, parent in hierarchy:
        nodes.add(child)
        graph.add_node(child)
        if parent is None:
            parent_of.setdefault(child, None)
            continue
        if parent_of.get(child) not in (None, parent):
            raise FormatError(child, f"has two parents ({parent_of[child]}, {parent}); the taxonomy must be a forest")
        if child == parent:
            raise CycleDetected([child, child])
        parent_of[child] = parent
        nodes.add(parent)
        graph.add_edge(child, parent)

    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        cycle = None
    if cycle:
        raise CycleDetected([edge[0] for edge in cycle] + [cycle[0][0]])
    for node in nodes:
        parent_of.setdefault(node, None)

    category_map: Dict[str, str] = {}
    for category, synset in categories:
        if synset not in nodes:
            raise DanglingReference(category, f"maps to unknown synset {synset!r}")
        category_map[category] = synset
    return Taxonomy(frozenset(nodes), parent_of, category_map)


def load_taxonomy(source: str, location: str = "<taxonomy>") -> Taxonomy:
    """Parse the two-section text format::

        [hierarchy]
        floor.n.01                      # a root on its own
        apple.n.01 edible_fruit.n.01    # child parent
        [categories]
        apple apple.n.01
    """
    hierarchy: List[Tuple[str, Optional[str]]] = []
    categories: List[Tuple[str, str]] = []
    section: Optional[str] = None
    for line_number, raw in enumerate(source.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("hierarchy", "categories"):
                raise FormatError(f"{location}:{line_number}", f"unknown section [{section}]")
            continue
        parts = line.split()
        if section == "hierarchy" and len(parts) in (1, 2):
            hierarchy.append((parts[0], parts[1] if len(parts) == 2 else None))
        elif section == "categories" and len(parts) == 2:
            categories.append((parts[0], parts[1]))
        elif section is None:
            raise FormatError(f"{location}:{line_number}", "entry before any section header")
        else:
            raise FormatError(f"{location}:{line_number}", f"malformed [{section}] line")

    taxonomy = build_taxonomy(hierarchy, categories)
    logger.debug(f"Taxonomy {location}: {len(taxonomy.nodes)} synsets, {len(taxonomy.category_to_synset)} categories")
    return taxonomy


def load_taxonomy_file(path: Union[str, Path]) -> Taxonomy:
    path = Path(path)
    return load_taxonomy(path.read_text(encoding="utf-8"), str(path))


def is_a(taxonomy: Taxonomy, synset: str, ancestor: str) -> bool:
    """Reflexive, transitive subsumption along parent links."""
    if ancestor not in taxonomy.nodes:
        raise UnknownSynset(ancestor)
    return ancestor in taxonomy.ancestors(synset)


def is_floor_synset(taxonomy: Taxonomy, synset: str) -> bool:
    if synset == FLOOR_SYNSET:
        return True
    return FLOOR_SYNSET in taxonomy.nodes and synset in taxonomy.nodes and is_a(taxonomy, synset, FLOOR_SYNSET)


def candidate_instances(taxonomy: Taxonomy, synset: str, scene: SceneState) -> List[str]:
    """Scene objects whose category falls under ``synset``, sorted by id."""
    if synset not in taxonomy.nodes:
        raise UnknownSynset(synset)
    matches = []
    for object_id in sorted(scene.objects):
        category_synset = taxonomy.synset_of_category(scene.objects[object_id].category)
        if category_synset is not None and is_a(taxonomy, category_synset, synset):
            matches.append(object_id)
    return matches


def resolve_candidates(taxonomy: Taxonomy, synset: str, scene: SceneState) -> List[str]:
    """Like candidate_instances, but floor synsets resolve to room ids."""
    if is_floor_synset(taxonomy, synset):
        return sorted(scene.rooms)
    return candidate_instances(taxonomy, synset, scene)


def room_matches(room_id: Optional[str], room_type: str) -> bool:
    """``kitchen`` matches ``kitchen`` and ``kitchen_0``."""
    if room_id is None:
        return False
    return re.fullmatch(rf"{re.escape(room_type)}(_\d+)?", room_id) is not None


@dataclass(frozen=True)
class GroundScope:
    bindings: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "bindings", dict(self.bindings))
        seen: Dict[str, str] = {}
        for term, instance in self.bindings.items():
            if instance in seen:
                raise Unsatisfiable(term, f"instance {instance!r} already bound to {seen[instance]}")
            seen[instance] = term

    def __getitem__(self, term: str) -> str:
        return self.bindings[term]

    def __contains__(self, term: str) -> bool:
        return term in self.bindings

    def get(self, term: str, default: Optional[str] = None) -> Optional[str]:
        return self.bindings.get(term, default)

    def merged(self, extra: Mapping[str, str]) -> "GroundScope":
        combined = dict(self.bindings)
        combined.update(extra)
        return GroundScope(combined)

    def validate(self, scene: SceneState) -> None:
        for term, instance in self.bindings.items():
            if instance not in scene.objects and instance not in scene.rooms:
                raise Unsatisfiable(term, f"bound instance {instance!r} is not in the scene")

    def to_dict(self) -> Dict[str, str]:
        return {term: self.bindings[term] for term in sorted(self.bindings)}


def term_candidates(activity: Activity, taxonomy: Taxonomy, scene: SceneState, term: str) -> List[str]:
    """Candidates for one declared term, honouring inroom directives."""
    synset = activity.synset_of(term)
    candidates = resolve_candidates(taxonomy, synset, scene)
    room_type = activity.inroom_directives().get(term)
    if room_type is None:
        return candidates
    if is_floor_synset(taxonomy, synset):
        return [room_id for room_id in candidates if room_matches(room_id, room_type)]
    return [c for c in candidates if room_matches(scene.objects[c].room_id, room_type)]


def ground_terms(activity: Activity, taxonomy: Taxonomy, scene: SceneState, seed: int,
                 terms: Optional[Sequence[str]] = None,
                 exclude: Iterable[str] = ()) -> GroundScope:
    """Bind each term to a distinct candidate instance.

    Terms are tried most-constrained first; each term's candidates are shuffled
    with a generator seeded by ``seed`` and the search backtracks on dead ends.
    """
    rng = np.random.default_rng(seed)
    wanted = list(activity.terms if terms is None else terms)
    excluded = set(exclude)
    options: Dict[str, List[str]] = {}
    for term in wanted:
        candidates = [c for c in term_candidates(activity, taxonomy, scene, term) if c not in excluded]
        if not candidates:
            raise Unsatisfiable(term, f"no {activity.synset_of(term)} instance in the scene")
        order = rng.permutation(len(candidates))
        options[term] = [candidates[i] for i in order]

    order = sorted(wanted, key=lambda t: (len(options[t]), wanted.index(t)))
    assignment: Dict[str, str] = {}
    used: Set[str] = set()
    deepest = [0]

    def search(depth: int) -> bool:
        if depth == len(order):
            return True
        deepest[0] = max(deepest[0], depth)
        term = order[depth]
        for candidate in options[term]:
            if candidate in used:
                continue
            assignment[term] = candidate
            used.add(candidate)
            if search(depth + 1):
                return True
            used.discard(candidate)
            del assignment[term]
        return False

    if not search(0):
        raise Unsatisfiable(order[deepest[0]])

    return GroundScope({term: assignment[term] for term in wanted})
