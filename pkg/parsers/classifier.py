"""Decide whether an activity uses only kinematic predicates."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import AbstractSet, Iterable, List, Optional, Tuple, Union

from utils.errors import EngineError

from .bddl_parser import load_activity
from .conditions import INROOM, Activity, iter_atoms

logger = logging.getLogger(__name__)

DEFAULT_SUPPORTED = frozenset({"nextto", "inside", "onfloor", "ontop", "touching", "under"})


@dataclass(frozen=True)
class KinematicClassification:
    kinematic_only: bool
    unsupported_predicates: Tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "kinematic_only": self.kinematic_only,
            "unsupported_predicates": list(self.unsupported_predicates),
        }


def classify_kinematic(activity: Activity,
                       supported: Optional[AbstractSet[str]] = None) -> KinematicClassification:
    """Collect init and goal predicates outside ``supported`` (inroom never counts)."""
    allowed = set(DEFAULT_SUPPORTED if supported is None else supported) | {INROOM}
    used = set()
    for condition in (*activity.init, activity.goal):
        used.update(atom.predicate for atom in iter_atoms(condition))
    unsupported = tuple(sorted(used - allowed))
    return KinematicClassification(not unsupported, unsupported)


@dataclass(frozen=True)
class FileClassification:
    path: str
    classification: Optional[KinematicClassification]
    error: Optional[str] = None

    @property
    def kinematic_only(self) -> bool:
        return self.classification is not None and self.classification.kinematic_only

    def to_dict(self) -> dict:
        data = {"path": self.path, "parse_error": self.error}
        if self.classification is not None:
            data.update(self.classification.to_dict())
        else:
            data.update({"kinematic_only": False, "unsupported_predicates": []})
        return data


def classify_files(paths: Iterable[Union[str, Path]],
                   supported: Optional[AbstractSet[str]] = None) -> List[FileClassification]:
    """Classify each file; unparseable files count as non-kinematic with their error kept."""
    results = []
    for path in paths:
        try:
            activity = load_activity(path)
        except (EngineError, OSError, UnicodeDecodeError) as e:
            logger.warning(f"⚠️ {path}: {e}")
            results.append(FileClassification(str(path), None, str(e)))
            continue
        results.append(FileClassification(str(path), classify_kinematic(activity, supported)))
    return results
