# BDDL parsing: tokens, condition trees, activities, kinematic classification

from .errors import BddlSyntaxError, IllegalCharacter, SemanticError
from .tokenizer import Token, TokenKind, tokenize
from .conditions import (
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
    iter_atoms,
    to_sexpr,
)
from .bddl_parser import discover_activities, load_activity, parse_activity, serialize_activity
from .classifier import (
    DEFAULT_SUPPORTED,
    FileClassification,
    KinematicClassification,
    classify_files,
    classify_kinematic,
)

__all__ = [
    'BddlSyntaxError',
    'IllegalCharacter',
    'SemanticError',
    'Token',
    'TokenKind',
    'tokenize',
    'Activity',
    'And',
    'Atom',
    'Condition',
    'Exists',
    'ForAll',
    'ForN',
    'Imply',
    'Not',
    'Or',
    'iter_atoms',
    'to_sexpr',
    'discover_activities',
    'load_activity',
    'parse_activity',
    'serialize_activity',
    'DEFAULT_SUPPORTED',
    'FileClassification',
    'KinematicClassification',
    'classify_files',
    'classify_kinematic',
]
