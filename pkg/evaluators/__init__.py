# Kinematic predicates and goal-condition evaluation

from .predicates import (
    DEFAULT_PARAMS,
    KINEMATIC_PREDICATES,
    PredicateKind,
    PredicateParams,
    UnboundTerm,
    UnknownPredicate,
    UnsupportedFloorRelation,
    eval_atom,
    eval_bound,
    inside,
    next_to,
    on_floor,
    on_top,
    touching,
    under,
)
from .logic import (
    CompiledCondition,
    GoalReport,
    check_init,
    compile_condition,
    compile_init,
    evaluate,
    score_goal,
    score_with_truth,
)

__all__ = [
    'DEFAULT_PARAMS',
    'KINEMATIC_PREDICATES',
    'PredicateKind',
    'PredicateParams',
    'UnboundTerm',
    'UnknownPredicate',
    'UnsupportedFloorRelation',
    'eval_atom',
    'eval_bound',
    'inside',
    'next_to',
    'on_floor',
    'on_top',
    'touching',
    'under',
    'CompiledCondition',
    'GoalReport',
    'check_init',
    'compile_condition',
    'compile_init',
    'evaluate',
    'score_goal',
    'score_with_truth',
]
