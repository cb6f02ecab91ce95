# Activity instantiation: rejection sampling and pre-sampled loading

from .instance_sampler import (
    PLACEMENT_PREDICATES,
    CyclicSupport,
    InitViolated,
    LibraryEntry,
    MissingLibraryEntry,
    SampledInstance,
    SamplerParams,
    SamplingFailed,
    load_object_library,
    load_presampled,
    load_scope_file,
    movable_terms,
    order_constraints,
    sample_instance,
)

__all__ = [
    'PLACEMENT_PREDICATES',
    'CyclicSupport',
    'InitViolated',
    'LibraryEntry',
    'MissingLibraryEntry',
    'SampledInstance',
    'SamplerParams',
    'SamplingFailed',
    'load_object_library',
    'load_presampled',
    'load_scope_file',
    'movable_terms',
    'order_constraints',
    'sample_instance',
]
