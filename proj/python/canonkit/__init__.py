from ._canonkit import (
    CanonkitError,
    ConstraintError,
    DegeneracyError,
    DivergenceError,
    InconsistentBoundaryError,
    InputError,
    Move,
    Sequence,
    classify,
    compose,
    constraints,
    expanding_square,
    propagator,
    sequence_from_json,
)

__all__ = [
    "CanonkitError",
    "ConstraintError",
    "DegeneracyError",
    "DivergenceError",
    "InconsistentBoundaryError",
    "InputError",
    "Move",
    "Sequence",
    "classify",
    "compose",
    "constraints",
    "expanding_square",
    "propagator",
    "sequence_from_json",
]
