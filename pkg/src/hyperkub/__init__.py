"""Engine for the n-dimensional Rubik's cube: invariants, counting and solving."""
from .census import count_components_literal, count_states_census
from .classification import ClassId, class_of
from .invariants import invariant_vector, reachable
from .puzzle_core import (Move, MoveSeq, PuzzleParams, State, apply_move, apply_sequence,
                          colored_state_equal, solved_state)
from .solver import IncompatibleInvariants, SolvePlan, solve

__all__ = [
    "ClassId", "IncompatibleInvariants", "Move", "MoveSeq", "PuzzleParams", "SolvePlan", "State",
    "apply_move", "apply_sequence", "class_of", "colored_state_equal", "count_components_literal",
    "count_states_census", "invariant_vector", "reachable", "solve", "solved_state",
]
__version__ = "0.1.0"
