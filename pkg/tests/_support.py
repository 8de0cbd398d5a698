"""Shared fixtures: test matrix and the targeted reassembly edits."""
from __future__ import annotations

import random

from hyperkub.classification import ClassId
from hyperkub.group_kernel import SignedPerm
from hyperkub.orientation import build_reference_atlas, carried_pose
from hyperkub.puzzle_core import (PuzzleParams, SwapCubies, TwistInPlace, apply_reassembly_edit,
                                  apply_sequence, random_moves, solved_state)

MATRIX = [(3, 2), (3, 3), (3, 4), (3, 7), (4, 2), (4, 3), (5, 3)]

CORNER_TWIST = TwistInPlace((0, 0, 0), SignedPerm((2, 3, 1), (1, 1, 1)))


def scrambled(n: int, k: int, seed: int, length: int = 200):
    p = PuzzleParams(n, k)
    return apply_sequence(solved_state(p), random_moves(p, length, random.Random(seed)))


def corner_twisted(k: int = 3):
    return apply_reassembly_edit(solved_state(PuzzleParams(3, k)), CORNER_TWIST)


def in_pair_frame_swap():
    """Exchange the two frame cubies on axis 3 of a 3x3x3."""
    s = solved_state(PuzzleParams(3, 3))
    flip = SignedPerm((1, 2, 3), (-1, 1, -1))
    return apply_reassembly_edit(s, SwapCubies((1, 1, 0), (1, 1, 2), flip, flip))


def pair_slot_swap():
    """Exchange the frame pairs of axes 1 and 2 of a 3x3x3, each member keeping its side."""
    s = solved_state(PuzzleParams(3, 3))
    s = apply_reassembly_edit(s, SwapCubies((2, 1, 1), (1, 2, 1), SignedPerm((2, 1, 3), (1, -1, 1)),
                                            SignedPerm((2, 1, 3), (-1, 1, 1))))
    return apply_reassembly_edit(s, SwapCubies((0, 1, 1), (1, 0, 1), SignedPerm((2, 1, 3), (1, -1, 1)),
                                               SignedPerm((2, 1, 3), (-1, 1, 1))))


def central_edge_swap():
    """Exchange two central edges of a 3x3x3, each carried like a transported cubie."""
    p = PuzzleParams(3, 3)
    atlas = build_reference_atlas(p, ClassId(2, (1,)))
    a, b = (0, 0, 1), (0, 2, 1)
    e = SwapCubies(a, b, carried_pose(atlas, a, b), carried_pose(atlas, b, a))
    return apply_reassembly_edit(solved_state(p), e)


def wing_flip():
    """Flip one wing of a 7x7x7 in place."""
    s = solved_state(PuzzleParams(3, 7))
    return apply_reassembly_edit(s, TwistInPlace((0, 6, 1), SignedPerm((2, 1, 3), (-1, -1, -1))))
