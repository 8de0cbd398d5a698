import random

import pytest
from hypothesis import given, settings, strategies as st

from hyperkub.group_kernel import SignedPerm
from hyperkub.puzzle_core import (InvalidReassembly, Move, MoveError, MoveSeq, ParamsMismatch,
                                  PuzzleParams, State, SwapCubies, TwistInPlace, all_moves,
                                  apply_move, apply_reassembly_edit, apply_sequence,
                                  colored_state_equal, compact_inverse, expand_layer_move,
                                  format_sequence, invert_sequence, opposite_index,
                                  parse_sequence, random_moves, solved_state, validate_state)

from _support import CORNER_TWIST, MATRIX, in_pair_frame_swap


def test_solved_state_sizes():
    assert len(solved_state(PuzzleParams(3, 3)).positions()) == 26
    assert len(solved_state(PuzzleParams(4, 2)).positions()) == 16
    assert len(solved_state(PuzzleParams(3, 7)).positions()) == 7 ** 3 - 5 ** 3


def test_params_validation():
    with pytest.raises(ValueError):
        PuzzleParams(2, 3)
    with pytest.raises(ValueError):
        PuzzleParams(3, 1)


def test_opposite_index():
    assert opposite_index(PuzzleParams(3, 7), 2) == 4
    assert opposite_index(PuzzleParams(3, 7), 3) == 3
    assert opposite_index(PuzzleParams(3, 3), 0) == 2


def test_move_position_rule():
    p = PuzzleParams(3, 3)
    s = solved_state(p)
    t = apply_move(s, Move(1, 2, (0,)))
    assert t.home_at((1, 0, 0)) == (0, 1, 0)
    assert t.pose_at((1, 0, 0)) == SignedPerm.plane_rotation(3, 1, 2)


def test_axis_cubie_stays_but_turns():
    p = PuzzleParams(3, 3)
    t = apply_move(solved_state(p), Move(1, 2, (0,)))
    assert t.home_at((1, 1, 0)) == (1, 1, 0)
    assert t.pose_at((1, 1, 0)) == SignedPerm.plane_rotation(3, 1, 2)
    assert t.appearance((1, 1, 0)) == solved_state(p).appearance((1, 1, 0))


@pytest.mark.parametrize("n,k", MATRIX)
def test_four_quarter_turns_are_identity(n, k):
    p = PuzzleParams(n, k)
    s = apply_sequence(solved_state(p), random_moves(p, 30, random.Random(n * k)))
    for m in random.Random(1).sample(all_moves(p), 5):
        assert apply_sequence(s, [m] * 4) == s


def test_move_checks():
    p = PuzzleParams(3, 3)
    with pytest.raises(MoveError):
        apply_move(solved_state(p), Move(1, 1, (0,)))
    with pytest.raises(MoveError):
        apply_move(solved_state(p), Move(1, 2, (3,)))
    with pytest.raises(MoveError):
        apply_move(solved_state(p), Move(1, 2, (0, 0)))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(MATRIX), st.integers(0, 10 ** 6), st.integers(0, 40))
def test_sequence_then_inverse_is_identity(nk, seed, length):
    p = PuzzleParams(*nk)
    s = solved_state(p)
    q = random_moves(p, length, random.Random(seed))
    mid = apply_sequence(s, q)
    assert apply_sequence(mid, invert_sequence(q)) == s
    assert apply_sequence(mid, compact_inverse(q)) == s


def test_invert_sequence_examples():
    m = Move(1, 2, (0,))
    assert invert_sequence(MoveSeq()) == MoveSeq()
    assert invert_sequence(MoveSeq((m,))) == MoveSeq((m, m, m))
    assert apply_sequence(solved_state(PuzzleParams(3, 3)), MoveSeq()) == solved_state(PuzzleParams(3, 3))


def test_expand_layer_move():
    p3 = PuzzleParams(3, 3)
    assert expand_layer_move(p3, {1, 2}, {3: 0}, 1, 2) == MoveSeq((Move(1, 2, (0,)),))
    p4 = PuzzleParams(4, 3)
    seq = expand_layer_move(p4, {1, 2, 3}, {4: 0}, 1, 2)
    assert len(seq) == 3
    s = solved_state(p4)
    results = {apply_sequence(s, MoveSeq(order)) for order in
               [seq.moves, seq.moves[::-1], (seq.moves[1], seq.moves[0], seq.moves[2])]}
    assert len(results) == 1


def test_notation_round_trip():
    p = PuzzleParams(4, 3)
    q = random_moves(p, 50, random.Random(3))
    assert parse_sequence(format_sequence(q)) == q
    assert parse_sequence("t(1,2)[0]' t(1,3)[2]^2") == MoveSeq(
        (Move(1, 2, (0,)),) * 3 + (Move(1, 3, (2,)),) * 2)
    with pytest.raises(MoveError):
        parse_sequence("R U R'")


def test_colored_equality():
    p = PuzzleParams(3, 7)
    s = solved_state(p)
    assert colored_state_equal(s, s)
    # two wing cluster mates share a look, so exchanging them is invisible
    t = apply_reassembly_edit(s, SwapCubies((0, 6, 1), (0, 6, 5)))
    assert t != s
    assert colored_state_equal(s, t)
    p3 = PuzzleParams(3, 3)
    assert not colored_state_equal(solved_state(p3), apply_reassembly_edit(solved_state(p3), CORNER_TWIST))
    with pytest.raises(ParamsMismatch):
        colored_state_equal(solved_state(p3), s)


def test_reassembly_edits():
    p = PuzzleParams(3, 3)
    assert validate_state(in_pair_frame_swap()) == []
    with pytest.raises(InvalidReassembly):
        apply_reassembly_edit(solved_state(p), SwapCubies((0, 0, 1), (0, 0, 0)))
    with pytest.raises(InvalidReassembly):
        apply_reassembly_edit(solved_state(p), TwistInPlace((0, 0, 0), SignedPerm((2, 1, 3), (1, 1, 1))))


def test_validate_state():
    p = PuzzleParams(3, 3)
    s = solved_state(p)
    assert validate_state(s) == []
    assert validate_state(apply_sequence(s, random_moves(p, 1000, random.Random(0)))) == []
    obj = s.to_json()
    obj["cubies"][0]["pose"] = {"perm": [1, 2, 3], "signs": [-1, 1, 1]}
    with pytest.raises(InvalidReassembly, match="reflection pose"):
        State.from_json(obj)


@pytest.mark.parametrize("n,k", [(3, 3), (4, 2), (3, 4)])
def test_json_round_trip(n, k):
    p = PuzzleParams(n, k)
    s = apply_sequence(solved_state(p), random_moves(p, 100, random.Random(k)))
    assert State.from_json(s.to_json()) == s
