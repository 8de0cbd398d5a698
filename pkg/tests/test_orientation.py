import random

import pytest

from hyperkub.classification import ClassId, class_of, dependent_group
from hyperkub.group_kernel import Perm, perm_compose
from hyperkub.orientation import (ClassMismatch, NoOrientation, NotDisplaced, atlas_for,
                                  build_reference_atlas, colored_orientation,
                                  orientation_permutation, simplified_orientation,
                                  transition_alpha)
from hyperkub.puzzle_core import (Move, PuzzleParams, all_moves, apply_move, apply_sequence,
                                  geometry, solved_state)

from _support import corner_twisted, scrambled


def _acting(params, move, pos):
    return move.slice == tuple(pos[a - 1] for a in range(1, params.n + 1) if a not in (move.i, move.j))


def test_solved_cubies_are_properly_oriented():
    p = PuzzleParams(3, 7)
    s = solved_state(p)
    for cid in (ClassId(3, ()), ClassId(2, (1,)), ClassId(2, (3,))):
        atlas = build_reference_atlas(p, cid)
        for pos in atlas.domain():
            assert orientation_permutation(atlas, s, pos).is_identity()
    for cid in (ClassId(3, ()), ClassId(2, (3,))):
        atlas = build_reference_atlas(p, cid)
        assert all(colored_orientation(atlas, s, x).is_identity() for x in atlas.domain())


def test_solved_wing_mates_differ_in_colored_parity():
    p = PuzzleParams(3, 7)
    s = solved_state(p)
    atlas = build_reference_atlas(p, ClassId(2, (1,)))
    assert colored_orientation(atlas, s, (0, 6, 1)).is_identity()
    assert not colored_orientation(atlas, s, (0, 6, 5)).is_identity()


def test_atlas_transport_reaches_every_member():
    p = PuzzleParams(3, 5)
    atlas = build_reference_atlas(p, ClassId(2, (1,)))
    g = geometry(3, 5)
    for pos in atlas.domain():
        x = atlas.root
        for mv in atlas.transport(pos):
            x = g.move_target(x, mv.i, mv.j)
        assert x == pos


def test_corner_twist_orientation():
    s = corner_twisted()
    atlas = build_reference_atlas(PuzzleParams(3, 3), ClassId(3, ()))
    phi = orientation_permutation(atlas, s, (0, 0, 0))
    assert not phi.is_identity()
    assert dependent_group(atlas.params, atlas.class_id).contains(phi)


@pytest.mark.parametrize("n,k", [(3, 3), (4, 3), (3, 7), (4, 4)])
def test_transition_law(n, k):
    p = PuzzleParams(n, k)
    g = geometry(n, k)
    rnd = random.Random(n * 10 + k)
    moves = all_moves(p)
    s = scrambled(n, k, 1, 100)
    checked = 0
    while checked < 200:
        mv = rnd.choice(moves)
        cands = [x for x in s.positions() if class_of(p, x).m >= 2 and _acting(p, mv, x)
                 and g.move_target(x, mv.i, mv.j) != x]
        if not cands:
            continue
        x = rnd.choice(cands)
        atlas = atlas_for(p, x)
        y = g.move_target(x, mv.i, mv.j)
        t = apply_move(s, mv)
        alpha = transition_alpha(atlas, mv, x)
        assert colored_orientation(atlas, t, y) == perm_compose(colored_orientation(atlas, s, x), alpha)
        assert orientation_permutation(atlas, t, y) == perm_compose(
            orientation_permutation(atlas, s, x), alpha)
        s = t
        checked += 1


def test_alpha_around_a_quarter_turn_cycle():
    p = PuzzleParams(4, 3)
    g = geometry(4, 3)
    atlas = build_reference_atlas(p, ClassId(3, (1,)))
    for mv in all_moves(p):
        for x in atlas.domain():
            if not _acting(p, mv, x) or g.move_target(x, mv.i, mv.j) == x:
                continue
            prod = Perm.identity(3)
            for _ in range(4):
                prod = perm_compose(prod, transition_alpha(atlas, mv, x))
                x = g.move_target(x, mv.i, mv.j)
            assert prod.is_identity()


def test_transition_alpha_rejects_idle_moves():
    p = PuzzleParams(3, 3)
    atlas = build_reference_atlas(p, ClassId(3, ()))
    with pytest.raises(NotDisplaced):
        transition_alpha(atlas, Move(1, 2, (2,)), (0, 0, 0))


def test_orientation_errors():
    p = PuzzleParams(3, 3)
    s = solved_state(p)
    with pytest.raises(NoOrientation):
        orientation_permutation(build_reference_atlas(p, ClassId(1, (1, 1))), s, (0, 1, 1))
    with pytest.raises(ClassMismatch):
        orientation_permutation(build_reference_atlas(p, ClassId(3, ())), s, (0, 0, 1))


def test_simplified_orientation():
    p = PuzzleParams(3, 7)
    atlas = build_reference_atlas(p, ClassId(2, (1,)))
    s = apply_sequence(solved_state(p), [Move(1, 2, (3,))])
    values = {simplified_orientation(atlas, s, x) for x in atlas.domain()}
    assert values <= {0, 1}
    with pytest.raises(NoOrientation):
        simplified_orientation(build_reference_atlas(p, ClassId(3, ())), s, (0, 0, 0))
