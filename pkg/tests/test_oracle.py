import random

import pytest

from hyperkub.classification import ClassId, class_of, class_table, dependent_group
from hyperkub.oracle import (MemoryCapExceeded, UnsupportedParams, cubie_orbit_bfs,
                             full_state_bfs, pocket_index, pose_group_bfs, position_partition,
                             random_pocket_state, twisted_pocket, verify_completeness_small)
from hyperkub.puzzle_core import PuzzleParams, apply_sequence, random_moves, solved_state

POCKET = PuzzleParams(3, 2)


def test_cubie_orbit_of_corner():
    rep = cubie_orbit_bfs(PuzzleParams(3, 3), (0, 0, 0))
    assert rep.sizes == [8]
    assert rep.contains(0, (2, 2, 2))
    with pytest.raises(ValueError):
        cubie_orbit_bfs(PuzzleParams(3, 3), (1, 1, 1))


@pytest.mark.parametrize("n,k", [(3, 4), (3, 5), (3, 6), (4, 3)])
def test_position_partition_matches_classes(n, k):
    p = PuzzleParams(n, k)
    table = class_table(p)
    assert sorted(sorted(o) for o in position_partition(p)) == sorted(
        sorted(table.members(c)) for c in table.classes)


def test_special_split_needs_wide_cube():
    assert all(c.q is None for c in class_table(PuzzleParams(3, 5)).classes)
    assert any(c.q is not None for c in class_table(PuzzleParams(3, 6)).classes)


@pytest.mark.parametrize("n,k,cid", [(3, 3, ClassId(3, ())), (3, 7, ClassId(2, (3,))),
                                     (3, 7, ClassId(2, (1,))), (4, 3, ClassId(3, (1,)))])
def test_pose_groups_match(n, k, cid):
    p = PuzzleParams(n, k)
    rep = pose_group_bfs(p, cid)
    group = dependent_group(p, cid)
    assert rep.face_perms == frozenset(group.elements())


def test_pocket_index_ignores_whole_cube_rotation():
    s = solved_state(POCKET)
    rnd = random.Random(0)
    a = apply_sequence(s, random_moves(POCKET, 30, rnd))
    assert pocket_index(a) != pocket_index(s)
    assert 0 <= pocket_index(random_pocket_state(rnd)) < 3674160 * 3


def test_pocket_orbits(pocket):
    assert pocket.sizes == [3674160] * 3
    assert pocket.total == 11022480
    assert pocket.disjoint
    assert pocket.labels[pocket_index(twisted_pocket(1))] == 2


def test_verify_completeness(pocket):
    rep = verify_completeness_small(POCKET, 40, seed=3, orbits=pocket)
    assert rep.mismatches == 0
    assert rep.agree_true > 0 and rep.agree_false > 0


def test_oracle_limits():
    with pytest.raises(UnsupportedParams):
        full_state_bfs(PuzzleParams(3, 3), solved_state(PuzzleParams(3, 3)))
    with pytest.raises(MemoryCapExceeded):
        full_state_bfs(POCKET, solved_state(POCKET), memory_cap=2 ** 20)
    with pytest.raises(UnsupportedParams):
        verify_completeness_small(PuzzleParams(4, 2), 1)


def test_class_of_agrees_with_orbit_seed():
    p = PuzzleParams(4, 8)
    for orbit in position_partition(p):
        assert len({class_of(p, x) for x in orbit}) == 1
