import random

import pytest
from hypothesis import given, settings, strategies as st

from hyperkub.classification import ClassId, class_table
from hyperkub.group_kernel import Perm
from hyperkub.invariants import invariant_vector
from hyperkub.oracle import random_reassembly
from hyperkub.orientation import build_reference_atlas, orientation_permutation
from hyperkub.puzzle_core import (Move, MoveSeq, PuzzleParams, apply_sequence,
                                  colored_state_equal, solved_state)
from hyperkub.solver import (STAGES, IncompatibleInvariants, SolvePlan, commutator, conjugate,
                             orient_by_commutant, orient_pair, permute_class_even, solve,
                             three_cycle, tune_parity)

from _support import corner_twisted, scrambled


def _changed(a, b):
    return {p for p in a.positions() if a.home_at(p) != b.home_at(p) or a.pose_id_at(p) != b.pose_id_at(p)}


def test_combinators():
    p, q = MoveSeq((Move(1, 2, (0,)),)), MoveSeq((Move(2, 3, (0,)),))
    s = solved_state(PuzzleParams(3, 3))
    pi, qi = p + p + p, q + q + q
    assert apply_sequence(s, conjugate(p, q)) == apply_sequence(s, p + q + pi)
    assert apply_sequence(s, commutator(p, q)) == apply_sequence(s, p + q + pi + qi)
    assert apply_sequence(s, commutator(p, p)) == s


def test_plan_bookkeeping():
    plan = SolvePlan()
    m = MoveSeq((Move(1, 2, (0,)),))
    plan.add("Placement", m)
    plan.add("Placement", m)
    plan.add("Orient", MoveSeq())
    assert plan.stages == [("Placement", m + m)]
    assert len(plan) == 2 and plan.lengths() == {"Placement": 2}
    with pytest.raises(ValueError):
        plan.add("Magic", m)
    assert "ClusterOrient" in STAGES


@pytest.mark.parametrize("n,k,cid", [(3, 3, ClassId(3, ())), (3, 3, ClassId(2, (1,))),
                                     (3, 5, ClassId(2, (1,))), (4, 3, ClassId(3, (1,)))])
def test_three_cycle_moves_exactly_three_cubies(n, k, cid):
    p = PuzzleParams(n, k)
    s = solved_state(p)
    a, b, c = class_table(p).members(cid)[:3]
    t = apply_sequence(s, three_cycle(s, cid, a, b, c))
    assert _changed(s, t) == {a, b, c}
    assert t.home_at(b) == a and t.home_at(c) == b and t.home_at(a) == c


def test_three_cycle_argument_checks():
    s = solved_state(PuzzleParams(3, 3))
    with pytest.raises(ValueError):
        three_cycle(s, ClassId(3, ()), (0, 0, 0), (0, 0, 0), (0, 0, 2))


def test_permute_class_even():
    p = PuzzleParams(3, 3)
    s = solved_state(p)
    cid = ClassId(3, ())
    members = class_table(p).members(cid)
    target = Perm.from_cycles(8, (1, 2), (3, 4))
    t = apply_sequence(s, permute_class_even(s, cid, target))
    for i, v in enumerate(target.images):
        assert t.home_at(members[v - 1]) == members[i]
    with pytest.raises(ValueError):
        permute_class_even(s, cid, Perm.from_cycles(8, (1, 2)))


def test_orient_pair_twists_two_corners():
    p = PuzzleParams(3, 3)
    s = solved_state(p)
    a, b = (0, 0, 0), (2, 2, 2)
    z = Perm.from_cycles(3, (1, 2, 3))
    t = apply_sequence(s, orient_pair(s, a, b, z))
    atlas = build_reference_atlas(p, ClassId(3, ()))
    assert _changed(s, t) == {a, b}
    assert orientation_permutation(atlas, t, a) == z
    assert orientation_permutation(atlas, t, b) == z.inverse()


def test_orient_by_commutant():
    p = PuzzleParams(4, 2)
    s = solved_state(p)
    z = Perm((2, 1, 4, 3))
    pos = (0, 0, 0, 0)
    t = apply_sequence(s, orient_by_commutant(s, pos, z))
    assert _changed(s, t) == {pos}
    assert orientation_permutation(build_reference_atlas(p, ClassId(4, ())), t, pos) == z
    with pytest.raises(ValueError):
        orient_by_commutant(s, pos, Perm.from_cycles(4, (1, 2, 3)))


def test_tune_parity_central():
    p = PuzzleParams(4, 3)
    s = solved_state(p)
    assert len(tune_parity(s, s, central_m=2).moves) == 0
    with pytest.raises(ValueError):
        tune_parity(solved_state(PuzzleParams(4, 2)), solved_state(PuzzleParams(4, 2)), central_m=2)


@pytest.mark.parametrize("n,k", [(3, 2), (3, 3), (3, 4), (3, 5), (3, 7), (4, 2), (4, 3)])
def test_solve_scrambles(n, k):
    s = scrambled(n, k, 11)
    goal = solved_state(PuzzleParams(n, k))
    plan = solve(s, goal)
    assert colored_state_equal(apply_sequence(s, plan.sequence), goal)
    assert sum(plan.lengths().values()) == len(plan)


def test_solve_between_two_scrambles():
    a, b = scrambled(4, 3, 1), scrambled(4, 3, 2)
    assert colored_state_equal(apply_sequence(a, solve(a, b).sequence), b)


def test_solve_refuses_incompatible_pair():
    with pytest.raises(IncompatibleInvariants) as info:
        solve(corner_twisted(), solved_state(PuzzleParams(3, 3)))
    assert info.value.components == ["o:(3,[])"]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_reassembly_pairs_solve_or_refuse(seed):
    p = PuzzleParams(3, 3)
    rnd = random.Random(seed)
    a, b = random_reassembly(p, rnd), random_reassembly(p, rnd)
    if invariant_vector(a) == invariant_vector(b):
        assert colored_state_equal(apply_sequence(a, solve(a, b).sequence), b)
    else:
        with pytest.raises(IncompatibleInvariants):
            solve(a, b)
