"""Brute-force ground truth: position orbits, pose groups and the 2x2x2 state space."""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from itertools import permutations
from math import factorial
from typing import Optional

import numpy as np

from .classification import ClassId, canonical_position
from .group_kernel import Perm
from .puzzle_core import (PuzzleParams, Position, SignedPerm, State, external_dirs, geometry,
                          is_external, solved_state)


class UnsupportedParams(ValueError):
    pass


class MemoryCapExceeded(RuntimeError):
    pass


@dataclass
class OrbitReport:
    seeds: list
    sizes: list[int]
    members: list = field(default_factory=list, repr=False)
    visited: int = 0
    depth: int = 0

    def contains(self, orbit: int, item) -> bool:
        return item in self.members[orbit]


def cubie_orbit_bfs(params: PuzzleParams, start: Position) -> OrbitReport:
    if not is_external(start, params.k):
        raise ValueError(f"{start} is an interior position")
    g = geometry(params.n, params.k)
    dist = {start: 0}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for mv in g.moves_at(x):
            y = g.move_target(x, mv.i, mv.j)
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return OrbitReport([start], [len(dist)], [frozenset(dist)], len(dist), max(dist.values()))


def position_partition(params: PuzzleParams) -> list[frozenset]:
    """All position orbits under single-cubie transport."""
    seen = set()
    out = []
    for p in geometry(params.n, params.k).positions:
        if p not in seen:
            orb = cubie_orbit_bfs(params, p).members[0]
            seen |= orb
            out.append(orb)
    return out


@dataclass
class PoseGroupReport:
    order: int
    face_perms: frozenset
    visited: int


def pose_group_bfs(params: PuzzleParams, class_id: ClassId) -> PoseGroupReport:
    """Face permutations realized by poses that bring the root cubie back home."""
    if class_id.m < 2:
        raise ValueError("pose groups need at least two boundary coordinates")
    g = geometry(params.n, params.k)
    root = canonical_position(class_id, params.k)
    faces = external_dirs(root, params.k)
    start = (root, g.identity_pose)
    seen = {start}
    queue = deque([start])
    while queue:
        x, pid = queue.popleft()
        for mv in g.moves_at(x):
            st = (g.move_target(x, mv.i, mv.j), g.rot_table(mv.i, mv.j)[pid])
            if st not in seen:
                seen.add(st)
                queue.append(st)
    index = {d: i for i, d in enumerate(faces, 1)}
    perms = set()
    poses_home = set()
    for x, pid in seen:
        if x == root:
            poses_home.add(pid)
            perms.add(Perm(tuple(index[g.apply_dir(pid, d)] for d in faces)))
    return PoseGroupReport(len(poses_home), frozenset(perms), len(seen))


# ---------------------------------------------------------------------------
# 2x2x2 full state space
# ---------------------------------------------------------------------------

_CORNERS = tuple(p for p in np.ndindex(2, 2, 2))
_FIXED = (1, 1, 1)
_MOVABLE = tuple(p for p in _CORNERS if p != _FIXED)
_N_PERM = factorial(7)
_N_ORI = 3 ** 7
TOTAL_POCKET = _N_PERM * _N_ORI


def _pocket_generators():
    """(position map, per-slot axis map) for the quarter turns that keep (1,1,1) in place."""
    g = geometry(3, 2)
    gens = []
    for i, j in ((1, 2), (1, 3), (2, 3)):
        swap = [0, 1, 2]
        swap[i - 1], swap[j - 1] = j - 1, i - 1
        mapping, axis_map = [], []
        for p in _MOVABLE:
            if p[6 - i - j - 1] == 0:
                mapping.append(_MOVABLE.index(g.move_target(p, i, j)))
                axis_map.append(swap)
            else:
                mapping.append(_MOVABLE.index(p))
                axis_map.append([0, 1, 2])
        gens.append((mapping, axis_map))
    return gens


class _PocketCodec:
    def __init__(self):
        perms = np.array(list(permutations(range(7))), dtype=np.int8)
        self.perms = perms
        weights = 7 ** np.arange(6, -1, -1, dtype=np.int64)
        self.weights = weights
        lookup = np.full(7 ** 7, -1, dtype=np.int32)
        lookup[perms.astype(np.int64) @ weights] = np.arange(len(perms), dtype=np.int32)
        self.lookup = lookup
        digits = np.zeros((_N_ORI, 7), dtype=np.int8)
        rest = np.arange(_N_ORI)
        for i in range(7):
            digits[:, i] = rest % 3
            rest //= 3
        self.ori_digits = digits
        self.pow3 = 3 ** np.arange(7, dtype=np.int64)

    def decode(self, idx: np.ndarray):
        return self.perms[idx // _N_ORI], self.ori_digits[idx % _N_ORI]

    def encode(self, perm: np.ndarray, ori: np.ndarray) -> np.ndarray:
        prank = self.lookup[perm.astype(np.int64) @ self.weights].astype(np.int64)
        return prank * _N_ORI + ori.astype(np.int64) @ self.pow3


def pocket_index(state: State) -> int:
    """Index of a 2x2x2 state after turning the whole cube so (1,1,1) is solved."""
    if (state.params.n, state.params.k) != (3, 2):
        raise UnsupportedParams("pocket indexing needs n=3, k=2")
    state = _normalize_pocket(state)
    codec = _codec()
    # perm[slot] = index of the cubie sitting at movable slot; ori = axis holding its axis-1 color
    perm = np.array([[_MOVABLE.index(state.home_at(p)) for p in _MOVABLE]], dtype=np.int8)
    g = state.geometry
    ori = np.array([[abs(g.apply_dir(state.pose_id_at(p), _first_dir(state.home_at(p)))) - 1
                     for p in _MOVABLE]], dtype=np.int8)
    return int(codec.encode(perm, ori)[0])


def _first_dir(home: Position) -> int:
    return external_dirs(home, 2)[0]


def _normalize_pocket(state: State) -> State:
    g = state.geometry
    where = state.where_is()
    pos = where[_FIXED]
    for rot in range(len(g.poses)):
        sp = g.poses[rot]
        # whole-cube rotation about the centre, matching how poses act on directions
        def move_pos(p, sp=sp):
            out = [0, 0, 0]
            for a in range(3):
                d = sp[a]
                out[abs(d) - 1] = p[a] if d > 0 else 1 - p[a]
            return tuple(out)
        if move_pos(pos) != _FIXED or g.mul(rot, state.pose_id_at(pos)) != g.identity_pose:
            continue
        home, pose = {}, {}
        for p in g.positions:
            q = move_pos(p)
            home[q] = state.home_at(p)
            pose[q] = g.mul(rot, state.pose_id_at(p))
        return State(state.params, home, pose)
    raise AssertionError("no whole-cube rotation fixes the reference corner")


_CODEC: Optional[_PocketCodec] = None


def _codec() -> _PocketCodec:
    global _CODEC
    if _CODEC is None:
        _CODEC = _PocketCodec()
    return _CODEC


def pocket_memory_estimate() -> int:
    """Rough peak bytes of one pocket BFS (visited labels plus frontier work arrays)."""
    return TOTAL_POCKET * (1 + 8 * 3) // 2 + 200 * 2 ** 20


def full_state_bfs(params: PuzzleParams, start: State, labels: Optional[np.ndarray] = None,
                   label: int = 1, memory_cap: int = 4 * 2 ** 30) -> OrbitReport:
    """Orbit of ``start`` among 2x2x2 states taken modulo whole-cube rotation.

    When ``labels`` (uint8, one entry per canonical state) is given, reached
    states are marked with ``label`` in place.
    """
    if (params.n, params.k) != (3, 2):
        raise UnsupportedParams("full-state search is limited to n=3, k=2")
    if pocket_memory_estimate() > memory_cap:
        raise MemoryCapExceeded(f"need about {pocket_memory_estimate() >> 20} MiB, "
                                f"cap is {memory_cap >> 20} MiB")
    codec = _codec()
    if labels is None:
        labels = np.zeros(TOTAL_POCKET, dtype=np.uint8)
    seed = pocket_index(start)
    if labels[seed]:
        raise ValueError("start state already labelled")
    labels[seed] = label
    frontier = np.array([seed], dtype=np.int64)
    gens = [(np.array(mp, dtype=np.int64), np.array(am, dtype=np.int8)) for mp, am in _pocket_generators()]
    slots = np.arange(7)
    size = 1
    depth = 0
    while frontier.size:
        perm, ori = codec.decode(frontier)
        found = []
        for mapping, swap in gens:
            new_perm = np.empty_like(perm)
            new_ori = np.empty_like(ori)
            new_perm[:, mapping] = perm
            new_ori[:, mapping] = swap[slots, ori]
            idx = codec.encode(new_perm, new_ori)
            idx = idx[labels[idx] == 0]
            idx = np.unique(idx)
            labels[idx] = label
            found.append(idx)
        frontier = np.concatenate(found) if found else np.empty(0, dtype=np.int64)
        size += frontier.size
        if frontier.size:
            depth += 1
    return OrbitReport([seed], [size], [], size, depth)


def twisted_pocket(twist: int) -> State:
    """Solved 2x2x2 with corner (0,0,0) turned ``twist`` thirds in place."""
    from .puzzle_core import TwistInPlace, apply_reassembly_edit
    s = solved_state(PuzzleParams(3, 2))
    rot = SignedPerm((1, 2, 3), (1, 1, 1))
    for _ in range(twist % 3):
        rot = SignedPerm((2, 3, 1), (1, 1, 1)) * rot
    return apply_reassembly_edit(s, TwistInPlace((0, 0, 0), rot)) if twist % 3 else s


@dataclass
class PocketReport:
    sizes: list[int]
    total: int
    disjoint: bool
    labels: np.ndarray = field(repr=False, default=None)


def pocket_orbits(memory_cap: int = 4 * 2 ** 30) -> PocketReport:
    """Orbits of the solved cube and of its two single-corner twists."""
    params = PuzzleParams(3, 2)
    labels = np.zeros(TOTAL_POCKET, dtype=np.uint8)
    sizes = []
    for t in range(3):
        rep = full_state_bfs(params, twisted_pocket(t), labels, t + 1, memory_cap)
        sizes.append(rep.sizes[0])
    counts = np.bincount(labels, minlength=4)
    disjoint = all(int(counts[t + 1]) == sizes[t] for t in range(3))
    return PocketReport(sizes, TOTAL_POCKET, disjoint and int(counts[0]) == 0, labels)


def random_pocket_state(rnd: random.Random) -> State:
    """Uniformly random valid reassembly of the 2x2x2."""
    params = PuzzleParams(3, 2)
    g = geometry(3, 2)
    homes = list(g.positions)
    rnd.shuffle(homes)
    home, pose = {}, {}
    for p, h in zip(g.positions, homes):
        want = sorted(external_dirs(p, 2))
        options = [pid for pid in range(len(g.poses))
                   if sorted(g.apply_dir(pid, d) for d in external_dirs(h, 2)) == want]
        # poses differing only on hidden axes look alike; keep one per look
        looks = {}
        for pid in options:
            looks.setdefault(tuple(g.apply_dir(pid, d) for d in external_dirs(h, 2)), pid)
        home[p] = h
        pose[p] = rnd.choice(sorted(looks.values()))
    return State(params, home, pose)


def random_reassembly(params: PuzzleParams, rnd: random.Random) -> State:
    """Cubies shuffled within their classes, each given a random outward-facing pose."""
    from .classification import class_table
    g = geometry(params.n, params.k)
    table = class_table(params)
    home, pose = {}, {}
    for cid in table.classes:
        members = list(table.members(cid))
        homes = list(members)
        rnd.shuffle(homes)
        for p, h in zip(members, homes):
            want = sorted(external_dirs(p, params.k))
            hd = external_dirs(h, params.k)
            options = [pid for pid in range(len(g.poses))
                       if sorted(g.apply_dir(pid, d) for d in hd) == want]
            home[p] = h
            pose[p] = rnd.choice(options)
    return State(params, home, pose)


@dataclass
class VerifyReport:
    samples: int
    mismatches: int
    agree_true: int
    agree_false: int


def verify_completeness_small(params: PuzzleParams, samples: int, seed: int = 0,
                              orbits: Optional[PocketReport] = None) -> VerifyReport:
    from .invariants import reachable
    if (params.n, params.k) != (3, 2):
        raise UnsupportedParams("completeness check is limited to n=3, k=2")
    orbits = orbits or pocket_orbits()
    rnd = random.Random(seed)
    mism = agree_t = agree_f = 0
    for i in range(samples):
        a = random_pocket_state(rnd)
        b = random_pocket_state(rnd) if i % 2 else _scramble_pocket(a, rnd)
        truth = orbits.labels[pocket_index(a)] == orbits.labels[pocket_index(b)]
        verdict = reachable(a, b)
        if verdict != truth:
            mism += 1
        elif verdict:
            agree_t += 1
        else:
            agree_f += 1
    return VerifyReport(samples, mism, agree_t, agree_f)


def _scramble_pocket(s: State, rnd: random.Random) -> State:
    from .puzzle_core import Move, apply_sequence
    moves = [Move(*rnd.sample((1, 2, 3), 2), (rnd.randrange(2),)) for _ in range(30)]
    return apply_sequence(s, moves)
