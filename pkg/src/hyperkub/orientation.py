"""Reference poses, orientation permutations and transitions.

Orientation faces of a class are numbered by the boundary axes of the root
position (1..m).  The reference pose of a position is the pose a cubie picks
up when it is carried there from the root with identity pose, along the
first-visit tree of a breadth-first search over atomic moves.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from .classification import (ClassId, class_of, class_table, cluster_of, canonical_position,
                             is_alternating_cluster_class)
from .group_kernel import Perm, SignedPerm, perm_sign
from .puzzle_core import Move, MoveSeq, PuzzleParams, Position, State, external_dirs, geometry


class ClassMismatch(ValueError):
    pass


class NoOrientation(ValueError):
    pass


class NotDisplaced(ValueError):
    pass


@dataclass(frozen=True)
class ReferenceAtlas:
    params: PuzzleParams
    class_id: ClassId
    root: Position
    faces: tuple[int, ...]
    pose: dict = field(repr=False)
    parent: dict = field(repr=False)

    def reference_pose(self, pos: Position) -> SignedPerm:
        return geometry(self.params.n, self.params.k).signed_perm(self.pose[pos])

    def transport(self, pos: Position) -> MoveSeq:
        """Moves carrying a cubie from the root to ``pos`` along the atlas tree."""
        out = []
        while pos != self.root:
            prev, mv = self.parent[pos]
            out.append(mv)
            pos = prev
        return MoveSeq(tuple(reversed(out)))

    def domain(self) -> frozenset:
        return frozenset(self.pose)


@lru_cache(maxsize=None)
def build_reference_atlas(params: PuzzleParams, class_id: ClassId) -> ReferenceAtlas:
    g = geometry(params.n, params.k)
    root = canonical_position(class_id, params.k)
    pose = {root: g.identity_pose}
    parent = {}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for mv in g.moves_at(x):
            y = g.move_target(x, mv.i, mv.j)
            if y not in pose:
                pose[y] = g.mul(g.rotation_id(mv.i, mv.j), pose[x])
                parent[y] = (x, mv)
                queue.append(y)
    return ReferenceAtlas(params, class_id, root, external_dirs(root, params.k), pose, parent)


def _check(atlas: ReferenceAtlas, pos: Position):
    if atlas.class_id.m < 2:
        raise NoOrientation("cubies with one boundary coordinate carry no orientation")
    if pos not in atlas.pose:
        raise ClassMismatch(f"{pos} is not in class {atlas.class_id}")


def face_perm(atlas: ReferenceAtlas, pid: int) -> Perm:
    """Permutation of numbered faces induced by a pose that preserves the root faces."""
    g = geometry(atlas.params.n, atlas.params.k)
    faces = atlas.faces
    index = {d: i for i, d in enumerate(faces, 1)}
    return Perm(tuple(index[g.apply_dir(pid, d)] for d in faces))


def _phi_pose(atlas: ReferenceAtlas, ref_home: Position, pose_id: int, pos: Position) -> int:
    g = geometry(atlas.params.n, atlas.params.k)
    t = g.mul(g.inv(atlas.pose[ref_home]), g.inv(pose_id))
    return g.mul(t, atlas.pose[pos])


def orientation_permutation(atlas: ReferenceAtlas, state: State, pos: Position) -> Perm:
    """phi for the cubie at ``pos``, with faces numbered through the cubie's own home."""
    _check(atlas, pos)
    home = state.home_at(pos)
    if home not in atlas.pose:
        raise ClassMismatch(f"cubie {home} is not in class {atlas.class_id}")
    return face_perm(atlas, _phi_pose(atlas, home, state.pose_id_at(pos), pos))


@lru_cache(maxsize=None)
def cluster_representative(params: PuzzleParams, home: Position) -> Position:
    cl = cluster_of(params, home)
    table = class_table(params)
    return min(p for p in table.members(cl.class_id) if cluster_of(params, p) == cl)


def colored_orientation(atlas: ReferenceAtlas, state: State, pos: Position) -> Perm:
    """phi with faces numbered by color, so identical cubies are interchangeable."""
    _check(atlas, pos)
    rep = cluster_representative(atlas.params, state.home_at(pos))
    return face_perm(atlas, _phi_pose(atlas, rep, state.pose_id_at(pos), pos))


def transition_alpha(atlas: ReferenceAtlas, move: Move, pos: Position) -> Perm:
    """Orientation picked up by a correctly oriented cubie at ``pos`` under ``move``."""
    _check(atlas, pos)
    g = geometry(atlas.params.n, atlas.params.k)
    move.check(atlas.params)
    if move.slice != tuple(pos[a - 1] for a in range(1, atlas.params.n + 1)
                           if a not in (move.i, move.j)):
        raise NotDisplaced(f"{move} does not act on {pos}")
    dst = g.move_target(pos, move.i, move.j)
    if dst == pos:
        raise NotDisplaced(f"{move} leaves {pos} in place")
    r = g.rotation_id(move.i, move.j)
    a = g.mul(g.mul(g.inv(atlas.pose[pos]), g.inv(r)), atlas.pose[dst])
    return face_perm(atlas, a)


def simplified_orientation(atlas: ReferenceAtlas, state: State, pos: Position) -> int:
    """1 when the cubie can be carried to the root and show its colors correctly."""
    _check(atlas, pos)
    if not is_alternating_cluster_class(atlas.params, atlas.class_id):
        raise NoOrientation(f"class {atlas.class_id} has no alternating clusters")
    return 1 if perm_sign(colored_orientation(atlas, state, pos)) == 1 else 0


def atlas_for(params: PuzzleParams, pos: Position) -> ReferenceAtlas:
    return build_reference_atlas(params, class_of(params, pos))


def carried_pose(atlas: ReferenceAtlas, src: Position, dst: Position) -> SignedPerm:
    """Rotation taking the reference pose at ``src`` to the one at ``dst``."""
    g = geometry(atlas.params.n, atlas.params.k)
    return g.signed_perm(g.mul(atlas.pose[dst], g.inv(atlas.pose[src])))
