"""Constructive solving: careful 3-cycles, parity tuning and orientation fixes.

A careful combination changes only a declared set of cubies.  Every routine
here is built from conjugates and commutators of atomic moves and is checked
by simulation before it is used.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Optional

import numpy as np

from .classification import (ClassId, canonical_position, class_table, cluster_of,
                             dependent_group, is_alternating_cluster_class, is_frame_class,
                             is_unique_class)
from .group_kernel import Perm, tuple_sign
from .invariants import check_pair, invariant_vector
from .orientation import (_phi_pose, build_reference_atlas, face_perm, orientation_permutation,
                          simplified_orientation)
from .puzzle_core import (Board, Move, MoveSeq, Position, PuzzleParams, State,
                          colored_state_equal, compact_inverse, expand_layer_move, geometry)

STAGES = ("Frame", "CentralParity", "EdgeParity", "Placement", "ClusterOrient", "Orient")


class IncompatibleInvariants(ValueError):
    def __init__(self, components: list[str]):
        super().__init__("invariants differ: " + ", ".join(components))
        self.components = components


class SolverError(RuntimeError):
    pass


@dataclass
class SolvePlan:
    stages: list[tuple[str, MoveSeq]] = field(default_factory=list)

    def add(self, tag: str, seq: MoveSeq):
        if tag not in STAGES:
            raise ValueError(f"unknown stage {tag}")
        if len(seq):
            if self.stages and self.stages[-1][0] == tag:
                self.stages[-1] = (tag, self.stages[-1][1] + seq)
            else:
                self.stages.append((tag, seq))

    @property
    def sequence(self) -> MoveSeq:
        out = MoveSeq()
        for _, seq in self.stages:
            out = out + seq
        return out

    def lengths(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for tag, seq in self.stages:
            out[tag] = out.get(tag, 0) + len(seq)
        return out

    def __len__(self):
        return sum(len(s) for _, s in self.stages)


def conjugate(p: MoveSeq, q: MoveSeq) -> MoveSeq:
    """p q p^-1."""
    return p + q + compact_inverse(p)


def commutator(p: MoveSeq, q: MoveSeq) -> MoveSeq:
    """p q p^-1 q^-1."""
    return p + q + compact_inverse(p) + compact_inverse(q)


# ---------------------------------------------------------------------------
# Vectorized move algebra
# ---------------------------------------------------------------------------

class _Engine:
    """Moves as (destination, rotation) arrays over the external positions."""

    def __init__(self, params: PuzzleParams):
        n, k = params.n, params.k
        g = geometry(n, k)
        self.params = params
        self.g = g
        self.positions = g.positions
        self.index = {p: i for i, p in enumerate(g.positions)}
        self.ident = g.identity_pose
        self.mul = self._mul_table(g)
        self.inv = np.argmax(self.mul == self.ident, axis=1).astype(self.mul.dtype)
        self.moves = [Move(i, j, sl) for i in range(1, n + 1) for j in range(1, n + 1) if i != j
                      for sl in product(range(k), repeat=n - 2)]
        self.move_index = {m: t for t, m in enumerate(self.moves)}
        size = len(g.positions)
        dest = np.tile(np.arange(size, dtype=np.int32), (len(self.moves), 1))
        rot = np.full((len(self.moves), size), self.ident, dtype=self.mul.dtype)
        for t, m in enumerate(self.moves):
            r = g.rotation_id(m.i, m.j)
            for src, dst in g.move_pairs(m.i, m.j, m.slice):
                dest[t, self.index[src]] = self.index[dst]
                rot[t, self.index[src]] = r
        self.dest = dest
        self.rot = rot
        self.supp = (dest != np.arange(size)) | (rot != self.ident)

    @staticmethod
    def _mul_table(g) -> np.ndarray:
        ps = np.array(g.poses, dtype=np.int64)
        n = ps.shape[1]
        sign = np.sign(ps)
        col = np.abs(ps) - 1
        # (a o b)[x] = sign(b[x]) * a[|b[x]|]
        comp = sign[None, :, :] * ps[np.arange(len(ps))[:, None, None], col[None, :, :]]
        base = (2 * n + 1) ** np.arange(n)
        keys = (ps + n) @ base
        order = np.argsort(keys)
        found = np.searchsorted(keys[order], (comp + n) @ base)
        dtype = np.int16 if len(ps) < 2 ** 15 else np.int32
        return order[found].astype(dtype)

    def identity(self):
        size = len(self.positions)
        return (np.arange(size, dtype=np.int32), np.full(size, self.ident, dtype=self.mul.dtype))

    def then(self, t1, t2):
        d1, r1 = t1
        d2, r2 = t2
        return d2[d1], self.mul[r2[d1], r1]

    def transform(self, seq) -> tuple:
        d, r = self.identity()
        for m in seq:
            t = self.move_index[m]
            md, mr = self.dest[t], self.rot[t]
            d, r = md[d], self.mul[mr[d], r]
        return d, r

    def support(self, t) -> np.ndarray:
        d, r = t
        return np.nonzero((d != np.arange(len(d))) | (r != self.ident))[0]


@lru_cache(maxsize=None)
def _engine(params: PuzzleParams) -> _Engine:
    return _Engine(params)


# ---------------------------------------------------------------------------
# Careful 3-cycles
# ---------------------------------------------------------------------------

class _ClassKit:
    """Base 3-cycle of one class plus setup tables reaching every ordered triple."""

    def __init__(self, params: PuzzleParams, class_id: ClassId):
        self.params = params
        self.class_id = class_id
        eng = _engine(params)
        self.eng = eng
        self.members = class_table(params).members(class_id)
        self.gidx = np.array([eng.index[p] for p in self.members], dtype=np.int64)
        self.local = {p: i for i, p in enumerate(self.members)}
        self.base, self.triple = self._find_base()
        self._setup_tables()

    def _find_base(self):
        eng = self.eng
        in_class = np.zeros(len(eng.positions), dtype=bool)
        in_class[self.gidx] = True
        root = eng.index[canonical_position(self.class_id, self.params.k)]
        first = [t for t in range(len(eng.moves)) if eng.supp[t, root]]
        supp_f = eng.supp.astype(np.int32)
        tried = set()
        for ta in first:
            for tb in range(len(eng.moves)):
                a, b = eng.moves[ta], eng.moves[tb]
                if tb == ta or not (eng.supp[ta] & eng.supp[tb]).any():
                    continue
                x = MoveSeq((a, b, a.inverse_move(), b.inverse_move()))
                tx = eng.transform(x)
                sx = eng.support(tx)
                if len(sx) == 0 or not in_class[sx].any():
                    continue
                key = (tuple(sx), tuple(tx[0][sx]), tuple(tx[1][sx]))
                if key in tried:
                    continue
                tried.add(key)
                overlap = supp_f[:, sx].sum(axis=1)
                for tc in np.nonzero(overlap == 1)[0]:
                    hit = sx[eng.supp[tc, sx]][0]
                    if not in_class[hit]:
                        continue
                    c = eng.moves[tc]
                    w = x + MoveSeq((c,)) + compact_inverse(x) + MoveSeq((c.inverse_move(),))
                    cyc = self._as_three_cycle(w)
                    if cyc is not None:
                        return w, cyc
        raise SolverError(f"no base 3-cycle found for class {self.class_id}")

    def _as_three_cycle(self, w: MoveSeq):
        eng = self.eng
        d, r = eng.transform(w)
        moved = np.nonzero(d != np.arange(len(d)))[0]
        if len(moved) != 3 or set(eng.support((d, r))) != set(moved):
            return None
        x = int(moved[0])
        y = int(d[x])
        z = int(d[y])
        if int(d[z]) != x:
            return None
        return x, y, z

    def _setup_tables(self):
        eng = self.eng
        size = len(self.members)
        lookup = np.full(len(eng.positions), -1, dtype=np.int64)
        lookup[self.gidx] = np.arange(size)
        perms = []
        seen = set()
        for t in range(len(eng.moves)):
            local = lookup[eng.dest[t][self.gidx]]
            key = local.tobytes()
            if key in seen or (local == np.arange(size)).all():
                continue
            seen.add(key)
            perms.append((t, local))
        self.size = size
        total = size ** 3
        parent = np.full(total, -1, dtype=np.int64)
        pmove = np.full(total, -1, dtype=np.int32)
        x, y, z = (int(lookup[v]) for v in self.triple)
        start = (x * size + y) * size + z
        parent[start] = start
        frontier = np.array([start], dtype=np.int64)
        while frontier.size:
            a, rest = np.divmod(frontier, size * size)
            b, c = np.divmod(rest, size)
            found = []
            for t, local in perms:
                nxt = (local[a] * size + local[b]) * size + local[c]
                fresh = parent[nxt] == -1
                if not fresh.any():
                    continue
                nxt, src = nxt[fresh], frontier[fresh]
                parent[nxt] = src
                pmove[nxt] = t
                found.append(nxt)
            frontier = np.unique(np.concatenate(found)) if found else np.empty(0, dtype=np.int64)
        self.parent = parent
        self.pmove = pmove
        self.start = start

    def setup_to(self, a: Position, b: Position, c: Position) -> MoveSeq:
        """Moves carrying the base triple onto (a, b, c)."""
        size = self.size
        code = (self.local[a] * size + self.local[b]) * size + self.local[c]
        if self.parent[code] == -1:
            raise SolverError(f"triple {a},{b},{c} cannot be reached in class {self.class_id}")
        out = []
        while code != self.start:
            out.append(self.eng.moves[int(self.pmove[code])])
            code = int(self.parent[code])
        return MoveSeq(tuple(reversed(out)))

    def cycle(self, a: Position, b: Position, c: Position) -> MoveSeq:
        """Cubie at a goes to b, b to c, c to a; nothing else changes."""
        v = self.setup_to(a, b, c)
        return compact_inverse(v) + self.base + v


@lru_cache(maxsize=None)
def _class_kit(params: PuzzleParams, class_id: ClassId) -> _ClassKit:
    return _ClassKit(params, class_id)


def _require_class(params: PuzzleParams, class_id: ClassId, positions):
    members = set(class_table(params).members(class_id))
    for p in positions:
        if p not in members:
            raise ValueError(f"{p} is not in class {class_id}")
    if is_frame_class(params, class_id):
        raise ValueError("frame cubies are placed by central-slice turns, not 3-cycles")


def three_cycle(state: State, class_id: ClassId, pos_a: Position, pos_b: Position,
                pos_c: Position) -> MoveSeq:
    """Careful 3-cycle moving the cubie at A to B, B to C and C to A."""
    params = state.params
    pts = [tuple(pos_a), tuple(pos_b), tuple(pos_c)]
    if len(set(pts)) != 3:
        raise ValueError("three distinct positions are required")
    _require_class(params, class_id, pts)
    return _class_kit(params, class_id).cycle(*pts)


def _cycles_for(kit: _ClassKit, mapping: dict) -> list[MoveSeq]:
    """3-cycles realizing ``mapping`` (current position -> destination), greedy left to right."""
    where = dict(mapping)
    holder = {dst: src for src, dst in where.items()}
    # holder[t]: position currently holding the cubie that must end at t
    free = sorted(mapping)
    out = []
    for t in sorted(mapping):
        p = holder[t]
        free.remove(t)
        if p == t:
            continue
        r = next((q for q in free if q != p), None)
        if r is None:
            raise SolverError("odd permutation left after even decomposition")
        out.append(kit.cycle(p, t, r))
        # cubies: p -> t, t -> r, r -> p
        at_t, at_r = where.pop(t), where.pop(r)
        where.pop(p)
        where[r] = at_t
        where[p] = at_r
        holder = {dst: src for src, dst in where.items()}
    return out


def permute_class_even(state: State, class_id: ClassId, target: Perm) -> MoveSeq:
    """Move the cubie at member i to member target(i) (members in sorted order)."""
    params = state.params
    members = class_table(params).members(class_id)
    if len(target.images) != len(members):
        raise ValueError("target must act on the class members")
    if tuple_sign(tuple(v - 1 for v in target.images)) == -1:
        raise ValueError("target permutation is odd")
    if target.images == tuple(range(1, len(members) + 1)):
        return MoveSeq()
    _require_class(params, class_id, members)
    kit = _class_kit(params, class_id)
    mapping = {members[i]: members[v - 1] for i, v in enumerate(target.images)}
    out = MoveSeq()
    for seq in _cycles_for(kit, mapping):
        out = out + seq
    return out


# ---------------------------------------------------------------------------
# Parity tuning
# ---------------------------------------------------------------------------

@dataclass
class ParityFix:
    moves: MoveSeq
    relabel: bool = False


def _central_class(params: PuzzleParams, m: int) -> ClassId:
    return ClassId(m, (params.center,) * (params.n - m))


def central_layer_turn(params: PuzzleParams, m: int) -> MoveSeq:
    """Quarter turn of the external (n-m+1)-layer through the origin corner."""
    t = params.n - m + 1
    fixed = {a: 0 for a in range(t + 1, params.n + 1)}
    return expand_layer_move(params, range(1, t + 1), fixed, 1, 2)


def tune_parity(state: State, target, *, central_m: Optional[int] = None,
                class_id: Optional[ClassId] = None) -> ParityFix:
    """Parity adjustment for one class so its remaining placement is even."""
    params = state.params
    if central_m is not None:
        if params.k % 2 == 0:
            raise ValueError("central classes exist only for odd k")
        cid = _central_class(params, central_m)
        if _unique_parity(state, target, cid) == 1:
            return ParityFix(MoveSeq())
        return ParityFix(central_layer_turn(params, central_m))
    if class_id is None:
        raise ValueError("give central_m or class_id")
    if is_unique_class(params, class_id):
        if _unique_parity(state, target, class_id) == 1:
            return ParityFix(MoveSeq())
        if class_id.m == params.n and params.k % 2 == 0:
            return ParityFix(MoveSeq((Move(1, 2, (0,) * (params.n - 2)),)))
        raise SolverError(f"class {class_id} has odd parity and no tuning turn")
    sigma = _assignment(state, target, class_id)
    if _mapping_sign(sigma) == 1:
        return ParityFix(MoveSeq())
    if _relabel(state, target, class_id, sigma) is not None:
        return ParityFix(MoveSeq(), relabel=True)
    fix = _edge_parity_moves(state, target, [class_id])
    return ParityFix(fix)


def _mapping_sign(mapping: dict) -> int:
    keys = sorted(mapping)
    index = {p: i for i, p in enumerate(keys)}
    return tuple_sign(tuple(index[mapping[p]] for p in keys))


def _unique_parity(state: State, target: State, cid: ClassId) -> int:
    where = target.where_is()
    members = class_table(state.params).members(cid)
    return _mapping_sign({p: where[state.home_at(p)] for p in members})


def _cubie_key(state: State, cid: ClassId, pos: Position, atlas):
    key = cluster_of(state.params, state.home_at(pos))
    if atlas is not None:
        return key, simplified_orientation(atlas, state, pos)
    return key, None


def _assignment(state: State, target: State, cid: ClassId) -> dict:
    """Current position -> target position, pairing identical compatible cubies."""
    params = state.params
    members = class_table(params).members(cid)
    if is_unique_class(params, cid):
        where = target.where_is()
        return {p: where[state.home_at(p)] for p in members}
    atlas = build_reference_atlas(params, cid) if is_alternating_cluster_class(params, cid) else None
    cur = {p: _cubie_key(state, cid, p, atlas) for p in members}
    tgt = {p: _cubie_key(target, cid, p, atlas) for p in members}
    out = {}
    open_src: dict = {}
    open_dst: dict = {}
    for p in members:
        if cur[p] == tgt[p]:
            out[p] = p
        else:
            open_src.setdefault(cur[p], []).append(p)
            open_dst.setdefault(tgt[p], []).append(p)
    for key, srcs in open_src.items():
        dsts = open_dst.get(key, [])
        if len(dsts) != len(srcs):
            raise SolverError(f"class {cid}: cubie kinds do not match the target")
        out.update(zip(srcs, dsts))
    if len(out) != len(members):
        raise SolverError(f"class {cid}: cubie kinds do not match the target")
    return out


def _relabel(state: State, target: State, cid: ClassId, sigma: dict) -> Optional[dict]:
    """Swap the destinations of two interchangeable cubies, or None if impossible."""
    params = state.params
    atlas = build_reference_atlas(params, cid) if is_alternating_cluster_class(params, cid) else None
    groups: dict = {}
    for p in sorted(sigma):
        groups.setdefault(_cubie_key(state, cid, p, atlas), []).append(p)
    for key in sorted(groups, key=str):
        ps = groups[key]
        if len(ps) >= 2:
            a, b = ps[0], ps[1]
            out = dict(sigma)
            out[a], out[b] = sigma[b], sigma[a]
            return out
    return None


def _blocked_classes(params: PuzzleParams, state: State) -> list[ClassId]:
    out = []
    for cid in class_table(params).classes:
        if is_unique_class(params, cid) or not is_alternating_cluster_class(params, cid):
            continue
        atlas = build_reference_atlas(params, cid)
        keys = [_cubie_key(state, cid, p, atlas) for p in class_table(params).members(cid)]
        if len(set(keys)) == len(keys):
            out.append(cid)
    return out


def _edge_parity_moves(state: State, target: State, classes: list[ClassId]) -> MoveSeq:
    """Moves avoiding unique classes that make each listed class's forced placement even."""
    params = state.params
    need = 0
    for bit, cid in enumerate(classes):
        if _mapping_sign(_assignment(state, target, cid)) == -1:
            need |= 1 << bit
    if need == 0:
        return MoveSeq()
    k = params.k
    safe = {0, k - 1} | ({params.center} if k % 2 else set())
    eng = _engine(params)
    effects = {}
    for t, m in enumerate(eng.moves):
        if all(v in safe for v in m.slice):
            continue
        vec = 0
        for bit, cid in enumerate(classes):
            members = class_table(params).members(cid)
            mapping = {p: eng.positions[eng.dest[t][eng.index[p]]] for p in members}
            if _mapping_sign(mapping) == -1:
                vec |= 1 << bit
        if vec and vec not in effects:
            effects[vec] = m
    # breadth-first over xor combinations gives the fewest moves
    prev = {0: None}
    queue = deque([0])
    while queue and need not in prev:
        v = queue.popleft()
        for vec, m in effects.items():
            w = v ^ vec
            if w not in prev:
                prev[w] = (v, m)
                queue.append(w)
    if need not in prev:
        raise SolverError("edge parity cannot be tuned with inner turns")
    out = []
    v = need
    while prev[v] is not None:
        v, m = prev[v]
        out.append(m)
    return MoveSeq(tuple(out))


# ---------------------------------------------------------------------------
# Orientation
# ---------------------------------------------------------------------------

def _face_map(g, pid: int, dirs) -> tuple:
    return tuple(g.apply_dir(pid, d) for d in dirs)


class _LoopLibrary:
    """Shortest loops at the class root, one per achievable twist of its faces."""

    def __init__(self, params: PuzzleParams, class_id: ClassId):
        g = geometry(params.n, params.k)
        self.params = params
        self.atlas = build_reference_atlas(params, class_id)
        root = self.atlas.root
        faces = self.atlas.faces
        start = (root, g.identity_pose)
        parent = {start: None}
        queue = deque([start])
        loops = {}
        while queue:
            x, pid = queue.popleft()
            for mv in g.moves_at(x):
                st = (g.move_target(x, mv.i, mv.j), g.rot_table(mv.i, mv.j)[pid])
                if st in parent:
                    continue
                parent[st] = ((x, pid), mv)
                queue.append(st)
                if st[0] == root:
                    key = _face_map(g, st[1], faces)
                    if key not in loops and key != faces:
                        loops[key] = st
        self.loops = []
        for key in sorted(loops):
            st = loops[key]
            seq = []
            while parent[st] is not None:
                st, mv = parent[st]
                seq.append(mv)
            self.loops.append(MoveSeq(tuple(reversed(seq))))


@lru_cache(maxsize=None)
def _loop_library(params: PuzzleParams, class_id: ClassId) -> _LoopLibrary:
    return _LoopLibrary(params, class_id)


@dataclass
class _TwistOp:
    loop: MoveSeq
    twist: tuple  # images of the position's outward directions
    support: frozenset


def _twists_at(params: PuzzleParams, class_id: ClassId, pos: Position) -> list[_TwistOp]:
    return list(_twists_cached(params, class_id, pos))


@lru_cache(maxsize=None)
def _twists_cached(params: PuzzleParams, class_id: ClassId, pos: Position):
    lib = _loop_library(params, class_id)
    eng = _engine(params)
    g = eng.g
    v = lib.atlas.transport(pos)
    dirs = g.ext[pos]
    out = []
    seen = set()
    for loop in lib.loops:
        s = compact_inverse(v) + loop + v
        t = eng.transform(s)
        xi = eng.index[pos]
        assert t[0][xi] == xi
        tw = _face_map(g, int(t[1][xi]), dirs)
        if tw in seen or tw == dirs:
            continue
        seen.add(tw)
        supp = frozenset(eng.positions[i] for i in eng.support(t)) - {pos}
        out.append(_TwistOp(s, tw, supp))
    return tuple(out)


def _op_variants(params: PuzzleParams, pos: Position, op: _TwistOp):
    """The loop itself, then copies conjugated by one or two moves that leave ``pos`` alone."""
    yield op
    eng = _engine(params)
    xi = eng.index[pos]
    seen = {op.support}
    free = [u for t, u in enumerate(eng.moves) if not eng.supp[t, xi]]
    conjugators = [MoveSeq((u,)) for u in free]
    conjugators += [MoveSeq((u, v)) for u in free for v in free if u != v.inverse_move()]
    for w in conjugators:
        s = w + op.loop + compact_inverse(w)
        supp = frozenset(eng.positions[i] for i in eng.support(eng.transform(s))) - {pos}
        if supp not in seen:
            seen.add(supp)
            yield _TwistOp(s, op.twist, supp)


def _with_partner(params: PuzzleParams, pos: Position, op: _TwistOp, candidates):
    for var in _op_variants(params, pos, op):
        partner = next((p for p in candidates if p not in var.support and p != pos), None)
        if partner is not None:
            return var, partner
    return None, None


def _compose_twist(dirs, a: tuple, b: tuple) -> tuple:
    """a after b, both given as images of ``dirs``."""
    index = {d: i for i, d in enumerate(dirs)}
    return tuple(a[index[x]] for x in b)


def _invert_twist(dirs, a: tuple) -> tuple:
    out = [0] * len(dirs)
    index = {d: i for i, d in enumerate(dirs)}
    for d, img in zip(dirs, a):
        out[index[img]] = d
    return tuple(out)


def _pair_op(params: PuzzleParams, class_id: ClassId, pos: Position, op: _TwistOp,
             partner: Position, avoid=()) -> MoveSeq:
    """[s, q] twisting ``pos`` by the loop's twist; ``partner`` absorbs the inverse."""
    members = class_table(params).members(class_id)
    if partner in op.support or partner == pos:
        raise SolverError("partner is disturbed by the loop")
    spare = next((b for b in members if b not in op.support and b not in (pos, partner)
                  and b not in avoid), None)
    if spare is None:
        spare = next((b for b in members if b not in op.support and b not in (pos, partner)), None)
    if spare is None:
        raise SolverError(f"no free position for a twist at {pos}")
    q = _class_kit(params, class_id).cycle(pos, spare, partner)
    return commutator(op.loop, q)


def _needed_twist(board: Board, target: State, pos: Position) -> tuple:
    g = board.geom
    cur = board.pose[pos]
    want = target.pose_id_at(pos)
    dirs = g.ext[pos]
    inv = g.inv(cur)
    # colors are home directions; both cubies share them
    return tuple(g.apply_dir(want, g.apply_dir(inv, d)) for d in dirs)


def _twist_word(dirs, gens: list[tuple], goal: tuple) -> Optional[list[int]]:
    """Shortest product of generator twists equal to ``goal`` (applied left to right)."""
    start = tuple(dirs)
    prev = {start: None}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        if x == goal:
            break
        for i, gtw in enumerate(gens):
            y = _compose_twist(dirs, gtw, x)
            if y not in prev:
                prev[y] = (x, i)
                queue.append(y)
    if goal not in prev:
        return None
    out = []
    x = goal
    while prev[x] is not None:
        x, i = prev[x]
        out.append(i)
    return list(reversed(out))


def _commutator_pair(dirs, elems: list[tuple], goal: tuple):
    for a in range(len(elems)):
        for b in range(len(elems)):
            x, y = elems[a], elems[b]
            c = _compose_twist(dirs, x, _compose_twist(dirs, y, _compose_twist(
                dirs, _invert_twist(dirs, x), _invert_twist(dirs, y))))
            if c == goal:
                return a, b
    return None


def _orient_sink(params: PuzzleParams, class_id: ClassId, pos: Position, goal: tuple,
                 partners: list[Position]) -> MoveSeq:
    """Twist one cubie by a commutator element through [y^-1, x^-1]."""
    g = geometry(params.n, params.k)
    dirs = g.ext[pos]
    ops = _twists_at(params, class_id, pos)
    pair = _commutator_pair(dirs, [op.twist for op in ops], goal)
    if pair is None:
        raise SolverError(f"twist {goal} at {pos} is not a single commutator")
    x_op, px = _with_partner(params, pos, ops[pair[0]], partners)
    y_op, py = (None, None) if px is None else _with_partner(
        params, pos, ops[pair[1]], [p for p in partners if p != px])
    if px is None or py is None:
        raise SolverError(f"not enough partners for a single twist at {pos}")
    x = _pair_op(params, class_id, pos, x_op, px, avoid=(py,))
    y = _pair_op(params, class_id, pos, y_op, py, avoid=(px,))
    return compact_inverse(y) + compact_inverse(x) + y + x


def _orient_class(board: Board, target: State, class_id: ClassId) -> MoveSeq:
    params = board.params
    g = board.geom
    members = class_table(params).members(class_id)
    order = [p for p in members if board.appearance(p) != target.appearance(p)]
    if not order:
        return MoveSeq()
    out = MoveSeq()
    done: list[Position] = [p for p in members if p not in order]
    for idx, pos in enumerate(order[:-1]):
        goal = _needed_twist(board, target, pos)
        dirs = g.ext[pos]
        if goal != dirs:
            ops = _twists_at(params, class_id, pos)
            word = _twist_word(dirs, [op.twist for op in ops], goal)
            if word is None:
                raise SolverError(f"twist {goal} at {pos} is outside the rotation group")
            later = order[idx + 1:]
            for i in word:
                op, partner = _with_partner(params, pos, ops[i], list(reversed(later)))
                if partner is None:
                    raise SolverError(f"no partner for a twist at {pos}")
                seq = _pair_op(params, class_id, pos, op, partner)
                board.apply_seq(seq)
                out = out + seq
        done.append(pos)
    sink = order[-1]
    goal = _needed_twist(board, target, sink)
    if goal != g.ext[sink]:
        seq = _orient_sink(params, class_id, sink, goal, done)
        board.apply_seq(seq)
        out = out + seq
    return out


def _check_twist_group(params: PuzzleParams, pos: Position, z: Perm):
    from .classification import class_of
    cid = class_of(params, pos)
    if cid.m < 2:
        raise ValueError("cubies with one outward face cannot be twisted")
    group = dependent_group(params, cid)
    if not group.contains(z):
        raise ValueError(f"{z} is not in the rotation group {group}")
    return cid, group


def _twist_realizing(state: State, cid: ClassId, pos: Position, z: Perm, ops) -> Optional[list[int]]:
    """Word in the twist ops at ``pos`` after which phi becomes z.phi."""
    params = state.params
    g = state.geometry
    atlas = build_reference_atlas(params, cid)
    phi = orientation_permutation(atlas, state, pos)
    goal_phi = Perm(tuple(z.images[phi.images[i] - 1] for i in range(len(phi.images))))
    dirs = g.ext[pos]
    home = state.home_at(pos)
    pid = state.pose_id_at(pos)
    # find the world twist w with phi(w o pose) = goal
    goal = None
    for w in range(len(g.poses)):
        if any(g.apply_dir(w, d) not in dirs for d in dirs):
            continue
        new = g.mul(w, pid)
        if face_perm(atlas, _phi_pose(atlas, home, new, pos)) == goal_phi:
            goal = _face_map(g, w, dirs)
            break
    if goal is None:
        return None
    if goal == dirs:
        return []
    return _twist_word(dirs, [op.twist for op in ops], goal)


def orient_pair(state: State, pos_a: Position, pos_b: Position, z: Perm) -> MoveSeq:
    """Turn cubie A's orientation permutation into z.phi; cubie B compensates."""
    params = state.params
    pos_a, pos_b = tuple(pos_a), tuple(pos_b)
    cid, group = _check_twist_group(params, pos_a, z)
    if pos_b not in class_table(params).members(cid) or pos_b == pos_a:
        raise ValueError("partner must be another cubie of the same class")
    if z.images == tuple(range(1, len(z.images) + 1)):
        return MoveSeq()
    ops = _twists_at(params, cid, pos_a)
    word = _twist_realizing(state, cid, pos_a, z, ops)
    if word is None:
        raise SolverError(f"{z} cannot be realized at {pos_a}")
    out = MoveSeq()
    for i in word:
        op, partner = _with_partner(params, pos_a, ops[i], [pos_b])
        if partner is None:
            raise SolverError(f"{pos_b} cannot serve as partner for {pos_a}")
        out = out + _pair_op(params, cid, pos_a, op, pos_b)
    return out


def orient_by_commutant(state: State, pos: Position, z: Perm) -> MoveSeq:
    """Turn one cubie's orientation permutation into z.phi and change nothing else."""
    params = state.params
    pos = tuple(pos)
    cid, group = _check_twist_group(params, pos, z)
    if not group.in_commutant(z):
        raise ValueError(f"{z} is outside the commutant of {group}")
    if z.images == tuple(range(1, len(z.images) + 1)):
        return MoveSeq()
    g = state.geometry
    atlas = build_reference_atlas(params, cid)
    phi = orientation_permutation(atlas, state, pos)
    goal_phi = Perm(tuple(z.images[phi.images[i] - 1] for i in range(len(phi.images))))
    dirs = g.ext[pos]
    home = state.home_at(pos)
    pid = state.pose_id_at(pos)
    for w in range(len(g.poses)):
        if any(g.apply_dir(w, d) not in dirs for d in dirs):
            continue
        if face_perm(atlas, _phi_pose(atlas, home, g.mul(w, pid), pos)) == goal_phi:
            goal = _face_map(g, w, dirs)
            break
    else:
        raise SolverError(f"{z} cannot be realized at {pos}")
    others = [p for p in class_table(params).members(cid) if p != pos]
    return _orient_sink(params, cid, pos, goal, others)


# ---------------------------------------------------------------------------
# Full solve
# ---------------------------------------------------------------------------

def _solve_frame(board: Board, target: State) -> MoveSeq:
    params = board.params
    n, c = params.n, params.center
    slots = []
    for a in range(1, n + 1):
        for v in (0, params.k - 1):
            p = [c] * n
            p[a - 1] = v
            slots.append(tuple(p))
    g = board.geom
    moves = [Move(i, j, (c,) * (n - 2)) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    index = {p: s for s, p in enumerate(slots)}
    perms = [tuple(index[g.move_target(p, m.i, m.j)] for p in slots) for m in moves]
    start = tuple(board.home[p] for p in slots)
    goal = tuple(target.home_at(p) for p in slots)
    prev = {start: None}
    queue = deque([start])
    while queue and goal not in prev:
        cur = queue.popleft()
        for m, perm in zip(moves, perms):
            nxt = [None] * len(slots)
            for s, t in enumerate(perm):
                nxt[t] = cur[s]
            nxt = tuple(nxt)
            if nxt not in prev:
                prev[nxt] = (cur, m)
                queue.append(nxt)
    if goal not in prev:
        raise SolverError("frame arrangement is not reachable")
    out = []
    x = goal
    while prev[x] is not None:
        x, m = prev[x]
        out.append(m)
    seq = MoveSeq(tuple(reversed(out)))
    board.apply_seq(seq)
    return seq


def _unique_parity_board(board: Board, target: State, cid: ClassId) -> int:
    return _unique_parity(board.freeze(), target, cid)


def solve(source: State, target: State) -> SolvePlan:
    """Move sequence, split by stage, taking ``source`` to a state colored like ``target``."""
    check_pair(source, target)
    va, vb = invariant_vector(source), invariant_vector(target)
    if va != vb:
        raise IncompatibleInvariants(va.diff(vb))
    params = source.params
    plan = SolvePlan()
    board = source.board()
    table = class_table(params)
    odd = params.k % 2 == 1

    if odd:
        plan.add("Frame", _solve_frame(board, target))
        for m in range(2, params.n):
            cid = _central_class(params, m)
            if _unique_parity_board(board, target, cid) == -1:
                seq = central_layer_turn(params, m)
                board.apply_seq(seq)
                plan.add("CentralParity", seq)
                if _unique_parity_board(board, target, cid) == -1:
                    raise SolverError(f"layer turn did not fix parity of class {cid}")
    else:
        corners = ClassId(params.n, ())
        if _unique_parity_board(board, target, corners) == -1:
            seq = MoveSeq((Move(1, 2, (0,) * (params.n - 2)),))
            board.apply_seq(seq)
            plan.add("CentralParity", seq)

    state = board.freeze()
    blocked = _blocked_classes(params, state)
    if blocked:
        seq = _edge_parity_moves(state, target, blocked)
        board.apply_seq(seq)
        plan.add("EdgeParity", seq)

    state = board.freeze()
    for cid in table.classes:
        if is_frame_class(params, cid):
            continue
        sigma = _assignment(state, target, cid)
        if _mapping_sign(sigma) == -1:
            sigma = _relabel(state, target, cid, sigma)
            if sigma is None:
                raise SolverError(f"class {cid} is left with odd parity")
        if all(p == q for p, q in sigma.items()):
            continue
        kit = _class_kit(params, cid)
        for seq in _cycles_for(kit, sigma):
            board.apply_seq(seq)
            plan.add("Placement", seq)
    for cid in table.classes:
        if cid.m < 2:
            continue
        plan.add("Orient", _orient_class(board, target, cid))
    if not colored_state_equal(board.freeze(), target):
        raise SolverError("plan does not reach the target")
    return plan
