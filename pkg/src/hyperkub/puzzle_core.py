"""Puzzle state, the layer-rotation operator and physical reassembly edits.

Positions are tuples of interval indices ``0..k-1``; axes are 1-based in every
public signature.  A cubie is identified by its home position.  Directions are
encoded as signed 1-based axes: ``-a`` is the outward normal of the side
``x_a = 0``, ``+a`` the one of ``x_a = k-1``.

Only external cubies are stored.  Poses are kept as integer ids into the
table of proper signed permutations of the instance; :class:`SignedPerm`
objects appear at the API boundary.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from typing import Iterable, Mapping, Sequence, Union

from .group_kernel import SignedPerm, tuple_sign

Position = tuple[int, ...]


class InvalidReassembly(ValueError):
    pass


class ParamsMismatch(ValueError):
    pass


class MoveError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class PuzzleParams:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 3 or self.k < 2:
            raise ValueError(f"need n >= 3 and k >= 2, got n={self.n}, k={self.k}")

    @property
    def M(self) -> range:
        return range(self.k)

    @property
    def F(self) -> range:
        return range(1, self.k - 1)

    @property
    def L(self) -> range:
        return range(1, (self.k - 1) // 2 + 1)

    @property
    def center(self):
        """Central interval index for odd ``k``, else ``None``."""
        return (self.k - 1) // 2 if self.k % 2 else None


def opposite_index(params: PuzzleParams, p: int) -> int:
    if not 0 <= p < params.k:
        raise ValueError(f"interval index {p} outside 0..{params.k - 1}")
    return params.k - 1 - p


def external_dirs(pos: Sequence[int], k: int) -> tuple[int, ...]:
    out = []
    for a, x in enumerate(pos, 1):
        if x == 0:
            out.append(-a)
        elif x == k - 1:
            out.append(a)
    return tuple(out)


def is_external(pos: Sequence[int], k: int) -> bool:
    return any(x == 0 or x == k - 1 for x in pos)


# ---------------------------------------------------------------------------
# Geometry tables (shared, immutable after construction)
# ---------------------------------------------------------------------------

def _sp_apply(sp: tuple[int, ...], d: int) -> int:
    img = sp[abs(d) - 1]
    return img if d > 0 else -img


def _sp_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(_sp_apply(a, d) for d in b)


class Geometry:
    """Lookup tables for one ``(n, k)``: positions, poses, move actions."""

    def __init__(self, n: int, k: int):
        self.n = n
        self.k = k
        self.params = PuzzleParams(n, k)
        self.positions: tuple[Position, ...] = tuple(
            p for p in product(range(k), repeat=n) if is_external(p, k))
        self.ext = {p: external_dirs(p, k) for p in self.positions}
        poses = []
        for perm in permutations(range(1, n + 1)):
            psign = tuple_sign(tuple(x - 1 for x in perm))
            for signs in product((1, -1), repeat=n):
                det = psign
                for s in signs:
                    det *= s
                if det == 1:
                    poses.append(tuple(p * s for p, s in zip(perm, signs)))
        poses.sort(key=lambda t: (tuple(abs(x) for x in t), tuple(-x for x in t)))
        self.poses: tuple[tuple[int, ...], ...] = tuple(poses)
        self.pose_index = {sp: i for i, sp in enumerate(self.poses)}
        self.identity_pose = self.pose_index[tuple(range(1, n + 1))]
        self._rot_tables: dict[tuple[int, int], tuple[int, ...]] = {}
        self._move_tables: dict = {}
        self._mul_cache: dict[tuple[int, int], int] = {}
        self._inv_cache: dict[int, int] = {}

    # poses ---------------------------------------------------------------
    def pose_id(self, sp: SignedPerm) -> int:
        key = tuple(p * s for p, s in zip(sp.perm, sp.signs))
        try:
            return self.pose_index[key]
        except KeyError:
            raise InvalidReassembly(f"reflection pose {sp}") from None

    def signed_perm(self, pid: int) -> SignedPerm:
        sp = self.poses[pid]
        return SignedPerm(tuple(abs(x) for x in sp), tuple(1 if x > 0 else -1 for x in sp))

    def mul(self, a: int, b: int) -> int:
        key = (a, b)
        r = self._mul_cache.get(key)
        if r is None:
            r = self.pose_index[_sp_mul(self.poses[a], self.poses[b])]
            self._mul_cache[key] = r
        return r

    def inv(self, a: int) -> int:
        r = self._inv_cache.get(a)
        if r is None:
            sp = self.poses[a]
            out = [0] * self.n
            for i, d in enumerate(sp, 1):
                out[abs(d) - 1] = i if d > 0 else -i
            r = self.pose_index[tuple(out)]
            self._inv_cache[a] = r
        return r

    def apply_dir(self, pid: int, d: int) -> int:
        return _sp_apply(self.poses[pid], d)

    def rotation_id(self, i: int, j: int) -> int:
        sp = list(range(1, self.n + 1))
        sp[i - 1] = j
        sp[j - 1] = -i
        return self.pose_index[tuple(sp)]

    def rot_table(self, i: int, j: int) -> tuple[int, ...]:
        t = self._rot_tables.get((i, j))
        if t is None:
            r = self.rotation_id(i, j)
            t = tuple(self.mul(r, p) for p in range(len(self.poses)))
            self._rot_tables[(i, j)] = t
        return t

    # moves ---------------------------------------------------------------
    def move_pairs(self, i: int, j: int, sl: tuple[int, ...]) -> tuple[tuple[Position, Position], ...]:
        """(source, destination) for every external position in the turned layer."""
        key = (i, j, sl)
        t = self._move_tables.get(key)
        if t is not None:
            return t
        k, n = self.k, self.n
        others = [a for a in range(1, n + 1) if a not in (i, j)]
        base = [0] * n
        for a, v in zip(others, sl):
            base[a - 1] = v
        pairs = []
        for xi in range(k):
            for xj in range(k):
                src = list(base)
                src[i - 1] = xi
                src[j - 1] = xj
                dst = list(src)
                dst[i - 1] = k - 1 - xj
                dst[j - 1] = xi
                src_t, dst_t = tuple(src), tuple(dst)
                # fixed cubies are listed too: their pose still turns
                if is_external(src_t, k):
                    pairs.append((src_t, dst_t))
        t = tuple(pairs)
        self._move_tables[key] = t
        return t

    def moves_at(self, pos: Position) -> list["Move"]:
        """Atomic moves that displace ``pos``, in lexicographic (i, j) order."""
        out = []
        n, k = self.n, self.k
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i == j:
                    continue
                if k % 2 and pos[i - 1] == pos[j - 1] == (k - 1) // 2:
                    continue
                sl = tuple(pos[a - 1] for a in range(1, n + 1) if a not in (i, j))
                out.append(Move(i, j, sl))
        return out

    def move_target(self, pos: Position, i: int, j: int) -> Position:
        p = list(pos)
        p[i - 1] = self.k - 1 - pos[j - 1]
        p[j - 1] = pos[i - 1]
        return tuple(p)


@lru_cache(maxsize=None)
def geometry(n: int, k: int) -> Geometry:
    return Geometry(n, k)


# ---------------------------------------------------------------------------
# Moves
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True, order=True)
class Move:
    """Quarter turn of a 2-layer in the (i, j) plane.

    ``slice`` lists the fixed indices of the remaining axes in ascending axis
    order.
    """

    i: int
    j: int
    slice: tuple[int, ...]

    @classmethod
    def make(cls, i: int, j: int, fixed: Mapping[int, int]) -> "Move":
        return cls(i, j, tuple(fixed[a] for a in sorted(fixed)))

    @property
    def fixed(self) -> dict[int, int]:
        n = len(self.slice) + 2
        others = [a for a in range(1, n + 1) if a not in (self.i, self.j)]
        return dict(zip(others, self.slice))

    def check(self, params: PuzzleParams):
        n, k = params.n, params.k
        if not (1 <= self.i <= n and 1 <= self.j <= n) or self.i == self.j:
            raise MoveError(f"bad axes ({self.i},{self.j}) for n={n}")
        if len(self.slice) != n - 2:
            raise MoveError(f"slice needs {n - 2} indices, got {len(self.slice)}")
        if any(not 0 <= v < k for v in self.slice):
            raise MoveError(f"slice index outside 0..{k - 1}: {self.slice}")

    def inverse_move(self) -> "Move":
        return Move(self.j, self.i, self.slice)

    def __str__(self):
        return f"t({self.i},{self.j})[{','.join(map(str, self.slice))}]"


@dataclass(frozen=True, slots=True)
class MoveSeq:
    moves: tuple[Move, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))

    def __len__(self):
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    def __add__(self, other: "MoveSeq") -> "MoveSeq":
        return MoveSeq(self.moves + tuple(other.moves))

    def __str__(self):
        return format_sequence(self)


def invert_sequence(q: MoveSeq) -> MoveSeq:
    """Reverse order; every quarter turn becomes three quarter turns."""
    out = []
    for m in reversed(q.moves):
        out.extend((m, m, m))
    return MoveSeq(tuple(out))


def compact_inverse(q: MoveSeq) -> MoveSeq:
    """Inverse written with opposite-direction quarter turns (same effect, 3x shorter)."""
    return MoveSeq(tuple(m.inverse_move() for m in reversed(q.moves)))


def expand_layer_move(params: PuzzleParams, free_axes: Iterable[int],
                      fixed: Mapping[int, int], i: int, j: int) -> MoveSeq:
    """Atomic moves whose product is the quarter turn of a t-layer."""
    free = sorted(set(free_axes))
    n = params.n
    if i not in free or j not in free or i == j:
        raise MoveError("rotation axes must be two distinct free axes")
    if set(free) | set(fixed) != set(range(1, n + 1)) or set(free) & set(fixed):
        raise MoveError("free and fixed axes must partition 1..n")
    rest = [a for a in free if a not in (i, j)]
    out = []
    for combo in product(range(params.k), repeat=len(rest)):
        sl = dict(fixed)
        sl.update(zip(rest, combo))
        out.append(Move.make(i, j, sl))
    return MoveSeq(tuple(out))


_MOVE_RE = re.compile(r"t\((\d+),(\d+)\)\[([0-9,\s]*)\]('|\^2|\^3|\^1)?$")


def parse_move_token(tok: str) -> list[Move]:
    m = _MOVE_RE.match(tok.strip())
    if not m:
        raise MoveError(f"cannot parse move {tok!r}")
    body = m.group(3).strip()
    sl = tuple(int(x) for x in body.split(",")) if body else ()
    mv = Move(int(m.group(1)), int(m.group(2)), sl)
    suffix = m.group(4)
    reps = {None: 1, "^1": 1, "'": 3, "^2": 2, "^3": 3}[suffix]
    return [mv] * reps


def parse_sequence(text: str) -> MoveSeq:
    moves: list[Move] = []
    for tok in text.split():
        moves.extend(parse_move_token(tok))
    return MoveSeq(tuple(moves))


def format_sequence(q: MoveSeq) -> str:
    """Whitespace-separated notation; runs of a repeated move are folded."""
    out = []
    ms = list(q.moves)
    idx = 0
    while idx < len(ms):
        run = 1
        while idx + run < len(ms) and ms[idx + run] == ms[idx] and run < 3:
            run += 1
        tok = str(ms[idx])
        out.append(tok + {1: "", 2: "^2", 3: "'"}[run])
        idx += run
    return " ".join(out)


# ---------------------------------------------------------------------------
# State
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Cubie:
    home: Position
    pose: SignedPerm


class State:
    """Immutable assignment of external cubies to external positions."""

    __slots__ = ("params", "_home", "_pose", "_hash")

    def __init__(self, params: PuzzleParams, home: dict, pose: dict):
        self.params = params
        self._home = home
        self._pose = pose
        self._hash = None

    @property
    def geometry(self) -> Geometry:
        return geometry(self.params.n, self.params.k)

    def positions(self):
        return self._home.keys()

    def home_at(self, pos: Position) -> Position:
        return self._home[pos]

    def pose_id_at(self, pos: Position) -> int:
        return self._pose[pos]

    def pose_at(self, pos: Position) -> SignedPerm:
        return self.geometry.signed_perm(self._pose[pos])

    def cubie_at(self, pos: Position) -> Cubie:
        return Cubie(self._home[pos], self.pose_at(pos))

    @property
    def occupancy(self) -> dict[Position, Cubie]:
        return {p: self.cubie_at(p) for p in self._home}

    def where_is(self) -> dict[Position, Position]:
        """home -> current position."""
        return {h: p for p, h in self._home.items()}

    def appearance(self, pos: Position) -> tuple[tuple[int, int], ...]:
        """Colored look of the cubie at ``pos``: (world direction, facet color) pairs."""
        g = self.geometry
        pid = self._pose[pos]
        return tuple(sorted((g.apply_dir(pid, d), d) for d in g.ext[self._home[pos]]))

    def board(self) -> "Board":
        return Board(self.params, dict(self._home), dict(self._pose))

    def __eq__(self, other):
        return (isinstance(other, State) and self.params == other.params
                and self._home == other._home and self._pose == other._pose)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.params, tuple(sorted(self._home.items())),
                               tuple(sorted(self._pose.items()))))
        return self._hash

    def __repr__(self):
        return f"State(n={self.params.n}, k={self.params.k}, cubies={len(self._home)})"

    # serialization ---------------------------------------------------------
    def to_json(self) -> dict:
        cubies = []
        for pos in sorted(self._home):
            cubies.append({"home": list(self._home[pos]), "pos": list(pos),
                           "pose": self.pose_at(pos).to_json()})
        return {"format": "hyperkub-state/1", "n": self.params.n, "k": self.params.k,
                "cubies": cubies}

    @classmethod
    def from_json(cls, obj: dict) -> "State":
        if obj.get("format") != "hyperkub-state/1":
            raise ValueError(f"unsupported state format {obj.get('format')!r}")
        params = PuzzleParams(int(obj["n"]), int(obj["k"]))
        g = geometry(params.n, params.k)
        home, pose = {}, {}
        for c in obj["cubies"]:
            pos = tuple(int(x) for x in c["pos"])
            if pos in home:
                raise InvalidReassembly(f"position {pos} listed twice")
            home[pos] = tuple(int(x) for x in c["home"])
            pose[pos] = g.pose_id(SignedPerm.from_json(c["pose"]))
        s = cls(params, home, pose)
        errors = validate_state(s)
        if errors:
            raise InvalidReassembly("; ".join(errors))
        return s


class Board:
    """Mutable working copy of a state, used for long move sequences."""

    __slots__ = ("params", "geom", "home", "pose")

    def __init__(self, params: PuzzleParams, home: dict, pose: dict):
        self.params = params
        self.geom = geometry(params.n, params.k)
        self.home = home
        self.pose = pose

    def apply(self, m: Move):
        pairs = self.geom.move_pairs(m.i, m.j, m.slice)
        rot = self.geom.rot_table(m.i, m.j)
        home, pose = self.home, self.pose
        moved = [(dst, home[src], pose[src]) for src, dst in pairs]
        for dst, h, p in moved:
            home[dst] = h
            pose[dst] = rot[p]

    def apply_seq(self, moves: Iterable[Move]):
        for m in moves:
            self.apply(m)

    def freeze(self) -> State:
        return State(self.params, dict(self.home), dict(self.pose))

    def copy(self) -> "Board":
        return Board(self.params, dict(self.home), dict(self.pose))

    def appearance(self, pos: Position):
        g = self.geom
        pid = self.pose[pos]
        return tuple(sorted((g.apply_dir(pid, d), d) for d in g.ext[self.home[pos]]))


def solved_state(params: PuzzleParams) -> State:
    g = geometry(params.n, params.k)
    home = {p: p for p in g.positions}
    pose = {p: g.identity_pose for p in g.positions}
    return State(params, home, pose)


def apply_move(s: State, m: Move) -> State:
    m.check(s.params)
    b = s.board()
    b.apply(m)
    return b.freeze()


def apply_sequence(s: State, q: Union[MoveSeq, Sequence[Move]]) -> State:
    moves = q.moves if isinstance(q, MoveSeq) else tuple(q)
    for m in moves:
        m.check(s.params)
    b = s.board()
    b.apply_seq(moves)
    return b.freeze()


def colored_state_equal(a: State, b: State) -> bool:
    """True iff every position shows the same colored faces in both states."""
    if a.params != b.params:
        raise ParamsMismatch(f"{a.params} vs {b.params}")
    return all(a.appearance(p) == b.appearance(p) for p in a.positions())


def changed_positions(a: State, b: State) -> list[Position]:
    """Positions whose colored look differs between two states."""
    return [p for p in a.positions() if a.appearance(p) != b.appearance(p)]


# ---------------------------------------------------------------------------
# Reassembly edits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwistInPlace:
    position: Position
    rotation: SignedPerm


@dataclass(frozen=True)
class SwapCubies:
    pos_a: Position
    pos_b: Position
    pose_adjust_a: SignedPerm = None
    pose_adjust_b: SignedPerm = None


ReassemblyEdit = Union[TwistInPlace, SwapCubies]


def apply_reassembly_edit(s: State, e: ReassemblyEdit) -> State:
    g = s.geometry
    home = dict(s._home)
    pose = dict(s._pose)
    try:
        if isinstance(e, TwistInPlace):
            pos = tuple(e.position)
            if pos not in home:
                raise InvalidReassembly(f"no external cubie at {pos}")
            pose[pos] = g.mul(g.pose_id(e.rotation), pose[pos])
        elif isinstance(e, SwapCubies):
            a, b = tuple(e.pos_a), tuple(e.pos_b)
            if a not in home or b not in home:
                raise InvalidReassembly("swap positions must be external")
            ida = g.identity_pose
            adj_a = g.pose_id(e.pose_adjust_a) if e.pose_adjust_a is not None else ida
            adj_b = g.pose_id(e.pose_adjust_b) if e.pose_adjust_b is not None else ida
            ha, pa, hb, pb = home[a], pose[a], home[b], pose[b]
            home[b], pose[b] = ha, g.mul(adj_a, pa)
            home[a], pose[a] = hb, g.mul(adj_b, pb)
        else:
            raise TypeError(f"unknown edit {e!r}")
    except KeyError as exc:
        raise InvalidReassembly(str(exc)) from None
    out = State(s.params, home, pose)
    errors = validate_state(out)
    if errors:
        raise InvalidReassembly("; ".join(errors))
    return out


def aligning_pose(g: Geometry, home: Position, pos: Position, want: dict[int, int]):
    """Proper pose sending each home facet direction ``d`` to ``want[d]``, or None."""
    for pid, sp in enumerate(g.poses):
        if all(_sp_apply(sp, d) == w for d, w in want.items()):
            return pid
    return None


def validate_state(s: State) -> list[str]:
    """Descriptive list of problems; empty when the state is a valid reassembly."""
    from .classification import class_of

    errors = []
    g = s.geometry
    k = s.params.k
    expected = set(g.positions)
    if set(s._home) != expected:
        missing = expected - set(s._home)
        extra = set(s._home) - expected
        if missing:
            errors.append(f"unoccupied positions {sorted(missing)[:4]}")
        if extra:
            errors.append(f"non-external positions {sorted(extra)[:4]}")
    homes = list(s._home.values())
    if len(set(homes)) != len(homes) or set(homes) != expected:
        errors.append("cubie homes are not a bijection onto external positions")
    for pos, pid in s._pose.items():
        if not 0 <= pid < len(g.poses):
            errors.append(f"reflection pose at {pos}")
            continue
        h = s._home.get(pos)
        if h is None or not is_external(h, k) or len(h) != s.params.n:
            continue
        if len(external_dirs(h, k)) != len(external_dirs(pos, k)):
            errors.append(f"cubie {h} cannot sit at {pos}: face structure differs")
            continue
        if class_of(s.params, h) != class_of(s.params, pos):
            errors.append(f"cubie {h} placed outside its class at {pos}")
        img = sorted(g.apply_dir(pid, d) for d in external_dirs(h, k))
        if img != sorted(external_dirs(pos, k)):
            errors.append(f"pose of cubie {h} at {pos} points colored faces inward")
    return errors


def all_moves(params: PuzzleParams) -> tuple[Move, ...]:
    """Every atomic quarter turn, in lexicographic order."""
    n, k = params.n, params.k
    return tuple(Move(i, j, sl) for i in range(1, n + 1) for j in range(1, n + 1) if i != j
                 for sl in product(range(k), repeat=n - 2))


def random_moves(params: PuzzleParams, length: int, rnd) -> MoveSeq:
    """``length`` atomic moves drawn uniformly with the given ``random.Random``."""
    moves = all_moves(params)
    return MoveSeq(tuple(rnd.choice(moves) for _ in range(length)))
