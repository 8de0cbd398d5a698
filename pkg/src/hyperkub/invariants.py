"""The complete invariant system and the reachability test built on it."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .classification import (ClassId, ClusterId, class_table, cluster_of, dependent_group,
                             has_orientation_invariant, is_alternating_cluster_class)
from .group_kernel import CosetLabel, Perm, coset_label, perm_compose, perm_sign, tuple_sign
from .orientation import build_reference_atlas, colored_orientation, simplified_orientation
from .puzzle_core import InvalidReassembly, ParamsMismatch, Position, PuzzleParams, State, validate_state


class EvenK(ValueError):
    pass


class NoInvariant(ValueError):
    pass


class NotAlternatingCluster(ValueError):
    pass


def pos_label(pos: Position) -> str:
    return ",".join(map(str, pos))


@dataclass(frozen=True)
class FramePairing:
    pairs: tuple[tuple[Position, Position], ...]

    def to_json(self):
        return [[pos_label(a), pos_label(b)] for a, b in self.pairs]


@dataclass
class InvariantVector:
    b1: Optional[FramePairing] = None
    b2: Optional[int] = None
    c: Optional[int] = None
    o: dict = field(default_factory=dict)
    cl: dict = field(default_factory=dict)

    def diff(self, other: "InvariantVector") -> list[str]:
        """Names of the components that differ."""
        out = [name for name in ("b1", "b2", "c") if getattr(self, name) != getattr(other, name)]
        for key in sorted(set(self.o) | set(other.o), key=ClassId.sort_key):
            if self.o.get(key) != other.o.get(key):
                out.append(f"o:{key}")
        for key in sorted(set(self.cl) | set(other.cl)):
            if self.cl.get(key) != other.cl.get(key):
                out.append(f"cl:{key}")
        return out

    def to_json(self) -> dict:
        out = {}
        if self.b1 is not None:
            out["b1"] = self.b1.to_json()
            out["b2"] = self.b2
            out["c"] = self.c
        out["o"] = {str(k): str(v) for k, v in sorted(self.o.items(), key=lambda kv: kv[0].sort_key())}
        out["cl"] = {str(k): v for k, v in sorted(self.cl.items())}
        return out


def _central_class(params: PuzzleParams, m: int) -> ClassId:
    return ClassId(m, (params.center,) * (params.n - m))


def _require_odd(state: State):
    if state.params.k % 2 == 0:
        raise EvenK("frame and central invariants exist only for odd k")


def frame_invariants(state: State) -> tuple[FramePairing, int]:
    _require_odd(state)
    params = state.params
    n, k, c = params.n, params.k, params.center
    slots = []
    for a in range(1, n + 1):
        lo = [c] * n
        lo[a - 1] = 0
        hi = list(lo)
        hi[a - 1] = k - 1
        slots.append((tuple(lo), tuple(hi)))
    current = [tuple(sorted((state.home_at(lo), state.home_at(hi)))) for lo, hi in slots]
    pairing = tuple(sorted(current))
    # reference arrangement for this pairing: i-th pair in slot i, smaller member low
    ref_pos = {}
    for (lo, hi), (a, b) in zip(slots, pairing):
        ref_pos[a], ref_pos[b] = lo, hi
    order = [p for pair in slots for p in pair]
    index = {p: i for i, p in enumerate(order)}
    sigma_c = [0] * len(order)
    for p in order:
        sigma_c[index[ref_pos[state.home_at(p)]]] = index[p]
    sigma_p = [pairing.index(pair) for pair in current]
    return FramePairing(pairing), tuple_sign(tuple(sigma_c)) * tuple_sign(tuple(sigma_p))


def class_parity(state: State, positions) -> int:
    index = {p: i for i, p in enumerate(positions)}
    return tuple_sign(tuple(index[state.home_at(p)] for p in positions))


def central_sign(state: State) -> int:
    _require_odd(state)
    table = class_table(state.params)
    sign = 1
    for m in range(1, state.params.n + 1):
        sign *= class_parity(state, table.members(_central_class(state.params, m)))
    return sign


_TAU_CACHE: dict[int, Perm] = {}


def orientation_label(atlas, state: State, pos: Position) -> CosetLabel:
    """Coset label of one cubie's colored orientation.

    Alternating classes with identical cubies may hold cubies whose colored
    orientation is odd; those are shifted by a fixed transposition on the
    left, which keeps the transition law intact.
    """
    params = atlas.params
    group = dependent_group(params, atlas.class_id)
    phi = colored_orientation(atlas, state, pos)
    if group.kind == "A" and perm_sign(phi) == -1:
        tau = _TAU_CACHE.get(group.degree)
        if tau is None:
            tau = Perm.from_cycles(group.degree, (1, 2))
            _TAU_CACHE[group.degree] = tau
        phi = perm_compose(tau, phi)
    return coset_label(group, phi)


def orientation_invariant(state: State, class_id: ClassId, atlas=None) -> CosetLabel:
    params = state.params
    if not has_orientation_invariant(params, class_id):
        raise NoInvariant(f"class {class_id} has no orientation invariant")
    atlas = atlas or build_reference_atlas(params, class_id)
    total = None
    for pos in class_table(params).members(class_id):
        lab = orientation_label(atlas, state, pos)
        total = lab if total is None else total + lab
    return total


def cluster_invariant(state: State, cluster_id: ClusterId, atlas=None) -> int:
    params = state.params
    if not is_alternating_cluster_class(params, cluster_id.class_id):
        raise NotAlternatingCluster(f"{cluster_id} is not a nontrivial alternating cluster")
    atlas = atlas or build_reference_atlas(params, cluster_id.class_id)
    count = 0
    for pos in class_table(params).members(cluster_id.class_id):
        if cluster_of(params, state.home_at(pos)) == cluster_id:
            count += simplified_orientation(atlas, state, pos)
    return count


def invariant_vector(state: State) -> InvariantVector:
    params = state.params
    vec = InvariantVector()
    if params.k % 2:
        vec.b1, vec.b2 = frame_invariants(state)
        vec.c = central_sign(state)
    table = class_table(params)
    for cid in table.classes:
        if has_orientation_invariant(params, cid):
            vec.o[cid] = orientation_invariant(state, cid)
        if is_alternating_cluster_class(params, cid):
            atlas = build_reference_atlas(params, cid)
            counts = {cl: 0 for cl in table.clusters(cid)}
            for pos in table.members(cid):
                cl = cluster_of(params, state.home_at(pos))
                counts[cl] += simplified_orientation(atlas, state, pos)
            vec.cl.update(counts)
    return vec


def check_pair(a: State, b: State):
    if a.params != b.params:
        raise ParamsMismatch(f"n={a.params.n},k={a.params.k} vs n={b.params.n},k={b.params.k}")
    for s in (a, b):
        errors = validate_state(s)
        if errors:
            raise InvalidReassembly("; ".join(errors))


def reachable(a: State, b: State) -> bool:
    check_pair(a, b)
    return invariant_vector(a) == invariant_vector(b)
