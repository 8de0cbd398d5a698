"""Classes, special-class signs and clusters of external positions."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .group_kernel import RotationGroupKind, binom_paper, tuple_sign
from .puzzle_core import PuzzleParams, Position, geometry


_CLASS_RE = re.compile(r"\((\d+),\[([\d,]*)\](?:,q=([+-]1))?\)")


class InteriorPosition(ValueError):
    pass


@dataclass(frozen=True, slots=True, order=True)
class ClassId:
    m: int
    chars: tuple[int, ...]
    q: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "chars", tuple(self.chars))
        if list(self.chars) != sorted(self.chars):
            raise ValueError(f"characteristics must be sorted: {self.chars}")
        if self.q not in (None, 1, -1):
            raise ValueError(f"q must be +1, -1 or absent, got {self.q}")

    @property
    def n(self) -> int:
        return self.m + len(self.chars)

    def sort_key(self):
        return (self.m, self.chars, self.q or 0)

    @classmethod
    def parse(cls, text: str) -> "ClassId":
        """Inverse of ``str``: ``(2,[1])`` or ``(1,[1,2],q=-1)``."""
        m = _CLASS_RE.fullmatch(text.replace(" ", ""))
        if not m:
            raise ValueError(f"cannot parse class {text!r}")
        chars = tuple(int(x) for x in m.group(2).split(",")) if m.group(2) else ()
        q = int(m.group(3)) if m.group(3) else None
        return cls(int(m.group(1)), chars, q)

    def __str__(self):
        body = f"({self.m},[{','.join(map(str, self.chars))}]"
        if self.q is not None:
            body += f",q={'+1' if self.q > 0 else '-1'}"
        return body + ")"


@dataclass(frozen=True, slots=True, order=True)
class ClusterId:
    """Set of identically colored cubies of one class.

    ``vslots`` lists ``(axis, side)`` for the boundary coordinates; ``side``
    is 0 or k-1.  ``singleton`` marks classes whose cubies are all unique.
    """

    class_id: ClassId
    vslots: tuple[tuple[int, int], ...]
    singleton: bool = False

    def dirs(self, k: int) -> tuple[int, ...]:
        return tuple(a if s == k - 1 else -a for a, s in self.vslots)

    def __str__(self):
        marks = ",".join(f"{'+' if s else '-'}{a}" for a, s in self.vslots)
        return f"{self.class_id}{{{marks}}}"


def characteristics_of(params: PuzzleParams, pos: Position) -> tuple[int, tuple[int, ...]]:
    k = params.k
    m = 0
    chars = []
    for p in pos:
        if not 0 <= p < k:
            raise ValueError(f"index {p} outside 0..{k - 1}")
        if p == 0 or p == k - 1:
            m += 1
        else:
            chars.append(min(p, k - 1 - p))
    return m, tuple(sorted(chars))


def is_special(params: PuzzleParams, m: int, chars: tuple[int, ...]) -> bool:
    k = params.k
    if m != 1:
        return False
    if any(a >= b for a, b in zip(chars, chars[1:])):
        return False
    return all(2 * j < k - 1 for j in chars)


def special_sign(params: PuzzleParams, pos: Position) -> int:
    """Sign separating the two halves of a special class."""
    k = params.k
    m, chars = characteristics_of(params, pos)
    rank = {j: i + 1 for i, j in enumerate(chars)}
    family = []
    flips = 0
    for p in pos:
        if p == 0 or p == k - 1:
            family.append(0)
            flips += p == k - 1
        else:
            family.append(rank[min(p, k - 1 - p)])
            flips += p != min(p, k - 1 - p)
    sign = tuple_sign(tuple(family))
    return sign if flips % 2 == 0 else -sign


def class_of(params: PuzzleParams, pos: Position) -> ClassId:
    m, chars = characteristics_of(params, pos)
    if m == 0:
        raise InteriorPosition(f"{pos} is an interior position")
    q = special_sign(params, pos) if is_special(params, m, chars) else None
    return ClassId(m, chars, q)


def canonical_position(class_id: ClassId, k: Optional[int] = None) -> Position:
    """``(0,...,0, j_1,...)``; the q=-1 half uses ``k-1`` in the first slot."""
    pos = (0,) * class_id.m + class_id.chars
    if class_id.q == -1:
        if k is None:
            raise ValueError("k is required for the q=-1 canonical position")
        pos = (k - 1,) + pos[1:]
    return pos


def is_unique_class(params: PuzzleParams, class_id: ClassId) -> bool:
    """True when every cubie of the class has its own coloring (central classes)."""
    c = params.center
    if not class_id.chars:
        return True
    return c is not None and all(j == c for j in class_id.chars)


def is_frame_class(params: PuzzleParams, class_id: ClassId) -> bool:
    return class_id.m == 1 and params.k % 2 == 1 and is_unique_class(params, class_id)


def cluster_of(params: PuzzleParams, home: Position) -> ClusterId:
    cid = class_of(params, home)
    k = params.k
    vslots = tuple((a, p) for a, p in enumerate(home, 1) if p == 0 or p == k - 1)
    return ClusterId(cid, vslots, is_unique_class(params, cid))


def dependent_group(params: PuzzleParams, class_id: ClassId) -> RotationGroupKind:
    m, n = class_id.m, params.n
    if m == 1:
        return RotationGroupKind("S", 1)
    if m == n or is_strict_below_center(params, class_id.chars):
        return RotationGroupKind("A", m)
    return RotationGroupKind("S", m)


def is_strict_below_center(params: PuzzleParams, chars) -> bool:
    k = params.k
    return (all(a < b for a, b in zip(chars, chars[1:]))
            and all(2 * j < k - 1 for j in chars))


def independent_group(n: int, m: int) -> RotationGroupKind:
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    return RotationGroupKind("A" if m == n else "S", m)


def face_count(m: int, n: int, t: int) -> int:
    """Number of t-dimensional faces of a cubie with m boundary coordinates."""
    if not 1 <= m <= n or not 0 <= t <= n:
        raise ValueError(f"bad face-count arguments m={m}, n={n}, t={t}")
    return binom_paper(m, n - t)


def has_orientation_invariant(params: PuzzleParams, class_id: ClassId) -> bool:
    g = dependent_group(params, class_id)
    return g.degree >= 2 and g.quotient_order() > 1


def is_alternating_cluster_class(params: PuzzleParams, class_id: ClassId) -> bool:
    """Classes whose clusters carry a simplified-orientation count."""
    m = class_id.m
    return 2 <= m < params.n and dependent_group(params, class_id).kind == "A"


@dataclass(frozen=True)
class ClassTable:
    """All classes of one instance with their positions, in a fixed order."""

    params: PuzzleParams
    classes: tuple[ClassId, ...]
    positions: dict = field(repr=False)
    class_at: dict = field(repr=False)

    def members(self, class_id: ClassId) -> tuple[Position, ...]:
        return self.positions[class_id]

    def clusters(self, class_id: ClassId) -> dict[ClusterId, tuple[Position, ...]]:
        out: dict[ClusterId, list] = {}
        for p in self.positions[class_id]:
            out.setdefault(cluster_of(self.params, p), []).append(p)
        return {c: tuple(v) for c, v in sorted(out.items())}


@lru_cache(maxsize=None)
def class_table(params: PuzzleParams) -> ClassTable:
    g = geometry(params.n, params.k)
    positions: dict[ClassId, list] = {}
    class_at = {}
    for p in g.positions:
        cid = class_of(params, p)
        class_at[p] = cid
        positions.setdefault(cid, []).append(p)
    classes = tuple(sorted(positions, key=ClassId.sort_key))
    return ClassTable(params, classes, {c: tuple(v) for c, v in positions.items()}, class_at)
