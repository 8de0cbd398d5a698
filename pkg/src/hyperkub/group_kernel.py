"""Permutations, signed permutations, quotient labels and exact binomials.

Permutations are stored as tuples of 1-based images.  Composition follows
the usual right-to-left convention: ``a * b`` applies ``b`` first.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from math import comb


class DegreeMismatch(ValueError):
    pass


class NotInGroup(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Perm:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(self.images)}: {self.images}")

    @classmethod
    def identity(cls, m: int) -> "Perm":
        return cls(tuple(range(1, m + 1)))

    @classmethod
    def from_cycles(cls, m: int, *cycles) -> "Perm":
        img = list(range(1, m + 1))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a - 1] = b
        return cls(tuple(img))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __mul__(self, other: "Perm") -> "Perm":
        return perm_compose(self, other)

    def inverse(self) -> "Perm":
        inv = [0] * len(self.images)
        for i, v in enumerate(self.images, 1):
            inv[v - 1] = i
        return Perm(tuple(inv))

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.images, 1))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(1, self.degree + 1):
            if start in seen or self(start) == start:
                continue
            cyc = [start]
            seen.add(start)
            x = self(start)
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = self(x)
            out.append(tuple(cyc))
        return out

    def __str__(self):
        cyc = self.cycles()
        if not cyc:
            return "e"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)


def perm_sign(p: Perm) -> int:
    """Parity of ``p`` as +1/-1 (counted through the cycle decomposition)."""
    s = 1
    for c in p.cycles():
        if len(c) % 2 == 0:
            s = -s
    return s


def perm_compose(a: Perm, b: Perm) -> Perm:
    """Return ``a∘b``: apply ``b`` first, then ``a``."""
    if a.degree != b.degree:
        raise DegreeMismatch(f"degrees {a.degree} and {b.degree} differ")
    ai = a.images
    return Perm(tuple(ai[x - 1] for x in b.images))


def tuple_sign(t) -> int:
    """Parity of a 0-based permutation tuple."""
    seen = [False] * len(t)
    s = 1
    for i in range(len(t)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = t[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


@dataclass(frozen=True, slots=True)
class SignedPerm:
    """Linear map sending ``e_a`` to ``signs[a] * e_{perm[a]}`` (axes 1-based)."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if len(self.perm) != len(self.signs):
            raise ValueError("perm and signs differ in length")
        if sorted(self.perm) != list(range(1, len(self.perm) + 1)):
            raise ValueError(f"bad axis permutation {self.perm}")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError(f"signs must be ±1: {self.signs}")

    @classmethod
    def identity(cls, n: int) -> "SignedPerm":
        return cls(tuple(range(1, n + 1)), (1,) * n)

    @classmethod
    def plane_rotation(cls, n: int, i: int, j: int) -> "SignedPerm":
        """Quarter turn taking ``e_i`` to ``e_j`` and ``e_j`` to ``-e_i``."""
        perm = list(range(1, n + 1))
        signs = [1] * n
        perm[i - 1], perm[j - 1] = j, i
        signs[j - 1] = -1
        return cls(tuple(perm), tuple(signs))

    @property
    def n(self) -> int:
        return len(self.perm)

    def det(self) -> int:
        d = perm_sign(Perm(self.perm))
        for s in self.signs:
            d *= s
        return d

    def apply(self, d: int) -> int:
        """Image of a signed axis direction ``±a`` (1-based)."""
        a = abs(d)
        out = self.perm[a - 1] * self.signs[a - 1]
        return out if d > 0 else -out

    def __mul__(self, other: "SignedPerm") -> "SignedPerm":
        perm = []
        signs = []
        for a in range(other.n):
            d = self.apply(other.perm[a] * other.signs[a])
            perm.append(abs(d))
            signs.append(1 if d > 0 else -1)
        return SignedPerm(tuple(perm), tuple(signs))

    def inverse(self) -> "SignedPerm":
        perm = [0] * self.n
        signs = [0] * self.n
        for a in range(self.n):
            b = self.perm[a]
            perm[b - 1] = a + 1
            signs[b - 1] = self.signs[a]
        return SignedPerm(tuple(perm), tuple(signs))

    def to_json(self) -> dict:
        return {"perm": list(self.perm), "signs": list(self.signs)}

    @classmethod
    def from_json(cls, obj) -> "SignedPerm":
        return cls(tuple(int(x) for x in obj["perm"]), tuple(int(x) for x in obj["signs"]))


@dataclass(frozen=True, slots=True)
class RotationGroupKind:
    kind: str  # "A" or "S"
    degree: int

    def __post_init__(self):
        if self.kind not in ("A", "S") or self.degree < 1:
            raise ValueError(f"bad group {self.kind}_{self.degree}")

    def __str__(self):
        return f"{self.kind}{self.degree}"

    def contains(self, p: Perm) -> bool:
        if p.degree != self.degree:
            return False
        return self.kind == "S" or perm_sign(p) == 1

    def order(self) -> int:
        from math import factorial
        f = factorial(self.degree)
        return f if self.kind == "S" or self.degree < 2 else f // 2

    def elements(self) -> list[Perm]:
        return [Perm(tuple(x + 1 for x in t)) for t in _group_tuples(self.kind, self.degree)]

    def in_commutant(self, p: Perm) -> bool:
        """Membership in the derived subgroup [G, G]."""
        if not self.contains(p):
            return False
        m = self.degree
        if self.kind == "S":
            return perm_sign(p) == 1
        if m <= 3:
            return p.is_identity()
        if m == 4:
            return p in _klein_four()
        return True

    def quotient_order(self) -> int:
        """Order of G/[G, G]."""
        m = self.degree
        if self.kind == "S":
            return 2 if m >= 2 else 1
        return 3 if m in (3, 4) else 1


@lru_cache(maxsize=None)
def _group_tuples(kind: str, m: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for t in permutations(range(m)):
        if kind == "S" or tuple_sign(t) == 1:
            out.append(t)
    return tuple(out)


@lru_cache(maxsize=None)
def _klein_four() -> frozenset:
    return frozenset({
        Perm.identity(4),
        Perm.from_cycles(4, (1, 2), (3, 4)),
        Perm.from_cycles(4, (1, 3), (2, 4)),
        Perm.from_cycles(4, (1, 4), (2, 3)),
    })


@dataclass(frozen=True, slots=True)
class CosetLabel:
    kind: str  # "Z2", "Z3" or "Trivial"
    value: int

    def __post_init__(self):
        bound = {"Z2": 2, "Z3": 3, "Trivial": 1}.get(self.kind)
        if bound is None or not 0 <= self.value < bound:
            raise ValueError(f"bad coset label {self.kind}:{self.value}")

    def __add__(self, other: "CosetLabel") -> "CosetLabel":
        if self.kind != other.kind:
            raise ValueError("labels of different kinds")
        mod = {"Z2": 2, "Z3": 3, "Trivial": 1}[self.kind]
        return CosetLabel(self.kind, (self.value + other.value) % mod)

    def __neg__(self) -> "CosetLabel":
        mod = {"Z2": 2, "Z3": 3, "Trivial": 1}[self.kind]
        return CosetLabel(self.kind, (-self.value) % mod)

    def __str__(self):
        return f"{self.kind}:{self.value}"


# pair-partitions of {1,2,3,4}, fixed order
_PARTITIONS = (frozenset({frozenset({1, 2}), frozenset({3, 4})}),
               frozenset({frozenset({1, 3}), frozenset({2, 4})}),
               frozenset({frozenset({1, 4}), frozenset({2, 3})}))


def _z3_of_cyclic_action(images: tuple[int, int, int]) -> int:
    """Label of an even permutation of three slots: e->0, (0 1 2)->1, (0 2 1)->2."""
    if images == (0, 1, 2):
        return 0
    if images == (1, 2, 0):
        return 1
    if images == (2, 0, 1):
        return 2
    raise NotInGroup(f"odd action on three slots: {images}")


def coset_label(group: RotationGroupKind, p: Perm) -> CosetLabel:
    """Label of the coset ``p·[G, G]`` in the abelianization of ``group``."""
    if not group.contains(p):
        raise NotInGroup(f"{p} is not in {group}")
    m = group.degree
    if group.kind == "S":
        if m == 1:
            return CosetLabel("Trivial", 0)
        return CosetLabel("Z2", 0 if perm_sign(p) == 1 else 1)
    if m == 3:
        return CosetLabel("Z3", _z3_of_cyclic_action(tuple(x - 1 for x in p.images)))
    if m == 4:
        acted = []
        for part in _PARTITIONS:
            moved = frozenset(frozenset(p(x) for x in block) for block in part)
            acted.append(_PARTITIONS.index(moved))
        return CosetLabel("Z3", _z3_of_cyclic_action(tuple(acted)))
    return CosetLabel("Trivial", 0)


def binom_paper(n: int, s: int) -> int:
    """Binomial coefficient that vanishes whenever ``n <= 0``, ``s < 0`` or ``s > n``."""
    if n <= 0 or s < 0 or s > n:
        return 0
    return comb(n, s)
