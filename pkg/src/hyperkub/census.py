"""Counting pairwise unreachable states.

Two evaluators are provided: closed-form exponents in n and k, and a tally
built class by class from the classification.  They agree whenever
``k <= 3`` or ``n >= 5``; for n in {3, 4} and larger k the closed form is
three times the tally.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import comb, factorial, prod

from .classification import (ClassId, RotationGroupKind, dependent_group, is_special,
                             is_unique_class)
from .group_kernel import binom_paper
from .puzzle_core import PuzzleParams


@dataclass
class CountReport:
    n: int
    k: int
    bc: int
    oa: int
    os: int
    cl: int
    components: dict = field(default_factory=dict)

    @property
    def s(self) -> int:
        return self.bc * self.oa * self.os * self.cl

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "bc": str(self.bc), "oa": str(self.oa),
                "os": str(self.os), "cl": str(self.cl), "s": str(self.s),
                "components": self.components}


@dataclass(frozen=True)
class ClassInfo:
    class_id: ClassId
    size: int
    group: RotationGroupKind
    cluster_count: int
    cluster_size: int
    special_split: bool


def pairing_count(n: int) -> int:
    """Ways to split 2n objects into n unordered pairs."""
    return factorial(2 * n) // (2 ** n * factorial(n))


def _bc(n: int, k: int) -> int:
    return 1 if k % 2 == 0 else factorial(2 * n) // (2 ** (n - 2) * factorial(n))


def count_components_literal(n: int, k: int) -> CountReport:
    half = k // 2
    mid = (k - 1) // 2
    c = 1 if n in (3, 4) else 0
    big_n = binom_paper(half - 1, n - 3) + binom_paper(half - 1, n - 4) + c
    big_m = (sum(binom_paper(mid + m - 1, mid - 1) for m in range(1, n - 1))
             - sum(binom_paper(half - 1, m) for m in range(1, n - 1)))
    ell = {m: binom_paper(half - 1, m) * binom_paper(n, m) * 2 ** (n - m) for m in range(1, n - 1)}
    cl = prod((factorial(m) * 2 ** m + 1) ** ell[m] for m in range(1, n - 1))
    return CountReport(n, k, _bc(n, k), 3 ** big_n, 2 ** big_m, cl,
                       {"N": big_n, "M": big_m, "L": ell})


def _arrangements(chars) -> int:
    """Ways to lay a characteristic multiset onto its axes, sides included."""
    counts: dict[int, int] = {}
    for j in chars:
        counts[j] = counts.get(j, 0) + 1
    ways = factorial(len(chars))
    for v in counts.values():
        ways //= factorial(v)
    return ways


def census_classes(n: int, k: int) -> list[ClassInfo]:
    params = PuzzleParams(n, k)
    mid = (k - 1) // 2
    centre = params.center
    out = []
    for m in range(1, n + 1):
        for chars in combinations_with_replacement(range(1, mid + 1), n - m):
            doubled = sum(1 for j in chars if j != centre)
            size = comb(n, m) * 2 ** m * _arrangements(chars) * 2 ** doubled
            clusters = comb(n, m) * 2 ** m
            special = is_special(params, m, chars)
            qs = (1, -1) if special else (None,)
            for q in qs:
                cid = ClassId(m, chars, q)
                part = size // len(qs)
                count = clusters
                csize = part // count
                if is_unique_class(params, cid):
                    csize = 1
                    count = part
                out.append(ClassInfo(cid, part, dependent_group(params, cid), count, csize, special))
    return out


def count_states_census(n: int, k: int) -> CountReport:
    PuzzleParams(n, k)  # validates n and k
    z3 = 0
    sym = 0
    clusters_by_m: dict[int, int] = {}
    cl = 1
    for info in census_classes(n, k):
        g = info.group
        m = info.class_id.m
        if g.degree >= 2 and g.quotient_order() == 3:
            z3 += 1
        if g.kind == "S" and 2 <= m < n:
            sym += 1
        if g.kind == "A" and 2 <= m < n:
            clusters_by_m[m] = clusters_by_m.get(m, 0) + info.cluster_count
            cl *= (info.cluster_size + 1) ** info.cluster_count
    comps = {"z3_classes": z3, "symmetric_classes": sym,
             "alternating_clusters": dict(sorted(clusters_by_m.items()))}
    return CountReport(n, k, _bc(n, k), 3 ** z3, 2 ** sym, cl, comps)


def pairing_index(pairs, n: int) -> int:
    """Position of a pairing of 0..2n-1 in lexicographic order of canonical pair lists."""
    items = list(range(2 * n))
    index = 0
    remaining = items
    for a, b in sorted(tuple(sorted(p)) for p in pairs):
        if a != remaining[0]:
            raise ValueError("pairs must cover 0..2n-1")
        rest = remaining[1:]
        pos = rest.index(b)
        sub = pairing_count((len(rest) - 1) // 2) if len(rest) > 1 else 1
        index += pos * sub
        remaining = [x for x in rest if x != b]
    return index
