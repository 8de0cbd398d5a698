"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 domain negative (states not
connected by moves).
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .census import census_classes, count_components_literal, count_states_census
from .classification import ClassId, class_table
from .invariants import invariant_vector, reachable
from .oracle import (MemoryCapExceeded, UnsupportedParams, pocket_memory_estimate, pocket_orbits,
                     pose_group_bfs, position_partition, verify_completeness_small)
from .puzzle_core import (InvalidReassembly, MoveError, ParamsMismatch, PuzzleParams, State,
                          apply_sequence, colored_state_equal, format_sequence, parse_sequence,
                          random_moves, solved_state)
from .solver import IncompatibleInvariants, solve

EXIT_OK, EXIT_USAGE, EXIT_NEGATIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1)


def _read_state(path: str) -> State:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return State.from_json(json.loads(text))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"{path} is not a state file: {exc}") from None


def _write(text: str, path):
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _read_moves(spec: str):
    text = Path(spec[1:]).read_text() if spec.startswith("@") else spec
    return parse_sequence(text)


def _params(args) -> PuzzleParams:
    try:
        return PuzzleParams(args.n, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_new(args) -> int:
    _write(_dump(solved_state(_params(args)).to_json()), args.output)
    return EXIT_OK


def cmd_scramble(args) -> int:
    state = _read_state(args.state)
    p = state.params
    length = args.length if args.length is not None else 20 * p.n * p.k
    if length < 0:
        raise UsageError("length must be non-negative")
    seq = random_moves(p, length, random.Random(args.seed))
    out = apply_sequence(state, seq)
    _write(_dump(out.to_json()), args.output)
    if args.moves:
        Path(args.moves).write_text(format_sequence(seq) + "\n")
    return EXIT_OK


def cmd_apply(args) -> int:
    state = _read_state(args.state)
    seq = _read_moves(args.moves)
    _write(_dump(apply_sequence(state, seq).to_json()), args.output)
    return EXIT_OK


def cmd_invariants(args) -> int:
    print(_dump(invariant_vector(_read_state(args.state)).to_json()))
    return EXIT_OK


def cmd_reachable(args) -> int:
    verdict = reachable(_read_state(args.a), _read_state(args.b))
    print("true" if verdict else "false")
    return EXIT_OK if verdict else EXIT_NEGATIVE


def cmd_solve(args) -> int:
    a, b = _read_state(args.source), _read_state(args.target)
    try:
        plan = solve(a, b)
    except IncompatibleInvariants as exc:
        print(_dump({"incompatible": exc.components}))
        print(f"not solvable: {', '.join(exc.components)} differ", file=sys.stderr)
        return EXIT_NEGATIVE
    _write(format_sequence(plan.sequence), args.output)
    for tag, length in plan.lengths().items():
        print(f"{tag}: {length} moves", file=sys.stderr)
    return EXIT_OK


def cmd_count(args) -> int:
    p = _params(args)
    census = count_states_census(p.n, p.k)
    literal = count_components_literal(p.n, p.k)
    if args.json:
        print(_dump({"census": census.to_json(), "literal": literal.to_json()}))
    else:
        if not args.literal:
            print(f"S={census.s} (census)")
        print(f"S={literal.s} (literal)")
    return EXIT_OK


def cmd_classes(args) -> int:
    p = _params(args)
    rows = [{"class": str(c.class_id), "size": c.size, "group": str(c.group),
             "clusters": c.cluster_count, "cluster_size": c.cluster_size}
            for c in census_classes(p.n, p.k)]
    if args.json:
        print(_dump(rows))
    else:
        for r in rows:
            print(f"{r['class']:<18} size={r['size']:<6} group={r['group']:<4} "
                  f"clusters={r['clusters']}x{r['cluster_size']}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    cap = int(args.memory_cap * 2 ** 30)
    if args.what == "positions":
        p = _params(args)
        table = class_table(p)
        orbits = position_partition(p)
        classes = sorted(sorted(table.members(c)) for c in table.classes)
        agree = sorted(sorted(o) for o in orbits) == classes
        print(_dump({"orbits": sorted(len(o) for o in orbits), "match_classes": agree}))
        return EXIT_OK if agree else EXIT_NEGATIVE
    if args.what == "poses":
        p = _params(args)
        if not args.cls:
            raise UsageError("--class is required")
        cid = ClassId.parse(args.cls)
        rep = pose_group_bfs(p, cid)
        print(_dump({"class": str(cid), "order": rep.order,
                     "face_perms": sorted(str(x) for x in rep.face_perms)}))
        return EXIT_OK
    if pocket_memory_estimate() > cap:
        print(f"pocket search needs about {pocket_memory_estimate() >> 20} MiB, "
              f"over the {args.memory_cap} GiB cap", file=sys.stderr)
        return EXIT_USAGE
    orbits = pocket_orbits(cap)
    if args.what == "pocket":
        print(_dump({"orbit_sizes": orbits.sizes, "total": orbits.total,
                     "disjoint": orbits.disjoint}))
        return EXIT_OK
    rep = verify_completeness_small(PuzzleParams(3, 2), args.samples, args.seed, orbits)
    print(_dump({"samples": rep.samples, "mismatches": rep.mismatches,
                 "agree_true": rep.agree_true, "agree_false": rep.agree_false}))
    return EXIT_OK if rep.mismatches == 0 else EXIT_NEGATIVE


def cmd_selftest(args) -> int:
    checks = []
    p = PuzzleParams(3, 3)
    s = solved_state(p)
    rnd = random.Random(0)
    scrambled = apply_sequence(s, random_moves(p, 100, rnd))
    checks.append(("conservation", invariant_vector(scrambled) == invariant_vector(s)))
    plan = solve(scrambled, s)
    checks.append(("solve", colored_state_equal(apply_sequence(scrambled, plan.sequence), s)))
    checks.append(("count", count_states_census(3, 3).s == count_components_literal(3, 3).s == 360))
    ok = True
    for name, passed in checks:
        print(f"{name}: {'ok' if passed else 'FAILED'}")
        ok &= passed
    return EXIT_OK if ok else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperkub", description="n-dimensional Rubik's cube engine")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def size_flags(sp):
        sp.add_argument("-n", type=int, required=True, help="dimension (>= 3)")
        sp.add_argument("-k", type=int, required=True, help="edge length (>= 2)")

    sp = sub.add_parser("new", help="write the solved state")
    size_flags(sp)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_new)

    sp = sub.add_parser("scramble", help="apply seeded random moves")
    sp.add_argument("state")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--length", type=int, default=None, help="default 20*n*k")
    sp.add_argument("--moves", help="also write the scramble sequence here")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_scramble)

    sp = sub.add_parser("apply", help="apply a move sequence (text or @file)")
    sp.add_argument("state")
    sp.add_argument("moves")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_apply)

    sp = sub.add_parser("invariants", help="print the invariant vector")
    sp.add_argument("state")
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("reachable", help="decide whether moves connect two states")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.set_defaults(func=cmd_reachable)

    sp = sub.add_parser("solve", help="moves taking SOURCE to TARGET")
    sp.add_argument("source")
    sp.add_argument("target")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("count", help="number of pairwise unreachable states")
    size_flags(sp)
    sp.add_argument("--literal", action="store_true", help="print only the closed-form value")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("classes", help="list position classes")
    size_flags(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_classes)

    sp = sub.add_parser("oracle", help="brute-force checks")
    sp.add_argument("what", choices=("positions", "poses", "pocket", "verify"))
    sp.add_argument("-n", type=int, default=3)
    sp.add_argument("-k", type=int, default=2)
    sp.add_argument("--class", dest="cls", help="class for 'poses', e.g. '(3,[])'")
    sp.add_argument("--samples", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--memory-cap", type=float, default=4.0, help="GiB, default 4")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("selftest", help="quick end-to-end check")
    sp.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InvalidReassembly, ParamsMismatch, MoveError, UnsupportedParams,
            ValueError) as exc:
        print(f"hyperkub: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MemoryCapExceeded as exc:
        print(f"hyperkub: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"hyperkub: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
