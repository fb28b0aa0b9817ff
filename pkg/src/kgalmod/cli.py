"""Command-line front end: ``kgalmod <command> ...``.

Exit codes: 0 success, 1 usage or parse error, 2 a check or theorem failed,
3 internal assertion.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (
    ClauseError,
    ExceptionalError,
    InternalError,
    LiftError,
    NotEmbeddableError,
    TowerFormatError,
    TowerShapeError,
)
from .gmod import decompose
from .ktower import compute_exceptional, tower_direct_sum, validate_axioms
from .lfield import STYLES, LocalFieldSpec, generate_tower
from .towerfile import read_tower, write_tower

OK, USAGE, FAILED, INTERNAL = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _vec(v) -> str:
    return "[" + " ".join(str(int(x)) for x in v) + "]"


def _check_level(T, i: int, d: int) -> None:
    if not 0 <= i <= T.n:
        raise _UsageError(f"level {i} outside [0, {T.n}]")
    if not 1 <= d <= T.m:
        raise _UsageError(f"degree {d} outside [1, {T.m}]")


def cmd_check(args) -> int:
    rep = validate_axioms(read_tower(args.file), strict=args.strict)
    for line in rep.lines():
        print(line)
    print(f"{'PASS' if rep.passed else 'FAIL'}: {len(rep.checks)} checks, {len(rep.failures())} failed")
    return OK if rep.passed else FAILED


def cmd_decompose(args) -> int:
    T = read_tower(args.file)
    _check_level(T, args.level, args.degree)
    dec = decompose(T.module(args.level, args.degree))
    mult = dict(sorted(dec.multiplicities.items()))
    if args.json:
        print(json.dumps({"multiplicities": {str(k): v for k, v in mult.items()}, "dim": dec.dim}, sort_keys=True))
    else:
        for k, v in mult.items():
            print(f"A_{k} x {v}")
    return OK


def cmd_gamma(args) -> int:
    from .engine import build_gamma

    T = read_tower(args.file)
    _check_level(T, args.level, args.degree)
    if args.level < 1 or args.degree < 2:
        raise _UsageError("gamma needs --level >= 1 and --degree >= 2")
    res = build_gamma(T, args.level, args.degree, check=False)
    for j, zs in enumerate(res.Z):
        for g in zs:
            print(f"Z_{j} dim={T.p**j} generator={_vec(g)}")
    print(f"Gamma dim={res.gamma.dim} profile={json.dumps(res.profile(), sort_keys=True)}")
    for c in res.checks:
        print(c.line())
    return OK if res.passed else FAILED


def cmd_theorem1(args) -> int:
    from .engine import verify_theorem1

    T = read_tower(args.file)
    _check_level(T, T.n, args.degree)
    rep = verify_theorem1(T, args.degree)
    for k, v in sorted(rep.multiplicities.items()):
        print(f"A_{k} x {v}")
    for c in rep.checks:
        print(c.line())
    return OK if rep.passed else FAILED


def cmd_theorem2(args) -> int:
    from .engine import construct_theorem2

    T = read_tower(args.file)
    _check_level(T, T.n, args.degree)
    rep = construct_theorem2(T, args.degree, check=False)
    for name, parts in (("X", rep.X), ("Y", rep.Y)):
        for i, gens in enumerate(parts):
            for g in gens:
                print(f"{name}_{i} dim={T.p**i} generator={_vec(g)}")
    for k, v in sorted(rep.multiplicities.items()):
        print(f"A_{k} x {v}")
    for line in rep.lines():
        print(line)
    return OK if rep.passed else FAILED


def cmd_exceptional(args) -> int:
    rep = compute_exceptional(read_tower(args.file))
    print(f"a_n={_vec(rep.a_class)} t={rep.t} index={rep.index_str()} embeddable={str(rep.embeddable).lower()}")
    return OK


def cmd_lfgen(args) -> int:
    try:
        spec = LocalFieldSpec(args.p, args.q, args.n, args.m, args.style)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    write_tower(generate_tower(spec), args.out)
    return OK


def cmd_sum(args) -> int:
    T, rep = tower_direct_sum(read_tower(args.file1), read_tower(args.file2))
    write_tower(T, args.out)
    for c in rep.failures():
        print(c.line())
    return OK


def cmd_selftest(args) -> int:
    from .acceptance import run_all

    results = run_all(args.seed)
    for r in results:
        print(r.line())
    return OK if all(r.passed for r in results) else FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="kgalmod", description="Galois-module structure of mod-p K-theory towers.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check", help="validate tower axioms")
    s.add_argument("file")
    s.add_argument("--strict", action="store_true")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("decompose", help="indecomposable summands of k[level][degree]")
    s.add_argument("file")
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("gamma", help="stratified complement of the norm image")
    s.add_argument("file")
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--degree", type=int, required=True)
    s.set_defaults(func=cmd_gamma)

    for name, fn in (("theorem1", cmd_theorem1), ("theorem2", cmd_theorem2)):
        s = sub.add_parser(name)
        s.add_argument("file")
        s.add_argument("--degree", type=int, required=True)
        s.set_defaults(func=fn)

    s = sub.add_parser("exceptional", help="exceptional class, index and embeddability")
    s.add_argument("file")
    s.set_defaults(func=cmd_exceptional)

    s = sub.add_parser("lfgen", help="write the tower of a tame local field")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--style", choices=STYLES, default="totally_ramified")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_lfgen)

    s = sub.add_parser("sum", help="direct sum of two towers")
    s.add_argument("file1")
    s.add_argument("file2")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sum)

    s = sub.add_parser("selftest", help="run the acceptance suite")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (TowerFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except SystemExit as exc:  # --help
        return OK if not exc.code else USAGE
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL
    except (NotEmbeddableError, ClauseError, LiftError, ExceptionalError, TowerShapeError, ValueError) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return FAILED
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
