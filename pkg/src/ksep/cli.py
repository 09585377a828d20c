"""Command-line front end.

Exit status: 0 success / everything verified, 1 a verification failed,
2 usage or precondition error, 3 instance beyond capacity.  Output never
contains colour codes, so NO_COLOR needs no special handling.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .compression import (
    PreconditionError,
    build_decomposition,
    check_exhaustive,
    check_sampled,
    replay_induction,
)
from .core import InputError, Params, count_k_separated, enumerate_masks
from .family import Family, star
from .search import (
    DEFAULT_VERTEX_CAP,
    CapacityError,
    ekr_grid,
    max_intersecting,
    bound_grid,
    verify_bound_sweep,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(EXIT_USAGE, f"\n{self.prog}: error: {message}\n")


def _nkr(sp, n=True):
    if n:
        sp.add_argument("--n", type=int, required=True, help="circle length")
    sp.add_argument("--k", type=int, required=True, help="separation gap")
    sp.add_argument("--r", type=int, required=True, help="set size")


def _out(sp, formats, default):
    sp.add_argument("--format", choices=formats, default=default)
    sp.add_argument("--output", "-o", default="-", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ksep", description="Intersecting families of k-separated sets on the n-cycle.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("enumerate", help="list [n]^(r)_k in lexicographic order")
    _nkr(sp)
    _out(sp, ["lines", "json"], "lines")

    sp = sub.add_parser("count", help="closed-form |[n]^(r)_k|, optionally over a range of n")
    sp.add_argument("--n", type=int)
    sp.add_argument("--n-min", type=int)
    sp.add_argument("--n-max", type=int)
    _nkr(sp, n=False)
    sp.add_argument("--check", action="store_true", help="cross-check against enumeration")
    _out(sp, ["lines", "json", "csv"], "lines")

    sp = sub.add_parser("star", help="all sets containing x")
    _nkr(sp)
    sp.add_argument("--x", type=int, required=True)
    _out(sp, ["lines", "json"], "lines")

    sp = sub.add_parser("max", help="exact maximum intersecting family")
    _nkr(sp)
    sp.add_argument("--method", choices=["clique", "bruteforce"], default="clique")
    sp.add_argument("--witness", action="store_true", help="include a maximum family")
    sp.add_argument("--vertex-cap", type=int, default=DEFAULT_VERTEX_CAP)
    sp.add_argument("--symmetry", action="store_true", help="experimental: branch once per rotation orbit")
    sp.add_argument("--timing", action="store_true", help="report wall time (output no longer reproducible)")
    _out(sp, ["lines", "json", "csv"], "lines")

    sp = sub.add_parser("verify-bound", help="sweep a grid and compare optima with the predicted bound")
    sp.add_argument("--n-max", type=int, default=14)
    sp.add_argument("--k-min", type=int, default=1)
    sp.add_argument("--k-max", type=int, default=4)
    sp.add_argument("--r-min", type=int, default=1)
    sp.add_argument("--r-max", type=int, default=5)
    sp.add_argument("--include-ekr", action="store_true", help="add k = 0 rows with 2r <= n")
    sp.add_argument("--ekr-n-max", type=int, default=12)
    sp.add_argument("--method", choices=["clique", "bruteforce"], default="clique")
    sp.add_argument("--vertex-cap", type=int, default=DEFAULT_VERTEX_CAP)
    sp.add_argument("--timing", action="store_true", help="fill the millis column (output no longer reproducible)")
    _out(sp, ["csv", "json"], "csv")

    sp = sub.add_parser("compress", help="one compression step on a family file")
    sp.add_argument("--input", required=True, help="family JSON file, or - for stdin")
    sp.add_argument("--members", action="store_true", help="include member lists")
    sp.add_argument("--output", "-o", default="-")

    sp = sub.add_parser("check-proof", help="run the invariant checker on many families")
    _nkr(sp)
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--samples", type=int, default=1000)
    mode.add_argument("--exhaustive", action="store_true", help="every intersecting family")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--vertex-cap", type=int, default=24)
    _out(sp, ["lines", "json"], "lines")

    sp = sub.add_parser("replay", help="replay the induction on a family file")
    sp.add_argument("--input", required=True, help="family JSON file, or - for stdin")
    sp.add_argument("--output", "-o", default="-")
    return parser


def _read_family(path: str) -> Family:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
    return Family.from_json(text)


def _emit_family(f: Family, fmt: str) -> str:
    return f.to_json() + "\n" if fmt == "json" else f.to_lines()


def _lines(pairs) -> str:
    return "".join(f"{key}: {value}\n" for key, value in pairs)


def _cmd_enumerate(a):
    p = Params(a.n, a.k, a.r)
    return EXIT_OK, _emit_family(Family(p, enumerate_masks(p)), a.format)


def _cmd_count(a):
    if a.n is not None:
        ns = [a.n]
    elif a.n_min is not None and a.n_max is not None:
        ns = list(range(a.n_min, a.n_max + 1))
    else:
        raise InputError("give --n or both --n-min and --n-max")
    rows = []
    status = EXIT_OK
    for n in ns:
        p = Params(n, a.k, a.r)
        row = {"n": n, "k": a.k, "r": a.r, "count": count_k_separated(p)}
        if a.check:
            row["enumerated"] = len(enumerate_masks(p))
            if row["enumerated"] != row["count"]:
                status = EXIT_FAIL
        rows.append(row)
    keys = list(rows[0])
    if a.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    elif a.format == "csv":
        text = ",".join(keys) + "\n" + "".join(",".join(str(r[c]) for c in keys) + "\n" for r in rows)
    else:
        text = "".join(" ".join(str(r[c]) for c in keys) + "\n" for r in rows)
    return status, text


def _cmd_star(a):
    p = Params(a.n, a.k, a.r)
    if not 1 <= a.x <= a.n:
        raise InputError(f"--x must lie in [1, {a.n}]")
    return EXIT_OK, _emit_family(star(p, a.x), a.format)


def _cmd_max(a):
    p = Params(a.n, a.k, a.r)
    res = max_intersecting(p, a.method, a.vertex_cap, symmetry=a.symmetry)
    status = EXIT_OK if res.match else EXIT_FAIL
    if a.format == "json":
        return status, json.dumps(res.to_dict(witness=a.witness, timing=a.timing), indent=2) + "\n"
    if a.format == "csv":
        text = "n,k,r,family_size,optimum,predicted,match,nodes,millis\n" + ",".join(res.row(a.timing)) + "\n"
        return status, text
    pairs = [
        ("params", str(p)),
        ("family_size", res.family_size),
        ("optimum", res.optimum),
        ("predicted", res.predicted),
        ("match", "true" if res.match else "false"),
        ("nodes", res.nodes_explored),
    ]
    if a.timing:
        pairs.append(("millis", f"{res.elapsed * 1000:.1f}"))
    text = _lines(pairs)
    if a.witness:
        text += "witness:\n" + res.witness.to_lines()
    return status, text


def _cmd_verify_bound(a):
    grid = bound_grid(range(max(a.k_min, 1), a.k_max + 1), range(a.r_min, a.r_max + 1), a.n_max)
    if a.include_ekr:
        grid = ekr_grid(range(a.r_min, a.r_max + 1), a.ekr_n_max) + grid
    sweep = verify_bound_sweep(grid, a.method, a.vertex_cap)
    if sweep.mismatches:
        status = EXIT_FAIL
    elif sweep.errors:
        status = EXIT_CAPACITY
    else:
        status = EXIT_OK
    text = sweep.to_json(a.timing) + "\n" if a.format == "json" else sweep.to_csv(a.timing)
    return status, text


def _cmd_compress(a):
    t = build_decomposition(_read_family(a.input))
    return (EXIT_OK if t.passed else EXIT_FAIL), json.dumps(t.to_dict(members=a.members), indent=2) + "\n"


def _cmd_check_proof(a):
    p = Params(a.n, a.k, a.r)
    if a.exhaustive:
        summary = check_exhaustive(p, a.vertex_cap)
    else:
        if a.samples < 0:
            raise InputError("--samples must be non-negative")
        summary = check_sampled(p, a.samples, a.seed)
    status = EXIT_OK if summary.passed else EXIT_FAIL
    if a.format == "json":
        return status, json.dumps(summary.to_dict(), indent=2) + "\n"
    d = summary.to_dict()
    pairs = [("params", str(p)), ("source", d["source"]), ("families", d["families"])]
    pairs += [(f"verdict {name}", f"{count}/{d['families']}") for name, count in d["verdict_passes"].items()]
    pairs += [
        ("shift_eligible", d["shift_eligible"]),
        ("shift_moved", d["shift_moved"]),
        ("astar_intersecting (informational)", d["astar_intersecting"]),
        ("result", "PASS" if summary.passed else "FAIL"),
    ]
    return status, _lines(pairs)


def _cmd_replay(a):
    cert = replay_induction(_read_family(a.input))
    return (EXIT_OK if cert.certified else EXIT_FAIL), json.dumps(cert.to_dict(), indent=2) + "\n"


COMMANDS = {
    "enumerate": _cmd_enumerate,
    "count": _cmd_count,
    "star": _cmd_star,
    "max": _cmd_max,
    "verify-bound": _cmd_verify_bound,
    "compress": _cmd_compress,
    "check-proof": _cmd_check_proof,
    "replay": _cmd_replay,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        status, text = COMMANDS[args.command](args)
    except CapacityError as exc:
        print(f"ksep: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InputError, PreconditionError) as exc:
        print(f"ksep: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return status


def main() -> None:
    sys.exit(run())
