"""Command-line entry point.

Exit codes: 0 success or match, 1 usage, 2 parse/type/validation/machine description error,
3 stuck machine, failed bound, or oracle mismatch.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import derivation as D
from .atm import SpecError, apply_to_input, atm_oracle, compile, parse_atm, parse_bits, time_bound
from .bigstep import Stuck, eval_big, trace_lines, walk
from .corpus import load_corpus
from .elaborate import ElabError
from .report import LITERAL, PROVEN, BoundReport, full_report, static_report
from .smallstep import run_small, trace_records
from .terms import FuelExhausted, ParseError, parse, show
from .types import IllFormedType, TypeParseError

OK, USAGE, INVALID, FAILED = 0, 1, 2, 3

INVALID_ERRORS = (ParseError, D.RuleViolation, SpecError, ElabError, TypeParseError, IllFormedType,
                  ValueError, KeyError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _term(path):
    text = _read(path)
    try:
        return parse(text)
    except ParseError as exc:
        exc.args = (f"{path}:{exc}",)
        raise


def _derivation(path):
    return D.loads(_read(path))


def _flag_line(flags) -> str:
    return " ".join(f"{k}={'pass' if flags[k] else 'FAIL'}" for k in flags)


def _static_lines(r: BoundReport):
    return [f"size {r.size}", f"degree {r.degree}", f"rank {r.rank}", f"weight {r.weight}",
            f"bound {r.bound}"]


# ---------------------------------------------------------------- commands

def cmd_parse(args, out):
    t = _term(args.file)
    print(show(t), file=out)
    print(f"size {t.size}", file=out)
    return OK


def cmd_check(args, out):
    t = _term(args.term)
    d = _derivation(args.derivation)
    r = static_report(t, d, Path(args.term).stem)
    for line in _static_lines(r):
        print(line, file=out)
    print(f"flags {_flag_line(r.flags)}", file=out)
    return OK


def cmd_run(args, out):
    t = _term(args.term)
    d = _derivation(args.derivation) if args.derivation else None
    fuel = args.fuel
    if args.machine == "small":
        if args.tree:
            raise UsageError("--tree needs --machine big")
        if args.trace:
            b, lines = trace_records(t)
            print("\n".join(lines), file=out)
        b, space_s = run_small(t, fuel=fuel)
        print(f"result {b}", file=out)
        if args.stats:
            print(f"space_s {space_s}", file=out)
        if d is None:
            return OK
    if args.trace and args.machine == "big":
        _, _, lines = trace_lines(t)
        print("\n".join(lines), file=out)
    b, stats, root = eval_big(t, tree=args.tree, fuel=fuel)
    if args.tree:
        depth = {id(root): 0}
        for node in walk(root):
            k = depth[id(node)]
            for c in node.children:
                depth[id(c)] = k + 1
            print(f"{'  ' * k}{node.step.rule} {node.step.show()}", file=out)
    if args.machine == "big":
        print(f"result {b}", file=out)
        if args.stats:
            for k, v in vars(stats).items():
                if k != "result":
                    print(f"{k} {v}", file=out)
            print(f"rule_applications {stats.rule_applications}", file=out)
    if d is None:
        return OK
    r = full_report(t, d, Path(args.term).stem, fuel=fuel, reference=False)
    for line in _static_lines(r):
        print(line, file=out)
    print(f"space {r.space}", file=out)
    print(f"space_s {r.space_s}", file=out)
    print(f"flags {_flag_line(r.flags)}", file=out)
    return OK if r.ok else FAILED


def cmd_compile_atm(args, out):
    spec = parse_atm(_read(args.atm), Path(args.atm).stem)
    try:
        coeffs = [int(c) for c in args.poly.split(",") if c.strip()]
    except ValueError:
        raise UsageError(f"--poly expects comma-separated naturals, got {args.poly!r}") from None
    bits = parse_bits(args.input)
    term, d = compile(spec, coeffs)
    prog, dp = apply_to_input(term, d, bits)
    D.validate(dp)
    if args.emit:
        base = Path(args.emit)
        base.parent.mkdir(parents=True, exist_ok=True)
        base.with_suffix(".lam").write_text(show(prog) + "\n")
        base.with_suffix(".json").write_text(D.dumps(dp) + "\n")
    b, stats, _ = eval_big(prog)
    expected = atm_oracle(spec, bits, clock=time_bound(coeffs, len(bits)), tape="input")
    verdict = "match" if b == expected else "mismatch"
    print(f"term_size {prog.size}", file=out)
    print(f"degree {D.degree(dp)}", file=out)
    print(f"space {stats.max_config_size}", file=out)
    print(f"result {b}", file=out)
    print(f"oracle {expected}", file=out)
    print(f"{verdict} ({'accept' if expected == 0 else 'reject'})", file=out)
    return OK if b == expected else FAILED


def _bench_one(entry, fuel):
    try:
        r = full_report(entry.term, entry.derivation, entry.name, fuel=fuel)
        return r, ""
    except (Stuck, FuelExhausted, *INVALID_ERRORS) as exc:
        return None, f"{type(exc).__name__}: {exc}".splitlines()[0]


def cmd_bench(args, out):
    directory = Path(args.dir)
    if not directory.is_dir():
        raise UsageError(f"not a directory: {directory}")
    entries = load_corpus(directory)
    if args.jobs > 1 and entries:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_bench_one, entries, [args.fuel] * len(entries)))
    else:
        results = [_bench_one(e, args.fuel) for e in entries]
    rows, errors, failed = [], [], False
    for e, (r, err) in zip(entries, results):
        if r is None:
            errors.append(f"{e.name}: {err}")
            rows.append([e.name, e.term.size] + ["-"] * (len(BoundReport.COLUMNS) - 3) + ["error"])
            continue
        rows.append(r.row())
        failed = failed or not r.ok
    columns = list(BoundReport.COLUMNS)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
        out.write(buf.getvalue())
    else:
        out.write(format_table(columns, rows))
    for line in errors:
        print(line, file=sys.stderr)
    if errors:
        return INVALID
    return FAILED if failed else OK


def format_table(columns, rows) -> str:
    cells = [[str(c) for c in columns]] + [["-" if v is None else str(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(columns))]
    lines = ["  ".join(v.rjust(w) if i else v.ljust(w) for i, (v, w) in enumerate(zip(r, widths))).rstrip()
             for r in cells]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stab", description="Typed boolean lambda programs, their machines and space bounds.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("parse", help="print the canonical form and size of a term file")
    s.add_argument("file")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("check", help="validate a derivation and print its measures")
    s.add_argument("term")
    s.add_argument("derivation")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("run", help="evaluate a program on one of the machines")
    s.add_argument("term")
    s.add_argument("--machine", choices=("big", "small"), default="big")
    s.add_argument("--trace", action="store_true", help="one comma-separated record per configuration")
    s.add_argument("--stats", action="store_true")
    s.add_argument("--tree", action="store_true", help="print the computation tree (big machine)")
    s.add_argument("--fuel", type=int, default=None, help="maximum number of machine steps")
    s.add_argument("--derivation", help="derivation file; enables the bound checks")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("compile-atm", help="compile a machine, run it on an input, compare with the oracle")
    s.add_argument("atm")
    s.add_argument("--poly", default="0,1", help="time bound coefficients c0,c1,... (default n)")
    s.add_argument("--input", default="", help="input bit string")
    s.add_argument("--emit", help="write PATH.lam and PATH.json for the compiled program")
    s.set_defaults(func=cmd_compile_atm)

    s = sub.add_parser("bench", help="bound report for every NAME.lam (+ NAME.json) in a directory")
    s.add_argument("dir")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--format", choices=("table", "csv"), default="table")
    s.add_argument("--fuel", type=int, default=None)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except Stuck as exc:
        print(f"stuck: {exc}", file=sys.stderr)
        return FAILED
    except FuelExhausted as exc:
        print(f"fuel exhausted: {exc}", file=sys.stderr)
        return FAILED
    except INVALID_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())


__all__ = ["main", "build_parser", "format_table", "LITERAL", "PROVEN"]
