"""Rule applications and space of M_n for n = 1..N, with a log-log fit of the
space growth.  Rule applications should at least double with each n while
space stays polynomial.

    python3 scripts/bench_mn.py [--max-n 10]
"""
import argparse
import math
import statistics

from stab.cli import format_table
from stab.corpus import m_n
from stab.report import full_report


def measure(max_n: int):
    rows = []
    for n in range(1, max_n + 1):
        e = m_n(n)
        r = full_report(e.term, e.derivation, e.name)
        rows.append((n, r.size, r.degree, r.rule_applications, r.space, r.space_s, 6 * (n + 9) ** 6, r.ok))
    return rows


def space_exponent(rows) -> float:
    """Slope of log(space) against log(n)."""
    xs = [math.log(r[0]) for r in rows]
    ys = [math.log(r[4]) for r in rows]
    return statistics.linear_regression(xs, ys).slope


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--max-n", type=int, default=10)
    args = p.parse_args()
    rows = measure(args.max_n)
    cols = ["n", "size", "degree", "rules", "space", "space_s", "6(n+9)^6", "ok"]
    print(format_table(cols, rows), end="")
    print(f"space ~ n^{space_exponent(rows):.2f}")


if __name__ == "__main__":
    main()
