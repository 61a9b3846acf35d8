"""Compile the sample machines with P(n)=n and P(n)=n^2 and compare every
input up to a length bound against the reference evaluator.

    python3 scripts/atm_differential.py [--max-len 6] [--jobs 4]
"""
import argparse
import time
from concurrent.futures import ProcessPoolExecutor

from stab.atm import SAMPLES, differential

POLYS = {"n": [0, 1], "n^2": [0, 0, 1]}


def run_case(name, poly, max_len):
    return (name, poly) + differential(SAMPLES[name](), POLYS[poly], max_len)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--jobs", type=int, default=1)
    args = p.parse_args()
    cases = [(m, q, min(args.max_len, 4) if m == "alternating" else args.max_len)
             for m in SAMPLES for q in POLYS]
    t0 = time.time()
    with ProcessPoolExecutor(args.jobs) as pool:
        for name, poly, count, space, bad in pool.map(run_case, *zip(*cases)):
            status = "ok" if not bad else f"MISMATCH on {', '.join(bad)}"
            print(f"{name:14} P={poly:4} inputs={count:3} max_space={space:6} {status}")
    print(f"{time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
