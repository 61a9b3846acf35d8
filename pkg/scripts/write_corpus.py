"""Write the standard corpus (random programs, M_1..M_10, encoding programs)
as NAME.lam / NAME.json pairs, ready for `stab bench DIR`.

    python3 scripts/write_corpus.py corpus/ [--atm] [--count 240] [--seed 20240611]
"""
import argparse

from stab.corpus import atm_programs, manifest, standard_corpus, write_corpus


def main():
    p = argparse.ArgumentParser()
    p.add_argument("dir")
    p.add_argument("--count", type=int, default=240)
    p.add_argument("--seed", type=int, default=20240611)
    p.add_argument("--atm", action="store_true", help="also add compiled sample machines on inputs up to length 2")
    args = p.parse_args()
    entries = standard_corpus(args.count, args.seed)
    if args.atm:
        entries += atm_programs()
    write_corpus(entries, args.dir)
    with open(f"{args.dir}/manifest.json", "w") as f:
        f.write(manifest(entries) + "\n")
    print(f"wrote {len(entries)} programs to {args.dir}")


if __name__ == "__main__":
    main()
