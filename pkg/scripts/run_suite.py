"""Run every bundled config through its commands and print the exit codes and a tree digest."""
import argparse
import hashlib
import json
import time

from diffnev.suite import SUITE, run_suite, tree_digest


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", help="output root")
    args = ap.parse_args()
    for entry in SUITE:
        t0 = time.perf_counter()
        codes = run_suite(args.out, [entry])
        print(f"{entry[0]:8s} {entry[1]:12s} exit {list(codes.values())[0]}  {time.perf_counter() - t0:6.1f} s")
    digest = hashlib.sha256(json.dumps(tree_digest(args.out), sort_keys=True).encode()).hexdigest()
    print(f"tree digest {digest}")


if __name__ == "__main__":
    main()
