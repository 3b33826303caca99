"""Print pole coefficients, the j -> j+4 differences and the closed-form alignment for each trace."""
import argparse
import time

from diffnev.confinement import (canonical, iterate_confinement, pole_pattern_conclusion, satisfies_equation,
                                 verify_coefficient_laws)


def show(case, delta, k, j_max, truncation_order):
    t0 = time.perf_counter()
    tr = iterate_confinement(True, delta, k, j_max, case, truncation_order)
    laws = verify_coefficient_laws(tr)
    pat = pole_pattern_conclusion(tr)
    print(f"== {case} delta={delta:+d} k={k}  N={tr.truncation_order}  {time.perf_counter() - t0:.1f} s")
    print(f"   equation holds: {satisfies_equation(tr)}   step-4 pattern: {pat.confirmed}")
    for j, c in tr.leading:
        print(f"   c[{j:2d}] = {canonical(c)}")
    for row in laws.recurrence:
        mark = "ok" if row["holds"] else ("sign" if row["holds_up_to_sign"] else "NO")
        print(f"   c[{row['offset'] + 4:2d}] - c[{row['offset']:2d}] = {row['difference']:28s} {mark}")
    al = laws.alignment
    print(f"   closed form: {al['matches']}/{al['compared']} with {al['rule']}; n=0 mismatch flagged: {laws.n0_discrepancy}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--case", choices=("case1", "case2"), default="case1")
    ap.add_argument("--j-max", type=int, default=17)
    ap.add_argument("--truncation-order", type=int)
    args = ap.parse_args()
    for delta in (1, -1):
        for k in (1, 2):
            show(args.case, delta, k, args.j_max, args.truncation_order)


if __name__ == "__main__":
    main()
