"""Fit the Mobius-of-sn ansatz over several seeds, with a2 = 0 and with a2 forced nonzero."""
import argparse

from diffnev.confinement import FitConfig, check_explicit_solution


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=float, default=0.5, help="elliptic modulus")
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 7])
    ap.add_argument("--a2", type=float, nargs="+", default=[0.0, 0.5])
    ap.add_argument("--starts", type=int, default=32)
    args = ap.parse_args()
    cfg = FitConfig(starts=args.starts)
    print(f"{'a2':>6s} {'seed':>5s} {'status':>10s} {'fresh':>10s} {'gap4':>10s} starts")
    for a2 in args.a2:
        for seed in args.seeds:
            rep = check_explicit_solution(args.k, seed, a2, cfg)
            print(f"{a2:6.2f} {seed:5d} {rep.status:>10s} {rep.fresh_residual:10.2e} {rep.period4_gap:10.2e} {rep.starts_used}")


if __name__ == "__main__":
    main()
