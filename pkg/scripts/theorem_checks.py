"""Margins of the difference second main theorems and the shift-quotient decay for the three test functions."""
import time

from diffnev.catalog import specs as S
from diffnev.catalog.elliptic import sn_periods
from diffnev.harness import verify_logdiff, verify_thm2nd, verify_thm2nd2

K = sn_periods(0.5)[0]
CONFIGS = (("sn(z, 0.5)", S.JacobiSN(0.5), 2 * K), ("p(z) + e^z", S.p_plus_exp(), 2.0), ("e^z", S.ExpLinear(1), 1.0))


def main():
    for name, f, c in CONFIGS:
        t0 = time.perf_counter()
        a = verify_thm2nd2(f, c, [1, -1])
        b = verify_thm2nd(f, c, [1, -1])
        q = verify_logdiff(f, c)
        print(f"{name:12s} c={c:.4f}  {time.perf_counter() - t0:5.1f} s")
        for rep in (a, b):
            worst = min(r.rhs - r.lhs for r in rep.rows)
            print(f"   {rep.theorem:8s} {rep.verdict:20s} min margin {worst:9.3f}  slack sweep {rep.sweep}")
        print(f"   logdiff  {q.verdict:20s} m/T at r={q.tail['r_top']:.1f}: {q.tail['m_over_T']:.2e}")


if __name__ == "__main__":
    main()
