#!/usr/bin/env python3
"""Print the bound landscape for a range of sizes.

For each n: the necessary width of D* for the one-commutator property,
the closed-form scalar length bound against its from-definitions value
s(kappa^d), and the two upper bounds ceil(c/n), ceil(c/(n-2)).
"""

import argparse

from commcert import (
    dstar_length_bound,
    kappa_p,
    s_of,
    single_commutator_necessary_bound,
    width_ratio_lower_bound,
    width_upper_bounds,
)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--d-max", type=int, default=4)
    ap.add_argument("--c", type=int, default=12)
    args = ap.parse_args()

    print(f"{'n':>3} {'d':>3} {'s(kappa^d)':>11} {'closed form':>12}")
    for n in range(2, args.n_max + 1):
        for d in range(1, args.d_max + 1):
            print(f"{n:>3} {d:>3} {s_of(kappa_p(d, n)):>11} {dstar_length_bound(n, d):>12}")

    print()
    print(f"{'n':>3} {'necessary':>10} {'C lower (c=%d)' % args.c:>16} {'GL upper':>9} {'E upper':>8}")
    for n in range(2, args.n_max + 1):
        gl, e = width_upper_bounds(n, args.c)
        low = width_ratio_lower_bound(n, args.c)
        print(
            f"{n:>3} {single_commutator_necessary_bound(n):>10} "
            f"{str(low):>16} {gl:>9} {str(e):>8}"
        )


if __name__ == "__main__":
    main()
