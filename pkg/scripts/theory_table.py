"""Tabulate the closed-form success bounds against round count.

Prints, for each L, the single-path lower bound, the no-multiton round
probability, and the multipath lower bound, plus the training budget.
"""

import argparse

from irsbeam.theory import PlanProbe, p_lower_los, p_lower_nlos, p_nm_round


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=256)
    ap.add_argument("--nt", type=int, default=128)
    ap.add_argument("--q", type=int, default=32)
    ap.add_argument("--r", type=int, default=4)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--max-rounds", type=int, default=14)
    args = ap.parse_args()

    print(f"M={args.m} N_t={args.nt} Q={args.q} R={args.r} K={args.k}")
    print(f"{'L':>3} {'T':>7} {'p_los':>8} {'p_nm':>8} {'p_nlos':>8}")
    for l in range(1, args.max_rounds + 1):
        probe = PlanProbe(m=args.m, n_t=args.nt, q=args.q, r=args.r, l=l, k=args.k)
        print(f"{l:>3} {probe.u * probe.v * l:>7} "
              f"{p_lower_los(probe):>8.4f} {p_nm_round(probe):>8.4f} "
              f"{p_lower_nlos(probe):>8.4f}")


if __name__ == "__main__":
    main()
