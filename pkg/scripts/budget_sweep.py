"""Success rate vs training budget for the multi-directional scan.

Sweeps the round count L at fixed bin geometry and writes one CSV row per
budget T = U*V*L. Compare against the exhaustive budget M*N_t printed at
the end.
"""

import argparse

from irsbeam.arrays import ArrayConfig
from irsbeam.harness import ExperimentConfig, rows_to_csv, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--snr-db", type=float, default=-20.0)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--rounds", type=int, nargs="+", default=[2, 3, 4, 5, 6, 7, 8])
    ap.add_argument("--out", default="budget_sweep.csv")
    args = ap.parse_args()

    array = ArrayConfig(n_t=128, m_y=16, m_z=16, r=8)
    cfg = ExperimentConfig(
        array=array, q=16, l=args.rounds[0], snr_db=args.snr_db,
        t_sweep=tuple(args.rounds), trials=args.trials, seed=args.seed,
        compute_bgr=False,
    )
    rows = sweep(cfg, "T")
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(rows_to_csv(rows))
    for row in rows:
        print(f"T={row.value:5.0f}  success={row.success_rate:.3f} +- {row.stderr:.3f}")
    print(f"exhaustive budget: {array.m * array.n_t}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
