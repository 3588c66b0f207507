"""Cost comparison of direct QSP, block decimation and the fourth-order product formula.

Writes a CSV (one row per method and chain size) and prints the headline ratios.
Usage: python3 scripts/method_sweep.py [--out sweep.csv] [--epsilon 1e-3]
"""

from __future__ import annotations

import argparse

import numpy as np

from rydqsp.cli import rows_to_csv, write_atomic
from rydqsp.planners import compare, heisenberg_jobs


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="sweep.csv")
    ap.add_argument("--epsilon", type=float, default=1e-3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--pf-charge", choices=("composed", "literal"), default="composed")
    ap.add_argument("--normalization", choices=("bond", "none"), default="bond")
    args = ap.parse_args()

    sizes = list(range(10, 101, 10))
    rows = compare(heisenberg_jobs(sizes, args.epsilon, "4n", args.seed,
                                   pf_charge=args.pf_charge, normalization=args.normalization))
    write_atomic(args.out, rows_to_csv(rows))
    by = {(r["method"], r["n_site"]): r for r in rows}

    print(f"{'n':>4} {'qsp ebgc':>12} {'haah ebgc':>12} {'pf4 ebgc':>12} "
          f"{'qsp depth':>12} {'pf4 depth':>12}")
    for n in sizes:
        print(f"{n:4d} {by['qsp', n]['ebgc']:12.4g} {by['haah', n]['ebgc']:12.4g} "
              f"{by['pf4', n]['ebgc']:12.4g} {by['qsp', n]['depth']:12.4g} "
              f"{by['pf4', n]['depth']:12.4g}")
    for m in ("qsp", "pf4", "haah"):
        ys = [by[m, n]["ebgc"] for n in sizes]
        print(f"log-log ebgc slope {m}: {np.polyfit(np.log(sizes), np.log(ys), 1)[0]:.3f}")
    print(f"pf4/qsp ebgc at n=50: {by['pf4', 50]['ebgc'] / by['qsp', 50]['ebgc']:.2f}")
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
