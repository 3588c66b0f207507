"""Dense check that the seam error of a three-region split decays with the middle width.

Usage: python3 scripts/seam_decay.py [--n 10] [--t 0.5] [--seed 0]
"""

from __future__ import annotations

import argparse

from rydqsp.verify import verify_lr_decimation


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--t", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rep = verify_lr_decimation(args.n, args.t, (2, 3, 4), args.seed)
    for l, d in zip(rep.l_values, rep.defects):
        print(f"l={l}  defect={d:.6f}")
    print(f"decay rate mu={rep.mu:.4f}  correlation r={rep.r:.5f}")


if __name__ == "__main__":
    main()
