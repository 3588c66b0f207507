"""EIT gate error budget at the reported hardware numbers and in the strong-drive regime."""

from __future__ import annotations

import numpy as np

from rydqsp.eit import (
    reported_parameters,
    conditional_errors,
    strong_drive_example,
    strong_drive_sweep,
    total_error_ohe,
)


def main() -> None:
    p = reported_parameters()
    r = conditional_errors(p)
    print(f"gate time       {r.tau_g * 1e9:.2f} ns")
    print(f"eps_v           {r.eps_v:.3e}")
    print(f"eps_s           {r.eps_s:.5f}")
    print(f"eta             {r.eta:.5f}")
    print(f"regime          {r.regime}")
    for n in (1, 10, 100, 1000):
        print(f"total, N={n:<5d}  {total_error_ohe(p, n):.5f}")

    s = strong_drive_example()
    Ns = np.logspace(2, 4, 9).round()
    eps, slope = strong_drive_sweep(s, Ns)
    print(f"\nstrong drive, omega_c ~ N^(1/4): regime {s.regime}")
    for n, e in zip(Ns, eps):
        print(f"  N={int(n):6d}  eps_tot={e:.4e}")
    print(f"log-log slope {slope:.4f}")


if __name__ == "__main__":
    main()
