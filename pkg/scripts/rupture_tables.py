"""Rupture time and CZ length at t_d over the b = 4 and beta = 1/2 grids.

Writes one CSV row per (b, beta, mode) cell with the computed and reference
values.  ``--cells spot`` restricts to (4, 2), (4, 1/2), (2, 1/2); the full
grid costs a few hours on one core because the small-b cells run to t ~ 1.

    python scripts/rupture_tables.py --cells spot --out tables.csv
"""
import argparse
import csv
import time

from _reference import LENGTH_B4, LENGTH_BETA_HALF, RUPTURE_B4, RUPTURE_BETA_HALF
from czcrack import CreepParams, MaterialParams, SolverSettings, run_simulation

SPOT = {(4.0, 2.0), (4.0, 0.5), (2.0, 0.5)}
MODES = ("elastic", "viscoelastic")


def cells(which):
    keys = list(dict.fromkeys(list(RUPTURE_B4) + list(RUPTURE_BETA_HALF)))
    return [k for k in keys if which == "all" or k in SPOT]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", choices=["spot", "all"], default="spot")
    ap.add_argument("--h", type=float, default=4e-4)
    ap.add_argument("--out", default="rupture_tables.csv")
    args = ap.parse_args()

    fields = ["b", "beta", "mode", "t_d", "l_td", "l_td_ref", "t_r", "t_r_ref_b4",
              "t_r_ref_beta_half", "outcome", "seconds"]
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for b, beta in cells(args.cells):
            for mi, mode in enumerate(MODES):
                mat = MaterialParams(b=b, beta=beta, mode=mode, creep=CreepParams(m=5.0, theta=1.0))
                t0 = time.perf_counter()
                tr = run_simulation(mat, SolverSettings(h=args.h))
                ref_l = LENGTH_B4.get((b, beta), LENGTH_BETA_HALF.get((b, beta)))
                row = {
                    "b": b, "beta": beta, "mode": mode, "t_d": tr.t_d, "l_td": tr.l_at_td,
                    "l_td_ref": ref_l[mi] if ref_l else "",
                    "t_r": tr.t_r,
                    "t_r_ref_b4": RUPTURE_B4.get((b, beta), ("", ""))[mi],
                    "t_r_ref_beta_half": RUPTURE_BETA_HALF.get((b, beta), ("", ""))[mi],
                    "outcome": tr.outcome, "seconds": round(time.perf_counter() - t0, 1),
                }
                w.writerow(row)
                fh.flush()
                print(f"b={b:.4g} beta={beta:.4g} {mode:12s} t_d={tr.t_d:.6g} "
                      f"l(t_d)={tr.l_at_td:.5g} t_r={tr.t_r} [{row['seconds']} s]")


if __name__ == "__main__":
    main()
