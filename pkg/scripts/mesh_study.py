"""Stationary-branch mesh study at t = 0.6 for b = 4.

Prints, per mesh size, the CZ-tip stress, CZ length and both crack-tip
openings, then Aitken limits and empirical orders for each observable.
The finest mesh (h = 0.00125, 480 steps) dominates the cost.

    python scripts/mesh_study.py --beta 2
"""
import argparse
import json

from _reference import MESH, TIP_STRESS
from czcrack import CreepParams, MaterialParams
from czcrack.analysis import MeshStudy, analyse, interpolate_at
from czcrack.solver import CrackSolver, SolverSettings

OBS = ("sigma_tip", "l", "delta_e", "delta_v")


def sample(beta, h, probe):
    mat = MaterialParams(b=4.0, beta=beta, mode="viscoelastic", creep=CreepParams(m=5.0, theta=1.0))
    sv = CrackSolver(mat, SolverSettings(h=h, t_end=probe))
    sv.stationary_stage(t_end=probe + 0.5 * h, stop_at_delay=False)
    st = sv.state
    series = {
        "sigma_tip": [float("nan")] + [sv.tip_sigma(i) for i in range(1, len(st.times))],
        "l": [c - a for a, c in zip(st.a_series, st.c_series)],
        "delta_e": st.delta_e,
        "delta_v": st.delta_v,
    }
    return {k: interpolate_at(st.times, v, probe) for k, v in series.items()}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--beta", type=float, default=2.0)
    ap.add_argument("--probe-t", type=float, default=0.6)
    ap.add_argument("--json", help="write the reports here")
    args = ap.parse_args()

    rows = [sample(args.beta, h, args.probe_t) for h in MESH]
    ref = TIP_STRESS.get(args.beta)
    print(f"{'h':>8} " + " ".join(f"{o:>12}" for o in OBS) + ("   tip ref" if ref else ""))
    for i, (h, r) in enumerate(zip(MESH, rows)):
        extra = f"  {ref[0][i]:.5f}" if ref else ""
        print(f"{h:8.5f} " + " ".join(f"{r[o]:12.6g}" for o in OBS) + extra)
    reports = {}
    for o in OBS:
        rep = analyse(MeshStudy(o, MESH, [r[o] for r in rows]), args.probe_t)
        reports[o] = rep.to_dict()
        orders = ", ".join("-" if a is None else f"{a:.3f}" for a in rep.alpha[1:])
        print(f"{o:>10}: limit {rep.y_limit:.6g}; orders {orders}; {'; '.join(rep.flags)}")
    if ref:
        print(f"tip-stress reference limit {ref[1]}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(reports, fh, indent=2, default=float)


if __name__ == "__main__":
    main()
