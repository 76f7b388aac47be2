"""Right limits of a, c and l at the delay time, elastic against viscoelastic.

    python scripts/jump_study.py --b 4 --beta 0.5 --h 2.5e-4
"""
import argparse

from czcrack import CreepParams, MaterialParams, jump_analysis


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--b", type=float, default=4.0)
    ap.add_argument("--beta", type=float, default=0.5)
    ap.add_argument("--h", type=float, default=2.5e-4)
    ap.add_argument("--probes", type=int, default=10)
    args = ap.parse_args()
    for mode in ("elastic", "viscoelastic"):
        mat = MaterialParams(b=args.b, beta=args.beta, mode=mode, creep=CreepParams(m=5.0, theta=1.0))
        rep = jump_analysis(mat, args.h, n_probes=args.probes)
        print(f"{mode}: t_d={rep.t_d:.6g}  l(t_d)={rep.l_d:.5f}")
        for t, a, c, l in rep.probes:
            print(f"   t_d+{t - rep.t_d:9.3e}  a={a:.6f} c={c:.6f} l={l:.6f}")
        print(f"   limits a={rep.a_lim:.5f} c={rep.c_lim:.5f} l={rep.l_lim:.5f}  jump={rep.jump}")


if __name__ == "__main__":
    main()
