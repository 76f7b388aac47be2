"""Command-line entry point: ``czcrack run | sweep | convergence | jump``."""
from __future__ import annotations

import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import asdict, replace
import json
import logging
import math
from pathlib import Path
import sys

from .analysis import OBSERVABLES, _worker_count, mesh_study
from .config import ConfigError, RunConfig
from .solver import CrackSolver, Trajectory, jump_analysis

log = logging.getLogger("czcrack")

MODES = {"elastic": "elastic", "visco": "viscoelastic", "viscoelastic": "viscoelastic"}


# ------------------------------------------------------------------ output
def _num(v):
    """JSON-safe float (None for missing or non-finite)."""
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _sig4(v):
    return "" if v is None else f"{v:.4g}"


def write_trajectory_csv(tr: Trajectory, path: Path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "a", "c", "l", "delta", "pinned"])
        for t, a, c, l, d, p in tr.rows():
            w.writerow([repr(float(t)), repr(float(a)), repr(float(c)), repr(float(l)),
                        repr(float(d)), "true" if p else "false"])


def summary(tr: Trajectory) -> dict:
    return {
        "outcome": tr.outcome,
        "t_d": _num(tr.t_d),
        "t_r": _num(tr.t_r),
        "l_td": _num(tr.l_at_td),
        "rupture": {k: (_num(v) if isinstance(v, float) else v) for k, v in tr.rupture.items()},
        "n_nodes": int(tr.t.size),
        "n_pinned": int(tr.pinned.sum()),
        "meta": tr.meta,
    }


def _write_json(obj, path: Path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------- commands
def _load(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config)
    mode = MODES[args.mode] if getattr(args, "mode", None) else None
    return cfg.with_overrides(b=getattr(args, "b", None), beta=getattr(args, "beta", None),
                              mode=mode, h=getattr(args, "h", None))


def _out_dir(args, cfg) -> Path:
    out = Path(args.out or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    tr = CrackSolver(cfg.material, cfg.settings).run()
    write_trajectory_csv(tr, out / "trajectory.csv")
    _write_json(summary(tr), out / "summary.json")
    print(f"{tr.outcome}: t_d={tr.t_d} t_r={tr.t_r} l(t_d)={tr.l_at_td}")
    return 0 if not tr.outcome.startswith("aborted") else 2


def _read_grid(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.DictReader(fh)]
    cells = []
    for i, r in enumerate(rows, start=2):
        try:
            b, beta = _frac(r["b"]), _frac(r["beta"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"{path}:{i}: need numeric b and beta columns ({exc})") from None
        mode = (r.get("mode") or "").strip()
        modes = [MODES[mode]] if mode else ["elastic", "viscoelastic"]
        cells.append((b, beta, modes))
    return cells


def _frac(text: str) -> float:
    """Parse '2/3'-style fractions as well as plain numbers."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/")
        return float(num) / float(den)
    return float(text)


def _sweep_cell(cfg: RunConfig, b, beta, mode):
    try:
        mat = replace(cfg.material, b=b, beta=beta, mode=mode)
        tr = CrackSolver(mat, cfg.settings).run()
        return {"t_r": _num(tr.t_r), "t_d": _num(tr.t_d), "l_td": _num(tr.l_at_td),
                "status": tr.outcome}
    except Exception as exc:  # one failing cell must not abort the sweep
        return {"t_r": None, "t_d": None, "l_td": None, "status": f"error: {exc}"}


def cmd_sweep(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    cells = _read_grid(args.grid)
    jobs = [(b, beta, mode) for b, beta, modes in cells for mode in modes]
    n = _worker_count(len(jobs)) if jobs else 1
    if n == 1:
        results = [_sweep_cell(cfg, *j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_sweep_cell, [cfg] * len(jobs), *zip(*jobs)))
    by_key = {j: r for j, r in zip(jobs, results)}
    cols = ["b", "beta"]
    for q in ("t_r", "t_d", "l_td", "status"):
        cols += [f"{q}_e", f"{q}_v"]
    table = []
    for b, beta, modes in cells:
        row = {"b": b, "beta": beta}
        for mode, suf in (("elastic", "e"), ("viscoelastic", "v")):
            r = by_key.get((b, beta, mode), {})
            for q in ("t_r", "t_d", "l_td", "status"):
                row[f"{q}_{suf}"] = r.get(q)
        table.append(row)
    for name, fmt in (("table.csv", lambda v: "" if v is None else repr(v)),
                      ("table_4sig.csv", _sig4)):
        with open(out / name, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for row in table:
                w.writerow([row[c] if isinstance(row[c], str) else fmt(row[c]) for c in cols])
    _write_json({"cells": table}, out / "sweep.json")
    print(f"{len(table)} cells written to {out}")
    return 0


def cmd_convergence(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    h_list = [float(v) for v in args.h_list.split(",") if v.strip()]
    kw = {k: v for k, v in asdict(cfg.settings).items() if k not in ("h", "t_end")}
    if args.branch == "propagating":
        kw["stationary"] = False
    rep = mesh_study(cfg.material, h_list, args.observable, args.probe_t, settings_kw=kw)
    _write_json(rep.to_dict(), out / "convergence.json")
    with open(out / "errors.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["h", "y", "error", "alpha"])
        for h, y, e, a in rep.rows():
            w.writerow(["" if v is None else repr(v) for v in (h, y, e, a)])
    print(f"limit={rep.y_limit} settled alpha={rep.settled_alpha} flags={rep.flags}")
    return 0


def cmd_jump(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    kw = {k: v for k, v in asdict(cfg.settings).items() if k != "h"}
    rep = jump_analysis(cfg.material, cfg.settings.h, n_probes=args.probes, tol=args.tol, **kw)
    _write_json(rep.to_dict(), out / "jump.json")
    print(f"a_d+={rep.a_lim:.6g} c_d+={rep.c_lim:.6g} l_d+={rep.l_lim:.6g} "
          f"l(t_d)={rep.l_d:.6g} jump={rep.any_jump}")
    return 0


# ------------------------------------------------------------------ parser
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="czcrack", description=__doc__)
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, overrides=True):
        sp.add_argument("--config", required=True, help="INI run configuration")
        sp.add_argument("--out", help="output directory (default: [output] dir)")
        if overrides:
            sp.add_argument("--mode", choices=sorted(MODES))
            sp.add_argument("--h", type=float)
            sp.add_argument("--b", type=float)
            sp.add_argument("--beta", type=float)

    sp = sub.add_parser("run", help="one trajectory: CSV plus summary JSON")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", help="rupture and delay tables over a (b, beta) grid")
    common(sp)
    sp.add_argument("--grid", required=True, help="CSV with columns b,beta[,mode]")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("convergence", help="mesh study of one observable")
    common(sp)
    sp.add_argument("--h-list", required=True, help="comma-separated mesh sizes")
    sp.add_argument("--observable", required=True, choices=OBSERVABLES)
    sp.add_argument("--probe-t", type=float, default=None)
    sp.add_argument("--branch", choices=("stationary", "propagating"), default="stationary",
                    help="branch for the l observable")
    sp.set_defaults(func=cmd_convergence)

    sp = sub.add_parser("jump", help="right limits of a, c, l at the delay time")
    common(sp)
    sp.add_argument("--probes", type=int, default=10)
    sp.add_argument("--tol", type=float, default=1e-3)
    sp.set_defaults(func=cmd_jump)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"czcrack: config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"czcrack: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
