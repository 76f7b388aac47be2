"""Mesh-refinement studies: Aitken extrapolation and empirical convergence orders."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
import logging
import math
import os

import numpy as np

log = logging.getLogger(__name__)

SINGULARITY_ALPHA = 0.1
OBSERVABLES = ("l", "c", "sigma_tip", "delta_e", "delta_v", "a", "t_d", "t_r", "l_td")


class DegenerateSequenceError(ZeroDivisionError):
    """Second difference is zero: the sequence has already converged (or is affine)."""


def aitken(y0: float, y1: float, y2: float) -> float:
    """Aitken delta-squared limit of three consecutive terms."""
    den = y2 - 2.0 * y1 + y0
    if den == 0.0:
        raise DegenerateSequenceError("y2 - 2 y1 + y0 = 0")
    return (y2 * y0 - y1 * y1) / den


def convergence_rate(eps_prev: float, eps_cur: float, h_prev: float, h_cur: float) -> float:
    """alpha = log(eps_prev / eps_cur) / log(h_prev / h_cur)."""
    if min(eps_prev, eps_cur, h_prev, h_cur) <= 0:
        raise ValueError("errors and mesh sizes must be positive")
    return math.log(eps_prev / eps_cur) / math.log(h_prev / h_cur)


@dataclass
class MeshStudy:
    observable: str
    h: list
    y: list
    exact: float | None = None

    def __post_init__(self):
        if len(self.h) != len(self.y):
            raise ValueError("h and y must have equal length")
        if any(b >= a for a, b in zip(self.h, self.h[1:])):
            raise ValueError("mesh sizes must be strictly decreasing")


@dataclass
class ConvergenceReport:
    observable: str
    probe_t: float | None
    h: list
    y: list
    y_limit: float | None
    errors: list
    alpha: list  # alpha[0] is None (no previous level)
    flags: list = field(default_factory=list)
    failures: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def settled_alpha(self):
        vals = [a for a in self.alpha if a is not None and math.isfinite(a)]
        return vals[-1] if vals else None

    def to_dict(self):
        d = asdict(self)
        d["settled_alpha"] = self.settled_alpha
        return d

    def rows(self):
        return list(zip(self.h, self.y, self.errors, self.alpha))


def analyse(study: MeshStudy, probe_t=None) -> ConvergenceReport:
    """Limit (exact value or Aitken on the three finest meshes), errors and orders."""
    h, y = list(study.h), list(study.y)
    ok = [i for i, v in enumerate(y) if v is not None and math.isfinite(v)]
    flags = []
    if study.exact is not None:
        y_lim = study.exact
    elif len(ok) >= 3:
        try:
            y_lim = aitken(*(y[i] for i in ok[-3:]))
        except DegenerateSequenceError:
            y_lim = y[ok[-1]]
            flags.append("converged sequence (zero second difference)")
    else:
        y_lim = None
        flags.append("fewer than three usable levels")
    errors = [abs(y_lim - v) if (y_lim is not None and v is not None) else None for v in y]
    alpha = [None]
    for k in range(1, len(h)):
        e0, e1 = errors[k - 1], errors[k]
        if e0 is None or e1 is None or e0 <= 0 or e1 <= 0:
            alpha.append(None)
        else:
            alpha.append(convergence_rate(e0, e1, h[k - 1], h[k]))
    rep = ConvergenceReport(study.observable, probe_t, h, y, y_lim, errors, alpha, flags)
    a = rep.settled_alpha
    if a is not None and a < SINGULARITY_ALPHA:
        rep.flags.append("possible unresolved singularity")
    return rep


def interpolate_at(t_nodes, values, t: float) -> float:
    """Linear interpolation in t between accepted nodes."""
    t_nodes = np.asarray(t_nodes, float)
    if not t_nodes[0] <= t <= t_nodes[-1] * (1 + 1e-12):
        raise ValueError(f"probe time {t} outside the computed range")
    return float(np.interp(t, t_nodes, np.asarray(values, float)))


def _extract(params, h, observable, probe_t, settings_kw):
    from .solver import CrackSolver, SolverSettings

    stationary = observable in ("sigma_tip", "delta_e", "delta_v", "c") or (
        observable == "l" and settings_kw.get("stationary", True)
    )
    kw = {k: v for k, v in settings_kw.items() if k != "stationary"}
    if observable in ("t_d", "l_td"):
        sv = CrackSolver(params, SolverSettings(h=h, stationary_only=True, **kw))
        tr = sv.run()
        return tr.t_d if observable == "t_d" else tr.l_at_td
    if observable == "t_r":
        tr = CrackSolver(params, SolverSettings(h=h, **kw)).run()
        return tr.t_r
    if stationary:
        sv = CrackSolver(params, SolverSettings(h=h, t_end=probe_t, **kw))
        # probe beyond t_d on the stationary branch, as in the mesh studies
        sv.stationary_stage(t_end=probe_t + 0.5 * h, stop_at_delay=False)
        st = sv.state
        series = {
            "l": np.subtract(st.c_series, st.a_series),
            "c": st.c_series,
            "delta_e": st.delta_e,
            "delta_v": st.delta_v,
            "sigma_tip": [sv.tip_sigma(i) if i else math.nan for i in range(len(st.times))],
        }[observable]
        return interpolate_at(st.times, series, probe_t)
    tr = CrackSolver(params, SolverSettings(h=h, t_end=probe_t + h, **kw)).run()
    series = {"l": tr.l, "a": tr.a, "c": tr.c}[observable]
    return interpolate_at(tr.t, series, probe_t)


def _worker_count(n_jobs):
    cap = os.environ.get("CZCRACK_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, min(n, n_jobs))


def mesh_study(params, h_list, observable: str, probe_t: float | None = None,
               settings_kw: dict | None = None, workers: int | None = None) -> ConvergenceReport:
    """Run the solver on each mesh size, extract one observable and analyse it.

    Observables: ``l``, ``c``, ``sigma_tip``, ``delta_e``, ``delta_v`` on the
    stationary branch at ``probe_t`` (``l`` on the propagating branch when
    ``settings_kw['stationary']`` is False), ``a`` after growth, and the
    scalars ``t_d``, ``l_td``, ``t_r``.  Failed levels are recorded in
    ``failures`` and left out of the extrapolation.
    """
    if observable not in OBSERVABLES:
        raise ValueError(f"unknown observable {observable!r}; choose from {OBSERVABLES}")
    h_list = sorted((float(h) for h in h_list), reverse=True)
    if len(h_list) < 3:
        raise ValueError("a mesh study needs at least three mesh sizes")
    settings_kw = dict(settings_kw or {})
    n = workers or _worker_count(len(h_list))
    args = [(params, h, observable, probe_t, settings_kw) for h in h_list]
    y, failures = [], {}
    if n == 1:
        results = []
        for a in args:
            try:
                results.append(_extract(*a))
            except Exception as exc:  # annotate the level, keep the study going
                results.append(exc)
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            futs = [pool.submit(_extract, *a) for a in args]
            results = []
            for f in futs:
                try:
                    results.append(f.result())
                except Exception as exc:
                    results.append(exc)
    for h, r in zip(h_list, results):
        if isinstance(r, Exception) or r is None:
            failures[repr(h)] = str(r) if r is not None else "observable undefined"
            y.append(None)
        else:
            y.append(float(r))
    rep = analyse(MeshStudy(observable, h_list, y), probe_t)
    rep.failures = failures
    rep.meta = {"b": params.b, "beta": params.beta, "mode": params.mode,
                "m": params.creep.m, "theta": params.creep.theta, "delta_c": params.delta_c}
    return rep
