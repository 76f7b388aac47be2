"""Time marching of the cohesive zone and the crack.

Stage 1 (stationary crack, a = 1): on each time node the zone tip c solves
K(c, t) = 0.  For a trial c the tip point's stress history comes from the
stress ahead of every earlier zone, its current sigma**beta from the
discretised yield condition, and the traction on older zone points from the
closed-form Abel solution.

Stage 2 (propagation): once the crack-tip opening reaches delta_c (the delay
time t_d), the crack tip a solves delta(a, t) = delta_c with c re-solved from
K = 0 for every trial a.  When a would pass the newest zone point, the step
is pinned (a = c_{i-1}) and the time of the step is solved for instead.

Material points that joined the zone are indexed by the time node at which
they joined: point k sits at x = c_k.
"""
from dataclasses import asdict, dataclass, field
import logging
import math

import numpy as np

from . import elastic
from .abel import (
    NegativeStressError,
    YieldParams,
    CzPointRecord,
    closed_form_coefficients,
    cz_tip_stress_update,
    damage_integral,
    damage_integral_exact,
    validate_gamma,
)
from .special import HypergeometricDomainError, WTildeEvaluator, hyp2f1
from .viscoelastic import CreepParams, creep_convolution

log = logging.getLogger(__name__)


class ConvergenceError(RuntimeError):
    pass


class PrecisionFloorError(ConvergenceError):
    """The residual stopped changing between distinct iterates (float resolution reached)."""


class InvalidTrialError(ValueError):
    """A trial point lies outside the region where the residual is defined."""


class NoCrackGrowth(RuntimeError):
    """The crack-tip opening never reached delta_c before t_end."""


TRIAL_ERRORS = (NegativeStressError, InvalidTrialError, HypergeometricDomainError,
                FloatingPointError, ZeroDivisionError)


@dataclass(frozen=True)
class MaterialParams:
    b: float
    beta: float
    delta_c: float = 0.238
    creep: CreepParams = field(default_factory=CreepParams)
    mode: str = "elastic"

    def __post_init__(self):
        validate_gamma(self.beta, self.b)
        if not self.delta_c > 0:
            raise ValueError(f"delta_c must be positive, got {self.delta_c}")
        if self.mode not in ("elastic", "viscoelastic"):
            raise ValueError(f"mode must be 'elastic' or 'viscoelastic', got {self.mode!r}")

    @property
    def gamma(self) -> float:
        return self.beta / self.b

    @property
    def yield_params(self) -> YieldParams:
        return validate_gamma(self.beta, self.b)

    @property
    def viscous(self) -> bool:
        return self.mode == "viscoelastic" and self.creep.m > 0


@dataclass(frozen=True)
class SolverSettings:
    h: float = 4e-4
    t_end: float = 1.0
    eps: float = 1e-8  # secant step tolerance
    sif_tol: float = 1e-8
    delta_tol: float = 1e-6
    max_iter: int = 100
    max_retries: int = 20
    l_min: float = 1e-4
    a_max: float = 1e3
    h_min_factor: float = 1e-3
    max_steps: int = 200_000
    stationary_only: bool = False

    def __post_init__(self):
        for name in ("h", "t_end", "eps", "sif_tol", "delta_tol", "l_min", "a_max",
                     "h_min_factor"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.max_iter < 1 or self.max_retries < 0 or self.max_steps < 1:
            raise ValueError("max_iter and max_steps must be >= 1, max_retries >= 0")


def secant_root(f, x1, x2, eps=1e-8, max_iter=100, ftol=None, bounds=None,
                max_retries=20, full_output=False):
    """Secant iteration for f(x) = 0 from the two starting points x1, x2.

    Stops when the new iterate is within ``eps`` of either previous one (and,
    if ``ftol`` is given, |f| <= ftol there).  A trial raising one of
    ``TRIAL_ERRORS`` or leaving ``bounds`` is moved halfway toward the last
    valid iterate, at most ``max_retries`` times per step.  Equal residuals
    at the two points perturb the older point.  Once two evaluations of
    opposite sign are known, an iterate outside that bracket is replaced by
    an Illinois false-position step on it, which stops the secant from
    cycling on functions with a flat branch.

    Returns x, or (x, f(x), iterations) with ``full_output``.
    """
    lo, hi = bounds if bounds is not None else (-math.inf, math.inf)
    if x1 == x2:
        raise ValueError("secant needs two distinct starting points")
    br = {}  # closest known points with f > 0 and f < 0: sign -> [x, f]

    def note(x, fx):
        if fx == 0.0:
            return
        key = fx > 0
        other = br.get(not key)
        cur = br.get(key)
        if cur is None or other is None or abs(x - other[0]) < abs(cur[0] - other[0]):
            br[key] = [x, fx]

    def safe_eval(x, anchor):
        for _ in range(max_retries + 1):
            if lo <= x <= hi:
                try:
                    fx = f(x)
                    note(x, fx)
                    return x, fx
                except TRIAL_ERRORS as exc:
                    log.debug("secant trial %r rejected: %s", x, exc)
            x = 0.5 * (x + anchor)
        raise ConvergenceError(f"no admissible trial near {anchor!r} after {max_retries} retries")

    def false_position():
        # Illinois step on the bracket; halve the stale end so it cannot stall
        (xp, fp), (xn, fn) = br[True], br[False]
        x = (fp * xn - fn * xp) / (fp - fn)
        stale = br[True] if abs(x - xp) > abs(x - xn) else br[False]
        stale[1] *= 0.5
        return x

    f1 = f(x1)
    note(x1, f1)
    x2, f2 = safe_eval(x2, x1)
    perturbed = False
    for it in range(1, max_iter + 1):
        if f2 == 0.0:
            return (x2, f2, it) if full_output else x2
        if f2 == f1:
            if perturbed:
                raise PrecisionFloorError(
                    f"equal residuals {f2!r} at distinct points near {x2!r}")
            perturbed = True
            x1 = x2 - 2.0 * (x2 - x1)
            x1, f1 = safe_eval(x1, x2)
            continue
        perturbed = False
        x3 = (f2 * x1 - f1 * x2) / (f2 - f1)
        if len(br) == 2:
            b_lo, b_hi = sorted((br[True][0], br[False][0]))
            if not b_lo < x3 < b_hi:
                x3 = false_position()
        if not lo <= x3 <= hi:
            x3 = 0.5 * (x2 + (lo if x3 <= lo else hi))
        x3, f3 = safe_eval(x3, x2)
        done = abs(x3 - x1) < eps or abs(x3 - x2) < eps
        if done and x3 == x2 and ftol is not None and abs(f3) > ftol:
            raise PrecisionFloorError(f"iterate fixed at {x3!r} with residual {f3!r}")
        x1, f1, x2, f2 = x2, f2, x3, f3
        if done and (ftol is None or abs(f3) <= ftol):
            return (x3, f3, it) if full_output else x3
    raise ConvergenceError(f"secant did not converge in {max_iter} iterations (last x={x2!r})")


_FLOOR_ULPS = 4


class _Rows:
    """Growable column store for the closed-form coefficients of all zone points."""

    def __init__(self, cap=1024):
        self.n = 0
        self.y = np.empty(cap)
        self.tk = np.empty(cap)
        self.d = np.empty(cap)
        self.pid = np.empty(cap, dtype=np.intp)

    def extend(self, y, tk, d, pid):
        m = len(y)
        if self.n + m > self.y.size:
            cap = max(2 * self.y.size, self.n + m)
            for name in ("y", "tk", "d", "pid"):
                old = getattr(self, name)
                new = np.empty(cap, dtype=old.dtype)
                new[: self.n] = old[: self.n]
                setattr(self, name, new)
        sl = slice(self.n, self.n + m)
        self.y[sl], self.tk[sl], self.d[sl], self.pid[sl] = y, tk, d, pid
        self.n += m


@dataclass
class _Zone:
    """A solved zone configuration at one time (accepted or trial)."""

    t: float
    a: float
    c: float
    nodes: np.ndarray
    sigma_beta: np.ndarray
    tip_history: np.ndarray  # sigma**beta of the tip point at all nodes incl. t
    m: int  # points with index <= m are at or behind the crack tip
    K: float = 0.0
    delta_e: float = math.nan
    delta_v: float = math.nan


@dataclass
class SimulationState:
    """Accepted nodes of a run plus the per-point stress histories."""

    times: list = field(default_factory=list)
    a_series: list = field(default_factory=list)
    c_series: list = field(default_factory=list)
    K_series: list = field(default_factory=list)
    delta_e: list = field(default_factory=list)
    delta_v: list = field(default_factory=list)
    pinned: list = field(default_factory=list)
    zones: list = field(default_factory=list, repr=False)  # (nodes, sigma_beta) per node
    records: list = field(default_factory=list, repr=False)  # CzPointRecord per point
    stage: str = "stationary"
    t_d: float | None = None
    i_d: int | None = None

    @property
    def l_series(self):
        return [c - a for a, c in zip(self.a_series, self.c_series)]


@dataclass
class Trajectory:
    t: np.ndarray
    a: np.ndarray
    c: np.ndarray
    delta: np.ndarray
    pinned: np.ndarray
    t_d: float | None
    t_r: float | None
    outcome: str
    rupture: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)
    l_at_td: float | None = None

    @property
    def l(self):
        return self.c - self.a

    def rows(self):
        return list(zip(self.t, self.a, self.c, self.l, self.delta, self.pinned))


class CrackSolver:
    """Sequential two-stage solver for one parameter set and mesh size."""

    def __init__(self, params: MaterialParams, settings: SolverSettings | None = None):
        self.params = params
        self.settings = settings or SolverSettings()
        self.yp = params.yield_params
        self.beta = params.beta
        self.gamma = params.gamma
        self.state = SimulationState()
        self.ahead = elastic.AheadStressTable()
        self._rows = _Rows()
        self._row_offset = [0]  # row offset of point k (point 0 has no rows)
        self._s0 = []  # sigma**beta(x_k, 0) per point
        self._tk = []
        self._point_x = []
        self._post = []  # sigma**beta of point k at accepted nodes after joining
        self._zone_cache = {}
        self._wt = WTildeEvaluator(self.gamma)
        self._start()

    # ------------------------------------------------------------------ setup
    def _start(self):
        st = self.state
        st.times.append(0.0)
        st.a_series.append(1.0)
        st.c_series.append(1.0)
        st.K_series.append(math.sqrt(0.5))
        st.delta_e.append(0.0)
        st.delta_v.append(0.0)
        st.pinned.append(False)
        st.zones.append((np.array([1.0]), np.array([0.0])))
        # the initial crack tip joins at t = 0: exact solution sinc(pi g) t**-g
        self._point_x.append(1.0)
        self._s0.append(math.inf)
        self._tk.append(0.0)
        self._post.append([])
        self._tip_histories = [np.array([math.inf])]

    # ------------------------------------------------------------ primitives
    def _sigma(self, sb):
        return np.power(sb, 1.0 / self.beta)

    def zone_stress(self, t: float, k_lo: int) -> np.ndarray:
        """sigma**beta at time t of points k_lo..K (all joined before t), closed form."""
        key = (t, k_lo)
        hit = self._zone_cache.get(key)
        if hit is not None:
            return hit
        g = self.gamma
        K = len(self._point_x) - 1
        out = np.empty(K - k_lo + 1)
        start = k_lo
        if k_lo == 0:
            out[0] = self.yp.sinc * t ** (-g)
            start = 1
        if start <= K:
            lo = self._row_offset[start]
            r = self._rows
            y = r.y[lo : r.n]
            tk = r.tk[lo : r.n]
            wt = self._wt(tk - y, t - y)
            acc = np.bincount(r.pid[lo : r.n] - start, weights=r.d[lo : r.n] * wt,
                              minlength=K - start + 1)
            tks = np.asarray(self._tk[start:])
            z = tks / t
            v00 = -(z**g) * hyp2f1(g, g, 1.0 + g, z)
            out[start - k_lo :] = -self.yp.sinc * (np.asarray(self._s0[start:]) * v00 + acc)
        if np.any(out <= 0):
            bad = int(np.argmin(out)) + k_lo
            raise NegativeStressError(f"in-zone sigma**beta <= 0 at point {bad} (t={t:g})")
        if len(self._zone_cache) > 64:
            self._zone_cache.clear()
        self._zone_cache[key] = out
        return out

    def tip_history(self, x: float, t: float) -> np.ndarray:
        """sigma**beta(x, t_j) on all accepted nodes, then the tip value at the new node t."""
        st = self.state
        if x <= st.c_series[-1]:
            raise InvalidTrialError(f"trial zone tip {x!r} not ahead of c = {st.c_series[-1]!r}")
        if t <= st.times[-1]:
            raise InvalidTrialError("trial time must follow the last accepted node")
        hist = np.empty(len(st.times))
        hist[0] = (x / math.sqrt((x - 1.0) * (x + 1.0))) ** self.beta
        if len(st.times) > 1:
            ahead = self.ahead(x)
            if np.any(ahead < 0):
                raise NegativeStressError("negative stress ahead of the zone")
            hist[1:] = ahead**self.beta
        times = np.append(st.times, t)
        s_tip = cz_tip_stress_update(times, hist, self.yp)
        return np.append(hist, s_tip)

    def _bracket_index(self, a: float) -> int:
        """Largest point index m with x_m <= a."""
        xs = self._point_x
        return int(np.searchsorted(xs, a, side="right") - 1)

    def _zone_nodes(self, a: float, t: float, k_lo: int):
        """Nodes a, x_{m+1}..x_K and their sigma**beta at time t (tip excluded)."""
        xs = self._point_x
        m = self._bracket_index(a)
        if m < k_lo:
            raise InvalidTrialError("crack tip behind the oldest live zone point")
        sb_live = self.zone_stress(t, k_lo)
        K = len(xs) - 1
        if m >= K:
            # a at (or past) the newest stored point: only the tip is ahead
            if a > xs[K]:
                raise InvalidTrialError("crack tip beyond the newest zone point")
            return np.array([a]), sb_live[K - k_lo : K - k_lo + 1], m
        x_m, x_n = xs[m], xs[m + 1]
        s_m, s_n = sb_live[m - k_lo], sb_live[m + 1 - k_lo]
        if a == x_m:
            s_a = s_m
        else:
            s_a = s_m + (s_n - s_m) * (a - x_m) / (x_n - x_m)
        if not s_a > 0:
            raise NegativeStressError("interpolated crack-tip sigma**beta <= 0")
        nodes = np.concatenate(([a], xs[m + 1 :]))
        sb = np.concatenate(([s_a], sb_live[m + 1 - k_lo :]))
        return nodes, sb, m

    def _live_floor(self) -> int:
        return self._bracket_index(self.state.a_series[-1]) if len(self._point_x) > 1 else 0

    # ----------------------------------------------------------- zone solve
    def _zone_for(self, a: float, t: float, c: float, base):
        nodes0, sb0, m = base
        hist = self.tip_history(c, t)
        nodes = np.append(nodes0, c)
        sb = np.append(sb0, hist[-1])
        sig = self._sigma(sb)
        K = elastic.sif_from_nodes(nodes, sig)
        return _Zone(t=t, a=a, c=c, nodes=nodes, sigma_beta=sb, tip_history=hist, m=m, K=K)

    def _initial_dc_guess(self, t: float):
        """Two trial increments c - c_{i-1} for the zone-tip solve."""
        st = self.state
        if len(st.times) == 1:
            # one interval [1, c] with the crack-tip value sinc * t**-g
            sbar = (self.yp.sinc * t ** (-self.gamma)) ** (1.0 / self.beta)
            dc = 1.0 / math.cos(0.5 * math.pi / sbar) - 1.0 if sbar > 1.05 else 0.5
            return 0.5 * dc, dc
        dt_prev = st.times[-1] - st.times[-2]
        scale = (t - st.times[-1]) / dt_prev
        dc = max(st.c_series[-1] - st.c_series[-2], 1e-12) * scale
        return 0.5 * dc, dc

    def solve_zone(self, a: float, t: float, k_lo: int | None = None) -> _Zone:
        """Zone tip c with K(c, t) = 0 for crack tip a at time t.

        The secant runs in u = ln(c - c_{i-1}), so every trial stays ahead of
        the stored points and the step tolerance is relative to the increment
        (which ranges over many decades, e.g. ~1e-7 on the first step when
        gamma is close to 1).
        """
        s = self.settings
        if k_lo is None:
            k_lo = self._live_floor()
        base = self._zone_nodes(a, t, k_lo)
        c_prev = self.state.c_series[-1]
        cache = {}

        def resid(u):
            z = self._zone_for(a, t, c_prev + math.exp(u), base)
            cache[u] = z
            return z.K

        d1, d2 = self._initial_dc_guess(t)
        u1, u2 = math.log(d1), math.log(d2)
        for _ in range(s.max_retries):
            try:
                resid(u1)
                break
            except TRIAL_ERRORS:
                u1 += 1.0  # the guess fell inside the already-failed region
        try:
            u = secant_root(resid, u1, u2, eps=s.eps, max_iter=s.max_iter, ftol=s.sif_tol,
                            bounds=(-700.0, 10.0), max_retries=s.max_retries)
        except PrecisionFloorError:
            zones = list(cache.values())
            best = min(zones, key=lambda z: abs(z.K))
            # look for the sign change within a few ulps of the best trial
            for direction in (math.inf, -math.inf):
                c = best.c
                for _ in range(_FLOOR_ULPS):
                    c = math.nextafter(c, direction)
                    if c <= c_prev:
                        break
                    try:
                        zones.append(self._zone_for(a, t, c, base))
                    except TRIAL_ERRORS:
                        break
            zone = self._floor_zone(zones)
            if zone is None:
                raise
            log.debug("K = %.3g at the float resolution of c = %r", zone.K, zone.c)
            return zone
        return cache[u]

    @staticmethod
    def _floor_zone(zones):
        """Best zone when the sign change of K is resolved to a few ulps of c, else None."""
        pos = [z for z in zones if z.K > 0]
        neg = [z for z in zones if z.K < 0]
        if not pos or not neg:
            return None
        zp = max(pos, key=lambda z: z.c)
        zn = min(neg, key=lambda z: z.c)
        if zn.c - zp.c > _FLOOR_ULPS * math.ulp(zp.c):
            return None
        return min((zp, zn), key=lambda z: abs(z.K))

    # -------------------------------------------------------------- opening
    def crack_opening(self, zone: _Zone):
        """Elastic and viscoelastic crack-tip openings for a solved zone."""
        sig = self._sigma(zone.sigma_beta)
        de = elastic.opening_from_nodes(zone.a, zone.nodes, sig)
        zone.delta_e = de
        if not self.params.viscous:
            zone.delta_v = de
            return zone
        st = self.state
        m = zone.m
        times = [st.times[m]]
        vals = [0.0]  # opening pinned to zero where the tip point joined
        for k in range(m + 1, len(st.times)):
            nodes_k, sb_k = st.zones[k]
            times.append(st.times[k])
            vals.append(elastic.opening_from_nodes(zone.a, nodes_k, self._sigma(sb_k)))
        times.append(zone.t)
        vals.append(de)
        cr = self.params.creep
        zone.delta_v = de + cr.m * creep_convolution(times, vals, zone.t, cr.theta)
        return zone

    def delta_of(self, zone: _Zone) -> float:
        return zone.delta_v if self.params.viscous else zone.delta_e

    def _delta_residual(self, a, t, k_lo=None):
        try:
            zone = self.solve_zone(a, t, k_lo)
        except ConvergenceError as exc:
            # no zone tip for this trial; the outer iteration backs off
            raise InvalidTrialError(f"zone solve failed at a={a!r}, t={t!r}: {exc}") from exc
        zone = self.crack_opening(zone)
        return self.delta_of(zone) - self.params.delta_c, zone

    # --------------------------------------------------------------- commit
    def _commit(self, zone: _Zone, pinned=False):
        st = self.state
        k_lo_prev = self._live_floor()
        i = len(st.times)
        # post-join samples of older points still tracked
        live = self.zone_stress(zone.t, k_lo_prev) if i > 1 else np.empty(0)
        for off, val in enumerate(live):
            self._post[k_lo_prev + off].append((i, float(val)))
        st.times.append(zone.t)
        st.a_series.append(zone.a)
        st.c_series.append(zone.c)
        st.K_series.append(zone.K)
        st.delta_e.append(zone.delta_e)
        st.delta_v.append(zone.delta_v)
        st.pinned.append(pinned)
        st.zones.append((zone.nodes, zone.sigma_beta))
        self.ahead.append(zone.nodes, self._sigma(zone.sigma_beta))
        # new zone point at the tip
        times = np.asarray(st.times)
        s0, dslope = closed_form_coefficients(times, zone.tip_history)
        self._rows.extend(times[:-1], np.full(i, zone.t), dslope, np.full(i, i))
        self._row_offset.append(self._rows.n - i)
        self._point_x.append(zone.c)
        self._s0.append(s0)
        self._tk.append(zone.t)
        self._post.append([])
        self._tip_histories.append(zone.tip_history)
        self._zone_cache.clear()

    # ------------------------------------------------------------ stage one
    def _step_stationary(self, t):
        return self.crack_opening(self.solve_zone(1.0, t, k_lo=0))

    def stationary_stage(self, t_end: float | None = None, stop_at_delay: bool = True):
        """March the stationary crack on t_i = i h until delta >= delta_c (or t_end)."""
        s = self.settings
        t_end = s.t_end if t_end is None else t_end
        st = self.state
        while True:
            i = len(st.times)
            t = i * s.h
            if t > t_end * (1 + 1e-12):
                if stop_at_delay:
                    raise NoCrackGrowth(f"delta < delta_c up to t = {st.times[-1]:g}")
                return st
            zone = self._step_stationary(t)
            if stop_at_delay and self.delta_of(zone) >= self.params.delta_c:
                self._find_delay(zone)
                return st
            self._commit(zone)

    def _find_delay(self, zone_hi):
        s = self.settings
        st = self.state
        t_lo = st.times[-1]
        t_hi = zone_hi.t
        cache = {t_hi: zone_hi}

        def resid(t):
            z = self._step_stationary(t)
            cache[t] = z
            return self.delta_of(z) - self.params.delta_c

        r_hi = self.delta_of(zone_hi) - self.params.delta_c
        if r_hi == 0.0:
            t_d = t_hi
        else:
            t_a = t_lo + 0.5 * (t_hi - t_lo) if len(st.times) > 1 else 0.5 * t_hi
            t_d = secant_root(resid, t_hi, t_a, eps=s.eps * s.h, max_iter=s.max_iter,
                              ftol=s.delta_tol,
                              bounds=(t_lo, t_hi * (1 + 1e-12)), max_retries=s.max_retries)
        zone = cache[t_d]
        self._commit(zone)
        st.t_d = t_d
        st.i_d = len(st.times) - 1
        st.stage = "propagating"
        log.info("delay time t_d = %.6g, c(t_d) = %.6g", t_d, zone.c)
        return t_d

    def find_delay_time(self):
        st = self.stationary_stage()
        return st.t_d, st

    # ------------------------------------------------------------ stage two
    def propagation_step(self, t: float, commit: bool = True):
        """One growth step at time t. Returns the accepted zone, or None if pinning is needed."""
        s = self.settings
        st = self.state
        xs = self._point_x
        K = len(xs) - 1
        k_lo = self._live_floor()
        a_prev = st.a_series[-1]
        delta_c = self.params.delta_c
        cache = {}

        def resid(a):
            r, z = self._delta_residual(a, t, k_lo)
            cache[a] = z
            return r

        # residual falls from + to - as a increases; scan forward from a_prev
        # over the stored points (the crack cannot heal, so a < a_prev is never tried)
        r_lo = resid(a_prev)
        if r_lo <= 0.0:
            a = a_prev
            if r_lo < -s.delta_tol:
                log.warning("delta below delta_c at the current crack tip (t=%g): no growth", t)
        else:
            x_lo = a_prev
            m_hi = self._bracket_index(a_prev) + 1
            while True:
                if m_hi > K:
                    return None  # a passes the newest point: pin
                r_hi = resid(xs[m_hi])
                if r_hi < 0:
                    break
                x_lo, r_lo = xs[m_hi], r_hi
                m_hi += 1
            x1, x2 = x_lo, xs[m_hi]
            if r_lo == 0.0:
                a = x1
            else:
                a = secant_root(resid, x1, x2, eps=s.eps, max_iter=s.max_iter,
                                ftol=s.delta_tol, bounds=(a_prev, xs[K]),
                                max_retries=s.max_retries)
        zone = cache[a]
        if commit:
            self._commit(zone)
        return zone

    def pinned_step(self, t_hi: float, commit: bool = True):
        """Fix a = c_{i-1}; solve delta = delta_c and K = 0 for (t_i, c_i)."""
        s = self.settings
        st = self.state
        a = st.c_series[-1]
        t_prev = st.times[-1]
        k_lo = len(self._point_x) - 1
        cache = {}

        def resid(t):
            r, z = self._delta_residual(a, t, k_lo)
            cache[t] = z
            return r

        # the pinned steps shrink quickly, so start from the previous step size
        dt = min(t_hi - t_prev, st.times[-1] - st.times[-2])
        t1 = t_prev + dt
        for _ in range(s.max_retries):
            try:
                resid(t1)
                break
            except TRIAL_ERRORS:
                dt *= 0.5
                t1 = t_prev + dt
        t2 = t_prev + 0.5 * dt
        t_i = secant_root(resid, t1, t2, eps=s.eps * dt, max_iter=s.max_iter,
                          ftol=s.delta_tol, bounds=(t_prev, t_hi * (1 + 1e-12)),
                          max_retries=s.max_retries)
        zone = cache[t_i]
        if commit:
            self._commit(zone, pinned=True)
        return zone

    def _rupture_status(self):
        """Final l, a and step size, plus the list of thresholds crossed."""
        s = self.settings
        st = self.state
        a, c = st.a_series[-1], st.c_series[-1]
        l = c - a
        dt = st.times[-1] - st.times[-2]
        fired = []
        if l < s.l_min:
            fired.append("l_min")
        if a > s.a_max:
            fired.append("a_max")
        if dt < s.h * s.h_min_factor:
            fired.append("h_min")
        return {"triggers": fired, "l": l, "a": a, "dt": dt}

    def propagation_stage(self):
        """Uniform steps t_d + i h until pinning, then pinned steps until rupture."""
        s = self.settings
        st = self.state
        pinned_mode = False
        steps = 0
        while steps < s.max_steps:
            steps += 1
            t_prev = st.times[-1]
            t = t_prev + s.h
            if t > s.t_end * (1 + 1e-12):
                return "t_end", self._rupture_status()
            zone = None
            if not pinned_mode:
                zone = self.propagation_step(t)
                if zone is None:
                    pinned_mode = True
                    log.info("pinned steps from t = %g", t_prev)
            if zone is None:
                try:
                    self.pinned_step(t)
                except PrecisionFloorError as exc:
                    # the accelerating crack has outrun double precision in c
                    log.info("precision floor at t = %g: %s", t_prev, exc)
                    status = self._rupture_status()
                    status["triggers"].append("precision_floor")
                    return "ruptured", status
            status = self._rupture_status()
            if status["triggers"]:
                return "ruptured", status
        return "max_steps", self._rupture_status()

    # -------------------------------------------------------------- driver
    def run(self) -> Trajectory:
        st = self.state
        outcome, crit = "no_growth", {}
        try:
            self.stationary_stage()
            if not self.settings.stationary_only:
                outcome, crit = self.propagation_stage()
            else:
                outcome = "delay"
        except NoCrackGrowth:
            outcome = "no_growth"
        except (ConvergenceError, NegativeStressError, InvalidTrialError) as exc:
            log.error("run aborted at t=%g: %s", st.times[-1], exc)
            outcome = f"aborted: {exc}"
        st.stage = "ruptured" if outcome == "ruptured" else st.stage
        return self.trajectory(outcome, crit)

    def trajectory(self, outcome="", crit=None) -> Trajectory:
        st = self.state
        delta = st.delta_v if self.params.viscous else st.delta_e
        t_r = st.times[-1] if outcome == "ruptured" else None
        l_td = None
        if st.i_d is not None:
            l_td = st.c_series[st.i_d] - st.a_series[st.i_d]
        meta = {
            "b": self.params.b, "beta": self.params.beta, "gamma": self.gamma,
            "delta_c": self.params.delta_c, "mode": self.params.mode,
            "m": self.params.creep.m, "theta": self.params.creep.theta,
            "h": self.settings.h,
        }
        return Trajectory(
            t=np.asarray(st.times), a=np.asarray(st.a_series), c=np.asarray(st.c_series),
            delta=np.asarray(delta), pinned=np.asarray(st.pinned), t_d=st.t_d, t_r=t_r,
            outcome=outcome, rupture=dict(crit or {}), meta=meta, l_at_td=l_td,
        )

    # ----------------------------------------------------------- inspection
    def point_record(self, k: int) -> CzPointRecord:
        """Full sigma**beta history of zone point k (pre-join and tracked post-join nodes)."""
        st = self.state
        hist = self._tip_histories[k]
        times = list(st.times[: k + 1])
        vals = list(hist)
        for i, v in self._post[k]:
            times.append(st.times[i])
            vals.append(v)
        return CzPointRecord(x=self._point_x[k], k_join=k, times=np.asarray(times),
                             sigma_beta=np.asarray(vals))

    def tip_sigma(self, i: int) -> float:
        """sigma at the zone tip at accepted node i."""
        return float(self.state.zones[i][1][-1] ** (1.0 / self.beta))

    def damage_residuals(self, exact: bool = True, every: int = 1,
                         max_points: int | None = None):
        """max |damage - 1| over the zone points at their tracked post-join nodes.

        With ``exact`` the post-join history is the closed form itself (the
        check then measures how well the solved stresses satisfy the yield
        condition); otherwise the stored samples are interpolated linearly,
        which misses the steep start after joining by O(1) on the first
        interval.  ``every`` thins the node set per point.

        ``max_points`` bounds the cost on long runs: every point is still
        checked at its joining node, which is cheap, but the post-join nodes
        (first and last tracked) only on that many evenly spaced points.
        """
        worst = 0.0
        fn = damage_integral_exact if exact else damage_integral
        n = len(self._point_x)
        sampled = set(range(1, n))
        if max_points is not None and n - 1 > max_points:
            sampled = set(np.linspace(1, n - 1, max_points).round().astype(int).tolist())
        for k in range(1, n):
            rec = self.point_record(k)
            if k in sampled:
                nodes = range(k, len(rec.times), every)
                if max_points is not None:
                    nodes = sorted({k, min(k + 1, len(rec.times) - 1), len(rec.times) - 1})
            else:
                nodes = [k]
            for j in nodes:
                worst = max(worst, abs(fn(rec, rec.times[j], self.yp) - 1.0))
        return worst


def run_simulation(params: MaterialParams, settings: SolverSettings | None = None) -> Trajectory:
    return CrackSolver(params, settings).run()


def find_delay_time(params: MaterialParams, h: float, **kw):
    solver = CrackSolver(params, SolverSettings(h=h, **kw))
    return solver.find_delay_time()


@dataclass
class JumpReport:
    """Right limits of a, c and l at the delay time versus their values there."""

    t_d: float
    a_d: float
    c_d: float
    l_d: float
    probes: list  # (t, a, c, l) with t decreasing toward t_d
    a_lim: float
    c_lim: float
    l_lim: float
    tol: float
    jump: dict = field(default_factory=dict)

    @property
    def any_jump(self) -> bool:
        return any(self.jump.values())

    def to_dict(self):
        d = asdict(self)
        d["any_jump"] = self.any_jump
        return d


def _limit(seq):
    from .analysis import DegenerateSequenceError, aitken

    if len(seq) < 3:
        return seq[-1]
    try:
        lim = aitken(*seq[-3:])
    except DegenerateSequenceError:
        return seq[-1]
    # a diverging or oscillating tail makes Aitken meaningless
    return lim if math.isfinite(lim) else seq[-1]


def jump_analysis(params: MaterialParams, h: float, n_probes: int = 10,
                  tol: float = 1e-3, **settings_kw) -> JumpReport:
    """Probe the first growth step at t_d + h 2**-k, k = 0..n_probes-1, and extrapolate.

    Each probe is a single uncommitted growth step from the accepted state at
    the delay time.  The limits come from Aitken extrapolation over the three
    smallest offsets; a jump is reported for each of a, c, l whose limit
    differs from its value at t_d by more than ``tol``.
    """
    solver = CrackSolver(params, SolverSettings(h=h, **settings_kw))
    t_d, st = solver.find_delay_time()
    a_d, c_d = st.a_series[-1], st.c_series[-1]
    probes = []
    for k in range(n_probes):
        t = t_d + h * 2.0 ** (-k)
        zone = solver.propagation_step(t, commit=False)
        if zone is None:
            log.warning("probe at t_d + %g needs a pinned step; skipped", t - t_d)
            continue
        probes.append((t, zone.a, zone.c, zone.c - zone.a))
    if not probes:
        raise ConvergenceError("no admissible probe step after the delay time")
    a_lim = _limit([p[1] for p in probes])
    c_lim = _limit([p[2] for p in probes])
    l_lim = _limit([p[3] for p in probes])
    l_d = c_d - a_d
    jump = {"a": abs(a_lim - a_d) > tol, "c": abs(c_lim - c_d) > tol, "l": abs(l_lim - l_d) > tol}
    return JumpReport(t_d, a_d, c_d, l_d, probes, a_lim, c_lim, l_lim, tol, jump)

