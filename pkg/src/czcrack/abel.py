"""History-dependent yield condition on the cohesive zone.

A material point x that joined the cohesive zone at time t_c(x) satisfies

    gamma * int_0^t sigma**beta(x, tau) (t - tau)**(gamma - 1) dtau = 1,   t >= t_c(x)

which, with the history on [0, t_c] known, is a first-kind Abel equation for
sigma**beta on [t_c, t].  Histories are stored as samples of sigma**beta on
time nodes and interpolated piecewise linearly in time.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .special import WTildeEvaluator, hyp2f1


class ModelInapplicableError(ValueError):
    """The damage exponents give gamma outside (0, 1), where no cohesive zone exists."""


class NegativeStressError(ArithmeticError):
    """A solved sigma**beta came out nonpositive (mesh too coarse or bad history)."""


@dataclass(frozen=True)
class YieldParams:
    beta: float
    gamma: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ModelInapplicableError(f"beta must be positive, got {self.beta}")
        if not 0.0 < self.gamma < 1.0:
            raise ModelInapplicableError(
                f"gamma = {self.gamma} outside (0, 1): a cohesive zone governed by the "
                "history-dependent yield condition exists only for 0 < beta < b"
            )

    @property
    def b(self) -> float:
        return self.beta / self.gamma

    @property
    def sinc(self) -> float:
        """sin(pi gamma) / (pi gamma)."""
        return math.sin(math.pi * self.gamma) / (math.pi * self.gamma)


def validate_gamma(beta: float, b: float) -> YieldParams:
    if beta <= 0 or b <= 0:
        raise ModelInapplicableError(f"beta and b must be positive (beta={beta}, b={b})")
    gamma = beta / b
    if gamma >= 1.0:
        raise ModelInapplicableError(
            f"gamma = beta/b = {gamma:g} >= 1: the cohesive zone cannot persist "
            "(gamma = 1 is the Robinson linear-summation rule); need 0 < beta < b"
        )
    return YieldParams(beta=beta, gamma=gamma)


@dataclass
class CzPointRecord:
    """sigma**beta history of one material point.

    ``times[j]`` and ``sigma_beta[j]`` for j = 0..n-1; the point joined the
    cohesive zone at ``times[k_join]``.  Samples before ``k_join`` come from
    the stress ahead of the zone, the one at ``k_join`` from the tip update.
    """

    x: float
    k_join: int
    times: np.ndarray = field(repr=False)
    sigma_beta: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.sigma_beta = np.asarray(self.sigma_beta, dtype=float)
        if self.times.shape != self.sigma_beta.shape:
            raise ValueError("times and sigma_beta must have the same length")

    @property
    def t_join(self) -> float:
        return float(self.times[self.k_join])


def _binom_series(p: float, n: int) -> np.ndarray:
    """Generalised binomial coefficients C(p, k), k = 0..n-1."""
    k = np.arange(1, n)
    return np.concatenate(([1.0], np.cumprod((p - k + 1) / k)))


_SERIES_R = 0.1
_SERIES_N = 20
_coef_cache: dict = {}


def _right_series_coef(gamma: float) -> np.ndarray:
    """Coefficients of r**(k-1), k = 2..N, in the small-r right weight (divided by B**gamma)."""
    c = _coef_cache.get(gamma)
    if c is None:
        cg = _binom_series(gamma, _SERIES_N + 1)
        cg1 = _binom_series(gamma + 1.0, _SERIES_N + 1)
        c = cg[2:] + cg[1:-1] - gamma / (gamma + 1.0) * cg1[2:]
        _coef_cache[gamma] = c
    return c


def _interval_weights(B, D, gamma):
    """Left and right node weights of one interval for the hat-function moments.

    With u = t - tau running over [B, B + D] (left node at u = B + D):
    left  = gamma/D int (u - B) u**(gamma-1) du,
    right = gamma/D int (B + D - u) u**(gamma-1) du.
    For D << B both closed forms lose digits to cancellation, so the
    right weight is summed as a series in r = D/B there.
    """
    B = np.asarray(B, float)
    D = np.asarray(D, float)
    g1 = gamma + 1.0
    small = D < _SERIES_R * B
    right = np.empty_like(B)
    if np.any(small):
        r = D[small] / B[small]
        coef = _right_series_coef(gamma)
        acc = np.full_like(r, coef[-1])
        for ck in coef[-2::-1]:
            acc = acc * r + ck
        right[small] = B[small] ** gamma * r * acc
    big = ~small
    if np.any(big):
        Bb, Db = B[big], D[big]
        Ab = Bb + Db
        right[big] = gamma / Db * (Ab * (Ab**gamma - Bb**gamma) / gamma
                                   - (Ab**g1 - Bb**g1) / g1)
    # A**gamma - B**gamma; expm1 only where D < B (it would overflow for tiny B)
    near = D < B
    total = (B + D) ** gamma - B**gamma
    total[near] = B[near] ** gamma * np.expm1(gamma * np.log1p(D[near] / B[near]))
    return total - right, right


def product_weights(times, t: float, gamma: float) -> np.ndarray:
    """Weights w with sum(w * s) = gamma * int interp(s)(tau) (t - tau)**(gamma-1) dtau.

    ``interp(s)`` is the piecewise-linear interpolant of samples s on
    ``times`` (all <= t), taken as zero after the last node.  Each subinterval
    is integrated exactly.
    """
    times = np.asarray(times, dtype=float)
    w = np.zeros(times.size)
    if times.size < 2:
        return w
    B = t - times[1:]
    if np.any(B < -1e-14 * max(1.0, abs(t))):
        raise ValueError("product_weights requires all nodes <= t")
    B = np.maximum(B, 0.0)
    left, right = _interval_weights(B, np.diff(times), gamma)
    w[:-1] += left
    w[1:] += right
    return w


def damage_integral(record: CzPointRecord, t: float, params: YieldParams) -> float:
    """gamma * int_0^t sigma**beta (t - tau)**(gamma-1) dtau for the record's history."""
    mask = record.times <= t
    times = record.times[mask]
    return float(product_weights(times, t, params.gamma) @ record.sigma_beta[mask])


def cz_tip_stress_update(times, sigma_beta_history, params: YieldParams) -> float:
    """sigma**beta at the node ``times[-1]`` for a point joining the zone there.

    ``sigma_beta_history`` holds the samples at ``times[:-1]``.  The
    discretised yield condition (piecewise-linear history, exact moments) is
    linear in the unknown last sample; this is its explicit solution,
    (1 - sum_j w_j s_j) / w_last with the product-integration weights.
    """
    t = np.asarray(times, dtype=float)
    s = np.asarray(sigma_beta_history, dtype=float)
    i = t.size - 1
    if s.size != i or i < 1:
        raise ValueError("need samples at all nodes before the joining node")
    w = product_weights(t, t[-1], params.gamma)
    value = (1.0 - w[:-1] @ s) / w[-1]
    if not value > 0:
        raise NegativeStressError(f"cohesive-zone tip sigma**beta = {value:.6g} <= 0")
    return float(value)


def closed_form_coefficients(times, sigma_beta):
    """Node weights of the closed-form Abel solution for a history on times[0..k].

    Returns ``(s0, dslope)`` where ``dslope[j]`` multiplies W_tilde(t_j, t, t_k)
    for j = 0..k-1 (the jump in slope of the interpolant at t_j, with the
    slope before t_0 taken as 0).
    """
    times = np.asarray(times, dtype=float)
    s = np.asarray(sigma_beta, dtype=float)
    slope = np.diff(s) / np.diff(times)
    dslope = np.diff(slope, prepend=0.0)
    return float(s[0]), dslope


_evaluators: dict = {}


def _w_tilde_for(gamma):
    ev = _evaluators.get(gamma)
    if ev is None:
        ev = _evaluators[gamma] = WTildeEvaluator(gamma)
    return ev


def cz_stress_closed_form(record: CzPointRecord, t, params: YieldParams, check: bool = True):
    """sigma**beta(x, t) for t > t_join from the closed-form Abel inversion.

    Uses the sinc form with V00 and W_tilde kernels, which avoids the
    cancellation of the two pi*csc terms near t -> t_join.  A point that
    joined at t = 0 (the initial crack tip) has the exact solution
    sinc(pi gamma) t**(-gamma).
    """
    g = params.gamma
    k = record.k_join
    t_arr = np.asarray(t, dtype=float)
    if k == 0:
        out = params.sinc * t_arr ** (-g)
        return out[()] if out.ndim == 0 else out
    times = record.times[: k + 1]
    tk = times[-1]
    if np.any(t_arr <= tk):
        raise ValueError("closed form requires t > t_join")
    s0, dslope = closed_form_coefficients(times, record.sigma_beta[: k + 1])
    tt = t_arr[..., None]
    d_t = np.broadcast_to(tt - times[:-1], tt.shape[:-1] + (k,))
    wt = _w_tilde_for(g)(np.broadcast_to(tk - times[:-1], d_t.shape), d_t)
    z = tk / t_arr
    v00 = -(z**g) * hyp2f1(g, g, 1.0 + g, z)
    out = -params.sinc * (s0 * v00 + np.sum(dslope * wt, axis=-1))
    if check and np.any(out < 0):
        raise NegativeStressError(f"in-zone sigma**beta negative at x = {record.x:g}")
    return out[()] if out.ndim == 0 else out


_GL_T, _GL_W = np.polynomial.legendre.leggauss(10)
_GRADED_LEVELS = 30


def damage_integral_exact(record: CzPointRecord, t: float, params: YieldParams) -> float:
    """Damage at t with the post-join history taken from the closed form itself.

    The pre-join samples enter through their exact linear-interpolant
    weights.  After joining, sigma**beta has an unbounded time derivative at
    t_join, so the closed form is integrated directly: with v = (t - tau)**g
    the kernel becomes dv, and Gauss-Legendre panels are graded geometrically
    toward t_join.  For a solved history the result is 1 to rounding level.
    """
    g = params.gamma
    k = record.k_join
    tk = record.t_join
    pre = 0.0
    if k > 0:
        pre = float(product_weights(record.times[: k + 1], t, g) @ record.sigma_beta[: k + 1])
    if t <= tk:
        return pre
    if k == 0:
        # sinc t**-g: gamma sinc B(1 - g, g) = 1 exactly
        return pre + params.sinc * g * math.gamma(1.0 - g) * math.gamma(g)
    V = (t - tk) ** g
    # panels in v refined toward both ends: v**(1/g) is not smooth at v = 0,
    # and sigma**beta is not smooth at tau = t_join (v = V)
    half = 0.5 ** np.arange(1, _GRADED_LEVELS + 1)
    edges = V * np.concatenate(([0.0], half[::-1], 1.0 - half[1:], [1.0]))
    lo, hi = edges[:-1, None], edges[1:, None]
    v = 0.5 * (lo + hi) + 0.5 * (hi - lo) * _GL_T
    tau = np.maximum(t - v ** (1.0 / g), np.nextafter(tk, np.inf))
    vals = cz_stress_closed_form(record, tau.ravel(), params, check=False).reshape(tau.shape)
    post = float(np.sum(0.5 * (hi - lo)[:, 0] * (vals @ _GL_W)))
    return pre + post


def abel_inversion_oracle(record: CzPointRecord, t: float, params: YieldParams, n_sub: int = 400):
    """Direct numerical inversion of the yield condition; verification only.

    The unknown on [t_join, t] is piecewise constant on a uniform submesh,
    collocated at cell midpoints (the last one at ``t`` itself) with
    exact moments of (t - tau)**(gamma - 1), and marched forward.  The known
    history on [0, t_join] enters through ``product_weights``.  The value at
    ``t`` is obtained by Richardson extrapolation over two submesh levels.
    """

    def solve(n):
        tc = record.t_join
        hist_t = record.times[: record.k_join + 1]
        hist_s = record.sigma_beta[: record.k_join + 1]
        g = params.gamma
        edges = tc + (t - tc) * np.linspace(0.0, 1.0, n + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        # point values: collocate at the right edges too, solve via midpoints
        vals = np.empty(n)
        for m in range(n):
            tau = mids[m] if m < n - 1 else edges[-1]
            rhs = 1.0 - product_weights(hist_t, tau, g) @ hist_s
            lo = edges[: m + 1]
            hi = np.minimum(edges[1 : m + 2], tau)
            mom = (tau - lo) ** g - (tau - hi) ** g  # gamma * int (tau - s)**(g-1)
            if mom[-1] <= 0:
                raise ArithmeticError("singular collocation system")
            vals[m] = (rhs - mom[:-1] @ vals[:m]) / mom[-1]
        return vals[-1]

    coarse = solve(n_sub)
    fine = solve(2 * n_sub)
    return 2.0 * fine - coarse
