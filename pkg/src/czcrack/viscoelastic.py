"""Crack-tip opening of a standard linear solid via the Volterra principle.

With constant Poisson ratio only 1/mu becomes an operator, and the normalised
viscoelastic opening is

    delta_v(t) = delta_e(t) + m * int_{t_c}^{t} exp(-(t - tau)/theta) [u_e](a(t), tau) dtau

where [u_e](a(t), tau) is the elastic opening, at the current crack-tip
position, of the configuration at the earlier time tau.
"""
from dataclasses import dataclass
import math

import numpy as np


@dataclass(frozen=True)
class CreepParams:
    """m = mu0 t_inf / eta and theta = relaxation time / t_inf; m = 0 is elastic."""

    m: float = 0.0
    theta: float = 1.0

    def __post_init__(self):
        if self.m < 0:
            raise ValueError(f"m must be >= 0, got {self.m}")
        if not self.theta > 0:
            raise ValueError(f"theta must be > 0, got {self.theta}")


@dataclass
class OpeningHistory:
    """[u_e] at a fixed point on nodes ``times``; the first sample is the pinned zero."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have the same length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("history times must be increasing")


def creep_kernel(dt, params: CreepParams):
    """exp(-dt / theta)."""
    return np.exp(-np.asarray(dt, dtype=float) / params.theta)


_SMALL_R = 0.1
# 1 - exp(-r) (1 + r) = sum_{k>=2} (-1)**k (k - 1) r**k / k!
_M1_SERIES = np.array([(-1) ** k * (k - 1) / math.factorial(k) for k in range(2, 16)])


def _one_minus_exp_poly(r):
    """1 - exp(-r) (1 + r), without cancellation for small r."""
    out = -np.expm1(-r) - r * np.exp(-r)
    small = r < _SMALL_R
    if np.any(small):
        rs = r[small]
        acc = np.full_like(rs, _M1_SERIES[-1])
        for ck in _M1_SERIES[-2::-1]:
            acc = acc * rs + ck
        out[small] = acc * rs * rs
    return out


def creep_convolution(times, values, t_i: float, theta: float) -> float:
    """int exp(-(t_i - tau)/theta) u(tau) dtau over [times[0], times[-1]] for linear u."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size < 2:
        return 0.0
    dt = np.diff(times)
    r = dt / theta
    e_right = np.exp(-(t_i - times[1:]) / theta)
    em = -np.expm1(-r)  # 1 - exp(-r)
    # s = t_{k+1} - tau: int_0^dt e^{-s/theta} ds and int_0^dt s e^{-s/theta} ds
    m0 = theta * em
    m1 = theta * theta * _one_minus_exp_poly(r)
    w_left = e_right * m1 / dt
    w_right = e_right * (m0 - m1 / dt)
    return float(np.sum(w_left * values[:-1] + w_right * values[1:]))


def crack_tip_opening_visco(delta_e: float, hist: OpeningHistory, t_i: float,
                            params: CreepParams) -> float:
    """delta_v = delta_e + m * (exponential-kernel convolution of the opening history).

    The history runs from the node at which the tip point entered the zone
    (opening pinned to zero there) to t_i; each subinterval is integrated in
    closed form for the linear interpolant.
    """
    if params.m == 0.0:
        return float(delta_e)
    if hist.times.size and hist.times[-1] > t_i * (1 + 1e-14) + 1e-300:
        raise ValueError("opening history extends beyond the evaluation time")
    return float(delta_e + params.m * creep_convolution(hist.times, hist.values, t_i, params.theta))
