"""Gauss hypergeometric function and the singular kernels of the Abel solution.

The kernels are the closed forms of

    V(y, t, t_c) = int_{t_c}^{t} (tau - y)**(g - 1) / (t - tau)**g dtau
    W(y, t, t_c) = int_{t_c}^{t} (tau - y)**g       / (t - tau)**g dtau

split into a constant (csc) part and a hypergeometric remainder (the
"tilde" kernels).  All functions accept numpy arrays and broadcast.
"""
import math

import numpy as np

SERIES_RTOL = 1e-16
MAX_TERMS = 10_000
# Above this argument the series is re-expanded about z = 1 (both expansions
# then need at most ~60 terms).
CONNECTION_Z = 0.5


class HypergeometricDomainError(ValueError):
    pass


def _series(a, b, c, z):
    """Direct power series, elementwise, for 0 <= z < 1."""
    z = np.asarray(z, dtype=float)
    flat = z.reshape(-1)
    total = np.ones(flat.size)
    idx = np.flatnonzero(flat != 0.0)
    zi = flat[idx]
    term = np.ones_like(zi)
    acc = np.ones_like(zi)
    n = 0
    # only still-active entries are carried from one term to the next
    while idx.size:
        if n >= MAX_TERMS:
            raise HypergeometricDomainError(
                f"2F1({a}, {b}; {c}; z) series did not converge in {MAX_TERMS} terms"
            )
        term = term * ((a + n) * (b + n) / ((c + n) * (n + 1.0))) * zi
        acc = acc + term
        n += 1
        done = np.abs(term) < SERIES_RTOL * np.abs(acc)
        if done.any():
            total[idx[done]] = acc[done]
            keep = ~done
            idx, zi, term, acc = idx[keep], zi[keep], term[keep], acc[keep]
    return total.reshape(z.shape)


def _z1_limit(a, b, c):
    return math.gamma(c) * math.gamma(c - a - b) / (math.gamma(c - a) * math.gamma(c - b))


def hyp2f1(a, b, c, z):
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z in [0, 1].

    Uses the power series for z <= 0.5 and the z -> 1 - z connection formula
    above that, so convergence stays fast as z approaches 1.  Parameters are
    real scalars; ``z`` may be an array.

    Raises
    ------
    HypergeometricDomainError
        For z outside [0, 1], for c a nonpositive integer, or at z = 1 when
        c - a - b <= 0 (divergent).
    """
    z = np.asarray(z, dtype=float)
    if c <= 0 and float(c).is_integer():
        raise HypergeometricDomainError(f"c = {c} is a nonpositive integer")
    if np.any((z < 0.0) | (z > 1.0)) or np.any(np.isnan(z)):
        raise HypergeometricDomainError("z must lie in [0, 1]")
    s = c - a - b
    if np.any(z == 1.0) and s <= 0:
        raise HypergeometricDomainError(f"2F1 diverges at z = 1 for c - a - b = {s}")

    out = np.empty_like(z)
    near = z > CONNECTION_Z
    if float(s).is_integer():
        # degenerate connection formula (log terms); only the series is offered
        near = z == 1.0
        out[near] = _z1_limit(a, b, c)
        out[~near] = _series(a, b, c, z[~near])
        return out[()] if out.ndim == 0 else out

    out[~near] = _series(a, b, c, z[~near])
    if near.any():
        w = 1.0 - z[near]
        coef1 = _z1_limit(a, b, c)
        coef2 = math.gamma(c) * math.gamma(-s) / (math.gamma(a) * math.gamma(b))
        out[near] = coef1 * _series(a, b, 1.0 - s, w) + coef2 * w**s * _series(
            c - a, c - b, 1.0 + s, w
        )
    return out[()] if out.ndim == 0 else out


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Scalar 2F1(a, b; c; z) on [0, 1]; at z = 1 the Gauss summation value."""
    return float(hyp2f1(a, b, c, z))


def csc_pi(gamma: float) -> float:
    """pi * csc(pi * gamma)."""
    return math.pi / math.sin(math.pi * gamma)


def _check_args(y, t, t_c, gamma):
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    y, t, t_c = np.broadcast_arrays(
        np.asarray(y, dtype=float), np.asarray(t, dtype=float), np.asarray(t_c, dtype=float)
    )
    if np.any(t <= t_c):
        raise ValueError("kernel requires t > t_c")
    if np.any(y > t_c):
        raise ValueError("kernel requires y <= t_c")
    return y, t, t_c


def kernel_V_tilde(y, t, t_c, gamma):
    """Hypergeometric part of V: -(1/g) z**g 2F1(g, g; 1+g; z), z = (t_c - y)/(t - y)."""
    y, t, t_c = _check_args(y, t, t_c, gamma)
    z = (t_c - y) / (t - y)
    return -(z**gamma) * hyp2f1(gamma, gamma, 1.0 + gamma, z) / gamma


def kernel_V(y, t, t_c, gamma):
    return csc_pi(gamma) + kernel_V_tilde(y, t, t_c, gamma)


def kernel_W_tilde(y, t, t_c, gamma):
    """Hypergeometric part of W.

    -(t_c - y)**(1+g) (t - y)**(-g) 2F1(1+g, g; 2+g; z) / (1+g)
    """
    y, t, t_c = _check_args(y, t, t_c, gamma)
    return _w_tilde(t_c - y, t - y, gamma)


def _w_tilde(d_c, d_t, gamma):
    # d_c = t_c - y >= 0, d_t = t - y > d_c; no validation (hot path)
    z = d_c / d_t
    return -(d_c ** (1.0 + gamma)) * d_t ** (-gamma) * hyp2f1(
        1.0 + gamma, gamma, 2.0 + gamma, z
    ) / (1.0 + gamma)


def _clenshaw(x, coef):
    """Chebyshev series sum_k coef[k] T_k(x) with in-place buffers."""
    x2 = 2.0 * x
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    tmp = np.empty_like(x)
    for ck in coef[:0:-1]:
        np.multiply(x2, b1, out=tmp)
        tmp -= b2
        tmp += ck
        b1, b2, tmp = tmp, b1, b2
    np.multiply(x, b1, out=tmp)
    tmp -= b2
    tmp += coef[0]
    return tmp


class WTildeEvaluator:
    """Fast vectorised W~ for one gamma, for the many-row sums of the solver.

    2F1(1+g, g; 2+g; z) is replaced by a Chebyshev interpolant on z <= 1/2.
    Above that the connection formula applies; one of its two pieces reduces
    to z**-(1+g) exactly and the other, 2F1(1, 2; 2-g; w) with w = 1 - z <= 1/2,
    gets its own interpolant.  Both interpolants are built from the series
    and agree with it to about 1e-15 relative.
    """

    DEGREE = 24

    def __init__(self, gamma: float):
        if not 0.0 < gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
        from numpy.polynomial import chebyshev as C

        g = gamma
        self.gamma = g
        nodes = 0.25 * (np.cos(np.pi * (np.arange(self.DEGREE + 1) + 0.5) / (self.DEGREE + 1)) + 1.0)
        x = 4.0 * nodes - 1.0
        self._cf = C.chebfit(x, hyp2f1(1.0 + g, g, 2.0 + g, nodes), self.DEGREE)
        self._cg = C.chebfit(x, hyp2f1(1.0, 2.0, 2.0 - g, nodes), self.DEGREE)
        a, c = 1.0 + g, 2.0 + g
        self._coef1 = math.gamma(c) * math.gamma(1.0 - g)  # c - a - b = 1 - g exactly
        self._coef2 = math.gamma(c) * math.gamma(g - 1.0) / (math.gamma(a) * math.gamma(g))

    def hyp(self, z):
        """2F1(1+g, g; 2+g; z) on [0, 1)."""
        z = np.asarray(z, float)
        out = np.empty_like(z)
        lo = z <= 0.5
        out[lo] = _clenshaw(4.0 * z[lo] - 1.0, self._cf)
        w = 1.0 - z[~lo]
        g = self.gamma
        out[~lo] = self._coef1 * z[~lo] ** (-1.0 - g) + self._coef2 * w ** (1.0 - g) * \
            _clenshaw(4.0 * w - 1.0, self._cg)
        return out

    def __call__(self, d_c, d_t):
        """W~ for d_c = t_c - y >= 0 and d_t = t - y > d_c (arrays)."""
        g = self.gamma
        d_c = np.asarray(d_c, float)
        d_t = np.asarray(d_t, float)
        z = d_c / d_t
        out = np.empty_like(z)
        lo = z <= 0.5
        zl = z[lo]
        out[lo] = -(d_c[lo] ** (1.0 + g)) * d_t[lo] ** (-g) * \
            _clenshaw(4.0 * zl - 1.0, self._cf) / (1.0 + g)
        hi = ~lo
        dc, dt = d_c[hi], d_t[hi]
        w = (dt - dc) / dt
        # coef1 z**-(1+g) times the prefactor is exactly -coef1 d_t / (1 + g)
        out[hi] = -(self._coef1 * dt + self._coef2 * dc ** (1.0 + g) * dt ** (-g)
                    * w ** (1.0 - g) * _clenshaw(4.0 * w - 1.0, self._cg)) / (1.0 + g)
        return out


def kernel_W(y, t, t_c, gamma):
    y_, t_, _ = _check_args(y, t, t_c, gamma)
    return gamma * csc_pi(gamma) * (t_ - y_) + kernel_W_tilde(y, t, t_c, gamma)


def kernel_V00(t, t_c, gamma):
    """gamma * V_tilde(0, t, t_c) = -(t_c/t)**g 2F1(g, g; 1+g; t_c/t)."""
    t = np.asarray(t, dtype=float)
    t_c = np.asarray(t_c, dtype=float)
    if np.any(t_c >= t) or np.any(t_c < 0):
        raise ValueError("kernel_V00 requires 0 <= t_c < t")
    z = t_c / t
    return -(z**gamma) * hyp2f1(gamma, gamma, 1.0 + gamma, z)
