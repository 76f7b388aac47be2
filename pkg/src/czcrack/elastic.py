"""Elastic crack/cohesive-zone field quantities (normalised units).

The crack occupies |x| < a, the cohesive zone a <= |x| <= c; the traction
sigma on the zone is given on nodes and interpolated linearly in x.  The
x-integrals are evaluated per subinterval in node-value form
(sigma_1 + q (xi - xi_1)) with closed-form moments whose differences are
computed without subtracting antiderivative values, so short subintervals
carrying a steep traction gradient (the first zone subinterval can be
~1e-7 long while sigma jumps by ~1e3) keep full relative accuracy.
"""
from dataclasses import dataclass

import numpy as np

_2_PI = 2.0 / np.pi

@dataclass(frozen=True)
class CzGeometry:
    """Snapshot of the zone: ``nodes`` ascending from a to c, ``sigma`` at each node."""

    nodes: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=float))
        sigma = np.atleast_1d(np.asarray(self.sigma, dtype=float))
        if nodes.shape != sigma.shape:
            raise ValueError("nodes and sigma must have equal length")
        if nodes[0] < 1.0 - 1e-12:
            raise ValueError("crack tip a must be >= 1")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("zone nodes must be strictly increasing")
        if np.any(sigma < 0):
            raise ValueError("zone traction must be nonnegative")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def empty(cls, a: float = 1.0):
        return cls(np.array([a]), np.array([0.0]))

    @property
    def a(self) -> float:
        return float(self.nodes[0])

    @property
    def c(self) -> float:
        return float(self.nodes[-1])


def _segments(nodes, sigma):
    """Per-subinterval (xi1, xi2, p, q) with sigma = p + q xi on [xi1, xi2]."""
    x1, x2 = nodes[:-1], nodes[1:]
    q = np.diff(sigma) / (x2 - x1)
    p = sigma[:-1] - q * x1
    return x1, x2, p, q


def _root_diff(c, xi):
    """sqrt(c**2 - xi**2), clipped at 0 and accurate near xi = c."""
    return np.sqrt(np.maximum((c - xi) * (c + xi), 0.0))


def _arcsin_ratio(xi, c):
    return np.arcsin(np.minimum(xi / c, 1.0))


def _sin_minus_x(d):
    """sin(d) - d without cancellation for small d."""
    d = np.asarray(d, float)
    d2 = d * d
    small = -d * d2 / 6.0 * (1.0 - d2 / 20.0 * (1.0 - d2 / 42.0 * (1.0 - d2 / 72.0)))
    return np.where(np.abs(d) < 0.05, small, np.sin(d) - d)


@dataclass(frozen=True)
class _SegGeom:
    """x-independent per-subinterval quantities for a zone with tip c."""

    c: float
    x1: np.ndarray
    x2: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    cross: np.ndarray  # xi2 w1 - xi1 w2 = c^2 sin(dtheta) >= 0
    dw: np.ndarray  # w1 - w2 >= 0
    dtheta: np.ndarray  # arcsin(xi2/c) - arcsin(xi1/c)
    s1: np.ndarray  # sigma at xi1
    q: np.ndarray  # slope of sigma


def _seg_geom(nodes, sigma) -> _SegGeom:
    nodes = np.asarray(nodes, float)
    sigma = np.asarray(sigma, float)
    c = float(nodes[-1])
    x1, x2 = nodes[:-1], nodes[1:]
    w = _root_diff(c, nodes)
    w1, w2 = w[:-1], w[1:]
    dx = x2 - x1
    cross = c * c * dx * (x1 + x2) / (x2 * w1 + x1 * w2)
    dw = dx * (x1 + x2) / (w1 + w2)
    dtheta = np.arctan2(cross, x1 * x2 + w1 * w2)
    q = np.diff(sigma) / dx
    return _SegGeom(c, x1, x2, w1, w2, cross, dw, dtheta, sigma[:-1], q)


def sif_integral(nodes, sigma) -> float:
    """int_a^c sigma(xi) / sqrt(c**2 - xi**2) dxi for the linear interpolant."""
    nodes = np.asarray(nodes, float)
    if nodes.size < 2:
        return 0.0
    g = _seg_geom(nodes, sigma)
    d = g.dtheta
    # int (xi - xi1) / w = xi1 (sin d - d) + 2 w1 sin^2(d/2)
    m1 = g.x1 * _sin_minus_x(d) + 2.0 * g.w1 * np.sin(0.5 * d) ** 2
    return float(np.sum(g.s1 * d + g.q * m1))


def sif_from_nodes(nodes, sigma) -> float:
    c = nodes[-1]
    return float(np.sqrt(c / 2.0) * (1.0 - _2_PI * sif_integral(nodes, sigma)))


def sif(geom: CzGeometry) -> float:
    """Normalised stress intensity factor at the zone tip c."""
    return sif_from_nodes(geom.nodes, geom.sigma)


# A subinterval whose traction changes by far more than its own level over a
# tiny length (steep q) loses digits in f1 - xi1 f0; for those the centred
# moment is integrated directly in phi = arccos(xi/c), where every difference
# has a cancellation-free form.
STIFF_RATIO = 1e4
_GL8_T, _GL8_W = np.polynomial.legendre.leggauss(8)


def _centred_moment(x, c, s, phi1, dphi):
    # s int (xi - xi1) dtheta / (x^2 - xi^2) over one subinterval
    u = 0.5 * dphi[:, None] * (_GL8_T + 1.0)
    phi = phi1[:, None] - u
    num = 2.0 * c[:, None] * np.sin(phi1[:, None] - 0.5 * u) * np.sin(0.5 * u)
    den = ((x - c)[:, None] + 2.0 * c[:, None] * np.sin(0.5 * phi) ** 2) * (x + c[:, None] * np.cos(phi))
    return s * (0.5 * dphi) * ((num / den) @ _GL8_W)


def _ahead_terms(x, c, x1x2, w1w2, cross, dw, xi1, s1, q, phi1, dphi, stiff):
    # (2x/pi) s int sigma / ((x^2 - xi^2) sqrt(c^2 - xi^2)) per subinterval,
    # s = sqrt(x^2 - c^2); f0 = s int dtheta / (x^2 - xi^2), f1 the xi-moment,
    # both as arctangents of differences
    s = np.sqrt((x - c) * (x + c))
    f0 = np.arctan2(s * x * cross, s * s * x1x2 + x * x * w1w2) / x
    moment = np.arctan2(s * dw, s * s + w1w2) - xi1 * f0
    idx = stiff[np.asarray(dphi[stiff] * c[stiff] < 0.05 * s[stiff])] if stiff.size else stiff
    if idx.size:
        # quadrature is only accurate while the subinterval is short against s
        moment[idx] = _centred_moment(x, c[idx], s[idx], phi1[idx], dphi[idx])
    return _2_PI * x * (s1 * f0 + q * moment)


def _ahead_columns(nodes, sigma):
    g = _seg_geom(nodes, sigma)
    dx = g.x2 - g.x1
    scale = np.abs(g.s1) + np.abs(g.s1 + g.q * dx)
    stiff = np.flatnonzero(np.abs(g.q) * g.x1 > STIFF_RATIO * np.maximum(scale, 1e-300))
    return (g.x1 * g.x2, g.w1 * g.w2, g.cross, g.dw, g.x1, g.s1, g.q,
            np.arctan2(g.w1, g.x1), g.dtheta), stiff


def stress_ahead_from_nodes(x: float, nodes, sigma, reduced: bool = True) -> float:
    nodes = np.asarray(nodes, float)
    c = nodes[-1]
    if not x > c:
        raise ValueError(f"stress ahead of the zone needs x > c (x={x}, c={c})")
    if nodes.size < 2:
        return float(x / np.sqrt((x - c) * (x + c)))
    cols, stiff = _ahead_columns(nodes, sigma)
    cvec = np.full(cols[0].size, c)
    total = float(np.sum(_ahead_terms(x, cvec, *cols, stiff)))
    if not reduced:
        s = np.sqrt((x - c) * (x + c))
        total += x / s * (1.0 - _2_PI * sif_integral(nodes, sigma))
    return total


def stress_ahead(x: float, geom: CzGeometry, reduced: bool | None = None) -> float:
    """Normal stress sigma(x) on the crack line ahead of the zone, x > c.

    ``reduced=True`` drops the term proportional to the stress intensity
    factor (valid once K = 0 has been enforced for this geometry); the
    default uses the full expression for an empty zone and the reduced one
    otherwise.  For an empty zone this is the Griffith profile x/sqrt(x^2-c^2).
    """
    if reduced is None:
        reduced = geom.nodes.size >= 2
    return stress_ahead_from_nodes(x, geom.nodes, geom.sigma, reduced)


class AheadStressTable:
    """Stacked zone snapshots for evaluating sigma(x, t_j) at many j at once.

    Each appended snapshot (a state with K = 0) contributes its
    subintervals; a call returns the reduced ahead-of-zone stress at ``x``
    for every stored snapshot, in insertion order.  Everything that does not
    depend on x is precomputed, leaving two arctangents per subinterval.
    """

    def __init__(self):
        self._parts = []
        self._stiff = []
        self._cache = None
        self.count = 0

    def append(self, nodes, sigma):
        nodes = np.asarray(nodes, float)
        cols, stiff = _ahead_columns(nodes, sigma)
        m = cols[0].size
        offset = sum(part[0].size for part in self._parts)
        self._parts.append((np.full(m, nodes[-1]),) + cols + (np.full(m, self.count),))
        self._stiff.append(stiff + offset)
        self._cache = None
        self.count += 1

    def _stacked(self):
        if self._cache is None:
            cols = tuple(np.concatenate(col) for col in zip(*self._parts))
            self._cache = cols + (np.concatenate(self._stiff).astype(np.intp),)
        return self._cache

    def __call__(self, x: float) -> np.ndarray:
        if self.count == 0:
            return np.empty(0)
        c, *cols, ids, stiff = self._stacked()
        if np.any(x <= c):
            raise ValueError("point is not ahead of every stored zone")
        terms = _ahead_terms(x, c, *cols, stiff)
        return np.bincount(ids, weights=terms, minlength=self.count)


def gamma_kernel(x, xi, c):
    """Opening kernel ln[((W - w)/(W + w))**2], W = sqrt(c^2-x^2), w = sqrt(c^2-xi^2).

    Nonpositive, symmetric in (x, xi); -inf at x = xi (logarithmic
    singularity), 0 when either point reaches c.
    """
    x, xi = np.abs(np.asarray(x, float)), np.abs(np.asarray(xi, float))
    if np.any(x > c) or np.any(xi > c):
        raise ValueError("gamma_kernel needs |x|, |xi| <= c")
    W, w = _root_diff(c, x), _root_diff(c, xi)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 2.0 * np.log(np.abs((xi - x) * (xi + x))) - 4.0 * np.log(W + w)
    # |W - w| <= W + w, and the ratio is exactly 1 when either point sits at c
    out = np.where((W == 0.0) | (w == 0.0), 0.0, np.minimum(out, 0.0))
    return out[()] if out.ndim == 0 else out


def _opening_antiderivatives(x, xi, c):
    """Antiderivatives in xi of L and xi*L, L = ln|(W - w)/(W + w)|.

    Continuous through xi = x; an xi - independent constant is dropped from
    the first one.
    """
    W, w = _root_diff(c, x), _root_diff(c, xi)
    d2 = np.abs((xi - x) * (xi + x))
    with np.errstate(divide="ignore", invalid="ignore"):
        log_d2 = np.log(d2)
        xlogx = np.where(d2 == 0.0, 0.0, (xi - x) * log_d2)
        x2logx = np.where(d2 == 0.0, 0.0, (x - xi) * (x + xi) * log_d2)
    lw = np.log(W + w)
    f0 = xlogx - 2.0 * xi * lw + 2.0 * x * np.log(x * w + W * xi) - 2.0 * W * _arcsin_ratio(xi, c)
    f1 = -0.5 * (x2logx - 2.0 * (x - xi) * (x + xi) * lw) + W * w
    return f0, f1


# subintervals with |slope| * c above this go through the quadrature path
STIFF_SLOPE = 1e3
_GL_T, _GL_W = np.polynomial.legendre.leggauss(16)


def _log_moment(u, s_x, q):
    # antiderivative of (s_x + q u) ln|u| in u, with u ln|u| -> 0 at u = 0
    with np.errstate(divide="ignore", invalid="ignore"):
        lu = np.where(u == 0.0, 0.0, np.log(np.abs(u)))
    return s_x * (u * lu - u) + q * (0.5 * u * u * lu - 0.25 * u * u)


def _opening_stiff(x, c, x1, x2, s1, q):
    """int sigma L dxi on subintervals with a steep traction gradient.

    L = ln|xi - x| + ln(xi + x) - 2 ln(W + w).  The logarithm at xi = x is
    integrated in closed form when x is nearer than one subinterval length;
    the rest by 16-point Gauss-Legendre in theta = arcsin(xi/c), where w is
    smooth and the nearest singularity is at least one interval away.
    """
    inside = (x1 < x) & (x < x2)
    if np.any(inside):
        s_mid = s1[inside] + q[inside] * (x - x1[inside])
        x1 = np.concatenate((x1[~inside], x1[inside], np.full(inside.sum(), x)))
        x2 = np.concatenate((x2[~inside], np.full(inside.sum(), x), x2[inside]))
        s1 = np.concatenate((s1[~inside], s1[inside], s_mid))
        q = np.concatenate((q[~inside], q[inside], q[inside]))
    W = np.sqrt((c - x) * (c + x))
    w1, w2 = _root_diff(c, x1), _root_diff(c, x2)
    dx = x2 - x1
    cross = c * c * dx * (x1 + x2) / (x2 * w1 + x1 * w2)
    dth = np.arctan2(cross, x1 * x2 + w1 * w2)
    near = np.minimum(np.abs(x1 - x), np.abs(x2 - x)) < dx

    phi = 0.5 * dth[:, None] * (1.0 + _GL_T)
    psi = dth[:, None] - phi
    dxi = w1[:, None] * np.sin(phi) - 2.0 * x1[:, None] * np.sin(0.5 * phi) ** 2
    wk = w2[:, None] * np.cos(psi) + x2[:, None] * np.sin(psi)
    xi = x1[:, None] + dxi
    sig = s1[:, None] + q[:, None] * dxi
    smooth = np.log(xi + x) - 2.0 * np.log(W + wk)
    with np.errstate(divide="ignore"):
        smooth = smooth + np.where(near[:, None], 0.0, np.log(np.abs(xi - x)))
    total = np.sum(0.5 * dth * ((sig * smooth * wk) @ _GL_W))
    if np.any(near):
        s_x = s1[near] + q[near] * (x - x1[near])
        a = _log_moment(x2[near] - x, s_x, q[near]) - _log_moment(x1[near] - x, s_x, q[near])
        total += np.sum(a)
    return float(total)


def opening_from_nodes(x: float, nodes, sigma) -> float:
    nodes = np.asarray(nodes, float)
    sigma = np.asarray(sigma, float)
    c = nodes[-1]
    x = abs(float(x))
    if x > c * (1.0 + 1e-14):
        raise ValueError(f"opening needs |x| <= c (x={x}, c={c})")
    if x >= c:
        return 0.0
    base = float(np.sqrt((c - x) * (c + x)))
    if nodes.size < 2:
        return base
    x1, x2, p, q = _segments(nodes, sigma)
    stiff = np.abs(q) * c > STIFF_SLOPE
    f0, f1 = _opening_antiderivatives(x, nodes, c)
    per_seg = p * np.diff(f0) + q * np.diff(f1)
    # Gamma = 2 L, weighted by 1/(2 pi)
    integral = float(np.sum(per_seg[~stiff]))
    if np.any(stiff):
        integral += _opening_stiff(x, c, x1[stiff], x2[stiff], sigma[:-1][stiff], q[stiff])
    return base + integral / np.pi


def opening_jump(x: float, geom: CzGeometry) -> float:
    """Normalised opening [u_e](x) = sqrt(c^2 - x^2) + (1/(2 pi)) int sigma Gamma dxi.

    The 1/(2 pi) weight makes a uniform Dugdale zone (sigma = s,
    c = sec(pi/(2s))) open by (2s/pi) ln c at the crack tip, the classical
    strip-yield result; with 1/pi the opening would turn negative.
    """
    return opening_from_nodes(x, geom.nodes, geom.sigma)


def crack_tip_opening_elastic(geom: CzGeometry) -> float:
    """delta_e: the opening at the crack tip a."""
    return opening_jump(geom.a, geom)
