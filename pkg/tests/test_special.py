import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from czcrack.special import (HypergeometricDomainError, WTildeEvaluator, _w_tilde, csc_pi,
                             hyp2f1, kernel_V, kernel_V00, kernel_V_tilde, kernel_W,
                             kernel_W_tilde)

gammas = st.floats(0.02, 0.98)


@given(a=st.floats(0.05, 2.5), b=st.floats(0.05, 2.5), dc=st.floats(0.05, 2.0),
       z=st.floats(0.0, 0.999))
def test_hyp2f1_matches_mpmath(a, b, dc, z):
    c = a + b + dc if abs(dc - round(dc)) > 1e-3 else a + b + dc + 0.01
    ref = float(mp.hyp2f1(a, b, c, z))
    assert hyp2f1(a, b, c, z) == pytest.approx(ref, rel=1e-12)


def test_hyp2f1_gauss_sum_and_array_shape():
    a, b, c = 0.3, 0.4, 1.9
    z1 = math.gamma(c) * math.gamma(c - a - b) / (math.gamma(c - a) * math.gamma(c - b))
    out = hyp2f1(a, b, c, np.array([[0.0, 1.0], [0.5, 0.7]]))
    assert out.shape == (2, 2)
    assert out[0, 0] == 1.0
    assert out[0, 1] == pytest.approx(z1, rel=1e-14)


@pytest.mark.parametrize("args", [(0.5, 0.5, 1.0, 1.0), (1.0, 1.0, -2.0, 0.3),
                                  (0.5, 0.5, 1.5, 1.2), (0.5, 0.5, 1.5, -0.1)])
def test_hyp2f1_domain_errors(args):
    with pytest.raises(HypergeometricDomainError):
        hyp2f1(*args)


def test_hyp2f1_integer_excess_uses_series():
    # c - a - b = 1: the connection formula has log terms, the series is used
    z = 0.8
    assert hyp2f1(0.5, 0.5, 2.0, z) == pytest.approx(float(mp.hyp2f1(0.5, 0.5, 2.0, z)), rel=1e-12)


def _kernel_quad(y, t, tc, g, power):
    # tau = t - u**(1/(1-g)) absorbs the (t - tau)**-g endpoint singularity
    y, t, tc, g = (mp.mpf(v) for v in (y, t, tc, g))
    p = 1 / (1 - g)
    return float(mp.quad(lambda u: (t - u**p - y) ** (g - 1 + power) * p, [0, (t - tc) ** (1 - g)]))


def _V_quad(y, t, tc, g):
    return _kernel_quad(y, t, tc, g, 0)


def _W_quad(y, t, tc, g):
    return _kernel_quad(y, t, tc, g, 1)


@given(g=gammas, y=st.floats(0.0, 1.0), gap=st.floats(1e-3, 2.0), span=st.floats(1e-3, 2.0))
def test_kernels_match_quadrature(g, y, gap, span):
    tc = y + gap
    t = tc + span
    assert kernel_V(y, t, tc, g) == pytest.approx(_V_quad(y, t, tc, g), rel=1e-9, abs=1e-10)
    assert kernel_W(y, t, tc, g) == pytest.approx(_W_quad(y, t, tc, g), rel=1e-9, abs=1e-10)


@given(g=gammas, y=st.floats(0.0, 1.0), span=st.floats(1e-4, 3.0))
def test_kernel_identities_at_tc_equal_y(g, y, span):
    t = y + span
    assert kernel_V(y, t, y, g) == pytest.approx(csc_pi(g), rel=1e-12)
    assert abs(kernel_W(y, t, y, g) - g * csc_pi(g) * span) <= 1e-12 * max(1.0, span)
    assert kernel_V_tilde(y, t, y, g) == 0.0
    assert kernel_W_tilde(y, t, y, g) == 0.0


def test_kernel_argument_checks():
    with pytest.raises(ValueError):
        kernel_V(0.0, 1.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        kernel_W(0.6, 1.0, 0.5, 0.5)
    with pytest.raises(ValueError):
        kernel_V(0.0, 1.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        kernel_V00(1.0, 1.0, 0.5)


@given(g=gammas, z=st.floats(1e-6, 0.999))
def test_kernel_V00_is_origin_V_tilde(g, z):
    t = 1.0
    assert kernel_V00(t, z * t, g) == pytest.approx(g * kernel_V_tilde(0.0, t, z * t, g),
                                                     rel=1e-13)


def _w_tilde_mp(d_c, d_t, g):
    d_c, d_t = mp.mpf(d_c), mp.mpf(d_t)
    return float(-(d_c ** (1 + g)) * d_t ** (-g) * mp.hyp2f1(1 + g, g, 2 + g, d_c / d_t) / (1 + g))


@pytest.mark.parametrize("g", [0.05, 0.125, 0.5, 0.75, 0.95])
def test_w_tilde_evaluator_matches_mpmath(g):
    rng = np.random.default_rng(7)
    d_t = rng.uniform(1e-4, 2.0, 150)
    z = np.concatenate((rng.uniform(0, 1, 100), 1.0 - 10.0 ** rng.uniform(-12, -1, 50)))
    d_c = z * d_t
    with mp.workdps(30):
        ref = np.array([_w_tilde_mp(a, b, g) for a, b in zip(d_c, d_t)])
    got = WTildeEvaluator(g)(d_c, d_t)
    assert np.max(np.abs(got / ref - 1.0)) < 5e-13


@pytest.mark.parametrize("g", [0.125, 0.5, 0.75])
def test_w_tilde_evaluator_matches_series_away_from_one(g):
    rng = np.random.default_rng(3)
    d_t = rng.uniform(1e-4, 2.0, 2000)
    d_c = rng.uniform(0.0, 0.999, 2000) * d_t
    assert np.allclose(WTildeEvaluator(g)(d_c, d_t), _w_tilde(d_c, d_t, g), rtol=1e-12, atol=0)


@pytest.mark.parametrize("g", [0.25, 0.75, 0.99])
def test_w_tilde_evaluator_against_mpmath(g):
    ev = WTildeEvaluator(g)
    for z in (0.0, 0.1, 0.49, 0.51, 0.9, 0.999999):
        ref = float(mp.hyp2f1(1 + g, g, 2 + g, z))
        assert ev.hyp(np.array([z]))[0] == pytest.approx(ref, rel=2e-12)
