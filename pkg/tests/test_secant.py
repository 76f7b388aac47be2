import math

import pytest
from hypothesis import given, strategies as st

from czcrack.solver import (ConvergenceError, InvalidTrialError, PrecisionFloorError,
                            secant_root)


@given(r=st.floats(-5.0, 5.0), s=st.floats(0.1, 3.0))
def test_secant_finds_cubic_root(r, s):
    f = lambda x: (x - r) * (1.0 + s * (x - r) ** 2)
    x = secant_root(f, r - 1.0, r + 0.7, eps=1e-12, ftol=1e-10)
    assert f(x) == pytest.approx(0.0, abs=1e-10)


def test_full_output_and_zero_hit():
    x, fx, it = secant_root(lambda x: x - 2.0, 0.0, 1.0, full_output=True)
    assert x == pytest.approx(2.0) and fx == pytest.approx(0.0, abs=1e-12) and it >= 1


def test_invalid_trials_are_pulled_back():
    def f(x):
        if x > 3.0:
            raise InvalidTrialError("outside")
        return math.exp(x) - 5.0

    x = secant_root(f, 0.0, 2.9, eps=1e-12, ftol=1e-12)
    assert x == pytest.approx(math.log(5.0), rel=1e-12)


def test_flat_branch_does_not_cycle():
    # tanh-like residual with nearly flat tails defeats the plain secant
    f = lambda x: math.tanh(20.0 * (x - 0.3)) + 1e-3 * (x - 0.3)
    x = secant_root(f, -2.0, 2.0, eps=1e-13, ftol=1e-12, max_iter=200)
    assert x == pytest.approx(0.3, abs=1e-12)


def test_bounds_respected():
    seen = []

    def f(x):
        seen.append(x)
        return x * x - 4.0

    x = secant_root(f, 1.0, 1.5, bounds=(0.0, 10.0), eps=1e-12, ftol=1e-12)
    assert x == pytest.approx(2.0) and all(0.0 <= v <= 10.0 for v in seen[1:])


def test_precision_floor_detected():
    # step function: resolution exhausted with a residual above tolerance
    f = lambda x: 1.0 if x < 0.5 else -1.0
    with pytest.raises(ConvergenceError):
        secant_root(f, 0.0, 1.0, eps=1e-300, ftol=1e-12, max_iter=2000)


def test_equal_residuals_raise_precision_floor():
    with pytest.raises(PrecisionFloorError):
        secant_root(lambda x: 1.0, 0.0, 1.0, ftol=1e-8)


def test_rejects_equal_starts():
    with pytest.raises(ValueError):
        secant_root(lambda x: x, 1.0, 1.0)
