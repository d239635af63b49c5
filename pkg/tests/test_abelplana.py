import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import dawsn

from twoatom.abelplana import (
    AsymptoticParams,
    dawson,
    h2_components,
    h2_hot,
    h2_integral,
    tau0,
)
from twoatom.dynamics import h_series
from twoatom.errors import InvalidParameterError, NumericalError
from twoatom.qcore import ThermalSpec, kappa_from_nbar


def test_dawson_reference_values():
    assert dawson(0.0) == 0.0
    assert dawson(1.0) == pytest.approx(0.5380795069, abs=1e-10)
    x = 0.01
    assert dawson(x) == pytest.approx(x - 2 * x ** 3 / 3 + 4 * x ** 5 / 15, abs=1e-15)
    mpmath.mp.dps = 30
    for x in (0.1, 0.49, 0.5, 0.51, 1.0, 2.5, 7.0, 30.0):
        ref = mpmath.exp(-x * x) * mpmath.quad(lambda u: mpmath.exp(u * u), [0, x])
        assert abs(dawson(x) - float(ref)) <= 1e-12 * max(1.0, abs(float(ref)))


@given(st.floats(-50, 50))
def test_dawson_against_scipy_and_odd(x):
    assert dawson(x) == pytest.approx(dawsn(x), rel=1e-12, abs=1e-15)
    assert dawson(-x) == -dawson(x)


def test_dawson_arrays_and_asymptote():
    xs = np.linspace(-8, 8, 33)
    np.testing.assert_allclose(dawson(xs), dawsn(xs), rtol=1e-12, atol=1e-15)
    assert dawson(1e9) == pytest.approx(0.5e-9, rel=1e-12)


@pytest.mark.parametrize("x", [0.05, 0.3, 0.5, 0.9, 2.0, 5.0])
def test_dawson_differential_equation(x):
    h = 1e-5
    deriv = (dawson(x + h) - dawson(x - h)) / (2 * h)
    assert abs(deriv - (1 - 2 * x * dawson(x))) < 1e-8


@pytest.mark.parametrize("kappa", [0.05, 0.3, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("gt", [0.0, 0.7, 2.0, 4.5, 10.0])
def test_integral_matches_series(kappa, gt):
    spec = ThermalSpec.from_kappa(kappa)
    assert abs(h2_integral(kappa, gt) - h_series(spec, gt, "h2")) < 1e-6


def test_components_sum():
    bulk, boundary = h2_components(0.4, 3.0)
    assert bulk + boundary == pytest.approx(h2_integral(0.4, 3.0), abs=1e-12)
    assert bulk == pytest.approx(h2_hot(0.4, 3.0), abs=1e-9)


def test_hot_limit_at_time_zero():
    for kappa in (0.05, 0.5, 2.0):
        assert h2_hot(kappa, 0.0) == pytest.approx(math.sinh(kappa) / kappa, rel=1e-15)
        # h2(0) = 1, so the whole gap at t=0 is sinh(k)/k - 1
        gap = h2_hot(kappa, 0.0) - h2_integral(kappa, 0.0)
        assert gap == pytest.approx(math.sinh(kappa) / kappa - 1, abs=1e-9)


@pytest.mark.parametrize("t_tilde", [0.0, 0.5, 1.0, 2.0, 4.0])
def test_hot_asymptote_improves_as_temperature_rises(t_tilde):
    gaps = [abs(h2_hot(k, t_tilde * math.sqrt(k)) - h2_integral(k, t_tilde * math.sqrt(k)))
            for k in (0.5, 0.2, 0.1, 0.05)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    if t_tilde <= 1.0:
        # the remainder is second order in kappa
        assert gaps[-1] / gaps[-2] == pytest.approx(0.25, rel=0.05)


def test_hot_long_time_tail():
    kappa = 0.1
    for t_tilde in (1e2, 1e3):
        val = h2_hot(kappa, t_tilde * math.sqrt(kappa))
        assert val * t_tilde ** 2 == pytest.approx(-math.sinh(kappa) / kappa, rel=1e-3)


def test_tau0_and_params():
    assert tau0(1.0, 1.0) == 1.0
    assert tau0(0.25, 2.0) == 0.25
    k = kappa_from_nbar(5.9)
    assert k == pytest.approx(0.5 * math.log(1 + 1 / 5.9), rel=1e-15)
    assert tau0(k, 1.0) == pytest.approx(0.27979, abs=1e-5)
    p = AsymptoticParams.from_time(k, 1.7)
    assert p.gt == pytest.approx(1.7, rel=1e-15)
    assert p.tau0 == pytest.approx(math.sqrt(k))


def test_errors():
    with pytest.raises(InvalidParameterError):
        h2_integral(0.0, 1.0)
    with pytest.raises(InvalidParameterError):
        h2_integral(0.5, -1.0)
    with pytest.raises(InvalidParameterError):
        tau0(1.0, 0.0)
    with pytest.raises(NumericalError) as exc:
        h2_integral(0.5, 40.0)
    assert exc.value.achieved > 1e-8
