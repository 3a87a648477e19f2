from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from hermite_splines import basis
from hermite_splines.basis import (
    Generator,
    bspline,
    eval_generator,
    eval_generator_deriv,
    fourier_generator,
    interlaced,
    measure_support,
    phi1,
    phi2,
)
from hermite_splines.errors import InvalidArgumentError, MeasurementFailedError, UnsupportedOperationError

KNOTS = np.arange(-3, 4).astype(float)


def conv_bspline(order, t):
    """B-spline by repeated convolution of the unit box, each step a quadrature."""
    if order == 1:
        return 1.0 if 0 <= t < 1 else 0.0
    pts = [t - k for k in range(order + 1) if 0 < t - k < 1]
    return quad(lambda s: conv_bspline(order - 1, t - s), 0, 1, points=pts or None, epsabs=1e-14)[0]


def quad_fourier(g, w, lo, hi, breaks):
    re = quad(lambda t: eval_generator(g, t) * np.cos(w * t), lo, hi, points=breaks, limit=500, epsabs=1e-14)[0]
    im = -quad(lambda t: eval_generator(g, t) * np.sin(w * t), lo, hi, points=breaks, limit=500, epsabs=1e-14)[0]
    return re + 1j * im


def test_hermite_values_at_knots():
    assert eval_generator(phi1(), 0) == 1
    assert eval_generator(phi1(), 1) == 0 and eval_generator(phi1(), -1) == 0
    assert eval_generator(phi2(), 0) == 0


def test_interpolation_conditions_exact():
    delta = (KNOTS == 0).astype(float)
    assert np.max(np.abs(eval_generator(phi1(), KNOTS) - delta)) < 1e-13
    assert np.max(np.abs(eval_generator(phi2(), KNOTS))) < 1e-13
    assert np.max(np.abs(eval_generator_deriv(phi1(), KNOTS))) < 1e-13
    assert np.max(np.abs(eval_generator_deriv(phi2(), KNOTS) - delta)) < 1e-13


def test_cubic_bspline_at_center_matches_convolution_oracle():
    assert eval_generator(bspline(4), 2.0) == pytest.approx(2 / 3, abs=1e-14)
    for t in (0.3, 1.0, 2.0, 2.7, 3.9):
        assert eval_generator(bspline(4), t) == pytest.approx(conv_bspline(4, t), abs=1e-10)


def test_bspline_derivative_matches_finite_difference():
    g = bspline(4)
    assert eval_generator_deriv(g, 1.0) == pytest.approx(0.5, abs=1e-14)
    h = 1e-6
    for t in (0.4, 1.0, 1.7, 3.2):
        fd = (eval_generator(g, t + h) - eval_generator(g, t - h)) / (2 * h)
        assert eval_generator_deriv(g, t) == pytest.approx(fd, abs=1e-5)


def test_derivatives_are_right_limits_at_knots():
    g = bspline(2)  # hat function, slope jumps at 0, 1, 2
    assert eval_generator_deriv(g, 0.0) == 1.0
    assert eval_generator_deriv(g, 1.0) == -1.0
    assert eval_generator_deriv(g, 2.0) == 0.0


def test_zero_outside_support():
    for g in (phi1(), phi2(), bspline(1), bspline(3), bspline(6)):
        lo, hi = g.support
        t = np.concatenate([np.linspace(lo - 5, lo, 50, endpoint=False), np.linspace(hi, hi + 5, 50)])
        assert np.all(eval_generator(g, t) == 0.0)


def test_fourier_at_zero():
    assert fourier_generator(bspline(4), 0.0) == pytest.approx(1.0, abs=1e-15)
    assert fourier_generator(phi1(), 0.0) == pytest.approx(1.0, abs=1e-15)
    assert fourier_generator(phi2(), 0.0) == 0.0
    assert fourier_generator(interlaced(1, printed=True), 0.0) == pytest.approx(1.5, abs=1e-15)


def test_printed_interlaced1_limit_agrees_with_literal_form():
    literal = basis.interlaced_printed_literal(1, 1e-4)
    assert abs(literal - 1.5) < 1e-7
    w = np.array([0.3, 1.7, 5.0])
    assert np.allclose(fourier_generator(interlaced(1, True), w), basis.interlaced_printed_literal(1, w), atol=1e-13)
    assert np.allclose(fourier_generator(interlaced(2, True), w), basis.interlaced_printed_literal(2, w), atol=1e-13)


def test_printed_interlaced2_has_poles():
    vals = fourier_generator(interlaced(2, True), np.array([0.0, np.pi, 3 * np.pi]))
    assert np.all(np.isinf(np.abs(vals)))
    # removable at even multiples of pi
    assert fourier_generator(interlaced(2, True), 2 * np.pi) == 0


@pytest.mark.parametrize(
    "g, lo, hi, breaks",
    [
        (phi1(), -1, 1, [0.0]),
        (phi2(), -1, 1, [0.0]),
        (bspline(4), 0, 4, [1.0, 2.0, 3.0]),
        (bspline(3), 0, 3, [1.0, 2.0]),
        (interlaced(1), -40, 40, list(np.arange(-39.0, 40.0))),
        (interlaced(2), -40, 40, list(np.arange(-39.0, 40.0))),
    ],
    ids=["phi1", "phi2", "bspline4", "bspline3", "cardinal1", "cardinal2"],
)
@pytest.mark.parametrize("w", [0.0, 0.005, 0.5, 3.0, 11.0, 50.0])
@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_fourier_matches_quadrature(g, lo, hi, breaks, w):
    assert abs(fourier_generator(g, w) - quad_fourier(g, w, lo, hi, breaks)) < 1e-10


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=-50, max_value=50, allow_nan=False))
def test_fourier_symmetry(w):
    a, b = fourier_generator(phi1(), w), fourier_generator(phi1(), -w)
    assert abs(a.imag) < 1e-12 and abs(a - b) < 1e-12
    c, d = fourier_generator(phi2(), w), fourier_generator(phi2(), -w)
    assert abs(c.real) < 1e-12 and abs(c + d) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=1e-4, max_value=4.0))
def test_hermite_transforms_continuous_across_series_switch(w):
    # series branch vs closed branch agree where both are accurate
    for g in (phi1(), phi2()):
        eps = 1e-9
        assert abs(fourier_generator(g, w) - fourier_generator(g, w + eps)) < 1e-8


def test_partition_of_unity():
    t = np.arange(-1000, 1001) * 1e-3
    total = sum(eval_generator(phi1(), t - k) for k in range(-5, 6))
    assert np.max(np.abs(total - 1)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=-20, max_value=20), st.integers(min_value=2, max_value=6))
def test_bspline_partition_of_unity(t, order):
    # order 1 is discontinuous: t - k can round onto a knot from the wrong side
    total = sum(eval_generator(bspline(order), t - k) for k in range(-30, 30))
    assert abs(total - 1) < 1e-12


def test_measure_support():
    assert measure_support(phi1(), 1e-12) == (-1.0, 1.0)
    assert measure_support(bspline(4), 1e-12) == (0.0, 4.0)
    lengths = [np.diff(measure_support(g, 1e-12))[0] for g in (phi1(), phi2())]
    assert sum(lengths) == 4.0


def test_measure_support_errors():
    with pytest.raises(InvalidArgumentError):
        measure_support(phi1(), 0.0)
    with pytest.raises(MeasurementFailedError):
        measure_support(interlaced(1), 1e-12, window=5.0)


def test_finite_support_witness():
    assert basis.has_finite_support(phi1()) and basis.has_finite_support(bspline(4))
    assert not basis.has_finite_support(interlaced(1))
    assert not basis.has_finite_support(interlaced(2))


def test_cardinal_interlaced_conditions():
    k = np.arange(-6, 7)
    delta = (k == 0).astype(float)
    g1, g2 = interlaced(1), interlaced(2)
    assert np.max(np.abs(eval_generator(g1, 2.0 * k) - delta)) < 1e-13
    assert np.max(np.abs(eval_generator_deriv(g1, 2.0 * k + 0.5))) < 1e-13
    assert np.max(np.abs(eval_generator(g2, 2.0 * k))) < 1e-13
    assert np.max(np.abs(eval_generator_deriv(g2, 2.0 * k + 0.5) - delta)) < 1e-13
    # stride-2 partition of unity needs integral 2
    assert fourier_generator(g1, 0.0) == pytest.approx(2.0, abs=1e-12)


def test_errors():
    with pytest.raises(InvalidArgumentError):
        Generator("phi3")
    with pytest.raises(InvalidArgumentError):
        bspline(7)
    with pytest.raises(UnsupportedOperationError):
        eval_generator(interlaced(1, printed=True), 0.0)
    with pytest.raises(UnsupportedOperationError):
        eval_generator_deriv(interlaced(2, printed=True), 0.0)


def test_generator_set():
    gs = basis.interlaced_pair()
    assert gs.stride == 2 and gs.scale == 0.5 and len(gs) == 2
    nu = np.array([0.4, 1.1])
    assert np.allclose(gs.unit_fourier(nu), 0.5 * gs.fourier(nu / 2))
    with pytest.raises(InvalidArgumentError):
        basis.GeneratorSet((phi1(), phi2(), phi1()))
