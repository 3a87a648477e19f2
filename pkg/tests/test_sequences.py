from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import solve_banded
from scipy.ndimage import spline_filter1d

from hermite_splines.errors import InvalidArgumentError, OrderExceededError
from hermite_splines.sequences import (
    CoefSequence,
    bspline_prefilter,
    convolve_b3,
    hermite_reproduction,
    polynomial_reproduction,
)


def mirror_banded_solve(s):
    """Tridiagonal system of cubic interpolation with whole-sample mirror ends."""
    n = len(s)
    ab = np.zeros((3, n))
    ab[0, 1:] = 1 / 6
    ab[1, :] = 2 / 3
    ab[2, :-1] = 1 / 6
    # mirror: c[-1] = c[1] and c[n] = c[n-2]
    ab[0, 1] = 2 / 6
    ab[2, n - 2] = 2 / 6
    return solve_banded((1, 1), ab, s)


def test_coef_sequence_basics():
    c = CoefSequence([1.0, 2.0, 3.0], offset=-1)
    assert c[-1] == 1.0 and c[1] == 3.0 and c[5] == 0.0
    assert list(c.indices) == [-1, 0, 1]
    assert c.as_dict() == {-1: 1.0, 0: 2.0, 1: 3.0}
    assert CoefSequence.from_dict({2: 1.0, 4: -1.0}).as_dict() == {2: 1.0, 4: -1.0}
    up = c.upsample(2)
    assert up.as_dict() == {-2: 1.0, 0: 2.0, 2: 3.0}


def test_trimmed_flag():
    with pytest.raises(InvalidArgumentError):
        CoefSequence([0.0, 1.0], trimmed=True)
    t = CoefSequence([0.0, 1.0, 2.0, 0.0], offset=3).trim()
    assert t.offset == 4 and list(t.values) == [1.0, 2.0] and t.trimmed
    with pytest.raises(InvalidArgumentError):
        CoefSequence([np.nan])


def test_beta2_reproduction():
    r = hermite_reproduction("beta2")
    assert r.seq1.as_dict() == pytest.approx({1: 0.5, 2: 0.5})
    assert r.seq2.as_dict() == pytest.approx({1: 1.0, 2: -1.0})
    assert r.residual() < 1e-12


def test_beta3_reproduction():
    r = hermite_reproduction("beta3")
    assert r.seq1.as_dict() == pytest.approx({1: 1 / 6, 2: 2 / 3, 3: 1 / 6}, abs=1e-15)
    assert r.seq2[1] == pytest.approx(0.5) and r.seq2[2] == pytest.approx(0.0, abs=1e-15)
    assert r.seq2[3] == pytest.approx(-0.5)
    assert r.residual() < 1e-12


def test_reproduction_sequences_are_finite():
    for target in ("beta2", "beta3"):
        r = hermite_reproduction(target)
        k = np.concatenate([r.seq1.indices, r.seq2.indices])
        total = np.sum(np.abs(k) ** 3 * (np.abs(r.seq1[k]) + np.abs(r.seq2[k])))
        assert np.isfinite(total) and len(r.seq1) < 10


def test_unknown_target():
    with pytest.raises(InvalidArgumentError):
        hermite_reproduction("beta4")


@pytest.mark.parametrize("ell", [0, 1, 2, 3])
def test_polynomial_reproduction(ell):
    r = polynomial_reproduction(ell, (-8, 8))
    if ell == 0:
        assert np.all(r.seq1.values == 1) and np.all(r.seq2.values == 0)
    if ell == 1:
        assert np.all(r.seq1.values == r.seq1.indices) and np.all(r.seq2.values == 1)
    assert r.residual() < 1e-10
    assert abs(r.evaluate(0.5) - 0.5**ell) < 1e-12


def test_polynomial_reproduction_order_exceeded():
    with pytest.raises(OrderExceededError):
        polynomial_reproduction(4, (-3, 3))


def test_prefilter_constant():
    c = bspline_prefilter(CoefSequence(np.ones(25)))
    assert np.allclose(c.values, 1.0, atol=1e-14)


def test_prefilter_impulse():
    s = CoefSequence(np.eye(1, 61, 30).ravel(), -30)
    for boundary in ("mirror", "zero"):
        c = bspline_prefilter(s, boundary)
        back = convolve_b3(c)
        k = np.arange(-20, 21)
        assert np.max(np.abs(back[k] - s[k])) < 1e-12


def test_prefilter_quadratic_interior():
    k = np.arange(-20, 21)
    s = CoefSequence(k.astype(float) ** 2, -20)
    c = bspline_prefilter(s)
    back = convolve_b3(c)
    inner = np.arange(-5, 6)
    assert np.max(np.abs(back[inner] - s[inner])) < 1e-10


def test_prefilter_matches_banded_solve_and_scipy():
    s = np.random.default_rng(1).normal(size=40)
    c = bspline_prefilter(CoefSequence(s, 7))
    assert c.offset == 7
    assert np.max(np.abs(c.values - mirror_banded_solve(s))) < 1e-12
    assert np.max(np.abs(c.values - spline_filter1d(s, 3, mode="mirror"))) < 1e-12


def test_prefilter_errors():
    with pytest.raises(InvalidArgumentError):
        bspline_prefilter(CoefSequence(np.zeros(0)))
    with pytest.raises(InvalidArgumentError):
        bspline_prefilter(CoefSequence(np.ones(3)), "periodic")


def mirror_convolve_b3(c):
    ext = np.concatenate([c[1:2], c, c[-2:-1]])
    return (ext[:-2] + 4 * ext[1:-1] + ext[2:]) / 6


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(min_value=-1e3, max_value=1e3), min_size=64, max_size=64), st.integers(-50, 50))
def test_prefilter_inverts_b3_on_interior(values, offset):
    c = CoefSequence(np.array(values), offset)
    scale = max(1.0, np.max(np.abs(values)))
    inner = np.arange(offset + 15, offset + 64 - 15)
    # each boundary policy inverts the convolution taken with the same policy
    zero_back = bspline_prefilter(convolve_b3(c), "zero")
    mirror_back = bspline_prefilter(CoefSequence(mirror_convolve_b3(c.values), offset), "mirror")
    for back in (zero_back, mirror_back):
        assert np.max(np.abs(back[inner] - c[inner])) < 1e-12 * scale
