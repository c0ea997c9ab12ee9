import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from poincare_convex import convex_body as cb
from poincare_convex import gallery, oracle

from conftest import random_spectrum


def test_circle_oracle():
    R = 1.7
    o = oracle.curve_oracle(gallery.build(gallery.ball(R, 2, center=(0.4, 0.1))), n_samples=4096)
    assert_allclose([o["L"], o["A"], o["int_inv_kappa"], o["int_inv_kappa2"]],
                    [2 * math.pi * R, math.pi * R**2, 2 * math.pi * R**2, 2 * math.pi * R**3],
                    rtol=1e-13)


def test_ellipse_closed_form_vs_curve():
    a, b = 1.0, 0.8
    exact = oracle.ellipse_closed_form(a, b)
    h, dh, d2h = oracle.ellipse_support_derivatives(a, b)
    analytic = oracle.curve_oracle(h, n_samples=100_000, derivatives=(dh, d2h))
    fft = oracle.curve_oracle(h, n_samples=4096)
    for key in exact:
        assert_allclose(analytic[key], exact[key], rtol=1e-12)
        assert_allclose(fft[key], exact[key], rtol=1e-12)
    # a = b is the circle
    assert_allclose(oracle.ellipse_closed_form(2.0, 2.0)["L"], 4 * math.pi, rtol=1e-15)


def test_ellipse_derivatives_by_differences():
    h, dh, d2h = oracle.ellipse_support_derivatives(1.0, 0.6)
    t, step = np.linspace(0.1, 6.0, 9), 1e-4
    assert_allclose(dh(t), (h(t + step) - h(t - step)) / (2 * step), atol=1e-8)
    assert_allclose(d2h(t), (dh(t + step) - dh(t - step)) / (2 * step), atol=1e-7)


def test_spectral_ellipse_matches_closed_form():
    E = gallery.build(gallery.ellipsoid((1.0, 0.8)))
    ci = cb.curvature_integrals(E)
    exact = oracle.ellipse_closed_form(1.0, 0.8)
    assert_allclose(ci.intH_dm2, exact["L"], rtol=1e-12)
    assert_allclose(ci.intH_dm3, 2 * exact["A"], rtol=1e-12)
    assert_allclose(ci.ros_term, exact["int_inv_kappa"], rtol=1e-12)


def test_curve_oracle_rejects_nonconvex():
    with pytest.raises(ValueError):
        oracle.curve_oracle(lambda t: 1 + 0.5 * np.cos(2 * t), n_samples=512)
    with pytest.raises(ValueError):
        oracle.curve_oracle(gallery.build(gallery.ball(1.0, 3)))


@pytest.mark.parametrize("d", [2, 3])
def test_dense_inner_product(d, rng):
    f, g = random_spectrum(rng, d, 10), random_spectrum(rng, d, 7)
    assert_allclose(oracle.dense_inner_product_oracle(f, g), f.dot(g), rtol=1e-12)


def test_pointwise_summary_ellipsoid():
    E = gallery.build(gallery.ellipsoid((1.0, 0.9, 0.8)))
    a, b = cb.summary(E).as_dict(), oracle.pointwise_summary(E).as_dict()
    for key in a:
        assert_allclose(b[key], a[key], rtol=1e-10, atol=1e-14)
