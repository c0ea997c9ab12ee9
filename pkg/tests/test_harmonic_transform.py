import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import sph_harm_y

from poincare_convex import harmonic_transform as ht
from poincare_convex.spectral_core import HarmonicSpectrum, eigenvalue, harmonic_dimension

from conftest import random_spectrum


def test_total_weight():
    assert ht.QuadratureGrid.circle(64).total_weight == pytest.approx(2 * math.pi, rel=1e-15)
    assert ht.QuadratureGrid.sphere(20, 40).total_weight == pytest.approx(4 * math.pi, rel=1e-14)


def test_default_grid_rejects_higher_dims():
    with pytest.raises(ValueError):
        ht.QuadratureGrid.default(4, 8)


def test_unit_vectors_are_unit():
    u = ht.QuadratureGrid.default(3, 6).unit_vectors()
    assert_allclose(np.linalg.norm(u, axis=-1), 1.0, rtol=1e-15)


def test_constant_transform():
    grid = ht.QuadratureGrid.default(3, 8)
    spec = ht.forward(ht.GridFunction(grid, np.ones(grid.shape)), 8)
    assert_allclose(spec.blocks[0], [math.sqrt(4 * math.pi)], rtol=1e-14)
    assert_allclose(spec.padded(8).norm2(), 4 * math.pi, rtol=1e-13)


def test_cos_theta_is_degree_one():
    grid = ht.QuadratureGrid.default(3, 6)
    f = ht.GridFunction.from_callable(grid, lambda u: u[..., 2])
    s = ht.forward(f, 6).sq_norms()
    assert_allclose(s[1], 4 * math.pi / 3, rtol=1e-13)
    assert np.all(np.delete(s, 1) < 1e-26)


def test_legendre_against_scipy():
    # scipy's complex Y_n^m carries the Condon-Shortley phase, so compare magnitudes at phi = 0
    theta = np.linspace(0.1, 3.0, 7)
    P = ht.normalized_legendre(6, theta)
    for n in range(7):
        for m in range(n + 1):
            y = sph_harm_y(n, m, theta, 0.0).real
            assert_allclose(np.abs(P[n, m]), np.abs(y), rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("d", [2, 3])
def test_basis_orthonormal(d):
    N = 5
    grid = ht.QuadratureGrid.default(d, N)
    funcs = [
        ht.inverse(ht.basis_function(d, n, k).padded(N), grid)
        for n in range(N + 1)
        for k in range(harmonic_dimension(n, d))
    ]
    G = np.array([[ht.inner_product(f, g) for g in funcs] for f in funcs])
    assert_allclose(G, np.eye(len(funcs)), atol=1e-13)


def test_basis_eigenfunctions():
    # Laplacian of each basis function, computed from the pointwise Hessian trace
    grid = ht.QuadratureGrid.default(3, 6)
    for n in range(1, 6):
        spec = ht.basis_function(3, n, n)
        h = ht.inverse(spec, grid).values
        A = ht.surface_gradient_hessian(spec, grid)
        lap = np.trace(A, axis1=-2, axis2=-1) - 2 * h
        assert_allclose(lap, -eigenvalue(n, 3) * h, atol=1e-11)


@pytest.mark.parametrize("d", [2, 3])
def test_round_trip(d, rng):
    N = 64
    spec = random_spectrum(rng, d, N)
    grid = ht.QuadratureGrid.default(d, N)
    back = ht.forward(ht.inverse(spec, grid), N)
    err = math.sqrt((back - spec).norm2() / spec.norm2())
    assert err < 1e-10


@pytest.mark.parametrize("d", [2, 3])
def test_parseval(d, rng):
    N = 12
    f, g = random_spectrum(rng, d, N), random_spectrum(rng, d, N)
    grid = ht.QuadratureGrid.default(d, N)
    quad = ht.inner_product(ht.inverse(f, grid), ht.inverse(g, grid))
    assert_allclose(quad, f.dot(g), rtol=1e-12)


def test_forward_rejects_undersampled():
    grid = ht.QuadratureGrid.sphere(6, 10)
    with pytest.raises(ValueError):
        ht.forward(ht.GridFunction(grid, np.ones(grid.shape)), 8)


def test_evaluate_matches_inverse(rng):
    spec = random_spectrum(rng, 3, 7)
    grid = ht.QuadratureGrid.default(3, 7)
    th, ph = np.meshgrid(grid.theta, grid.phi, indexing="ij")
    pts = ht.evaluate(spec, th.ravel(), ph.ravel()).reshape(grid.shape)
    assert_allclose(pts, ht.inverse(spec, grid).values, atol=1e-12)


def test_apply_laplacian():
    spec = ht.basis_function(3, 3, 2)
    assert_allclose(ht.apply_laplacian(spec).blocks[3][2], -12.0)
    assert_allclose(ht.apply_laplacian(spec, 2).blocks[3][2], 144.0)
    assert ht.apply_laplacian(spec, 0).blocks[3][2] == 1.0
    with pytest.raises(ValueError):
        ht.apply_laplacian(spec, -1)
    with pytest.raises(ValueError):
        ht.apply_laplacian(HarmonicSpectrum.from_sq_norms([1.0, 2.0]))


def test_hessian_circle_example():
    # h = 1 + eps cos 2t  ->  h + h'' = 1 - 3 eps cos 2t
    eps = 0.1
    blocks = (np.array([math.sqrt(2 * math.pi)]), np.zeros(2), np.array([eps * math.sqrt(math.pi), 0.0]))
    spec = HarmonicSpectrum(blocks, 2)
    t = np.linspace(0, 2 * math.pi, 13)
    A = ht.hessian_at(spec, t)
    assert_allclose(A[:, 0, 0], 1 - 3 * eps * np.cos(2 * t), atol=1e-14)


def test_hessian_translated_ball_is_scalar():
    R, c = 1.3, np.array([0.4, -0.1, 0.7])
    blocks = [np.array([R * math.sqrt(4 * math.pi)]), np.zeros(3)]
    # degree-1 slots are ordered (z, x, y); c . u = sqrt(|B^3|) * <block, Y_1>
    blocks[1] = math.sqrt(4 * math.pi / 3) * c[[2, 0, 1]]
    spec = HarmonicSpectrum(tuple(blocks), 3)
    grid = ht.QuadratureGrid.default(3, 6)
    A = ht.surface_gradient_hessian(spec, grid)
    assert_allclose(A, R * np.broadcast_to(np.eye(2), A.shape), atol=1e-13)
    # and the degree-1 part really is c . u
    h = ht.inverse(spec, grid).values
    assert_allclose(h, R + grid.unit_vectors() @ c, atol=1e-14)


def _fd_hessian(spec, theta, phi, step):
    """A = h I + Hess h by 4th-order central differences in (theta, phi)."""
    def h(t, p):
        return ht.evaluate(spec, np.atleast_1d(t), np.atleast_1d(p))[0]

    c1 = np.array([1, -8, 0, 8, -1]) / 12.0
    c2 = np.array([-1, 16, -30, 16, -1]) / 12.0
    offs = np.arange(-2, 3) * step
    ht_ = sum(c * h(theta + o, phi) for c, o in zip(c1, offs)) / step
    htt = sum(c * h(theta + o, phi) for c, o in zip(c2, offs)) / step**2
    hp = sum(c * h(theta, phi + o) for c, o in zip(c1, offs)) / step
    hpp = sum(c * h(theta, phi + o) for c, o in zip(c2, offs)) / step**2
    htp = sum(
        ci * cj * h(theta + oi, phi + oj)
        for ci, oi in zip(c1, offs)
        for cj, oj in zip(c1, offs)
    ) / step**2
    s, cot = math.sin(theta), math.cos(theta) / math.sin(theta)
    h0 = h(theta, phi)
    return np.array(
        [
            [h0 + htt, (htp - cot * hp) / s],
            [(htp - cot * hp) / s, h0 + hpp / s**2 + cot * ht_],
        ]
    )


def test_hessian_finite_difference_convergence(rng):
    spec = random_spectrum(rng, 3, 5, scale=0.3)
    theta, phi = 1.1, 0.7
    exact = ht.hessian_at(spec, theta, phi)[0]
    steps = [0.02, 0.01, 0.005]
    errs = [np.abs(_fd_hessian(spec, theta, phi, s) - exact).max() for s in steps]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) >= 3.5
    assert errs[-1] < 1e-6
