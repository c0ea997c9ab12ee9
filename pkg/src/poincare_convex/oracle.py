"""Brute-force verifiers that bypass the spectral multiplier formulas.

``curve_oracle`` builds the boundary curve of a planar body from its support
function, X(t) = h(t) u(t) + h'(t) u'(t), and integrates length, area and
radius-of-curvature moments along it. ``pointwise_summary`` recomputes the
geometric summary by quadrature of the coordinate Hessian A = h I + Hess(h)
on a dense grid.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import ellipe

from . import harmonic_transform as ht
from .convex_body import GeometricSummary, SupportBody
from .spectral_core import HarmonicSpectrum, ball_volume, sphere_area


def _trig_series(spectrum: HarmonicSpectrum, t):
    """h, h', h'' of a planar spectrum by direct summation."""
    h = np.full_like(t, spectrum.blocks[0][0] / math.sqrt(2 * math.pi))
    dh = np.zeros_like(t)
    d2h = np.zeros_like(t)
    for n in range(1, spectrum.band_limit + 1):
        a, b = spectrum.blocks[n] / math.sqrt(math.pi)
        if a == 0 and b == 0:
            continue
        c, s = np.cos(n * t), np.sin(n * t)
        h += a * c + b * s
        dh += n * (b * c - a * s)
        d2h -= n * n * (a * c + b * s)
    return h, dh, d2h


def _fft_derivatives(values):
    """First and second derivatives of periodic samples over [0, 2 pi)."""
    M = values.size
    k = np.fft.rfftfreq(M, d=1.0 / M)
    c = np.fft.rfft(values)
    if M % 2 == 0:
        # the Nyquist mode has no well-defined odd derivative
        c1 = c.copy()
        c1[-1] = 0.0
    else:
        c1 = c
    return np.fft.irfft(1j * k * c1, n=M), np.fft.irfft(-(k**2) * c, n=M)


def curve_oracle(body, n_samples: int = 100_000, derivatives=None) -> dict:
    """(L, A, int 1/kappa ds, int 1/kappa^2 ds) of a planar convex body.

    ``body`` is a d=2 :class:`SupportBody` or a callable h(t). For a callable,
    ``derivatives=(dh, d2h)`` may supply exact derivatives; otherwise they
    are obtained from the samples by FFT differentiation.
    """
    t = 2.0 * np.pi * np.arange(n_samples) / n_samples
    if isinstance(body, SupportBody):
        if body.dim != 2:
            raise ValueError("curve oracle is planar (d = 2) only")
        h, dh, d2h = _trig_series(body.spectrum, t)
    else:
        h = np.asarray(body(t), dtype=float)
        if derivatives is None:
            dh, d2h = _fft_derivatives(h)
        else:
            dh, d2h = (np.asarray(f(t), dtype=float) for f in derivatives)
    u = np.stack([np.cos(t), np.sin(t)], axis=-1)
    tan = np.stack([-np.sin(t), np.cos(t)], axis=-1)
    X = h[:, None] * u + dh[:, None] * tan
    # X' = (h + h'') tan, since the Gauss map of X(t) is u(t)
    Xp = (h + d2h)[:, None] * tan
    if np.any(np.einsum("ij,ij->i", Xp, tan) <= 0):
        raise ValueError("support function is not convex: h + h'' <= 0 somewhere")
    speed = np.linalg.norm(Xp, axis=1)
    cross = X[:, 0] * Xp[:, 1] - X[:, 1] * Xp[:, 0]
    dt = 2.0 * np.pi / n_samples
    # speed = ds/dt = 1/kappa
    return {
        "L": math.fsum(speed) * dt,
        "A": 0.5 * math.fsum(cross) * dt,
        "int_inv_kappa": math.fsum(speed**2) * dt,
        "int_inv_kappa2": math.fsum(speed**3) * dt,
    }


def ellipse_closed_form(a: float, b: float) -> dict:
    """L, A and int 1/kappa ds of the ellipse with semi-axes a, b."""
    a, b = max(a, b), min(a, b)
    return {
        "L": 4.0 * a * float(ellipe(1.0 - (b / a) ** 2)),
        "A": math.pi * a * b,
        "int_inv_kappa": math.pi * (3 * a**4 + 2 * a**2 * b**2 + 3 * b**4) / (4 * a * b),
    }


def ellipse_support_derivatives(a: float, b: float):
    """Exact h, h', h'' of the ellipse support function."""
    def h(t):
        return np.sqrt(a * a * np.cos(t) ** 2 + b * b * np.sin(t) ** 2)

    def dh(t):
        return 0.5 * (b * b - a * a) * np.sin(2 * t) / h(t)

    def d2h(t):
        return ((b * b - a * a) * np.cos(2 * t) - dh(t) ** 2) / h(t)

    return h, dh, d2h


def _dense_grid(d: int, band_limit: int, grid_scale: int) -> ht.QuadratureGrid:
    return ht.QuadratureGrid.default(d, max(band_limit, 4) * max(int(grid_scale), 1))


def dense_inner_product_oracle(
    f_spec: HarmonicSpectrum, g_spec: HarmonicSpectrum, grid_scale: int = 2
) -> float:
    """<f, g> by synthesis on an oversampled grid and pointwise quadrature."""
    if f_spec.dim != g_spec.dim:
        raise ValueError("dimension mismatch")
    grid = _dense_grid(f_spec.dim, max(f_spec.band_limit, g_spec.band_limit), grid_scale)
    return ht.inner_product(ht.inverse(f_spec, grid), ht.inverse(g_spec, grid))


def pointwise_summary(body: SupportBody, grid_scale: int = 2) -> GeometricSummary:
    """Every :class:`GeometricSummary` field by dense quadrature.

    rho = H_{d-2}/H_{d-1} is taken as trace(A)/(d-1) with A the coordinate
    Hessian matrix, not from the eigenvalue multipliers.
    """
    d = body.dim
    grid = _dense_grid(d, body.band_limit, grid_scale)
    w = grid.weights
    h = ht.inverse(body.spectrum, grid).values
    A = ht.surface_gradient_hessian(body.spectrum, grid)
    rho = np.trace(A, axis1=-2, axis2=-1).reshape(h.shape) / (d - 1)
    u = grid.unit_vectors()

    def integral(f):
        return math.fsum((w * f).ravel())

    int2 = integral(h)
    width = 2.0 * int2 / sphere_area(d)
    z = np.array([integral(h * u[..., i]) for i in range(d)]) / ball_volume(d)
    int3 = integral(h * rho)
    residual = h - 0.5 * width - u @ z
    return GeometricSummary(
        mean_width=width,
        steiner_point=tuple(float(x) for x in z),
        intH_dm2=int2,
        intH_dm3=int3,
        ros_term=integral(rho * rho),
        delta2_to_steiner_ball=math.sqrt(max(integral(residual**2), 0.0)),
        W_dm1=int2 / d,
        W_dm2=int3 / d,
    )
