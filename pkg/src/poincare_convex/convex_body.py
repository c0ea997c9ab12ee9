"""Convex bodies represented by the harmonic spectrum of their support function.

All functionals are evaluated spectrally. On S^{d-1} the Laplacian acts on
degree n by -lambda_n with lambda_n = n(n+d-2), and the integrands of the
curvature integrals reduce to h and its Laplacian:

* int_Sigma H_{d-2} dS = int h dtheta
* int_Sigma H_{d-3} dS = <h, Laplacian h + (d-1) h> / (d-1)
* int_Sigma H_{d-2}^2 / H_{d-1} dS = int (h + Laplacian h / (d-1))^2 dtheta

On S^1 (d = 2) the middle quantity is twice the enclosed area.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import harmonic_transform as ht
from .spectral_core import (
    HarmonicSpectrum,
    ball_volume,
    eigenvalue,
    sphere_area,
)

CERTIFIED = "certified"
FAILED = "failed"
UNCERTIFIED = "uncertified"


@dataclass(frozen=True)
class ConvexityCertificate:
    """Smallest eigenvalue of A = h I + Hess(h) over a grid."""

    min_eigenvalue: float
    grid_shape: tuple

    @property
    def convex(self) -> bool:
        return self.min_eigenvalue > 0


@dataclass(frozen=True, eq=False)
class SupportBody:
    """A convex body K in R^d given by the spectrum of h_K on S^{d-1}."""

    spectrum: HarmonicSpectrum
    certificate: ConvexityCertificate | None = None
    tail_energy: float = 0.0

    def __post_init__(self):
        if self.spectrum.dim is None or self.spectrum.dim < 2:
            raise ValueError("a support body needs a concrete dimension d >= 2")

    @property
    def dim(self) -> int:
        return self.spectrum.dim

    @property
    def band_limit(self) -> int:
        return self.spectrum.band_limit

    @property
    def convexity_flag(self) -> str:
        if self.certificate is None:
            return UNCERTIFIED
        return CERTIFIED if self.certificate.convex else FAILED

    def certified(self, grid: ht.QuadratureGrid | None = None) -> "SupportBody":
        """Copy carrying a convexity certificate (d in {2, 3} only)."""
        return replace(self, certificate=certify_convex(self, grid))

    def scaled(self, t: float) -> "SupportBody":
        cert = self.certificate
        if cert is not None:
            cert = ConvexityCertificate(t * cert.min_eigenvalue, cert.grid_shape)
        return SupportBody(self.spectrum * t, cert, t * t * self.tail_energy)

    def translated(self, v) -> "SupportBody":
        """K + v: adds v . theta to the support function."""
        v = np.asarray(v, dtype=float)
        blocks = list(self.spectrum.padded(max(1, self.band_limit)).blocks)
        blocks[1] = blocks[1] + vector_to_degree_one(v, self.dim)
        return SupportBody(HarmonicSpectrum(tuple(blocks), self.dim), self.certificate)

    def support(self, u) -> np.ndarray:
        """h_K at unit vectors ``u`` (last axis of length d, d in {2, 3})."""
        u = np.asarray(u, dtype=float)
        if self.dim == 2:
            return ht.evaluate(self.spectrum, np.arctan2(u[..., 1], u[..., 0]).ravel()).reshape(
                u.shape[:-1]
            )
        if self.dim == 3:
            th = np.arccos(np.clip(u[..., 2], -1.0, 1.0)).ravel()
            ph = np.arctan2(u[..., 1], u[..., 0]).ravel()
            return ht.evaluate(self.spectrum, th, ph).reshape(u.shape[:-1])
        raise ValueError("pointwise evaluation needs d in (2, 3)")


# --------------------------------------------------------------------------
# degree-one block <-> vectors


def _degree_one_order(d: int) -> list:
    # position of Cartesian axis i inside the degree-1 block
    if d == 3:
        return [1, 2, 0]
    return list(range(d))


def degree_one_to_vector(block, d: int) -> np.ndarray:
    """Cartesian vector c with sum_i c_i x_i equal to the degree-1 part."""
    block = np.asarray(block, dtype=float)
    scale = 1.0 / math.sqrt(ball_volume(d))
    return scale * block[_degree_one_order(d)]


def vector_to_degree_one(v, d: int) -> np.ndarray:
    """Degree-1 block of the linear function theta -> v . theta."""
    v = np.asarray(v, dtype=float)
    if v.shape != (d,):
        raise ValueError(f"need a vector of length {d}")
    block = np.empty(d)
    block[_degree_one_order(d)] = v * math.sqrt(ball_volume(d))
    return block


# --------------------------------------------------------------------------
# functionals


def certify_convex(body: SupportBody, grid: ht.QuadratureGrid | None = None) -> ConvexityCertificate:
    """Minimum over grid nodes of the smallest eigenvalue of h I + Hess(h)."""
    if body.dim not in (2, 3):
        raise ValueError("convexity certification is available for d in (2, 3) only")
    if grid is None:
        grid = ht.QuadratureGrid.default(body.dim, max(body.band_limit, 8))
    A = ht.surface_gradient_hessian(body.spectrum, grid)
    lo = float(np.linalg.eigvalsh(A).min())
    return ConvexityCertificate(lo, tuple(grid.shape))


def mean_value(body: SupportBody) -> float:
    """(1/|S^{d-1}|) int h dtheta; half the mean width."""
    return float(body.spectrum.blocks[0][0]) / math.sqrt(sphere_area(body.dim))


def mean_width(body: SupportBody) -> float:
    return 2.0 * mean_value(body)


def steiner_point(body: SupportBody) -> np.ndarray:
    """z(K) = (1/|B^d|) int h(theta) theta dtheta, read off the degree-1 block."""
    return degree_one_to_vector(body.spectrum.block(1), body.dim)


def steiner_ball_support(body: SupportBody) -> HarmonicSpectrum:
    """Support function of the Steiner ball: degrees 0 and 1 of h."""
    return body.spectrum.padded(1).truncated(1)


def _sq_norm_diff(a: HarmonicSpectrum, b: HarmonicSpectrum) -> float:
    return (a - b).norm2()


def delta2(K: SupportBody, L: SupportBody) -> float:
    """L^2 distance between support functions."""
    if K.dim != L.dim:
        raise ValueError("dimension mismatch")
    return math.sqrt(_sq_norm_diff(K.spectrum, L.spectrum))


def delta2_to_steiner_ball_sq(body: SupportBody) -> float:
    """delta_2(K, B(K))^2 = sum_{n >= 2} ||h_n||^2."""
    return math.fsum(body.spectrum.sq_norms()[2:])


def _lams(d: int, N: int) -> np.ndarray:
    return np.array([eigenvalue(n, d) for n in range(N + 1)], dtype=float)


def rho_spectrum(spectrum: HarmonicSpectrum) -> HarmonicSpectrum:
    """H_{d-2}/H_{d-1} = h + Laplacian h / (d-1) as a spectrum."""
    d = spectrum.dim
    return spectrum.scale_blocks(lambda n: 1.0 - eigenvalue(n, d) / (d - 1))


@dataclass(frozen=True)
class CurvatureIntegrals:
    intH_dm2: float
    intH_dm3: float
    ros_term: float


def curvature_integrals(body: SupportBody) -> CurvatureIntegrals:
    """(int H_{d-2}, int H_{d-3}, int H_{d-2}^2/H_{d-1}) over the boundary."""
    d = body.dim
    s = body.spectrum.sq_norms()
    lam = _lams(d, body.band_limit)
    int2 = math.sqrt(sphere_area(d)) * float(body.spectrum.blocks[0][0])
    int3 = math.fsum(((d - 1) - lam) * s) / (d - 1)
    ros = math.fsum((1.0 - lam / (d - 1)) ** 2 * s)
    return CurvatureIntegrals(int2, int3, ros)


def mixed_volume(K: SupportBody, L: SupportBody) -> float:
    """V(K, L) = V(K, L, B, ..., B) = <h_K, Laplacian h_L + (d-1) h_L> / (d(d-1))."""
    if K.dim != L.dim:
        raise ValueError(f"dimension mismatch: {K.dim} vs {L.dim}")
    d = K.dim
    dots = K.spectrum.block_dots(L.spectrum)
    lam = _lams(d, dots.size - 1)
    return math.fsum(((d - 1) - lam) * dots) / (d * (d - 1))


def quermassintegrals(body: SupportBody) -> tuple[float, float]:
    """(W_{d-1}, W_{d-2})."""
    ci = curvature_integrals(body)
    return ci.intH_dm2 / body.dim, ci.intH_dm3 / body.dim


def quermassintegral_d(d: int) -> float:
    """W_d(K) = |B^d| for every K."""
    return ball_volume(d)


@dataclass(frozen=True)
class GeometricSummary:
    mean_width: float
    steiner_point: tuple
    intH_dm2: float
    intH_dm3: float
    ros_term: float
    delta2_to_steiner_ball: float
    W_dm1: float
    W_dm2: float

    def as_dict(self) -> dict:
        return {
            "mean_width": self.mean_width,
            "steiner_point": list(self.steiner_point),
            "intH_dm2": self.intH_dm2,
            "intH_dm3": self.intH_dm3,
            "ros_term": self.ros_term,
            "delta2_to_steiner_ball": self.delta2_to_steiner_ball,
            "W_dm1": self.W_dm1,
            "W_dm2": self.W_dm2,
        }


def summary(body: SupportBody) -> GeometricSummary:
    ci = curvature_integrals(body)
    return GeometricSummary(
        mean_width=mean_width(body),
        steiner_point=tuple(float(x) for x in steiner_point(body)),
        intH_dm2=ci.intH_dm2,
        intH_dm3=ci.intH_dm3,
        ros_term=ci.ros_term,
        delta2_to_steiner_ball=math.sqrt(delta2_to_steiner_ball_sq(body)),
        W_dm1=ci.intH_dm2 / body.dim,
        W_dm2=ci.intH_dm3 / body.dim,
    )
