"""Quadrature grids and real harmonic transforms on S^1 and S^2.

Bases are real and orthonormal for the unnormalized area measure:

* S^1: 1/sqrt(2 pi), cos(n t)/sqrt(pi), sin(n t)/sqrt(pi)
* S^2: Pbar_n^m(cos theta) times 1, sqrt(2) cos(m phi), sqrt(2) sin(m phi),
  where Pbar_n^m are fully normalized associated Legendre functions
  without the Condon-Shortley phase.

Within a degree-n block on S^2 the order is m = 0, (1 cos, 1 sin),
(2 cos, 2 sin), ..., so slot 2m-1 is cos(m phi) and slot 2m is sin(m phi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral_core import HarmonicSpectrum, eigenvalue, harmonic_dimension

DEFAULT_BAND_LIMIT = 64


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Product quadrature on S^1 (uniform) or S^2 (Gauss-Legendre x uniform).

    For S^1 ``theta`` holds the M angles and ``phi`` is empty. For S^2
    ``theta`` holds the colatitudes of the Gauss-Legendre rings and ``phi``
    the uniform longitudes; ``weights`` then has shape (n_theta, n_phi).
    """

    dim: int
    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray

    @classmethod
    def circle(cls, M: int) -> "QuadratureGrid":
        t = 2.0 * np.pi * np.arange(M) / M
        return cls(2, t, np.empty(0), np.full(M, 2.0 * np.pi / M))

    @classmethod
    def sphere(cls, n_theta: int, n_phi: int) -> "QuadratureGrid":
        x, w = np.polynomial.legendre.leggauss(n_theta)
        # descending x so theta increases from the north pole
        theta = np.arccos(x[::-1])
        w = w[::-1]
        phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
        return cls(3, theta, phi, np.outer(w, np.full(n_phi, 2.0 * np.pi / n_phi)))

    @classmethod
    def default(cls, d: int, band_limit: int = DEFAULT_BAND_LIMIT) -> "QuadratureGrid":
        """Twice-oversampled grid for the given band limit."""
        if d == 2:
            return cls.circle(max(8 * band_limit, 16))
        if d == 3:
            return cls.sphere(2 * band_limit + 2, 4 * band_limit + 4)
        raise ValueError(f"grids exist only for d in (2, 3), got d={d}")

    @property
    def shape(self) -> tuple:
        return self.weights.shape

    @property
    def total_weight(self) -> float:
        return math.fsum(self.weights.ravel())

    @property
    def max_band_limit(self) -> int:
        """Largest band limit whose products this grid integrates exactly."""
        if self.dim == 2:
            return (len(self.theta) - 1) // 2
        return min(len(self.theta) - 1, (len(self.phi) - 1) // 2)

    def unit_vectors(self) -> np.ndarray:
        """Cartesian unit vectors of the nodes, shape grid.shape + (d,)."""
        if self.dim == 2:
            return np.stack([np.cos(self.theta), np.sin(self.theta)], axis=-1)
        th, ph = np.meshgrid(self.theta, self.phi, indexing="ij")
        return np.stack(
            [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1
        )

    def same_as(self, other: "QuadratureGrid") -> bool:
        return (
            self.dim == other.dim
            and self.theta.shape == other.theta.shape
            and self.phi.shape == other.phi.shape
            and np.array_equal(self.theta, other.theta)
            and np.array_equal(self.phi, other.phi)
        )


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a function at the nodes of a :class:`QuadratureGrid`."""

    grid: QuadratureGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} != grid shape {self.grid.shape}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, grid: QuadratureGrid, f) -> "GridFunction":
        """Sample ``f(unit_vectors)`` (vectorized over the last axis) on ``grid``."""
        return cls(grid, f(grid.unit_vectors()))

    def integral(self) -> float:
        return math.fsum((self.grid.weights * self.values).ravel())


def inner_product(f: GridFunction, g: GridFunction) -> float:
    """Quadrature inner product sum(w f g)."""
    if not f.grid.same_as(g.grid):
        raise ValueError("grid mismatch")
    return math.fsum((f.grid.weights * f.values * g.values).ravel())


# --------------------------------------------------------------------------
# associated Legendre functions


def normalized_legendre(N: int, theta, derivatives: bool = False):
    """Fully normalized Pbar_n^m(cos theta) for 0 <= m <= n <= N.

    Returns an array of shape (N+1, N+1, len(theta)) indexed [n, m, k], zero
    for m > n. With ``derivatives`` the first and second theta-derivatives
    are returned as well; theta must then avoid the poles.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    x, s = np.cos(theta), np.sin(theta)
    P = np.zeros((N + 1, N + 1, theta.size))
    P[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
    for m in range(1, N + 1):
        P[m, m] = math.sqrt((2 * m + 1) / (2 * m)) * s * P[m - 1, m - 1]
    for m in range(0, N):
        P[m + 1, m] = math.sqrt(2 * m + 3) * x * P[m, m]
    for m in range(0, N + 1):
        for n in range(m + 2, N + 1):
            a = math.sqrt((4 * n * n - 1) / (n * n - m * m))
            b = math.sqrt(((n - 1) ** 2 - m * m) / (4 * (n - 1) ** 2 - 1))
            P[n, m] = a * (x * P[n - 1, m] - b * P[n - 2, m])
    if not derivatives:
        return P
    if np.any(np.abs(s) < 1e-14):
        raise ValueError("theta-derivatives are singular at the poles")
    # sin(t) dP_n^m/dt = n cos(t) P_n^m - sqrt((2n+1)(n^2-m^2)/(2n-1)) P_{n-1}^m
    dP = np.zeros_like(P)
    for n in range(0, N + 1):
        dP[n, : n + 1] = n * x * P[n, : n + 1]
        if n >= 1:
            m = np.arange(0, n)
            c = np.sqrt((2 * n + 1) * (n * n - m * m) / (2 * n - 1))
            dP[n, :n] -= c[:, None] * P[n - 1, :n]
    dP /= s
    # Legendre equation in theta form
    n = np.arange(N + 1)[:, None, None]
    m = np.arange(N + 1)[None, :, None]
    d2P = -(x / s) * dP - (n * (n + 1) - m * m / s**2) * P
    d2P[np.broadcast_to(m > n, d2P.shape)] = 0.0
    return P, dP, d2P


# --------------------------------------------------------------------------
# packing between blocks and (n, m) arrays


def _pack_s2(spectrum: HarmonicSpectrum, N: int):
    """Cos/sin coefficient arrays a[n, m], b[n, m] (with sqrt(2) absorbed)."""
    a = np.zeros((N + 1, N + 1))
    b = np.zeros((N + 1, N + 1))
    for n in range(min(N, spectrum.band_limit) + 1):
        blk = spectrum.blocks[n]
        a[n, 0] = blk[0]
        if n:
            a[n, 1 : n + 1] = math.sqrt(2.0) * blk[1::2]
            b[n, 1 : n + 1] = math.sqrt(2.0) * blk[2::2]
    return a, b


def _unpack_s2(a, b, N: int) -> HarmonicSpectrum:
    blocks = []
    for n in range(N + 1):
        blk = np.empty(2 * n + 1)
        blk[0] = a[n, 0]
        blk[1::2] = math.sqrt(2.0) * a[n, 1 : n + 1]
        blk[2::2] = math.sqrt(2.0) * b[n, 1 : n + 1]
        blocks.append(blk)
    return HarmonicSpectrum(tuple(blocks), 3)


def _s1_basis(N: int, t):
    """Real orthonormal S^1 basis at angles t, shape (len(t), 2N+1).

    Column 0 is the constant, columns 2n-1 / 2n are cos / sin of degree n.
    """
    t = np.asarray(t, dtype=float)
    n = np.arange(1, N + 1)
    out = np.empty((t.size, 2 * N + 1))
    out[:, 0] = 1.0 / math.sqrt(2.0 * math.pi)
    out[:, 1::2] = np.cos(np.outer(t, n)) / math.sqrt(math.pi)
    out[:, 2::2] = np.sin(np.outer(t, n)) / math.sqrt(math.pi)
    return out


def _flat_s1(spectrum: HarmonicSpectrum, N: int) -> np.ndarray:
    c = np.zeros(2 * N + 1)
    c[0] = spectrum.blocks[0][0]
    for n in range(1, min(N, spectrum.band_limit) + 1):
        c[2 * n - 1 : 2 * n + 1] = spectrum.blocks[n]
    return c


def _check_dims(d):
    if d not in (2, 3):
        raise ValueError(f"grid transforms exist only for d in (2, 3), got d={d}")


# --------------------------------------------------------------------------
# transforms


def forward(f: GridFunction, N: int) -> HarmonicSpectrum:
    """Project grid samples onto the harmonics of degree <= N."""
    grid = f.grid
    if N > grid.max_band_limit:
        raise ValueError(
            f"grid resolves band limit {grid.max_band_limit}, requested {N}"
        )
    if grid.dim == 2:
        basis = _s1_basis(N, grid.theta)
        c = basis.T @ (grid.weights * f.values)
        blocks = [c[:1]] + [c[2 * n - 1 : 2 * n + 1] for n in range(1, N + 1)]
        return HarmonicSpectrum(tuple(blocks), 2)
    m = np.arange(N + 1)
    dphi = 2.0 * np.pi / len(grid.phi)
    cos_t = np.cos(np.outer(grid.phi, m)) * dphi
    sin_t = np.sin(np.outer(grid.phi, m)) * dphi
    # ring weights are uniform in phi, so factor them out
    w_theta = grid.weights[:, 0] / dphi
    Gc = f.values @ cos_t
    Gs = f.values @ sin_t
    P = normalized_legendre(N, grid.theta)
    a = np.einsum("nmk,k,km->nm", P, w_theta, Gc)
    b = np.einsum("nmk,k,km->nm", P, w_theta, Gs)
    return _unpack_s2(a, b, N)


def _synthesize_s2(spectrum, theta, phi, order=(0, 0)):
    """Synthesize a theta/phi derivative of given order on a theta x phi product."""
    N = spectrum.band_limit
    a, b = _pack_s2(spectrum, N)
    if order[0] == 0:
        P = normalized_legendre(N, theta)
    else:
        P = normalized_legendre(N, theta, derivatives=True)[order[0]]
    m = np.arange(N + 1)
    # d^k/dphi^k of (a cos + b sin)
    k = order[1]
    ca, cb = a * (m**k), b * (m**k)
    for _ in range(k):
        ca, cb = cb, -ca
    A = np.einsum("nmk,nm->km", P, ca)
    B = np.einsum("nmk,nm->km", P, cb)
    return A @ np.cos(np.outer(m, phi)) + B @ np.sin(np.outer(m, phi))


def inverse(spectrum: HarmonicSpectrum, grid: QuadratureGrid) -> GridFunction:
    """Pointwise synthesis of ``spectrum`` on ``grid``."""
    if spectrum.dim != grid.dim:
        raise ValueError(f"dimension mismatch: spectrum d={spectrum.dim}, grid d={grid.dim}")
    if grid.dim == 2:
        N = spectrum.band_limit
        return GridFunction(grid, _s1_basis(N, grid.theta) @ _flat_s1(spectrum, N))
    return GridFunction(grid, _synthesize_s2(spectrum, grid.theta, grid.phi))


def evaluate(spectrum: HarmonicSpectrum, theta, phi=None) -> np.ndarray:
    """Evaluate at scattered points (angle t on S^1; colatitude/longitude on S^2)."""
    _check_dims(spectrum.dim)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    N = spectrum.band_limit
    if spectrum.dim == 2:
        return _s1_basis(N, theta) @ _flat_s1(spectrum, N)
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    a, b = _pack_s2(spectrum, N)
    P = normalized_legendre(N, theta)
    m = np.arange(N + 1)
    cos_mp = np.cos(np.outer(m, phi))
    sin_mp = np.sin(np.outer(m, phi))
    return np.einsum("nmk,nm,mk->k", P, a, cos_mp) + np.einsum("nmk,nm,mk->k", P, b, sin_mp)


def apply_laplacian(spectrum: HarmonicSpectrum, power: int = 1, eigs=None) -> HarmonicSpectrum:
    """Apply Laplacian^power: block n is multiplied by (-lambda_n)^power."""
    if int(power) != power or power < 0:
        raise ValueError("power must be a non-negative integer")
    if spectrum.dim is None:
        if eigs is None:
            raise ValueError("abstract spectra need an explicit EigenSystem")
        eigs = eigs.extended(spectrum.band_limit)
        lam = [eigs[n] for n in range(spectrum.band_limit + 1)]
    else:
        lam = [eigenvalue(n, spectrum.dim) for n in range(spectrum.band_limit + 1)]
    return spectrum.scale_blocks([(-l) ** int(power) for l in lam])


def surface_gradient_hessian(spectrum: HarmonicSpectrum, grid: QuadratureGrid) -> np.ndarray:
    """Per-node matrix A = h I + Hess(h) in an orthonormal tangent frame.

    S^1: shape (M, 1, 1) holding h + h''. S^2: shape (n_theta, n_phi, 2, 2) in
    the frame (e_theta, e_phi / sin theta).
    """
    _check_dims(spectrum.dim)
    if spectrum.dim != grid.dim:
        raise ValueError("dimension mismatch")
    if spectrum.dim == 2:
        rho = spectrum.scale_blocks(lambda n: 1 - n * n)
        return inverse(rho, grid).values[:, None, None]
    return _hessian_s2(spectrum, grid.theta, grid.phi, product=True)


def hessian_at(spectrum: HarmonicSpectrum, theta, phi=None) -> np.ndarray:
    """A = h I + Hess(h) at scattered points; shape (P, d-1, d-1)."""
    _check_dims(spectrum.dim)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if spectrum.dim == 2:
        rho = spectrum.scale_blocks(lambda n: 1 - n * n)
        return evaluate(rho, theta)[:, None, None]
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    out = np.empty((theta.size, 2, 2))
    for k in range(theta.size):
        out[k] = _hessian_s2(spectrum, theta[k : k + 1], phi[k : k + 1], product=True)[0, 0]
    return out


def _hessian_s2(spectrum, theta, phi, product):
    h = _synthesize_s2(spectrum, theta, phi, (0, 0))
    h_t = _synthesize_s2(spectrum, theta, phi, (1, 0))
    h_tt = _synthesize_s2(spectrum, theta, phi, (2, 0))
    h_p = _synthesize_s2(spectrum, theta, phi, (0, 1))
    h_pp = _synthesize_s2(spectrum, theta, phi, (0, 2))
    h_tp = _synthesize_s2(spectrum, theta, phi, (1, 1))
    s = np.sin(theta)[:, None]
    cot = (np.cos(theta) / np.sin(theta))[:, None]
    A = np.empty(h.shape + (2, 2))
    A[..., 0, 0] = h + h_tt
    A[..., 0, 1] = A[..., 1, 0] = (h_tp - cot * h_p) / s
    A[..., 1, 1] = h + h_pp / s**2 + cot * h_t
    return A


def basis_function(d: int, n: int, slot: int) -> HarmonicSpectrum:
    """Spectrum of a single orthonormal basis function."""
    if not 0 <= slot < harmonic_dimension(n, d):
        raise ValueError(f"slot {slot} out of range for degree {n}, d={d}")
    blocks = [np.zeros(harmonic_dimension(k, d)) for k in range(n + 1)]
    blocks[n][slot] = 1.0
    return HarmonicSpectrum(tuple(blocks), d)
