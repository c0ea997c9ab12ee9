"""Exact eigenvalue algebra and spectral quadratic forms.

Everything here works on the per-degree decomposition F ~ sum_n F_n of a
function on a closed manifold. Coefficient algebra is exact (``int`` or
``fractions.Fraction``); floating point only enters through the spectrum
coefficients themselves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

#: relative squared-norm threshold below which a block counts as zero
VANISHING_TOL = 1e-12


class PreconditionError(ValueError):
    """Raised when a spectrum violates the hypotheses of a quadratic form."""


def eigenvalue(n: int, d: int) -> int:
    """Eigenvalue n(n+d-2) of -Laplacian on the unit sphere S^{d-1}."""
    if int(n) != n or n < 0:
        raise ValueError(f"degree must be a non-negative integer, got {n!r}")
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")
    n, d = int(n), int(d)
    return n * (n + d - 2)


def harmonic_dimension(n: int, d: int) -> int:
    """Dimension of the degree-n spherical harmonics on S^{d-1}."""
    if n < 0 or d < 2:
        raise ValueError("need n >= 0 and d >= 2")
    top = math.comb(n + d - 1, d - 1)
    low = math.comb(n + d - 3, d - 1) if n >= 2 else 0
    return top - low


def sphere_area(d: int) -> float:
    """|S^{d-1}|, the surface area of the unit sphere in R^d."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def ball_volume(d: int) -> float:
    """|B^d| (also the quermassintegral W_d of any body)."""
    return sphere_area(d) / d


def _exact(x) -> int | Fraction:
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Rational):
        return Fraction(x)
    return Fraction(float(x))


@dataclass(frozen=True)
class EigenSystem:
    """Distinct eigenvalues 0 = lambda_0 < lambda_1 < ... of -Laplacian.

    ``dim`` is the sphere dimension d (so the manifold is S^{d-1}) or ``None``
    for an abstract closed manifold whose spectrum the user supplies.
    """

    eigenvalues: tuple
    dim: int | None = None

    def __post_init__(self):
        vals = tuple(_exact(v) for v in self.eigenvalues)
        if not vals or vals[0] != 0:
            raise ValueError("eigenvalue sequence must start with lambda_0 = 0")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("eigenvalues must be strictly increasing")
        if self.dim is not None:
            for n, v in enumerate(vals):
                if v != eigenvalue(n, self.dim):
                    raise ValueError(f"lambda_{n} = {v} is not the sphere value")
        object.__setattr__(self, "eigenvalues", vals)

    @classmethod
    def sphere(cls, d: int, max_degree: int) -> "EigenSystem":
        return cls(tuple(eigenvalue(n, d) for n in range(max_degree + 1)), dim=d)

    @classmethod
    def abstract(cls, eigenvalues: Iterable) -> "EigenSystem":
        return cls(tuple(eigenvalues), dim=None)

    @property
    def max_degree(self) -> int:
        return len(self.eigenvalues) - 1

    def __getitem__(self, n: int):
        return self.eigenvalues[n]

    def gamma(self, n: int):
        """Shifted eigenvalue lambda_n - lambda_1."""
        return self.eigenvalues[n] - self.eigenvalues[1]

    def extended(self, max_degree: int) -> "EigenSystem":
        """Same system with at least ``max_degree`` stored (sphere mode only)."""
        if max_degree <= self.max_degree:
            return self
        if self.dim is None:
            raise ValueError(
                f"abstract spectrum only known up to degree {self.max_degree}"
            )
        return EigenSystem.sphere(self.dim, max_degree)


@dataclass(frozen=True, eq=False)
class HarmonicSpectrum:
    """Coefficients of a function, grouped by eigenspace degree.

    ``blocks[n]`` holds the coefficients of F_n against an orthonormal basis
    of the degree-n eigenspace. Block lengths are fixed by ``dim``:
    1 at n = 0 and 2 afterwards on S^1, 2n+1 on S^2, and in general the
    dimension of the degree-n harmonics. The degree-1 block is ordered so
    that it maps to Cartesian coordinates (x, y) on S^1, (z, x, y) on S^2
    and (x_1..x_d) for d >= 4.

    With ``dim=None`` the spectrum is abstract: each block is a single
    number whose square is ||F_n||^2.
    """

    blocks: tuple
    dim: int | None = None

    def __post_init__(self):
        blocks = []
        for n, b in enumerate(self.blocks):
            arr = np.array(b, dtype=float).reshape(-1)
            expected = 1 if self.dim is None else harmonic_dimension(n, self.dim)
            if arr.size != expected:
                raise ValueError(
                    f"block {n} has {arr.size} coefficients, expected {expected}"
                )
            arr.setflags(write=False)
            blocks.append(arr)
        if not blocks:
            raise ValueError("spectrum needs at least the degree-0 block")
        object.__setattr__(self, "blocks", tuple(blocks))

    @classmethod
    def zeros(cls, dim: int | None, band_limit: int) -> "HarmonicSpectrum":
        if dim is None:
            return cls(tuple(np.zeros(1) for _ in range(band_limit + 1)), None)
        return cls(
            tuple(np.zeros(harmonic_dimension(n, dim)) for n in range(band_limit + 1)),
            dim,
        )

    @classmethod
    def from_sq_norms(cls, sq_norms: Sequence[float]) -> "HarmonicSpectrum":
        """Abstract spectrum from per-degree squared norms ||F_n||^2."""
        s = np.asarray(sq_norms, dtype=float)
        if np.any(s < 0):
            raise ValueError("squared norms must be non-negative")
        return cls(tuple(np.sqrt(s)[:, None]), None)

    @property
    def band_limit(self) -> int:
        return len(self.blocks) - 1

    def sq_norms(self) -> np.ndarray:
        return np.array([float(b @ b) for b in self.blocks])

    def norm2(self) -> float:
        """||F||^2 by Parseval."""
        return math.fsum(self.sq_norms())

    def block(self, n: int) -> np.ndarray:
        if n > self.band_limit:
            return np.zeros(1 if self.dim is None else harmonic_dimension(n, self.dim))
        return self.blocks[n]

    def padded(self, band_limit: int) -> "HarmonicSpectrum":
        if band_limit <= self.band_limit:
            return self
        return HarmonicSpectrum(
            tuple(self.block(n) for n in range(band_limit + 1)), self.dim
        )

    def truncated(self, band_limit: int) -> "HarmonicSpectrum":
        return HarmonicSpectrum(self.blocks[: band_limit + 1], self.dim)

    def scale_blocks(self, factors) -> "HarmonicSpectrum":
        """Multiply block n by ``factors[n]`` (callable or sequence)."""
        if callable(factors):
            factors = [factors(n) for n in range(self.band_limit + 1)]
        return HarmonicSpectrum(
            tuple(float(f) * b for f, b in zip(factors, self.blocks)), self.dim
        )

    def keep_degrees(self, degrees) -> "HarmonicSpectrum":
        keep = set(degrees)
        return self.scale_blocks([1.0 if n in keep else 0.0 for n in range(self.band_limit + 1)])

    def _check_compatible(self, other: "HarmonicSpectrum"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "HarmonicSpectrum") -> "HarmonicSpectrum":
        self._check_compatible(other)
        N = max(self.band_limit, other.band_limit)
        a, b = self.padded(N), other.padded(N)
        return HarmonicSpectrum(tuple(x + y for x, y in zip(a.blocks, b.blocks)), self.dim)

    def __sub__(self, other: "HarmonicSpectrum") -> "HarmonicSpectrum":
        return self + other * -1.0

    def __mul__(self, t: float) -> "HarmonicSpectrum":
        return HarmonicSpectrum(tuple(float(t) * b for b in self.blocks), self.dim)

    __rmul__ = __mul__

    def block_dots(self, other: "HarmonicSpectrum") -> np.ndarray:
        """Per-degree inner products <F_n, G_n>."""
        self._check_compatible(other)
        if self.dim is None:
            raise ValueError("abstract spectra carry no basis; inner products undefined")
        N = min(self.band_limit, other.band_limit)
        return np.array([float(self.blocks[n] @ other.blocks[n]) for n in range(N + 1)])

    def dot(self, other: "HarmonicSpectrum") -> float:
        """L^2 inner product <F, G> by the Parseval sum."""
        return math.fsum(self.block_dots(other))

    def to_json(self) -> dict:
        return {"dim": self.dim, "blocks": [b.tolist() for b in self.blocks]}

    @classmethod
    def from_json(cls, data: dict) -> "HarmonicSpectrum":
        return cls(tuple(data["blocks"]), data.get("dim"))


# --------------------------------------------------------------------------
# exact polynomial algebra


def _poly_from_roots(roots) -> list:
    """Coefficients (low to high) of prod (t - r), exact."""
    coeffs = [1]
    for r in roots:
        shifted = [0] + coeffs
        for k, c in enumerate(coeffs):
            shifted[k] -= r * c
        coeffs = shifted
    return coeffs


def _poly_eval(coeffs, t):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


@dataclass(frozen=True)
class CoefficientPolynomial:
    """C_{l,m}(t) = prod_{j=l}^m (t - lambda_j) = sum_k c_k t^k."""

    l: int
    m: int
    coeffs: tuple
    roots: tuple = field(repr=False, default=())

    def __call__(self, t):
        return _poly_eval(self.coeffs, t)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def elementary_symmetric(values: Sequence, j: int):
    """j-th elementary symmetric polynomial of ``values`` (sigma_0 = 1)."""
    vals = [_exact(v) for v in values]
    if int(j) != j or not 0 <= j <= len(vals):
        raise ValueError(f"j must lie in [0, {len(vals)}], got {j!r}")
    # e[k] after processing a prefix = sigma_k of that prefix
    e = [1] + [0] * len(vals)
    for v in vals:
        for k in range(len(vals), 0, -1):
            e[k] += v * e[k - 1]
    return e[int(j)]


def expand_C(l: int, m: int, eigs: EigenSystem) -> CoefficientPolynomial:
    """Expand prod_{j=l}^m (t - lambda_j) exactly."""
    if l < 1:
        raise ValueError("l must be >= 1")
    if m < l:
        raise ValueError("need m >= l")
    eigs = eigs.extended(m)
    roots = tuple(eigs[j] for j in range(l, m + 1))
    return CoefficientPolynomial(l, m, tuple(_poly_from_roots(roots)), roots)


def symmetric_coefficients(m: int, eigs: EigenSystem) -> tuple:
    """(-1)^{m-k} sigma_{m-k}(lambda_1..lambda_m), k = 0..m.

    Identical to ``expand_C(1, m, eigs).coeffs``; kept as the independent
    symmetric-function route.
    """
    eigs = eigs.extended(m)
    lam = [eigs[j] for j in range(1, m + 1)]
    return tuple((-1) ** (m - k) * elementary_symmetric(lam, m - k) for k in range(m + 1))


def expand_P_general_m(m: int, eigs: EigenSystem) -> tuple:
    """Coefficients (low to high) of prod_{n=1}^m (B - gamma_n) as a polynomial in B.

    Here B = -Laplacian - lambda_1 and gamma_n = lambda_n - lambda_1, so
    gamma_1 = 0 and the constant coefficient always vanishes.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    eigs = eigs.extended(m)
    return tuple(_poly_from_roots([eigs.gamma(n) for n in range(1, m + 1)]))


def general_m_ci(m: int, eigs: EigenSystem) -> dict:
    """Coefficients c_i of <Laplacian^i rho, rho>, i = 1..m-2, from the P expansion.

    With BF = -lambda_1 (rho - mean) and B^j expanded binomially in
    (-Laplacian), the coefficient of <(-Laplacian)^i rho, rho> is
    lambda_1^2 sum_{k>=i+2} p_k C(k-2, i) (-lambda_1)^{k-2-i}; the sign
    (-1)^i converts to <Laplacian^i rho, rho>.
    """
    p = expand_P_general_m(m, eigs)
    lam1 = eigs[1]
    out = {}
    for i in range(1, m - 1):
        s = sum(
            p[k] * math.comb(k - 2, i) * (-lam1) ** (k - 2 - i)
            for k in range(i + 2, m + 1)
        )
        out[i] = (-1) ** i * lam1**2 * s
    return out


def closed_form_ci(m: int, eigs: EigenSystem) -> dict:
    """c_i in the closed form (-1)^m sum_{l=i}^{m-2} sigma_{m-2-l}(Gamma) C(l,i) lambda_1^{l-i+2}.

    Gamma = (gamma_1, ..., gamma_m). Used to cross-check ``general_m_ci``.
    """
    eigs = eigs.extended(m)
    gam = [eigs.gamma(n) for n in range(1, m + 1)]
    lam1 = eigs[1]
    return {
        i: (-1) ** m
        * sum(
            elementary_symmetric(gam, m - 2 - l) * math.comb(l, i) * lam1 ** (l - i + 2)
            for l in range(i, m - 1)
        )
        for i in range(1, m - 1)
    }


def general_m_coeff1(m: int, eigs: EigenSystem):
    """Signed coefficient of the Ros-type deficit: sum_k p_k (-lambda_1)^k."""
    p = expand_P_general_m(m, eigs)
    lam1 = eigs[1]
    return sum(p[k] * (-lam1) ** k for k in range(2, m + 1))


def general_m_coeff2(m: int, eigs: EigenSystem):
    """Signed coefficient of the Minkowski deficit: p_1 lambda_1."""
    p = expand_P_general_m(m, eigs)
    return p[1] * eigs[1]


def closed_form_coeff1(m: int, d: int) -> int:
    """prod lambda_j - lambda_1 prod gamma_j, checked against its factorial form."""
    if m < 2 or d < 2:
        raise ValueError("need m >= 2 and d >= 2")
    eigs = EigenSystem.sphere(d, m)
    direct = math.prod(eigs[j] for j in range(1, m + 1)) - eigs[1] * math.prod(
        eigs.gamma(j) for j in range(2, m + 1)
    )
    closed = Fraction(
        (d - 1) ** 2 * (m - 1) * math.factorial(m - 1) * math.factorial(m + d - 2),
        math.factorial(d),
    )
    assert closed == direct, f"coeff1 identity broken at m={m}, d={d}"
    return direct


def closed_form_coeff2(m: int, d: int) -> int:
    """lambda_1 prod gamma_j, checked against its factorial form."""
    if m < 2 or d < 2:
        raise ValueError("need m >= 2 and d >= 2")
    eigs = EigenSystem.sphere(d, m)
    direct = eigs[1] * math.prod(eigs.gamma(j) for j in range(2, m + 1))
    closed = Fraction(
        (d - 1) * math.factorial(m - 1) * math.factorial(m + d - 1), math.factorial(d)
    )
    assert closed == direct, f"coeff2 identity broken at m={m}, d={d}"
    return direct


# --------------------------------------------------------------------------
# quadratic forms


def spectral_moment(sq_norms: Sequence[float], eigs: EigenSystem, k: int) -> Fraction:
    """<F, (-Laplacian)^k F> = sum_n lambda_n^k ||F_n||^2, exact in the given norms."""
    eigs = eigs.extended(len(sq_norms) - 1)
    return sum(
        (Fraction(float(s)) * eigs[n] ** k for n, s in enumerate(sq_norms) if s),
        Fraction(0),
    )


def _check_vanishing_below(sq_norms: np.ndarray, l: int, tol: float = VANISHING_TOL):
    total = float(np.sum(sq_norms))
    low = float(np.sum(sq_norms[:l]))
    if low > tol * total:
        raise PreconditionError(
            f"blocks below degree {l} carry squared norm {low:.3e} "
            f"(total {total:.3e})"
        )


def tail_vanishes(sq_norms: np.ndarray, m: int, tol: float = VANISHING_TOL) -> bool:
    """True if all blocks above degree m are zero relative to the total."""
    total = float(np.sum(sq_norms))
    tail = float(np.sum(sq_norms[m + 1 :]))
    return tail <= tol * total


def poincare_form(
    spectrum: HarmonicSpectrum, eigs: EigenSystem, l: int, m: int
) -> tuple[float, bool]:
    """<prod_{j=l}^m (-Laplacian - lambda_j) F, F> and the equality flag.

    Evaluated as sum_{n>m} prod_j (lambda_n - lambda_j) ||F_n||^2, every term
    of which is non-negative.
    """
    if l < 1 or m < l:
        raise ValueError("need 1 <= l <= m")
    s = spectrum.sq_norms()
    N = spectrum.band_limit
    if N < m:
        raise ValueError(f"band limit {N} below m = {m}")
    _check_vanishing_below(s, l)
    eigs = eigs.extended(N)
    terms = [
        float(math.prod(eigs[n] - eigs[j] for j in range(l, m + 1))) * s[n]
        for n in range(m + 1, N + 1)
    ]
    return math.fsum(terms), tail_vanishes(s, m)


def poincare_form_via_coeffs(
    spectrum: HarmonicSpectrum, eigs: EigenSystem, l: int, m: int
) -> float:
    """Same value as :func:`poincare_form` through sum_k c_{l,m,k} <F, (-Laplacian)^k F>."""
    s = spectrum.sq_norms()
    N = spectrum.band_limit
    if N < m:
        raise ValueError(f"band limit {N} below m = {m}")
    _check_vanishing_below(s, l)
    poly = expand_C(l, m, eigs)
    eigs = eigs.extended(N)
    value = sum(c * spectral_moment(s, eigs, k) for k, c in enumerate(poly.coeffs))
    return float(value)
