"""Sharp Poincare-type, Minkowski-type and Aleksandrov-Fenchel-type inequalities.

Every checker returns an :class:`InequalityReport` oriented as
``lhs <= rhs`` so that ``deficit = rhs - lhs`` is non-negative when the
inequality holds. Equality is decided on the spectral tail mass (the
fraction of ||F||^2 outside the extremal eigenspaces), not on the deficit,
because a near-zero deficit may be cancellation noise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import convex_body as cb
from .spectral_core import (
    EigenSystem,
    HarmonicSpectrum,
    PreconditionError,
    VANISHING_TOL,
    eigenvalue,
    expand_P_general_m,
    general_m_ci,
    general_m_coeff1,
    general_m_coeff2,
    sphere_area,
    spectral_moment,
)

DEFAULT_TOL = 1e-9
#: tail-mass fraction below which a report counts as an equality case
EQUALITY_TOL = 1e-8


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    deficit: float
    holds: bool
    equality: bool
    tolerance: float
    terms: dict = field(default_factory=dict)
    convexity_flag: str = cb.UNCERTIFIED
    related: tuple = ()

    @property
    def scale(self) -> float:
        return max(abs(self.lhs), abs(self.rhs), 1.0)

    def as_dict(self) -> dict:
        out = {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "deficit": self.deficit,
            "holds": self.holds,
            "equality": self.equality,
            "tolerance": self.tolerance,
            "convexity_flag": self.convexity_flag,
            "terms": dict(self.terms),
        }
        if self.related:
            out["related"] = [r.as_dict() for r in self.related]
        return out

    def flatten(self) -> list:
        """This report followed by its related sub-reports."""
        out = [self]
        for r in self.related:
            out.extend(r.flatten())
        return out


def make_report(
    name, lhs, rhs, *, equality, tol=DEFAULT_TOL, terms=None, flag=cb.UNCERTIFIED, related=()
) -> InequalityReport:
    lhs, rhs = float(lhs), float(rhs)
    deficit = rhs - lhs
    holds = deficit >= -tol * max(abs(lhs), abs(rhs), 1.0)
    return InequalityReport(
        name, lhs, rhs, deficit, bool(holds), bool(equality), tol,
        {k: float(v) for k, v in (terms or {}).items()}, flag, tuple(related),
    )


def tail_fraction(sq_norms, support) -> float:
    """Fraction of sum(sq_norms) outside the degrees in ``support`` (0 if empty)."""
    s = np.asarray(sq_norms, dtype=float)
    total = float(s.sum())
    if total == 0.0:
        return 0.0
    inside = sum(float(s[n]) for n in support if n < s.size)
    return max(total - inside, 0.0) / total


def _is_equality(sq_norms, support) -> bool:
    return tail_fraction(sq_norms, support) <= EQUALITY_TOL


# --------------------------------------------------------------------------
# spectral forms on S^{d-1}


def _prepare(F: HarmonicSpectrum, d: int, vanish: int):
    if F.dim is not None and F.dim != d:
        raise ValueError(f"spectrum lives on d={F.dim}, checker called with d={d}")
    s = F.sq_norms()
    total = float(s.sum())
    low = float(s[:vanish].sum())
    if low > VANISHING_TOL * total:
        raise PreconditionError(
            f"harmonics of degree < {vanish} must vanish (found {low:.3e} of {total:.3e})"
        )
    return s, EigenSystem.sphere(d, max(F.band_limit, 4))


def _moments(s, eigs, kmax):
    return [spectral_moment(s, eigs, k) for k in range(kmax + 1)]


def _product_form(s, eigs, roots) -> float:
    return math.fsum(
        float(math.prod(eigs[n] - eigs[j] for j in roots)) * s[n] for n in range(len(s))
    )


def check_poincare(F: HarmonicSpectrum, d: int, tol=DEFAULT_TOL) -> InequalityReport:
    """(d-1)||F||^2 <= <F, -Laplacian F> for mean-zero F."""
    s, eigs = _prepare(F, d, 1)
    mu = _moments(s, eigs, 1)
    return make_report(
        "poincare", (d - 1) * mu[0], mu[1], equality=_is_equality(s, {1}), tol=tol,
        terms={"norm2": mu[0], "dirichlet": mu[1]},
    )


def check_m2(F: HarmonicSpectrum, d: int, tol=DEFAULT_TOL) -> InequalityReport:
    """0 <= 2d(d-1)||F||^2 - (3d-1)<F, -Laplacian F> + <F, Laplacian^2 F>."""
    s, eigs = _prepare(F, d, 1)
    mu = _moments(s, eigs, 2)
    value = 2 * d * (d - 1) * mu[0] - (3 * d - 1) * mu[1] + mu[2]
    return make_report(
        "m2", 0.0, value, equality=_is_equality(s, {1, 2}), tol=tol,
        terms={"product_form": _product_form(s, eigs, (1, 2))},
    )


def check_gap(F: HarmonicSpectrum, d: int, tol=DEFAULT_TOL) -> InequalityReport:
    """(d+1)||F||^2 <= -<F, Laplacian F + (d-1) F> when degrees 0 and 1 vanish."""
    s, eigs = _prepare(F, d, 2)
    mu = _moments(s, eigs, 1)
    return make_report(
        "gap", (d + 1) * mu[0], mu[1] - (d - 1) * mu[0], equality=_is_equality(s, {2}),
        tol=tol, terms={"norm2": mu[0]},
    )


def check_eg4(F: HarmonicSpectrum, d: int, tol=DEFAULT_TOL) -> InequalityReport:
    """0 <= ||Laplacian F + (d-1) F||^2 - (d+1) <F, (-Laplacian - (d-1)) F>."""
    s, eigs = _prepare(F, d, 1)
    mu = _moments(s, eigs, 2)
    # ||(Laplacian + d - 1) F||^2 = sum (d-1-lambda)^2 s
    sq = mu[2] - 2 * (d - 1) * mu[1] + (d - 1) ** 2 * mu[0]
    bf = mu[1] - (d - 1) * mu[0]
    return make_report(
        "eg4", 0.0, sq - (d + 1) * bf, equality=_is_equality(s, {1, 2}), tol=tol,
        terms={"product_form": _product_form(s, eigs, (1, 2))},
    )


def check_eg5(F: HarmonicSpectrum, d: int, tol=DEFAULT_TOL) -> InequalityReport:
    """0 <= ||B F||^2 - (3d+5) <F, B F> + 2(d+1)(d+2) ||F||^2, B = -Laplacian-(d-1)."""
    s, eigs = _prepare(F, d, 2)
    mu = _moments(s, eigs, 2)
    sq = mu[2] - 2 * (d - 1) * mu[1] + (d - 1) ** 2 * mu[0]
    bf = mu[1] - (d - 1) * mu[0]
    value = sq - (3 * d + 5) * bf + 2 * (d + 1) * (d + 2) * mu[0]
    return make_report(
        "eg5", 0.0, value, equality=_is_equality(s, {2, 3}), tol=tol,
        terms={"product_form": _product_form(s, eigs, (2, 3))},
    )


# --------------------------------------------------------------------------
# single-body theorems


@dataclass(frozen=True)
class _BodyTerms:
    d: int
    area: float  # |S^{d-1}|
    int2: float
    int3: float
    ros: float
    delta2_sq: float
    mink_def: float  # (int H_{d-2})^2/|S| - int H_{d-3}
    ros_def: float  # ros_term - (int H_{d-2})^2/|S|
    centered: np.ndarray  # sq norms of h - mean
    beyond1: np.ndarray  # sq norms of h - h_{B(K)}


def _body_terms(body: cb.SupportBody) -> _BodyTerms:
    d = body.dim
    ci = cb.curvature_integrals(body)
    area = sphere_area(d)
    s = body.spectrum.sq_norms().copy()
    s[0] = 0.0
    s1 = s.copy()
    s1[1:2] = 0.0
    # both deficits summed degree by degree: subtracting the raw integrals
    # cancels catastrophically for near-balls
    lam = np.array([float(eigenvalue(n, d)) for n in range(s.size)])
    mink_def = math.fsum((lam - (d - 1)) / (d - 1) * s1)
    ros_def = math.fsum((1.0 - lam / (d - 1)) ** 2 * s1)
    return _BodyTerms(
        d, area, ci.intH_dm2, ci.intH_dm3, ci.ros_term,
        cb.delta2_to_steiner_ball_sq(body), mink_def, ros_def, s, s1,
    )


def _base_terms(t: _BodyTerms) -> dict:
    return {
        "intH_dm2": t.int2,
        "intH_dm3": t.int3,
        "ros_term": t.ros,
        "delta2_sq": t.delta2_sq,
        "minkowski_deficit": t.mink_def,
        "ros_deficit": t.ros_def,
        "minkowski_deficit_raw": t.int2**2 / t.area - t.int3,
        "ros_deficit_raw": t.ros - t.int2**2 / t.area,
    }


def theorem1(body: cb.SupportBody, tol=DEFAULT_TOL) -> InequalityReport:
    """int H_{d-3} + (d+1)/(d-1) delta_2(K, B(K))^2 <= (int H_{d-2})^2 / |S^{d-1}|.

    Carries the classical Minkowski inequality (without the delta_2 term)
    as a related report.
    """
    t = _body_terms(body)
    d = t.d
    rhs = t.int2**2 / t.area
    classical = make_report(
        "minkowski_classical", t.int3, rhs, equality=_is_equality(t.centered, {1}),
        tol=tol, terms=_base_terms(t), flag=body.convexity_flag,
    )
    return make_report(
        "theorem1", t.int3 + (d + 1) / (d - 1) * t.delta2_sq, rhs,
        equality=_is_equality(t.beyond1, {2}), tol=tol, terms=_base_terms(t),
        flag=body.convexity_flag, related=(classical,),
    )


def theorem2(body: cb.SupportBody, tol=DEFAULT_TOL) -> InequalityReport:
    """(int H_{d-2})^2/|S| - int H_{d-3} <= (d-1)/(d+1) [ros_term - (int H_{d-2})^2/|S|]."""
    t = _body_terms(body)
    d = t.d
    return make_report(
        "theorem2", t.mink_def, (d - 1) / (d + 1) * t.ros_def,
        equality=_is_equality(t.beyond1, {2}), tol=tol, terms=_base_terms(t),
        flag=body.convexity_flag,
    )


def theorem3(body: cb.SupportBody, tol=DEFAULT_TOL) -> InequalityReport:
    """Reverse Minkowski stability inequality.

    rhs = (d-1)/(d+1) [ros deficit] - [Minkowski deficit]
    lhs = 2(d+2)/(d+1) [Minkowski deficit - (d+1)/(d-1) delta_2^2]
    """
    t = _body_terms(body)
    d = t.d
    rhs = (d - 1) / (d + 1) * t.ros_def - t.mink_def
    lhs = 2 * (d + 2) / (d + 1) * (t.mink_def - (d + 1) / (d - 1) * t.delta2_sq)
    return make_report(
        "theorem3", lhs, rhs, equality=_is_equality(t.beyond1, {2, 3}), tol=tol,
        terms=_base_terms(t), flag=body.convexity_flag,
    )


def general_m_paths(body: cb.SupportBody, m: int) -> dict:
    """Both evaluations of <P F, F>, P = prod_{n=1}^m (-Laplacian - lambda_n), F = h - mean.

    ``direct`` sums prod_j (lambda_n - lambda_j) ||F_n||^2. ``expanded``
    goes through c_i <Laplacian^i rho, rho> plus the two deficit terms,
    with rho = h + Laplacian h / (d-1).
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    t = _body_terms(body)
    d = t.d
    eigs = EigenSystem.sphere(d, max(body.band_limit, m))
    direct = _product_form(t.centered, eigs, range(1, m + 1))

    ci = general_m_ci(m, eigs)
    c1 = general_m_coeff1(m, eigs)
    c2 = general_m_coeff2(m, eigs)
    rho = cb.rho_spectrum(body.spectrum).sq_norms()
    lam = np.array([float(eigs[n]) for n in range(rho.size)])
    pieces = []
    for i, c in ci.items():
        # <Laplacian^i rho, rho> = sum (-lambda_n)^i ||rho_n||^2
        pieces.append(float(c) * math.fsum((-lam) ** i * rho))
    pieces.append(float(c1) * t.ros_def)
    pieces.append(float(c2) * t.mink_def)
    expanded = math.fsum(pieces)
    magnitude = max(abs(direct), abs(expanded), math.fsum(abs(p) for p in pieces))
    return {
        "direct": direct,
        "expanded": expanded,
        "magnitude": magnitude,
        "ci": {i: float(c) for i, c in ci.items()},
        "coeff1": float(c1),
        "coeff2": float(c2),
        "P": tuple(int(p) if isinstance(p, int) else float(p) for p in expand_P_general_m(m, eigs)),
        "ros_deficit": t.ros_def,
        "minkowski_deficit": t.mink_def,
    }


def theorem_general_m(body: cb.SupportBody, m: int, tol=DEFAULT_TOL) -> InequalityReport:
    """0 <= <P F, F>, evaluated through the rho-expansion and cross-checked directly."""
    paths = general_m_paths(body, m)
    t = _body_terms(body)
    denom = max(paths["magnitude"], 1e-300)
    terms = {
        "path_direct": paths["direct"],
        "path_expanded": paths["expanded"],
        "path_rel_diff": abs(paths["direct"] - paths["expanded"]) / denom,
        "coeff1": paths["coeff1"],
        "coeff2": paths["coeff2"],
        "ros_deficit": paths["ros_deficit"],
        "minkowski_deficit": paths["minkowski_deficit"],
        "m": m,
    }
    terms.update({f"c_{i}": c for i, c in paths["ci"].items()})
    return make_report(
        f"theorem_general_m{m}", 0.0, paths["expanded"],
        equality=_is_equality(t.beyond1, set(range(2, m + 1))), tol=tol, terms=terms,
        flag=body.convexity_flag,
    )


# --------------------------------------------------------------------------
# two bodies


def _recentered(body: cb.SupportBody) -> cb.SupportBody:
    blocks = list(body.spectrum.padded(1).blocks)
    blocks[1] = np.zeros_like(blocks[1])
    return cb.SupportBody(HarmonicSpectrum(tuple(blocks), body.dim), body.certificate)


def _combined_flag(K, L) -> str:
    flags = {K.convexity_flag, L.convexity_flag}
    if cb.FAILED in flags:
        return cb.FAILED
    if cb.UNCERTIFIED in flags:
        return cb.UNCERTIFIED
    return cb.CERTIFIED


def theorem_mixed(K: cb.SupportBody, L: cb.SupportBody, tol=DEFAULT_TOL) -> InequalityReport:
    """Reverse Aleksandrov-Fenchel inequality for V(K, L) = V(K, L, B, ..., B).

    Both bodies are moved to have Steiner point 0. With r = w(K)/w(L):

    V^2 - W(K) W(L) <= (r W(L) - V)^2 + W(L) [ (d-1)/((3d+5)d) int (rho_K - r rho_L)^2
                       + 2(d+1)(d+2)/(d(3d+5)(d-1)) delta_2(K, r L)^2 ]

    where W = W_{d-2}. The Aleksandrov-Fenchel lower bound is attached as a
    related report.
    """
    if K.dim != L.dim:
        raise ValueError(f"dimension mismatch: {K.dim} vs {L.dim}")
    d = K.dim
    wL = cb.mean_width(L)
    if not wL > 0:
        raise ValueError("mean width of L must be positive")
    Kc, Lc = _recentered(K), _recentered(L)
    r = cb.mean_width(K) / wL
    V = cb.mixed_volume(K, L)
    WK = cb.curvature_integrals(K).intH_dm3 / d
    WL = cb.curvature_integrals(L).intH_dm3 / d
    rho_diff = cb.rho_spectrum(Kc.spectrum - Lc.spectrum * r).norm2()
    # delta_2(K~, L) for K~ = K / r; the r^2 factor restores the scale of K
    d2_rescaled = (Kc.spectrum * (1.0 / r) - Lc.spectrum).norm2()
    d2_scaled = r * r * d2_rescaled
    lhs = V * V - WK * WL
    rhs = (r * WL - V) ** 2 + WL * (
        (d - 1) / ((3 * d + 5) * d) * rho_diff
        + 2 * (d + 1) * (d + 2) / (d * (3 * d + 5) * (d - 1)) * d2_scaled
    )
    F = (Kc.spectrum * (1.0 / r) - Lc.spectrum).sq_norms()
    flag = _combined_flag(K, L)
    terms = {
        "V": V,
        "W_dm2_K": WK,
        "W_dm2_L": WL,
        "width_ratio": r,
        "rho_diff_sq": rho_diff,
        "delta2_sq_rescaled": d2_rescaled,
        "delta2_sq_scaled": d2_scaled,
    }
    af = make_report(
        "aleksandrov_fenchel", 0.0, lhs, equality=_is_equality(F, ()), tol=tol,
        terms=terms, flag=flag,
    )
    return make_report(
        "theorem_mixed", lhs, rhs, equality=_is_equality(F, {2, 3}), tol=tol,
        terms=terms, flag=flag, related=(af,),
    )


# --------------------------------------------------------------------------
# dispatch used by the CLI


SINGLE_BODY = {
    "poincare": lambda b, tol: check_poincare(b.spectrum.scale_blocks(lambda n: float(n > 0)), b.dim, tol),
    "m2": lambda b, tol: check_m2(b.spectrum.scale_blocks(lambda n: float(n > 0)), b.dim, tol),
    "gap": lambda b, tol: check_gap(b.spectrum.scale_blocks(lambda n: float(n > 1)), b.dim, tol),
    "eg4": lambda b, tol: check_eg4(b.spectrum.scale_blocks(lambda n: float(n > 0)), b.dim, tol),
    "eg5": lambda b, tol: check_eg5(b.spectrum.scale_blocks(lambda n: float(n > 1)), b.dim, tol),
    "theorem1": theorem1,
    "theorem2": theorem2,
    "theorem3": theorem3,
}
