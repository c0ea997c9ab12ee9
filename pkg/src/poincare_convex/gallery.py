"""Canonical test bodies with known functionals.

A :class:`BodySpec` is the JSON-serializable description consumed by the
CLI::

    {"kind": "harmonic_perturbation", "d": 3,
     "params": {"radius": 1.0, "terms": [[2, 0, 0.05]]}}

Kinds and their ``params``:

``ball``                  radius, optional center
``translated_ball``       radius, center
``harmonic_perturbation`` radius, optional center, terms = [[degree, slot, amplitude], ...]
``ellipsoid``             axes (d of them; d in {2, 3})
``minkowski_sum``         bodies = [spec, spec, ...]
``custom_spectrum``       blocks = [[c_0], [c_1...], ...]
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import harmonic_transform as ht
from .convex_body import SupportBody, certify_convex, vector_to_degree_one
from .spectral_core import HarmonicSpectrum, ball_volume, harmonic_dimension, sphere_area

KINDS = (
    "ball",
    "translated_ball",
    "harmonic_perturbation",
    "ellipsoid",
    "minkowski_sum",
    "custom_spectrum",
)

#: bodies whose truncated tail exceeds this fraction of ||h||^2 are rejected
MAX_TAIL_FRACTION = 1e-9


class SpecError(ValueError):
    """Invalid body specification."""


class NonConvexError(SpecError):
    """Body failed convexity certification while convexity was required."""


@dataclass(frozen=True)
class BodySpec:
    kind: str
    d: int
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        params = dict(self.params)
        if self.kind == "minkowski_sum":
            params["bodies"] = [
                b.to_json() if isinstance(b, BodySpec) else b for b in params["bodies"]
            ]
        return {"kind": self.kind, "d": self.d, "params": params}

    @classmethod
    def from_json(cls, data: dict, d: int | None = None) -> "BodySpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise SpecError("body spec must be an object with a 'kind' field")
        kind = data["kind"]
        if kind not in KINDS:
            raise SpecError(f"unknown body kind {kind!r}; expected one of {KINDS}")
        dim = data.get("d", d)
        if not isinstance(dim, int) or dim < 2:
            raise SpecError(f"body spec needs an integer d >= 2, got {dim!r}")
        params = dict(data.get("params", {}))
        if kind == "minkowski_sum":
            subs = params.get("bodies")
            if not isinstance(subs, list) or not subs:
                raise SpecError("minkowski_sum needs a non-empty 'bodies' list")
            params["bodies"] = [cls.from_json(s, dim) for s in subs]
        return cls(kind, dim, params)


def _positive(params, key):
    try:
        v = float(params[key])
    except (KeyError, TypeError, ValueError):
        raise SpecError(f"parameter {key!r} must be a number") from None
    if not v > 0:
        raise SpecError(f"parameter {key!r} must be positive, got {v}")
    return v


def _center(params, d):
    c = params.get("center")
    if c is None:
        return np.zeros(d)
    c = np.asarray(c, dtype=float)
    if c.shape != (d,):
        raise SpecError(f"center must have {d} components")
    return c


def _ball_blocks(R, center, d):
    return [np.array([R * math.sqrt(sphere_area(d))]), vector_to_degree_one(center, d)]


def _perturbation_spectrum(params, d) -> HarmonicSpectrum:
    R = _positive(params, "radius")
    blocks = _ball_blocks(R, _center(params, d), d)
    for term in params.get("terms", []):
        if isinstance(term, dict):
            n, slot, eps = term["degree"], term["slot"], term["amplitude"]
        else:
            n, slot, eps = term
        n, slot = int(n), int(slot)
        if n < 0 or not 0 <= slot < harmonic_dimension(n, d):
            raise SpecError(f"invalid harmonic slot (degree {n}, slot {slot}) for d={d}")
        while len(blocks) <= n:
            blocks.append(np.zeros(harmonic_dimension(len(blocks), d)))
        blocks[n] = blocks[n].copy()
        blocks[n][slot] += float(eps)
    return HarmonicSpectrum(tuple(blocks), d)


def ellipsoid_support(axes):
    """h(u) = sqrt(sum a_i^2 u_i^2) for unit vectors u along the last axis."""
    a2 = np.asarray(axes, dtype=float) ** 2
    return lambda u: np.sqrt(np.sum(a2 * np.asarray(u) ** 2, axis=-1))


def _ellipsoid(params, d, band_limit):
    if d not in (2, 3):
        raise SpecError("ellipsoids are sampled on a grid and need d in (2, 3)")
    axes = np.asarray(params.get("axes", []), dtype=float)
    if axes.shape != (d,) or np.any(axes <= 0):
        raise SpecError(f"ellipsoid needs {d} positive semi-axes")
    grid = ht.QuadratureGrid.default(d, band_limit)
    samples = ht.GridFunction.from_callable(grid, ellipsoid_support(axes))
    spectrum = ht.forward(samples, band_limit)
    # h^2 is a quadratic form, so ||h||^2 is known in closed form
    total = ball_volume(d) * float(np.sum(axes**2))
    tail = max(total - spectrum.norm2(), 0.0)
    return spectrum, tail


def spectrum_of(spec: BodySpec, band_limit: int = ht.DEFAULT_BAND_LIMIT):
    """(spectrum, truncated tail energy) of a spec."""
    d, p = spec.d, spec.params
    if spec.kind in ("ball", "translated_ball"):
        R = _positive(p, "radius")
        if spec.kind == "translated_ball" and "center" not in p:
            raise SpecError("translated_ball needs a center")
        return HarmonicSpectrum(tuple(_ball_blocks(R, _center(p, d), d)), d), 0.0
    if spec.kind == "harmonic_perturbation":
        return _perturbation_spectrum(p, d), 0.0
    if spec.kind == "ellipsoid":
        return _ellipsoid(p, d, band_limit)
    if spec.kind == "minkowski_sum":
        total, tail = None, 0.0
        for sub in p["bodies"]:
            if sub.d != d:
                raise SpecError("all summands must share the dimension")
            s, t = spectrum_of(sub, band_limit)
            total = s if total is None else total + s
            # tails are orthogonal to the kept blocks but not to each other
            tail = (math.sqrt(tail) + math.sqrt(t)) ** 2
        return total, tail
    if spec.kind == "custom_spectrum":
        try:
            return HarmonicSpectrum(tuple(p["blocks"]), d), 0.0
        except (KeyError, ValueError) as exc:
            raise SpecError(f"bad custom spectrum: {exc}") from None
    raise SpecError(f"unknown kind {spec.kind!r}")


def build(
    spec: BodySpec,
    band_limit: int = ht.DEFAULT_BAND_LIMIT,
    require_convex: bool = False,
    max_tail: float | None = None,
) -> SupportBody:
    """Construct the body; certify convexity when d is 2 or 3.

    ``max_tail`` rejects sampled bodies whose truncated tail energy exceeds
    that fraction of ||h||^2.
    """
    spectrum, tail = spectrum_of(spec, band_limit)
    body = SupportBody(spectrum, tail_energy=tail)
    if max_tail is not None and tail > max_tail * (spectrum.norm2() + tail):
        raise SpecError(
            f"truncated tail energy {tail:.3e} too large for band limit {band_limit}"
        )
    if spec.d in (2, 3):
        body = SupportBody(spectrum, certify_convex(body), tail)
    if require_convex and body.convexity_flag != "certified":
        raise NonConvexError(f"{spec.kind} body is not certified convex")
    return body


# --------------------------------------------------------------------------
# convenience constructors


def ball(R: float, d: int, center=None) -> BodySpec:
    params = {"radius": R}
    if center is not None:
        params["center"] = list(map(float, center))
        return BodySpec("translated_ball", d, params)
    return BodySpec("ball", d, params)


def perturbation(R: float, d: int, terms, center=None) -> BodySpec:
    params = {"radius": R, "terms": [list(t) for t in terms]}
    if center is not None:
        params["center"] = list(map(float, center))
    return BodySpec("harmonic_perturbation", d, params)


def ellipsoid(axes) -> BodySpec:
    return BodySpec("ellipsoid", len(axes), {"axes": list(map(float, axes))})


def minkowski_sum(*specs: BodySpec) -> BodySpec:
    return BodySpec("minkowski_sum", specs[0].d, {"bodies": list(specs)})


def random_perturbation(
    rng: np.random.Generator,
    d: int,
    max_degree: int = 6,
    amplitude: float = 0.05,
    radius: float = 1.0,
    center_scale: float = 0.3,
) -> BodySpec:
    """Random perturbed ball, all harmonic slots of degree 2..max_degree filled.

    Degree-n amplitudes are drawn from [-amplitude, amplitude] and damped by
    1/lambda_n so the result stays convex for moderate amplitudes.
    """
    terms = []
    for n in range(2, max_degree + 1):
        lam = n * (n + d - 2)
        for slot in range(harmonic_dimension(n, d)):
            terms.append([n, slot, float(rng.uniform(-amplitude, amplitude)) * (d - 1) / lam])
    center = rng.uniform(-center_scale, center_scale, size=d)
    return perturbation(radius, d, terms, center=center)


def canonical_specs() -> dict:
    """Named gallery bodies used by the acceptance suite and the CLI."""
    return {
        "ball_d2": ball(1.0, 2),
        "ball_d3": ball(2.0, 3),
        "translated_ball_d2": ball(1.5, 2, center=(0.3, -0.2)),
        "translated_ball_d3": ball(1.0, 3, center=(0.1, -0.2, 0.3)),
        "y2_d3": perturbation(1.0, 3, [(2, 0, 0.05)]),
        "y3_d3": perturbation(1.0, 3, [(3, 1, 0.05)]),
        "y2y3_d3": perturbation(1.0, 3, [(2, 0, 0.05), (3, 0, 0.05)]),
        "cos2_d2": perturbation(1.0, 2, [(2, 0, 0.1)]),
        "ellipse": ellipsoid((1.0, 0.8)),
        "ellipsoid": ellipsoid((1.0, 0.9, 0.8)),
        "sum_d3": minkowski_sum(ellipsoid((1.0, 0.9, 0.8)), ball(0.5, 3, center=(0.2, 0.0, 0.0))),
        "sum_d2": minkowski_sum(ellipsoid((1.0, 0.8)), perturbation(1.0, 2, [(3, 1, 0.04)])),
    }
