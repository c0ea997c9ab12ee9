"""Higher-order Poincare quadratic forms and Minkowski-type inequalities.

Support functions of convex bodies are handled through their spherical
harmonic spectrum; see :mod:`poincare_convex.convex_body` and
:mod:`poincare_convex.inequalities`.
"""
from .convex_body import SupportBody, certify_convex, curvature_integrals, mixed_volume, summary
from .gallery import BodySpec, build
from .harmonic_transform import GridFunction, QuadratureGrid, forward, inverse
from .inequalities import (
    InequalityReport,
    theorem1,
    theorem2,
    theorem3,
    theorem_general_m,
    theorem_mixed,
)
from .spectral_core import (
    EigenSystem,
    HarmonicSpectrum,
    PreconditionError,
    eigenvalue,
    expand_C,
    poincare_form,
    poincare_form_via_coeffs,
)

__version__ = "0.1.0"

__all__ = [
    "BodySpec",
    "EigenSystem",
    "GridFunction",
    "HarmonicSpectrum",
    "InequalityReport",
    "PreconditionError",
    "QuadratureGrid",
    "SupportBody",
    "build",
    "certify_convex",
    "curvature_integrals",
    "eigenvalue",
    "expand_C",
    "forward",
    "inverse",
    "mixed_volume",
    "poincare_form",
    "poincare_form_via_coeffs",
    "summary",
    "theorem1",
    "theorem2",
    "theorem3",
    "theorem_general_m",
    "theorem_mixed",
]
