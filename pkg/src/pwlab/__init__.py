"""Numerical toolkit for homogeneous plane waves.

Modules:
    linalg     Witt frames, bivectors, expm, symmetric eigensolver, Jordan–Chevalley
    lorentz    canonical forms of elements of so(1, n+1)
    planewave  metrics, curvature, Weyl profile, conversions, homotheties
    lie        isometry/conformal algebras, frame normalization, Nomizu map
    criteria   Lie group structures on Cahen–Wallach spaces
    suite      the verification suite behind `pwlab verify`
"""
from .linalg import MinkowskiFrame, bivector_matrix, expm, jordan_chevalley, sym_eig
from .lorentz import CanonicalForm, Kind, classify, split_co
from .planewave import (
    CURVATURE_SIGN,
    PlaneWaveSpec,
    SpacetimePoint,
    curvature_closed,
    curvature_fd,
    metric_at,
    weyl_closed,
)

__version__ = "0.1.0"

__all__ = [
    "CURVATURE_SIGN", "CanonicalForm", "Kind", "MinkowskiFrame", "PlaneWaveSpec",
    "SpacetimePoint", "bivector_matrix", "classify", "curvature_closed", "curvature_fd",
    "expm", "jordan_chevalley", "metric_at", "split_co", "sym_eig", "weyl_closed",
]
