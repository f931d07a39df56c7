"""Homogeneous plane-wave metrics, their connection and curvature.

Coordinates are ordered (v, x^1..x^n, u).  Both families share

    g = 2 dv du + |dx|^2 + x^T A(u) x du^2

with the profile A(u) = e^{uF} B e^{-uF} for kind "a" and
A(u) = e^{ln(u) F} B e^{-ln(u) F} / u^2 (u > 0) for kind "b".

Curvature convention: R(X, Y) = [∇_X, ∇_Y] − ∇_[X,Y] and
R[a, b, c, d] = R^a_{bcd} with R(∂_c, ∂_d) ∂_b = R^a_{bcd} ∂_a.  In this
convention R(∂_i, ∂_u) = CURVATURE_SIGN · (∂_v ∧ A ∂_i), where the bivector
acts by (X∧Y)Z = (X, Z)Y − (Y, Z)X.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import expm, witt_gram

#: Sign relating the standard curvature operator to the bivector ∂_v ∧ A∂_i.
#: Fixed once by comparing finite differences against the closed form.
CURVATURE_SIGN = -1.0

SYM_TOL = 1e-12


class SpecError(ValueError):
    """Invalid plane-wave data or a point outside the coordinate domain."""


@dataclass(frozen=True, eq=False)
class PlaneWaveSpec:
    kind: str
    n: int
    F: np.ndarray
    B: np.ndarray
    notes: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.kind not in ("a", "b"):
            raise SpecError(f"kind must be 'a' or 'b', got {self.kind!r}")
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool) or self.n < 1:
            raise SpecError(f"n must be a positive integer, got {self.n!r}")
        F = np.array(self.F, dtype=float)
        B = np.array(self.B, dtype=float)
        for name, M in (("F", F), ("B", B)):
            if M.shape != (self.n, self.n):
                raise SpecError(f"{name} must be {self.n}x{self.n}, got shape {M.shape}")
            if not np.all(np.isfinite(M)):
                raise SpecError(f"{name} has non-finite entries")
        skew_res = float(np.linalg.norm(F + F.T))
        if skew_res >= SYM_TOL * (1.0 + np.linalg.norm(F)):
            raise SpecError(f"F is not skew-symmetric: skewness residual ‖F+Fᵀ‖={skew_res:.3e}")
        sym_res = float(np.linalg.norm(B - B.T))
        if sym_res >= SYM_TOL * (1.0 + np.linalg.norm(B)):
            raise SpecError(f"B is not symmetric: symmetry residual ‖B−Bᵀ‖={sym_res:.3e}")
        F.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "n", int(self.n))
        if self.kind == "b" and not self.notes:
            object.__setattr__(self, "notes", ("kind b is defined only for u > 0",))

    @property
    def dim(self) -> int:
        return self.n + 2

    def with_B(self, B) -> "PlaneWaveSpec":
        return PlaneWaveSpec(self.kind, self.n, self.F, B)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n, "F": self.F.tolist(), "B": self.B.tolist()}


@dataclass(frozen=True)
class SpacetimePoint:
    v: float
    x: np.ndarray
    u: float

    def __post_init__(self):
        x = np.atleast_1d(np.array(self.x, dtype=float))
        if x.ndim != 1:
            raise SpecError("x must be a vector")
        if not (math.isfinite(self.v) and math.isfinite(self.u) and np.all(np.isfinite(x))):
            raise SpecError("point has non-finite coordinates")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", float(self.v))
        object.__setattr__(self, "u", float(self.u))

    @classmethod
    def from_array(cls, coords) -> "SpacetimePoint":
        c = np.asarray(coords, dtype=float)
        return cls(c[0], c[1:-1], c[-1])

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.v], self.x, [self.u]])


def _check_point(spec: PlaneWaveSpec, pt: SpacetimePoint, margin: float = 0.0):
    if pt.x.shape != (spec.n,):
        raise SpecError(f"point has {pt.x.size} transverse coordinates, spec has n={spec.n}")
    if spec.kind == "b" and pt.u - margin <= 0:
        if margin:
            raise SpecError(f"kind b needs u > {margin:g} for this stencil, got u={pt.u:g}")
        raise SpecError(f"kind b is defined only for u > 0, got u={pt.u:g}")


def profile(spec: PlaneWaveSpec, u: float) -> np.ndarray:
    """The symmetric matrix A(u) with g_uu = x^T A(u) x."""
    if spec.kind == "a":
        E = expm(u * spec.F)
        A = E @ spec.B @ E.T
    else:
        if u <= 0:
            raise SpecError(f"kind b is defined only for u > 0, got u={u:g}")
        E = expm(math.log(u) * spec.F)
        A = E @ spec.B @ E.T / (u * u)
    return 0.5 * (A + A.T)


def metric_at(spec: PlaneWaveSpec, pt: SpacetimePoint) -> np.ndarray:
    _check_point(spec, pt)
    g = witt_gram(spec.n)
    g[-1, -1] = pt.x @ profile(spec, pt.u) @ pt.x
    return g


def _metric_coords(spec, c):
    return metric_at(spec, SpacetimePoint.from_array(c))


def _check_step(h):
    if not 1e-6 <= h <= 1e-2:
        raise ValueError(f"finite-difference step must lie in [1e-6, 1e-2], got {h:g}")


def _christoffel(spec, c, h):
    d = spec.dim
    g = _metric_coords(spec, c)
    dg = np.empty((d, d, d))  # dg[k] = ∂_k g
    for k in range(d):
        e = np.zeros(d)
        e[k] = h
        dg[k] = (_metric_coords(spec, c + e) - _metric_coords(spec, c - e)) / (2 * h)
    ginv = np.linalg.inv(g)
    # Γ_{dbc} = ½(∂_b g_dc + ∂_c g_db − ∂_d g_bc)
    low = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)
    return np.einsum("ad,dbc->abc", ginv, low)


def christoffel_fd(spec: PlaneWaveSpec, pt: SpacetimePoint, h: float = 1e-4) -> np.ndarray:
    """Γ[a, b, c] = Γ^a_{bc} by central differences of the metric."""
    _check_step(h)
    _check_point(spec, pt, margin=h)
    return _christoffel(spec, pt.as_array(), h)


def curvature_fd(spec: PlaneWaveSpec, pt: SpacetimePoint, h: float = 1e-4) -> np.ndarray:
    """R[a, b, c, d] = R^a_{bcd} from differentiated finite-difference Christoffels."""
    _check_step(h)
    _check_point(spec, pt, margin=2 * h)
    c = pt.as_array()
    d = spec.dim
    G = _christoffel(spec, c, h)
    dG = np.empty((d, d, d, d))  # dG[k] = ∂_k Γ
    for k in range(d):
        e = np.zeros(d)
        e[k] = h
        dG[k] = (_christoffel(spec, c + e, h) - _christoffel(spec, c - e, h)) / (2 * h)
    R = (np.einsum("cadb->abcd", dG) - np.einsum("dacb->abcd", dG)
         + np.einsum("ace,edb->abcd", G, G) - np.einsum("ade,ecb->abcd", G, G))
    return R


@dataclass(frozen=True)
class CurvatureMap:
    """Curvature determined by (∂_i, ∂_u) ↦ ∂_v ∧ T ∂_i and zero on other pairs."""

    u: float
    T: np.ndarray
    tensor: np.ndarray  # standard convention, see module docstring
    bivectors: np.ndarray  # bivectors[i] = matrix of ∂_v ∧ T ∂_i

    @property
    def n(self) -> int:
        return self.T.shape[0]


def bivector_images(T) -> np.ndarray:
    """Matrices of ∂_v ∧ T∂_i acting on coordinate vectors, for each i."""
    T = np.asarray(T, dtype=float)
    n = T.shape[0]
    d = n + 2
    ev = np.zeros(d)
    ev[0] = 1.0
    eu_dual = np.zeros(d)
    eu_dual[-1] = 1.0  # (∂_v, Z) = Z^u
    out = np.zeros((n, d, d))
    for i in range(n):
        t = np.zeros(d)
        t[1:-1] = T[:, i]
        # (∂_v ∧ t) Z = (∂_v, Z) t − (t, Z) ∂_v, and (t, Z) only sees the x-block
        out[i] = np.outer(t, eu_dual) - np.outer(ev, t)
    return out


def curvature_from_profile(T, u: float = 0.0) -> CurvatureMap:
    T = np.asarray(T, dtype=float)
    n = T.shape[0]
    d = n + 2
    biv = bivector_images(T)
    R = np.zeros((d, d, d, d))
    for i in range(n):
        R[:, :, 1 + i, d - 1] = CURVATURE_SIGN * biv[i]
        R[:, :, d - 1, 1 + i] = -CURVATURE_SIGN * biv[i]
    return CurvatureMap(float(u), T, R, biv)


def curvature_closed(spec: PlaneWaveSpec, u: float) -> CurvatureMap:
    return curvature_from_profile(profile(spec, u), u)


def weyl_profile(T) -> np.ndarray:
    T = np.asarray(T, dtype=float)
    n = T.shape[0]
    return T - np.trace(T) / n * np.eye(n)


def weyl_closed(spec: PlaneWaveSpec, u: float) -> CurvatureMap:
    if spec.n < 2:
        raise SpecError(f"the Weyl tensor needs total dimension ≥ 4, got {spec.dim}")
    return curvature_from_profile(weyl_profile(profile(spec, u)), u)


def bianchi_residual(R) -> float:
    """max |R^a_{bcd} + R^a_{cdb} + R^a_{dbc}|."""
    R = np.asarray(R)
    cyc = R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2)
    return float(np.max(np.abs(cyc))) if R.size else 0.0


def is_conformally_flat(spec: PlaneWaveSpec, tol: float = 1e-9) -> bool:
    # conjugation by e^{θF} preserves scalar matrices, so checking B suffices
    return float(np.linalg.norm(weyl_profile(spec.B))) <= tol * (1.0 + np.linalg.norm(spec.B))


@dataclass(frozen=True)
class PlaneWaveCheck:
    residual: float  # max over X ⊥ p
    per_direction: dict  # coordinate label -> ‖∇_X R‖
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual < self.tol


def coordinate_labels(n: int) -> list[str]:
    return ["v"] + [f"x{i}" for i in range(1, n + 1)] + ["u"]


def planewave_condition_check(spec: PlaneWaveSpec, pt: SpacetimePoint,
                              h: float = 1e-4) -> PlaneWaveCheck:
    """‖∇_X R‖ at pt for every coordinate field X.

    R is the closed-form field, differentiated numerically along u; the
    connection terms use finite-difference Christoffels.  Only ∂_v and ∂_x are
    orthogonal to p = ∂_v, so the ∂_u entry is reported but not constrained.
    """
    _check_step(h)
    _check_point(spec, pt, margin=h)
    d = spec.dim
    G = christoffel_fd(spec, pt, h)
    R = curvature_closed(spec, pt.u).tensor
    dR = np.zeros((d,) + R.shape)
    dR[-1] = (curvature_closed(spec, pt.u + h).tensor - curvature_closed(spec, pt.u - h).tensor) / (2 * h)
    nabla = (dR
             + np.einsum("akf,fbcd->kabcd", G, R)
             - np.einsum("fkb,afcd->kabcd", G, R)
             - np.einsum("fkc,abfd->kabcd", G, R)
             - np.einsum("fkd,abcf->kabcd", G, R))
    labels = coordinate_labels(spec.n)
    norms = {lab: float(np.linalg.norm(nabla[k])) for k, lab in enumerate(labels)}
    residual = max(norms[lab] for lab in labels[:-1])
    return PlaneWaveCheck(residual, norms, 1e-5 * (1.0 + float(np.linalg.norm(spec.B))))


# ---------------------------------------------------------------------------
# Conformal conversion and homotheties
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Conversion:
    spec: PlaneWaveSpec
    factor: str = "exp(u)"
    coordinate_map: str = "(v, x, u) -> (v - |x|^2/4, exp(u/2) x, exp(u))"


def convert_b_to_a(spec: PlaneWaveSpec) -> Conversion:
    """Kind-b data (F, B) to the conformally related kind-a data (F, B + I/4).

    The map a_to_b_coordinates pulls the kind-b metric back to e^u times the
    kind-a metric with profile B + I/4.
    """
    if spec.kind != "b":
        raise SpecError("convert_b_to_a expects a kind-b spec")
    return Conversion(PlaneWaveSpec("a", spec.n, spec.F, spec.B + 0.25 * np.eye(spec.n)))


def a_to_b_coordinates(pt: SpacetimePoint) -> tuple[SpacetimePoint, np.ndarray]:
    """Image of a kind-a point under the conversion map, with the Jacobian."""
    x, u = pt.x, pt.u
    n = x.size
    s = math.exp(u / 2)
    J = np.zeros((n + 2, n + 2))
    J[0, 0] = 1.0
    J[0, 1:-1] = -0.5 * x
    J[1:-1, 1:-1] = s * np.eye(n)
    J[1:-1, -1] = 0.5 * s * x
    J[-1, -1] = math.exp(u)
    return SpacetimePoint(pt.v - 0.25 * x @ x, s * x, math.exp(u)), J


def conversion_pullback(spec_b: PlaneWaveSpec, pt: SpacetimePoint) -> np.ndarray:
    """e^{-u} Φ*g_b at a kind-a point; equals the converted kind-a metric."""
    image, J = a_to_b_coordinates(pt)
    return math.exp(-pt.u) * (J.T @ metric_at(spec_b, image) @ J)


def homothety_map(lam: float, pt: SpacetimePoint) -> tuple[SpacetimePoint, np.ndarray]:
    if lam == 0:
        raise SpecError("homothety factor must be nonzero")
    n = pt.x.size
    J = np.diag([lam * lam] + [lam] * n + [1.0])
    return SpacetimePoint(lam * lam * pt.v, lam * pt.x, pt.u), J


def homothety_pullback(spec: PlaneWaveSpec, lam: float, pt: SpacetimePoint) -> np.ndarray:
    """Pullback of g under (v, x, u) ↦ (λ²v, λx, u), evaluated at pt."""
    image, J = homothety_map(lam, pt)
    return J.T @ metric_at(spec, image) @ J


# ---------------------------------------------------------------------------
# Random data for property checks
# ---------------------------------------------------------------------------

def random_spec(rng, n: int, kind: str = "a", scale: float = 2.0) -> PlaneWaveSpec:
    """Entries of F and B drawn uniformly from [−scale, scale], then (skew)symmetrized."""
    F = rng.uniform(-scale, scale, size=(n, n))
    B = rng.uniform(-scale, scale, size=(n, n))
    F = np.triu(F, 1)
    B = np.triu(B)
    return PlaneWaveSpec(kind, n, F - F.T, B + np.triu(B, 1).T)


def random_point(spec: PlaneWaveSpec, rng, u_range=(0.1, 2.0)) -> SpacetimePoint:
    lo, hi = u_range if spec.kind == "b" else (-2.0, 2.0)
    return SpacetimePoint(rng.uniform(-2, 2), rng.uniform(-1.5, 1.5, size=spec.n), rng.uniform(lo, hi))
