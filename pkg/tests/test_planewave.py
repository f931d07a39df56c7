import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from pwlab import planewave as pw
from pwlab.planewave import PlaneWaveSpec, SpacetimePoint, SpecError


def spec1(B=1.0, kind="a"):
    return PlaneWaveSpec(kind, 1, [[0.0]], [[B]])


def seeded_spec(seed, max_n=4, kind=None):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    spec = pw.random_spec(rng, n, kind or "ab"[seed % 2])
    return spec, rng


def weyl_from_riemann(R, g):
    """Trace-free part of R^a_{bcd} by the Ricci decomposition."""
    N = g.shape[0]
    ginv = np.linalg.inv(g)
    ric = np.einsum("abad->bd", R)
    ric_up = ginv @ ric
    scal = np.trace(ric_up)
    d = np.eye(N)
    W = R - (np.einsum("ac,bd->abcd", d, ric) - np.einsum("ad,bc->abcd", d, ric)
             + np.einsum("bd,ac->abcd", g, ric_up) - np.einsum("bc,ad->abcd", g, ric_up)) / (N - 2)
    W += scal / ((N - 1) * (N - 2)) * (np.einsum("ac,bd->abcd", d, g) - np.einsum("ad,bc->abcd", d, g))
    return W


# --- validation ----------------------------------------------------------

def test_spec_validation():
    with pytest.raises(SpecError, match="skew"):
        PlaneWaveSpec("a", 2, [[0, 1], [1, 0]], np.eye(2))
    with pytest.raises(SpecError, match="symmetr"):
        PlaneWaveSpec("b", 2, np.zeros((2, 2)), [[0, 1], [0, 0]])
    with pytest.raises(SpecError):
        PlaneWaveSpec("c", 1, [[0]], [[0]])
    with pytest.raises(SpecError):
        PlaneWaveSpec("a", 2, [[0]], [[0]])
    assert spec1(kind="b").notes


def test_kind_b_domain():
    with pytest.raises(SpecError):
        pw.metric_at(spec1(kind="b"), SpacetimePoint(0, [1], 0.0))
    with pytest.raises(SpecError, match="stencil"):
        pw.curvature_fd(spec1(kind="b"), SpacetimePoint(0, [1], 1.5e-4), h=1e-4)
    with pytest.raises(ValueError):
        pw.christoffel_fd(spec1(), SpacetimePoint(0, [1], 0), h=0.1)


# --- metric --------------------------------------------------------------

def test_metric_examples():
    g = pw.metric_at(spec1(), SpacetimePoint(0, [2], 5))
    assert g[2, 2] == 4.0 and g[0, 2] == 1.0 and g[1, 1] == 1.0
    assert g[0, 0] == 0.0 and g[0, 1] == 0.0
    assert pw.metric_at(spec1(kind="b"), SpacetimePoint(0, [1], 1))[2, 2] == 1.0
    spec, rng = seeded_spec(3)
    g0 = pw.metric_at(spec, SpacetimePoint(1.0, np.zeros(spec.n), 0.7))
    assert np.array_equal(g0, pw.witt_gram(spec.n))


def test_profile_matches_scipy_expm():
    F = 0.5 * math.pi * np.array([[0.0, -1.0], [1.0, 0.0]])
    spec = PlaneWaveSpec("a", 2, F, np.diag([1.0, 0.0]))
    E = scipy.linalg.expm(math.pi * F)
    assert np.allclose(pw.profile(spec, math.pi), E @ spec.B @ E.T, atol=1e-13)
    spec_b = PlaneWaveSpec("b", 2, F, np.diag([1.0, 0.0]))
    E = scipy.linalg.expm(math.log(2.5) * F)
    assert np.allclose(pw.profile(spec_b, 2.5), E @ spec_b.B @ E.T / 6.25, atol=1e-13)


# --- connection ----------------------------------------------------------

def test_christoffel_flat_and_hand_derived():
    flat = PlaneWaveSpec("a", 2, np.zeros((2, 2)), np.zeros((2, 2)))
    assert np.abs(pw.christoffel_fd(flat, SpacetimePoint(0, [1, 2], 0.3))).max() < 1e-8
    # g_uu = x^2: Γ^x_uu = −x, Γ^v_xu = x
    x = 0.8
    G = pw.christoffel_fd(spec1(), SpacetimePoint(0.2, [x], 1.1))
    assert G[1, 2, 2] == pytest.approx(-x, abs=1e-6)
    assert G[0, 1, 2] == pytest.approx(x, abs=1e-6)
    assert G[0, 2, 1] == pytest.approx(x, abs=1e-6)


@given(st.integers(0, 10_000), st.floats(-5, 5))
def test_christoffel_v_translation_invariance(seed, dv):
    spec, rng = seeded_spec(seed)
    pt = pw.random_point(spec, rng)
    moved = SpacetimePoint(pt.v + dv, pt.x, pt.u)
    assert np.allclose(pw.christoffel_fd(spec, pt), pw.christoffel_fd(spec, moved), atol=1e-10)


# --- curvature -----------------------------------------------------------

def test_curvature_closed_examples():
    cm = pw.curvature_closed(spec1(2.0), 0.37)
    assert np.allclose(cm.T, [[2.0]])
    fr = pw.witt_gram(1)
    dv_dx = np.outer([0, 1, 0], [1, 0, 0]) @ fr - np.outer([1, 0, 0], [0, 1, 0]) @ fr
    assert np.allclose(cm.bivectors[0], 2 * dv_dx)
    zero = pw.curvature_closed(PlaneWaveSpec("a", 2, np.zeros((2, 2)), np.zeros((2, 2))), 1.0)
    assert not zero.tensor.any()


def test_curvature_sign_convention():
    """R(∂_x, ∂_u)∂_u = −A∂_x in the standard convention."""
    spec = spec1(1.5)
    R = pw.curvature_fd(spec, SpacetimePoint(0, [0.4], 0.2))
    assert R[1, 2, 1, 2] == pytest.approx(-1.5, rel=1e-6)
    assert pw.CURVATURE_SIGN == -1.0


def test_curvature_flat_fd():
    flat = PlaneWaveSpec("b", 2, [[0, 1], [-1, 0]], np.zeros((2, 2)))
    assert np.abs(pw.curvature_fd(flat, SpacetimePoint(0, [1, -1], 1.0))).max() < 1e-7


@settings(max_examples=15)
@given(st.integers(0, 10_000))
def test_curvature_fd_matches_closed(seed):
    spec, rng = seeded_spec(seed)
    pt = pw.random_point(spec, rng)
    Rf = pw.curvature_fd(spec, pt)
    Rc = pw.curvature_closed(spec, pt.u).tensor
    assert np.linalg.norm(Rf - Rc) <= 1e-5 * max(1.0, np.linalg.norm(Rc))
    assert pw.bianchi_residual(Rf) < 1e-6
    assert pw.bianchi_residual(Rc) < 1e-14


@given(st.integers(0, 10_000))
def test_closed_curvature_symmetries(seed):
    spec, rng = seeded_spec(seed)
    pt = pw.random_point(spec, rng)
    R = pw.curvature_closed(spec, pt.u).tensor
    low = np.einsum("ae,ebcd->abcd", pw.metric_at(spec, pt), R)
    assert np.allclose(low, -low.transpose(1, 0, 2, 3))
    assert np.allclose(low, -low.transpose(0, 1, 3, 2))
    assert np.allclose(low, low.transpose(2, 3, 0, 1))


# --- Weyl ----------------------------------------------------------------

def test_weyl_examples():
    spec = PlaneWaveSpec("a", 2, np.zeros((2, 2)), np.diag([3.0, 1.0]))
    assert np.allclose(pw.weyl_closed(spec, 0.0).T, np.diag([1.0, -1.0]))
    scalar = PlaneWaveSpec("a", 3, pw.random_spec(np.random.default_rng(0), 3).F, 2 * np.eye(3))
    assert np.abs(pw.weyl_closed(scalar, 1.3).T).max() < 1e-12
    with pytest.raises(SpecError):
        pw.weyl_closed(spec1(), 0.0)


@given(st.integers(0, 10_000), st.floats(0.1, 3))
def test_weyl_profile_traceless(seed, u):
    spec, _ = seeded_spec(seed + 1, kind="a")
    if spec.n >= 2:
        assert abs(np.trace(pw.weyl_closed(spec, u).T)) < 1e-12 * (1 + np.linalg.norm(spec.B))


@settings(max_examples=8)
@given(st.integers(0, 10_000))
def test_weyl_closed_matches_ricci_decomposition_of_fd(seed):
    rng = np.random.default_rng(seed)
    spec = pw.random_spec(rng, int(rng.integers(2, 5)), "ab"[seed % 2])
    pt = pw.random_point(spec, rng)
    W = weyl_from_riemann(pw.curvature_fd(spec, pt), pw.metric_at(spec, pt))
    Wc = pw.weyl_closed(spec, pt.u).tensor
    assert np.linalg.norm(W - Wc) <= 1e-5 * max(1.0, np.linalg.norm(Wc))


def test_conformal_flatness():
    F = [[0.0, 1.0], [-1.0, 0.0]]
    assert pw.is_conformally_flat(PlaneWaveSpec("a", 2, F, 3 * np.eye(2)))
    assert not pw.is_conformally_flat(PlaneWaveSpec("a", 2, F, np.diag([1.0, 2.0])))
    assert pw.is_conformally_flat(PlaneWaveSpec("a", 2, F, np.zeros((2, 2))))


@given(st.integers(0, 10_000), st.booleans())
def test_conformal_flatness_iff_weyl_vanishes(seed, scalar):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    spec = pw.random_spec(rng, n)
    if scalar:
        spec = spec.with_B(rng.uniform(-2, 2) * np.eye(n))
    weyl_max = max(np.linalg.norm(pw.weyl_closed(spec, u).T) for u in (-1.0, 0.0, 1.0, 2.0))
    assert pw.is_conformally_flat(spec) == (weyl_max < 1e-9)


# --- plane-wave condition ------------------------------------------------

def test_planewave_condition_examples():
    flat = PlaneWaveSpec("a", 2, np.zeros((2, 2)), np.zeros((2, 2)))
    assert pw.planewave_condition_check(flat, SpacetimePoint(0, [1, 1], 0)).residual == 0.0
    chk = pw.planewave_condition_check(spec1(), SpacetimePoint(0, [0.5], 0.3))
    assert chk.passed and chk.residual < 1e-5
    control = PlaneWaveSpec("a", 2, [[0.0, 1.0], [-1.0, 0.0]], np.diag([1.0, 0.0]))
    chk = pw.planewave_condition_check(control, SpacetimePoint(0, [0.5, -0.3], 0.4))
    assert chk.passed
    assert chk.per_direction["u"] > 1e-3


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_planewave_condition_property(seed):
    spec, rng = seeded_spec(seed)
    chk = pw.planewave_condition_check(spec, pw.random_point(spec, rng))
    assert chk.residual < 1e-5 * (1 + np.linalg.norm(spec.B))


# --- conversion and homothety -------------------------------------------

def test_convert_examples():
    out = pw.convert_b_to_a(spec1(0.0, "b")).spec
    assert out.kind == "a" and np.allclose(out.B, [[0.25]])
    out = pw.convert_b_to_a(PlaneWaveSpec("b", 2, np.zeros((2, 2)), -0.25 * np.eye(2))).spec
    assert np.allclose(out.B, 0)
    with pytest.raises(SpecError):
        pw.convert_b_to_a(spec1())


def test_conversion_jacobian_matches_finite_differences():
    rng = np.random.default_rng(9)
    pt = SpacetimePoint(0.3, rng.normal(size=3), 0.8)
    _, J = pw.a_to_b_coordinates(pt)
    c = pt.as_array()
    h = 1e-6
    num = np.column_stack([
        (pw.a_to_b_coordinates(SpacetimePoint.from_array(c + h * e))[0].as_array()
         - pw.a_to_b_coordinates(SpacetimePoint.from_array(c - h * e))[0].as_array()) / (2 * h)
        for e in np.eye(5)])
    assert np.allclose(num, J, atol=1e-8)


@given(st.integers(0, 10_000))
def test_conversion_pullback(seed):
    rng = np.random.default_rng(seed)
    spec = pw.random_spec(rng, 3, "b")
    target = pw.convert_b_to_a(spec).spec
    pt = SpacetimePoint(rng.uniform(-2, 2), rng.uniform(-1.5, 1.5, 3), rng.uniform(0.1, 5))
    g = pw.metric_at(target, pt)
    assert np.linalg.norm(pw.conversion_pullback(spec, pt) - g) <= 1e-8 * np.linalg.norm(g)


def test_homothety_examples():
    spec = spec1()
    pt = SpacetimePoint(0, [1], 0)
    assert np.array_equal(pw.homothety_pullback(spec, 1.0, pt), pw.metric_at(spec, pt))
    flat = PlaneWaveSpec("a", 2, np.zeros((2, 2)), np.zeros((2, 2)))
    assert np.array_equal(pw.homothety_pullback(flat, 2.0, SpacetimePoint(1, [1, 2], 3)), 4 * pw.witt_gram(2))
    assert np.allclose(pw.homothety_pullback(spec, 2.0, pt), 4 * pw.metric_at(spec, pt))
    with pytest.raises(SpecError):
        pw.homothety_pullback(spec, 0.0, pt)


@given(st.integers(0, 10_000), st.sampled_from([0.5, 2.0, 3.0, -1.5]))
def test_homothety_property(seed, lam):
    spec, rng = seeded_spec(seed)
    pt = pw.random_point(spec, rng)
    g = pw.metric_at(spec, pt)
    assert np.abs(pw.homothety_pullback(spec, lam, pt) - lam ** 2 * g).max() <= 1e-12 * max(1, np.abs(g).max())


@settings(max_examples=6)
@given(st.integers(0, 10_000))
def test_transverse_covariant_derivative_fully_numerical(seed):
    """∇_{x_i} R from finite-difference R and Γ, independent of the closed form."""
    rng = np.random.default_rng(seed)
    spec = pw.random_spec(rng, int(rng.integers(1, 4)), "ab"[seed % 2])
    pt = pw.random_point(spec, rng)
    G = pw.christoffel_fd(spec, pt)
    R = pw.curvature_fd(spec, pt)
    h = 1e-2
    for i in range(spec.n):
        dx = np.zeros(spec.n)
        dx[i] = h
        dR = (pw.curvature_fd(spec, SpacetimePoint(pt.v, pt.x + dx, pt.u))
              - pw.curvature_fd(spec, SpacetimePoint(pt.v, pt.x - dx, pt.u))) / (2 * h)
        k = 1 + i
        nabla = (dR + np.einsum("af,fbcd->abcd", G[:, k, :], R)
                 - np.einsum("fb,afcd->abcd", G[:, k, :], R)
                 - np.einsum("fc,abfd->abcd", G[:, k, :], R)
                 - np.einsum("fd,abcf->abcd", G[:, k, :], R))
        assert np.abs(nabla).max() < 1e-4 * (1 + np.abs(R).max())
