import numpy as np
import pytest
from hypothesis import given, strategies as st

from pwlab.linalg import MinkowskiFrame, bivector_matrix, expm
from pwlab.lorentz import (
    AmbiguousSpectrumError,
    Kind,
    NotInAlgebraError,
    canonical_matrix,
    classify,
    random_lorentz,
    random_representative,
    random_so,
    split_co,
)

FR2 = MinkowskiFrame(2)
P, Q, E1, E2 = FR2.p(), FR2.q(), FR2.e(1), FR2.e(2)


def wedge(x, y, fr=FR2):
    return bivector_matrix(x, y, fr)


def growth_oracle(C):
    """Kind from the growth of ‖exp(tC)‖, independent of any decomposition.

    Exponential growth means a real eigenvalue pair, polynomial growth a
    nilpotent part, bounded means elliptic.
    """
    ev = np.linalg.eigvals(C)
    scale = np.linalg.norm(C, 2)
    if np.max(np.abs(ev.real)) > 1e-4 * scale:
        return Kind.HYPERBOLIC
    T = 40.0 / scale
    r = np.linalg.norm(expm(2 * T * C), 2) / np.linalg.norm(expm(T * C), 2)
    return Kind.PARABOLIC if r > 2.0 else Kind.ELLIPTIC


def null_real_eigenvectors(C, gram):
    """Null eigenvectors for real nonzero eigenvalues (the hyperbolic signature)."""
    w, V = np.linalg.eig(C)
    out = []
    for lam, v in zip(w, V.T):
        if abs(lam.imag) < 1e-9 and abs(lam.real) > 1e-4 * np.linalg.norm(C, 2):
            v = v.real / np.linalg.norm(v.real)
            out.append(abs(v @ gram @ v))
    return out


# --- split_co ------------------------------------------------------------

def test_split_co_examples():
    r = split_co(np.eye(4), FR2)
    assert r.mu == 1.0 and np.allclose(r.skew, 0)
    r = split_co(wedge(P, Q), FR2)
    assert r.mu == 0.0 and np.allclose(r.skew, wedge(P, Q))
    r = split_co(np.eye(4) - wedge(P, Q), FR2)
    assert r.mu == pytest.approx(1.0) and np.allclose(r.skew, -wedge(P, Q))


def test_split_co_rejects_non_conformal():
    with pytest.raises(NotInAlgebraError):
        split_co(np.diag([1.0, 2.0, 3.0, 4.0]), FR2)


@given(st.integers(0, 2**31), st.floats(-3, 3))
def test_split_co_recovers_scalar(seed, mu):
    rng = np.random.default_rng(seed)
    S = random_so(FR2, rng)
    r = split_co(mu * np.eye(4) + S, FR2)
    assert r.mu == pytest.approx(mu, abs=1e-12)
    assert np.allclose(r.skew, S, atol=1e-12)


# --- classify: examples --------------------------------------------------

def test_classify_examples():
    f = classify(wedge(P, Q), 2)
    assert f.kind is Kind.HYPERBOLIC and f.a == pytest.approx(1.0)
    assert np.allclose(f.c0, 0)
    f = classify(wedge(P, E1), 2)
    assert f.kind is Kind.PARABOLIC and f.a == 1.0
    f = classify(wedge(E1, E2), 2)
    assert f.kind is Kind.ELLIPTIC and f.a == 0.0
    f = classify(np.zeros((4, 4)), 2)
    assert f.kind is Kind.ELLIPTIC and f.a == 0.0 and np.allclose(f.c0, 0)


def test_classify_conjugated_hyperbolic_recovers_a():
    rng = np.random.default_rng(11)
    for _ in range(20):
        g = random_lorentz(FR2, rng)
        f = classify(g @ (2 * wedge(P, Q)) @ np.linalg.inv(g), 2)
        assert f.kind is Kind.HYPERBOLIC
        assert abs(f.a - 2.0) < 1e-8


def test_hyperbolic_sign_is_normalized():
    f = classify(-3 * wedge(P, Q), 2)
    assert f.a == pytest.approx(3.0)


def test_rejects_non_so_and_ambiguous():
    with pytest.raises(NotInAlgebraError):
        classify(np.eye(4), 2)
    C = wedge(E1, E2) + 1e-8 * wedge(P, Q)  # real part in the undecidable band
    with pytest.raises(AmbiguousSpectrumError):
        classify(C, 2)


# --- classify: invariants ------------------------------------------------

@pytest.mark.parametrize("kind", list(Kind))
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_round_trip_and_frame(kind, n):
    rng = np.random.default_rng(100 * n + list(Kind).index(kind))
    fr = MinkowskiFrame(n)
    for _ in range(15):
        C, a = random_representative(kind, n, rng)
        g = random_lorentz(fr, rng)
        M = g @ C @ np.linalg.inv(g)
        f = classify(M, n)
        assert f.kind is kind
        assert abs(f.a - a) < 1e-8
        assert f.residual < 1e-8
        assert np.allclose(f.reconstruct(), M, atol=1e-8 * np.linalg.norm(M))
        eta = f.frame_gram()
        assert np.allclose(f.frame.T @ fr.gram @ f.frame, eta, atol=1e-9)
        W = f.witt_frame
        assert np.allclose(W.T @ fr.gram @ W, fr.gram, atol=1e-9)
        assert np.allclose(f.c0, -f.c0.T)
        assert f.c0.shape == {Kind.ELLIPTIC: (n + 1, n + 1), Kind.HYPERBOLIC: (n, n),
                              Kind.PARABOLIC: (n - 1, n - 1)}[kind]


@given(st.integers(0, 2**31), st.sampled_from(list(Kind)), st.integers(1, 4))
def test_classify_is_conjugation_invariant(seed, kind, n):
    rng = np.random.default_rng(seed)
    fr = MinkowskiFrame(n)
    C, _ = random_representative(kind, n, rng)
    f0 = classify(C, n)
    g = random_lorentz(fr, rng)
    f1 = classify(g @ C @ np.linalg.inv(g), n)
    assert f1.kind is f0.kind
    assert abs(f1.a - f0.a) < 1e-8


@pytest.mark.parametrize("n", [2, 3])
def test_decision_agrees_with_growth_oracle(n):
    """Jordan–Chevalley verdicts vs growth of exp(tC) on 4- and 5-dim instances."""
    rng = np.random.default_rng(7 + n)
    fr = MinkowskiFrame(n)
    for t in range(90):
        if t % 3 == 0:
            C = random_so(fr, rng)
        else:
            kind = list(Kind)[t % 3]
            C0, _ = random_representative(kind, n, rng)
            g = random_lorentz(fr, rng, scale=0.5)
            C = g @ C0 @ np.linalg.inv(g)
        f = classify(C, n)
        assert f.kind is growth_oracle(C)
        nulls = null_real_eigenvectors(C, fr.gram)
        if f.kind is Kind.HYPERBOLIC:
            assert len(nulls) == 2 and max(nulls) < 1e-8
        else:
            assert nulls == []


def test_elliptic_single_frequency_is_bounded():
    C = wedge(E1, E2)
    rng = np.random.default_rng(3)
    g = random_lorentz(FR2, rng)
    M = g @ C @ np.linalg.inv(g)
    assert classify(M, 2).kind is Kind.ELLIPTIC
    n50 = np.linalg.norm(expm(50 * M), 2)
    n100 = np.linalg.norm(expm(100 * M), 2)
    assert n100 < 1.01 * n50 or n100 < 1.01 * max(np.linalg.norm(expm(t * M), 2) for t in np.linspace(0, 50, 200))


def test_elliptic_bounded_by_frame_condition():
    rng = np.random.default_rng(4)
    fr = MinkowskiFrame(3)
    for _ in range(10):
        C0, _ = random_representative(Kind.ELLIPTIC, 3, rng)
        g = random_lorentz(fr, rng)
        M = g @ C0 @ np.linalg.inv(g)
        f = classify(M, 3)
        bound = np.linalg.cond(f.frame)
        for t in (1.0, 10.0, 50.0, 100.0):
            assert np.linalg.norm(expm(t * M), 2) <= bound * (1 + 1e-6)


def test_canonical_matrices_are_in_so():
    for n in (1, 2, 3):
        fr = MinkowskiFrame(n)
        rng = np.random.default_rng(n)
        for kind in (Kind.HYPERBOLIC, Kind.PARABOLIC):
            C, _ = random_representative(kind, n, rng)
            assert np.allclose(fr.gram @ C + C.T @ fr.gram, 0)
        assert np.allclose(canonical_matrix(Kind.PARABOLIC, 1.0, np.zeros((n - 1, n - 1)), n),
                           bivector_matrix(fr.p(), fr.e(1), fr))
