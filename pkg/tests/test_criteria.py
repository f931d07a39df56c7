import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pwlab import criteria as cr
from pwlab.lie import ConstraintError, DerivationData, random_derivation
from pwlab.planewave import SpecError

J = np.array([[0.0, -1.0], [1.0, 0.0]])


def rotated(eigs, seed=0):
    n = len(eigs)
    Q, _ = np.linalg.qr(np.random.default_rng(seed).normal(size=(n, n)))
    return Q @ np.diag(eigs) @ Q.T


def assert_witness(w, B, tol=1e-9):
    A, C = w.A, w.C
    scale = 1 + np.linalg.norm(B)
    assert np.allclose(A, A.T) and np.allclose(C, -C.T)
    assert np.linalg.norm(B + A @ A + C @ C) < tol * scale
    assert np.linalg.norm(A @ C) < tol * scale


# --- left-invariant ------------------------------------------------------

def test_left_invariant_examples():
    w = cr.cw_left_invariant(-np.eye(2))
    assert w.yes and np.allclose(w.A, np.eye(2)) and np.allclose(w.C, 0)
    w = cr.cw_left_invariant(np.eye(2))
    assert w.yes and np.allclose(w.A, 0)
    assert np.allclose(w.C @ w.C, -np.eye(2)) and np.isclose(abs(w.C[0, 1]), 1.0)
    no = cr.cw_left_invariant(np.diag([1.0, -1.0]))
    assert not no.yes and no.A is None and no.certificate["multiplicity"] == 1
    assert not cr.cw_left_invariant([[2.0]]).yes
    assert cr.cw_left_invariant([[0.0]]).yes


def test_left_invariant_rejects_nonsymmetric():
    with pytest.raises(SpecError, match="symmetr"):
        cr.cw_left_invariant([[0.0, 1.0], [0.0, 0.0]])


@settings(max_examples=40)
@given(st.lists(st.sampled_from([-2.0, -1.0, 0.0, 1.0, 3.0]), min_size=1, max_size=5), st.integers(0, 999))
def test_left_invariant_verdict_matches_multiplicities(eigs, seed):
    B = rotated(eigs, seed)
    expect = all(eigs.count(m) % 2 == 0 for m in set(eigs) if m > 0)
    w = cr.cw_left_invariant(B)
    assert w.yes == expect
    if w.yes:
        assert_witness(w, B)


@given(st.integers(0, 999))
def test_nonpositive_matrices_always_admit_both_structures(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    M = rng.normal(size=(n, n))
    B = -(M @ M.T)
    assert cr.cw_left_invariant(B).yes and cr.cw_bi_invariant(B).yes


def test_search_oracle_on_corpus_subset():
    corpus = cr.spectrum_corpus(max_n=2)
    for B in corpus:
        res = cr.random_search_witness(B, draws=5000, seed=1)
        assert res.found == cr.cw_left_invariant(B).yes, np.linalg.eigvalsh(B)


# --- bi-invariant --------------------------------------------------------

def test_bi_invariant_examples():
    w = cr.cw_bi_invariant(-np.diag([1.0, 4.0]))
    assert w.yes and np.allclose(w.C, np.diag([1.0, 2.0]))
    z = cr.cw_bi_invariant(np.zeros((2, 2)))
    assert z.yes and np.allclose(z.C, 0)
    assert not cr.cw_bi_invariant([[1.0]]).yes


@given(st.integers(0, 999), st.integers(1, 5))
def test_bi_invariant_family(seed, n):
    rng = np.random.default_rng(seed)
    C = rng.normal(size=(n, n))
    C = C + C.T
    B = -(C @ C)
    w = cr.cw_bi_invariant(B)
    assert w.yes and np.allclose(w.C, w.C.T)
    assert np.linalg.norm(B + w.C @ w.C) < 1e-9 * (1 + np.linalg.norm(B))


# --- derivation data -----------------------------------------------------

def test_derivation_to_planewave_examples():
    s = cr.derivation_to_planewave(DerivationData(0.0, [[0.0]], [[1.0]]))
    assert s.kind == "a" and np.allclose(s.B, [[-1.0]])
    s = cr.derivation_to_planewave(DerivationData(1.0, np.zeros((2, 2)), 0.5 * np.eye(2)))
    assert s.kind == "b" and np.allclose(s.B, 0.25 * np.eye(2)) and np.allclose(s.F, 0)
    with pytest.raises(ConstraintError):
        DerivationData(1.0, J, np.zeros((2, 2)))


@given(st.integers(0, 9999), st.integers(1, 4), st.sampled_from([0.0, 1.0]))
def test_profiles_agree_when_Ls_commutes_with_omega(seed, n, lam):
    data = random_derivation(np.random.default_rng(seed), n, lam)
    S = 0.5 * (data.L + data.L.T)
    comm = np.linalg.norm(S @ data.omega - data.omega @ S)
    diff = np.linalg.norm(cr.uncorrected_profile_from_derivation(data) - cr.corrected_profile_from_derivation(data))
    assert diff == pytest.approx(0.5 * comm, abs=1e-9)
    nf = cr.derivation_to_planewave(data)
    assert np.allclose(nf.B, cr.corrected_profile_from_derivation(data), atol=1e-9)


# --- bracket condition for flat-F groups ---------------------------------

def test_bracket_check_examples():
    S = np.diag([1.0, 0.0, 0.0])
    K = np.zeros((3, 3))
    K[1:, 1:] = J
    chk = cr.cw_lie_group_bracket_check(S + K)
    assert chk.passed and chk.images_orthogonal
    assert np.allclose(chk.B, chk.literal_B)
    assert np.allclose(chk.B, np.diag([-1.0, 1.0, 1.0]))
    bad = cr.cw_lie_group_bracket_check(np.diag([1.0, 2.0]) + J)
    assert not bad.passed


def test_bracket_check_anticommuting_counterexample():
    chk = cr.cw_lie_group_bracket_check(np.diag([1.0, -1.0]) + J)
    assert chk.passed and not chk.images_orthogonal
    assert np.allclose(chk.B, 0)
    assert not np.allclose(chk.literal_B, chk.B)
    # the left-invariant metric itself agrees with −(L^sk)² − (L^s)²
    data = DerivationData(0.0, 2 * J, np.diag([1.0, -1.0]) + J)
    assert np.allclose(cr.corrected_profile_from_derivation(data), chk.B)
