"""Decision procedures for Lie group structures on Cahen–Wallach spaces.

A Cahen–Wallach space is the kind-a plane wave with F = 0, determined by the
symmetric matrix B.

* Left-invariant structure: exists iff B = −A² − C² with A symmetric,
  C skew and AC = 0.  Spectrally: every positive eigenvalue of B has even
  multiplicity.  The nonpositive part goes to −A², each positive eigenvalue μ
  is realized by rotation blocks √μ·J on pairs of eigenvectors.
* Bi-invariant structure: exists iff B has no positive eigenvalue; then
  C = √(−B) is symmetric with B = −C².
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .lie import DerivationData, normalize_frame
from .linalg import skew_part, sym_eig, sym_part
from .planewave import PlaneWaveSpec, SpecError

WITNESS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DecisionWitness:
    verdict: str  # "yes" or "no"
    A: np.ndarray | None
    C: np.ndarray | None
    certificate: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)

    @property
    def yes(self) -> bool:
        return self.verdict == "yes"


def _check_symmetric(B) -> np.ndarray:
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise SpecError(f"B must be square, got shape {B.shape}")
    res = float(np.linalg.norm(B - B.T))
    if res >= 1e-12 * (1.0 + np.linalg.norm(B)):
        raise SpecError(f"B is not symmetric: symmetry residual {res:.3e}")
    return sym_part(B)


def cluster_spectrum(w, scale: float, rtol: float = 1e-8) -> list[list[int]]:
    """Group sorted eigenvalues whose consecutive gaps are within rtol·scale."""
    groups: list[list[int]] = []
    for i, x in enumerate(w):
        if groups and x - w[groups[-1][-1]] <= rtol * scale:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def witness_residuals(B, A, C) -> dict:
    return {
        "reconstruction": float(np.linalg.norm(B + A @ A + C @ C)),
        "AC": float(np.linalg.norm(A @ C)),
        "A_symmetry": float(np.linalg.norm(A - A.T)),
        "C_skewness": float(np.linalg.norm(C + C.T)),
    }


def cw_left_invariant(B, tol: float = WITNESS_TOL, rtol: float = 1e-8) -> DecisionWitness:
    B = _check_symmetric(B)
    n = B.shape[0]
    scale = max(float(np.linalg.norm(B, 2)), 1e-300)
    w, V = sym_eig(B)
    groups = cluster_spectrum(w, scale, rtol)
    A = np.zeros((n, n))
    C = np.zeros((n, n))
    merged = []
    for g in groups:
        mu = float(np.mean(w[g]))
        if len(g) > 1 and w[g[-1]] > w[g[0]]:
            merged.append([float(x) for x in w[g]])
        if mu <= rtol * scale:
            for i in g:
                A += math.sqrt(max(-w[i], 0.0)) * np.outer(V[:, i], V[:, i])
            continue
        if len(g) % 2:
            return DecisionWitness("no", None, None, {
                "reason": "positive eigenvalue with odd multiplicity",
                "eigenvalue": mu, "multiplicity": len(g), "merged_clusters": merged})
        r = math.sqrt(mu)
        for a, b in zip(g[::2], g[1::2]):
            v1, v2 = V[:, a], V[:, b]
            C += r * (np.outer(v2, v1) - np.outer(v1, v2))
    res = witness_residuals(B, A, C)
    cert = {"merged_clusters": merged}
    if res["reconstruction"] > tol * (1.0 + scale) or res["AC"] > tol * (1.0 + scale):
        cert["warning"] = "witness residual above tolerance"
    return DecisionWitness("yes", A, C, cert, res)


def cw_bi_invariant(B, tol: float = WITNESS_TOL) -> DecisionWitness:
    B = _check_symmetric(B)
    n = B.shape[0]
    w, V = sym_eig(B)
    top = float(w[-1]) if n else 0.0
    if top > tol * max(1.0, float(np.linalg.norm(B, 2))):
        return DecisionWitness("no", None, None, {
            "reason": "positive eigenvalue", "eigenvalue": top})
    C = (V * np.sqrt(np.clip(-w, 0.0, None))) @ V.T
    C = sym_part(C)
    res = {"reconstruction": float(np.linalg.norm(B + C @ C)),
           "C_symmetry": float(np.linalg.norm(C - C.T))}
    return DecisionWitness("yes", np.zeros((n, n)), C, {}, res)


# ---------------------------------------------------------------------------
# Randomized search oracle for the left-invariant criterion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchResult:
    found: bool
    best: float  # smallest ‖B + A² + C²‖² + ‖AC‖² reached
    A: np.ndarray
    C: np.ndarray


def _unpack(theta, n, iu, il):
    A = np.zeros((n, n))
    A[iu] = theta[: len(iu[0])]
    A = A + np.triu(A, 1).T
    C = np.zeros((n, n))
    C[il] = theta[len(iu[0]):]
    return A, C - C.T


def random_search_witness(B, draws: int = 100_000, seed: int = 0, starts: int = 8,
                          found_tol: float = 1e-16) -> SearchResult:
    """Look for (A, C) with B = −A² − C², AC = 0, ignoring spectral structure.

    Draws (A, C) at the scale of B, keeps the best candidates and polishes
    them with a least-squares solve.  Found means the squared residual drops
    below found_tol.
    """
    B = _check_symmetric(B)
    n = B.shape[0]
    rng = np.random.default_rng(seed)
    r = math.sqrt(max(float(np.linalg.norm(B, 2)), 1e-12))
    iu = np.triu_indices(n)
    il = np.triu_indices(n, 1)
    na, nc = len(iu[0]), len(il[0])

    A = np.zeros((draws, n, n))
    A[:, iu[0], iu[1]] = rng.uniform(-r, r, size=(draws, na))
    A = A + np.triu(A, 1).transpose(0, 2, 1)
    C = np.zeros((draws, n, n))
    C[:, il[0], il[1]] = rng.uniform(-r, r, size=(draws, nc))
    C = C - C.transpose(0, 2, 1)
    obj = (np.sum((B + A @ A + C @ C) ** 2, axis=(1, 2))
           + np.sum((A @ C) ** 2, axis=(1, 2)))
    order = np.argsort(obj)[:starts]

    # directions dθ_k as (dA, dC) pairs; the residual is quadratic in θ
    basis = [_unpack(e, n, iu, il) for e in np.eye(na + nc)]

    def resid(theta):
        a, c = _unpack(theta, n, iu, il)
        return np.concatenate([(B + a @ a + c @ c).ravel(), (a @ c).ravel()])

    def jac(theta):
        a, c = _unpack(theta, n, iu, il)
        cols = [np.concatenate([(a @ da + da @ a + c @ dc + dc @ c).ravel(),
                                (da @ c + a @ dc).ravel()]) for da, dc in basis]
        return np.column_stack(cols)

    best, bestA, bestC = float(obj[order[0]]), A[order[0]], C[order[0]]
    for k in order:
        theta0 = np.concatenate([A[k][iu], C[k][il]])
        sol = least_squares(resid, theta0, jac=jac, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
        val = float(np.sum(sol.fun ** 2))
        if val < best:
            best = val
            bestA, bestC = _unpack(sol.x, n, iu, il)
        if best < found_tol:
            break
    return SearchResult(best < found_tol, best, bestA, bestC)


def spectrum_corpus(max_n: int = 4, values=(-1.0, 0.0, 1.0, 2.0), seed: int = 0) -> list[np.ndarray]:
    """Every eigenvalue multiset from `values` for n ≤ max_n, randomly rotated."""
    from itertools import combinations_with_replacement

    rng = np.random.default_rng(seed)
    out = []
    for n in range(1, max_n + 1):
        for ms in combinations_with_replacement(values, n):
            Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
            out.append(sym_part(Q @ np.diag(ms) @ Q.T))
    return out


# ---------------------------------------------------------------------------
# Derivation data to plane-wave data
# ---------------------------------------------------------------------------

def derivation_to_planewave(data: DerivationData) -> PlaneWaveSpec:
    """Plane-wave data (F, B) of the group brackets: λ = 0 → kind a, else kind b."""
    return normalize_frame(data).spec()


def uncorrected_profile_from_derivation(data: DerivationData) -> np.ndarray:
    """λL^s + [L^sk, L^s] − ¼ω² − (L^s)², without the ½[L^s, ω] term.

    Agrees with the normalized profile exactly when L^s commutes with ω.
    """
    S, K, w = sym_part(data.L), skew_part(data.L), data.omega
    return data.lam * S + (K @ S - S @ K) - 0.25 * w @ w - S @ S


def corrected_profile_from_derivation(data: DerivationData) -> np.ndarray:
    S, K, w = sym_part(data.L), skew_part(data.L), data.omega
    return (data.lam * S + (K @ S - S @ K) - 0.25 * w @ w - S @ S
            + 0.5 * (S @ w - w @ S))


@dataclass(frozen=True, eq=False)
class BracketCheck:
    anticommute: bool
    images_orthogonal: bool
    B: np.ndarray  # profile of the induced left-invariant metric
    literal_B: np.ndarray  # [L^sk, L^s] − (L^sk)² − (L^s)²
    residuals: dict

    @property
    def passed(self) -> bool:
        return self.anticommute


def cw_lie_group_bracket_check(L, tol: float = 1e-10) -> BracketCheck:
    """Check the flat-F group condition on L = L^s + L^sk (λ = 0, ω = 2L^sk).

    The Jacobi identity reduces to L^sk L^s + L^s L^sk = 0.  Orthogonal images
    (L^sk L^s = 0) is strictly stronger; the induced profile is always
    −(L^sk)² − (L^s)², which equals the literal formula only in that case.
    """
    L = np.atleast_2d(np.asarray(L, dtype=float))
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError(f"L must be square, got {L.shape}")
    S, K = sym_part(L), skew_part(L)
    scale = 1.0 + float(np.linalg.norm(L)) ** 2
    anti = float(np.linalg.norm(K @ S + S @ K))
    orth = float(np.linalg.norm(K @ S))
    return BracketCheck(
        anticommute=anti <= tol * scale,
        images_orthogonal=orth <= tol * scale,
        B=-(K @ K) - S @ S,
        literal_B=(K @ S - S @ K) - K @ K - S @ S,
        residuals={"anticommutator": anti, "image_overlap": orth},
    )
