"""Canonical forms of elements of so(1, n+1) and co(1, n+1).

Every C in so(V) is conjugate under O(V) to exactly one of

* elliptic:    C0 in so(n+1) for an orthonormal basis e_-, e_1..e_{n+1};
* hyperbolic:  a p∧q + C0,  a > 0,  C0 in so(E);
* parabolic:   p∧e_1 + C0,  C0 in so(span(e_2..e_n)).

The parabolic coefficient is normalized to 1: the boost p ↦ tp, q ↦ q/t
rescales it, so it is not an invariant.  The decision uses the
Jordan–Chevalley split: a nonzero nilpotent part means parabolic, otherwise a
real eigenvalue pair ±a means hyperbolic, otherwise elliptic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .linalg import (
    MinkowskiFrame,
    bivector_matrix,
    jordan_chevalley,
    null_space,
    so_residual,
    sym_eig,
    sym_sqrt_inv,
)


class Kind(str, Enum):
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"


class AmbiguousSpectrumError(ValueError):
    """The spectrum sits in the band where the kind cannot be decided."""


class NotInAlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class ScalarPlusSkew:
    mu: float
    skew: np.ndarray
    residual: float


def split_co(M, frame: MinkowskiFrame, tol: float = 1e-10) -> ScalarPlusSkew:
    """Write M ∈ co(V) as mu·id + skew with skew ∈ so(V)."""
    M = np.asarray(M, dtype=float)
    if M.shape != (frame.dim, frame.dim):
        raise ValueError(f"expected a {frame.dim}x{frame.dim} matrix, got {M.shape}")
    mu = float(np.trace(M)) / frame.dim
    skew = M - mu * np.eye(frame.dim)
    res = so_residual(skew, frame.gram)
    if res > tol * (1.0 + np.linalg.norm(M)):
        raise NotInAlgebraError(f"matrix is not in co(V): skew-part residual {res:.3e}")
    return ScalarPlusSkew(mu, skew, res)


@dataclass(frozen=True)
class CanonicalForm:
    kind: Kind
    a: float
    c0: np.ndarray
    frame: np.ndarray  # orthonormal (e_-, e_1..e_{n+1}) when elliptic, Witt otherwise
    witt_frame: np.ndarray
    n: int
    residual: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    def canonical_matrix(self) -> np.ndarray:
        """The canonical representative in the coordinates of `frame`."""
        return canonical_matrix(self.kind, self.a, self.c0, self.n)

    def reconstruct(self) -> np.ndarray:
        F = self.frame
        return F @ self.canonical_matrix() @ np.linalg.inv(F)

    def frame_gram(self) -> np.ndarray:
        if self.kind is Kind.ELLIPTIC:
            return np.diag([-1.0] + [1.0] * (self.n + 1))
        return MinkowskiFrame(self.n).gram


def canonical_matrix(kind: Kind, a: float, c0, n: int) -> np.ndarray:
    fr = MinkowskiFrame(n)
    c0 = np.asarray(c0, dtype=float)
    d = n + 2
    if kind is Kind.ELLIPTIC:
        out = np.zeros((d, d))
        out[1:, 1:] = c0
        return out
    if kind is Kind.HYPERBOLIC:
        out = a * bivector_matrix(fr.p(), fr.q(), fr)
        out[1:-1, 1:-1] += c0
        return out
    out = a * bivector_matrix(fr.p(), fr.e(1), fr)
    out[2:-1, 2:-1] += c0
    return out


def _g_orthonormal_complement(vectors, gram) -> np.ndarray:
    """Orthonormal basis (w.r.t. gram) of the gram-complement of `vectors`.

    The complement must be positive definite.
    """
    Vs = np.column_stack(vectors)
    W = null_space(Vs.T @ gram, rtol=1e-12)
    if W.shape[1] == 0:
        return W
    return W @ sym_sqrt_inv(W.T @ gram @ W)


def _elliptic_frame(S, fr: MinkowskiFrame, scale: float):
    G = fr.gram
    K = null_space(S, rtol=1e-7, atol=1e-7 * scale)
    w, Q = sym_eig(K.T @ G @ K)
    if w[0] >= 0:
        raise AmbiguousSpectrumError("no timelike vector in the kernel of an elliptic element")
    t = K @ Q[:, 0]
    t = t / math.sqrt(-(t @ G @ t))
    E = _g_orthonormal_complement([t], G)
    ortho = np.column_stack([t, E])
    en1 = E[:, -1]
    p = (t + en1) / math.sqrt(2.0)
    q = (-t + en1) / math.sqrt(2.0)
    witt = np.column_stack([p, E[:, :-1], q])
    return ortho, witt


def _hyperbolic_frame(S, a: float, fr: MinkowskiFrame):
    G = fr.gram
    d = fr.dim
    qv = null_space(S - a * np.eye(d), rtol=1e-9)
    pv = null_space(S + a * np.eye(d), rtol=1e-9)
    if qv.shape[1] != 1 or pv.shape[1] != 1:
        raise AmbiguousSpectrumError("real eigenvalue pair is not simple")
    q = qv[:, 0]
    p = pv[:, 0]
    p = p / (p @ G @ q)
    E = _g_orthonormal_complement([p, q], G)
    return np.column_stack([p, E, q])


def _parabolic_frame(S, N, fr: MinkowskiFrame, scale: float):
    G = fr.gram
    # N = p∧e_1 gives N² = −p pᵀ G
    P = -(N @ N) @ G
    j = int(np.argmax(np.diag(P)))
    if P[j, j] <= 0:
        raise AmbiguousSpectrumError("nilpotent part has no rank-one square")
    p = P[:, j] / math.sqrt(P[j, j])
    K = null_space(S, rtol=1e-7, atol=1e-7 * scale)
    coeff = p @ G @ K
    z = K @ coeff / (coeff @ coeff)  # least-norm z ∈ ker S with (p, z) = 1
    e1 = N @ z
    q = z - 0.5 * (z @ G @ z) * p
    rest = _g_orthonormal_complement([p, e1, q], G)
    return np.column_stack([p, e1, rest, q])


def classify(C, n: int, tol: float = 1e-9) -> CanonicalForm:
    """Canonical form of C ∈ so(1, n+1) with the conjugating frame."""
    fr = MinkowskiFrame(n)
    C = np.asarray(C, dtype=float)
    if C.shape != (fr.dim, fr.dim):
        raise ValueError(f"expected a {fr.dim}x{fr.dim} matrix, got {C.shape}")
    scale = float(np.linalg.norm(C, 2))
    res = so_residual(C, fr.gram)
    if res > 1e-10 * max(1.0, scale):
        raise NotInAlgebraError(f"matrix is not in so(V): residual {res:.3e}")
    if scale == 0.0:
        ortho, witt = _elliptic_frame(C, fr, 0.0)
        return CanonicalForm(Kind.ELLIPTIC, 0.0, np.zeros((n + 1, n + 1)), ortho, witt, n,
                             0.0, {"nil_rel": 0.0, "real_rel": 0.0})

    jc = jordan_chevalley(C, tol=tol)
    S, N = jc.s, jc.nil
    nil_rel = float(np.linalg.norm(N, 2)) / scale
    # raw eigenvalues: cluster means would hide a small real pair merged at 0
    real_rel = float(np.max(np.abs(np.linalg.eigvals(C).real))) / scale
    if 1e-6 < nil_rel < math.sqrt(tol):
        raise AmbiguousSpectrumError(f"nilpotent part ‖N‖/‖C‖={nil_rel:.3e} is in the gray band")
    nilpotent = nil_rel >= math.sqrt(tol)
    if not nilpotent and tol < real_rel < 1e3 * tol:
        raise AmbiguousSpectrumError(f"real spectrum max|Re λ|/‖C‖={real_rel:.3e} is in the gray band")
    real_pair = (not nilpotent) and real_rel >= 1e3 * tol
    imaginary = (not nilpotent) and real_rel <= tol
    flags = (imaginary, real_pair, nilpotent)
    if sum(flags) != 1:
        raise AmbiguousSpectrumError(f"kind conditions not mutually exclusive: {flags}")
    diag = {"nil_rel": nil_rel, "real_rel": real_rel,
            "multiplicities": list(jc.multiplicities)}

    if nilpotent:
        witt = _parabolic_frame(S, N, fr, scale)
        inv = fr.gram @ witt.T @ fr.gram
        c0 = (inv @ C @ witt)[2:-1, 2:-1]
        c0 = 0.5 * (c0 - c0.T)
        form = CanonicalForm(Kind.PARABOLIC, 1.0, c0, witt, witt, n, diagnostics=diag)
    elif real_pair:
        reals = [complex(m).real for m in jc.eigenvalues if abs(complex(m).real) > 1e3 * tol * scale]
        a = float(np.mean(np.abs(reals)))
        witt = _hyperbolic_frame(S, a, fr)
        inv = fr.gram @ witt.T @ fr.gram
        c0 = (inv @ C @ witt)[1:-1, 1:-1]
        c0 = 0.5 * (c0 - c0.T)
        form = CanonicalForm(Kind.HYPERBOLIC, a, c0, witt, witt, n, diagnostics=diag)
    else:
        ortho, witt = _elliptic_frame(S, fr, scale)
        eta = np.diag([-1.0] + [1.0] * (n + 1))
        inv = eta @ ortho.T @ fr.gram
        c0 = (inv @ C @ ortho)[1:, 1:]
        c0 = 0.5 * (c0 - c0.T)
        form = CanonicalForm(Kind.ELLIPTIC, 0.0, c0, ortho, witt, n, diagnostics=diag)

    err = float(np.linalg.norm(form.reconstruct() - C)) / scale
    return CanonicalForm(form.kind, form.a, form.c0, form.frame, form.witt_frame, n, err, diag)


# ---------------------------------------------------------------------------
# Random elements, used by tests and the verify suite
# ---------------------------------------------------------------------------

def random_so(fr: MinkowskiFrame, rng, scale: float = 1.0) -> np.ndarray:
    A = rng.normal(size=(fr.dim, fr.dim))
    A = A - A.T
    A *= scale / np.linalg.norm(A)
    return fr.gram @ A


def random_lorentz(fr: MinkowskiFrame, rng, scale: float = 1.0) -> np.ndarray:
    from .linalg import expm

    return expm(random_so(fr, rng, scale))


def random_compact_skew(m: int, rng, low: float = 0.3, high: float = 2.0,
                        gap: float = 0.2) -> np.ndarray:
    """Skew m×m matrix with rotation angles in [low, high], pairwise ≥ gap apart."""
    if m < 2:
        return np.zeros((m, m))
    k = m // 2
    for _ in range(1000):
        th = rng.uniform(low, high, size=k)
        if k < 2 or np.min(np.diff(np.sort(th))) >= gap:
            break
    D = np.zeros((m, m))
    for i, t in enumerate(th):
        D[2 * i, 2 * i + 1] = -t
        D[2 * i + 1, 2 * i] = t
    Q, _ = np.linalg.qr(rng.normal(size=(m, m)))
    return Q @ D @ Q.T


def random_representative(kind: Kind, n: int, rng) -> tuple[np.ndarray, float]:
    """A canonical representative (in Witt coordinates) and its expected |a|.

    Parabolic representatives carry a random coefficient, but the boost
    normalization makes the expected reported value 1.
    """
    fr = MinkowskiFrame(n)
    if kind is Kind.ELLIPTIC:
        c0 = random_compact_skew(n + 1, rng)
        # orthonormal basis e_- = (p−q)/√2, e_1..e_n, e_{n+1} = (p+q)/√2
        O = np.zeros((fr.dim, fr.dim))
        O[:, 0] = (fr.p() - fr.q()) / math.sqrt(2.0)
        O[1:-1, 1:-1] = np.eye(n)
        O[:, -1] = (fr.p() + fr.q()) / math.sqrt(2.0)
        C = O @ canonical_matrix(kind, 0.0, c0, n) @ np.linalg.inv(O)
        return C, 0.0
    if kind is Kind.HYPERBOLIC:
        a = rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0])
        return canonical_matrix(kind, a, random_compact_skew(n, rng), n), abs(a)
    a = rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0])
    return canonical_matrix(kind, a, random_compact_skew(n - 1, rng), n), 1.0
