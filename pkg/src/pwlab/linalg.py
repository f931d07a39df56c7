"""Small dense kernels and the Witt-basis conventions shared across pwlab.

All matrices act on V = span(p, e_1, ..., e_n, q) in exactly that order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

EPS = np.finfo(float).eps


class ClusteringAmbiguityError(ValueError):
    """Eigenvalue clusters are too close to decide whether they merge."""


class DecompositionError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# Witt frame and bivectors
# ---------------------------------------------------------------------------

def witt_gram(n: int) -> np.ndarray:
    g = np.zeros((n + 2, n + 2))
    g[0, -1] = g[-1, 0] = 1.0
    g[1:-1, 1:-1] = np.eye(n)
    return g


@dataclass(frozen=True)
class MinkowskiFrame:
    """Witt basis (p, e_1..e_n, q) of R^{1,n+1}."""

    n: int
    gram: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n must be non-negative, got {self.n}")
        g = witt_gram(self.n)
        g.flags.writeable = False
        object.__setattr__(self, "gram", g)

    @property
    def dim(self) -> int:
        return self.n + 2

    @property
    def labels(self) -> list[str]:
        return ["p"] + [f"e_{i + 1}" for i in range(self.n)] + ["q"]

    def p(self) -> np.ndarray:
        return np.eye(self.dim)[0]

    def q(self) -> np.ndarray:
        return np.eye(self.dim)[-1]

    def e(self, i: int) -> np.ndarray:
        """Unit vector e_i, 1-based like the labels."""
        if not 1 <= i <= self.n:
            raise IndexError(f"e_{i} does not exist for n={self.n}")
        return np.eye(self.dim)[i]

    def embed(self, x) -> np.ndarray:
        """Put a vector of E into V."""
        out = np.zeros(self.dim)
        out[1:-1] = x
        return out

    def inner(self, x, y) -> float:
        return float(np.asarray(x) @ self.gram @ np.asarray(y))


def bivector_matrix(x, y, frame: MinkowskiFrame) -> np.ndarray:
    """Matrix of x∧y acting by Z ↦ (x,Z)y − (y,Z)x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (frame.dim,) or y.shape != (frame.dim,):
        raise ValueError(
            f"bivector factors must have length {frame.dim}, got {x.shape} and {y.shape}")
    return (np.outer(y, x) - np.outer(x, y)) @ frame.gram


def so_residual(M, gram) -> float:
    """‖gram·M + Mᵀ·gram‖, zero exactly when M is gram-skew."""
    M = np.asarray(M)
    return float(np.linalg.norm(gram @ M + M.T @ gram))


def so_basis(gram) -> list[np.ndarray]:
    """Basis of so(V) for a symmetric involutive gram (gram² = id)."""
    d = gram.shape[0]
    out = []
    for i in range(d):
        for j in range(i + 1, d):
            S = np.zeros((d, d))
            S[i, j], S[j, i] = 1.0, -1.0
            out.append(np.linalg.solve(gram, S))
    return out


def co_basis(gram) -> list[np.ndarray]:
    return [np.eye(gram.shape[0])] + so_basis(gram)


def skew_basis(n: int) -> list[np.ndarray]:
    """Frobenius-orthonormal basis of so(n)."""
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            K = np.zeros((n, n))
            K[i, j], K[j, i] = -1.0, 1.0
            out.append(K / math.sqrt(2.0))
    return out


def sym_part(A):
    return 0.5 * (A + A.T)


def skew_part(A):
    return 0.5 * (A - A.T)


def null_space(A, rtol: float = 1e-9, atol: float = 0.0) -> np.ndarray:
    """Orthonormal columns spanning the numerical kernel of A.

    Singular values at or below ``max(rtol * σ_max, atol)`` count as zero.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return np.eye(A.shape[1])
    _, s, vh = np.linalg.svd(A)
    smax = s[0] if s.size else 0.0
    if smax <= atol:
        return np.eye(A.shape[1])
    rank = int(np.sum(s > max(rtol * smax, atol)))
    return vh[rank:].conj().T


# ---------------------------------------------------------------------------
# Matrix exponential
# ---------------------------------------------------------------------------

def _taylor_order(radius: float = 0.5, target: float = 1e-16) -> int:
    m = 1
    while radius ** (m + 1) / math.factorial(m + 1) * math.exp(radius) >= target:
        m += 1
    return m


_EXPM_ORDER = _taylor_order()


def expm(M) -> np.ndarray:
    """Matrix exponential by scaling and squaring a fixed-order Taylor series.

    M is scaled by 2^-k so that ‖M‖₁/2^k ≤ 1/2; the series is truncated at the
    order whose remainder bound there is below 1e-16.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expm needs a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("expm input has non-finite entries")
    d = M.shape[0]
    norm = np.abs(M).sum(axis=0).max() if d else 0.0
    k = 0 if norm <= 0.5 else int(math.ceil(math.log2(norm / 0.5)))
    A = M / (2.0 ** k)
    out = np.eye(d)
    term = np.eye(d)
    for j in range(1, _EXPM_ORDER + 1):
        term = term @ A / j
        out = out + term
    with np.errstate(over="raise", invalid="raise"):
        try:
            for _ in range(k):
                out = out @ out
        except FloatingPointError as exc:
            raise OverflowError(f"expm overflow for ‖M‖₁={norm:.3g}") from exc
    if not np.all(np.isfinite(out)):
        raise OverflowError(f"expm overflow for ‖M‖₁={norm:.3g}")
    return out


# ---------------------------------------------------------------------------
# Symmetric eigensolver (cyclic Jacobi)
# ---------------------------------------------------------------------------

def sym_eig(S, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.

    Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
    1e-14·‖S‖_F.  Raises ValueError if ‖S − Sᵀ‖ > tol·‖S‖.
    """
    A = np.array(S, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"sym_eig needs a square matrix, got shape {A.shape}")
    scale = np.linalg.norm(A)
    asym = np.linalg.norm(A - A.T)
    if asym > tol * max(scale, 1e-300):
        raise ValueError(f"matrix is not symmetric: ‖S−Sᵀ‖={asym:.3e}")
    A = 0.5 * (A + A.T)
    d = A.shape[0]
    V = np.eye(d)
    stop = 1e-14 * scale
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= stop:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                diff = float(A[q, q] - A[p, p])
                if abs(diff) > 1e150 * abs(apq):
                    t = float(apq) / diff  # t ≈ 1/(2τ); forming τ would overflow
                else:
                    tau = diff / (2.0 * float(apq))
                    t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        raise DecompositionError("Jacobi sweeps did not converge")
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def sym_sqrt_inv(S) -> np.ndarray:
    """S^{-1/2} for symmetric positive definite S."""
    w, Q = sym_eig(S)
    if w[0] <= 0:
        raise ValueError("matrix is not positive definite")
    return Q @ np.diag(1.0 / np.sqrt(w)) @ Q.T


# ---------------------------------------------------------------------------
# Jordan–Chevalley decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JCDecomposition:
    s: np.ndarray
    nil: np.ndarray
    eigenvalues: tuple  # cluster means
    multiplicities: tuple

    def residuals(self, M) -> dict[str, float]:
        M = np.asarray(M)
        d = M.shape[0]
        return {
            "sum": float(np.linalg.norm(self.s + self.nil - M)),
            "commute": float(np.linalg.norm(self.s @ self.nil - self.nil @ self.s)),
            "nilpotent": float(np.linalg.norm(np.linalg.matrix_power(self.nil, d))),
        }


_CLUSTER_EPS = 1e4 * EPS


def _merge_radius(k: int, scale: float, tol: float) -> float:
    return scale * max(tol, _CLUSTER_EPS ** (1.0 / k))


def _diameter(vals) -> float:
    vals = np.asarray(vals)
    if vals.size < 2:
        return 0.0
    return float(np.abs(vals[:, None] - vals[None, :]).max())


def cluster_eigenvalues(ev, scale: float, tol: float = 1e-9) -> list[list[int]]:
    """Group eigenvalues that plausibly belong to one (possibly defective) block.

    The k nearest eigenvalues around any eigenvalue form an admissible group
    when their diameter is at most r(k); overlapping admissible groups are
    joined.  Perturbed k-blocks split like ε^{1/k}, hence the k-dependent radius.
    """
    ev = np.asarray(ev)
    d = len(ev)
    parent = list(range(d))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(d):
        order = np.argsort(np.abs(ev - ev[i]), kind="stable")
        for k in range(2, d + 1):
            grp = order[:k]
            if _diameter(ev[grp]) <= _merge_radius(k, scale, tol):
                for j in grp[1:]:
                    parent[find(j)] = find(grp[0])
    groups: dict[int, list[int]] = {}
    for i in range(d):
        groups.setdefault(find(i), []).append(i)
    clusters = list(groups.values())
    for c in clusters:
        if _diameter(ev[c]) > _merge_radius(len(c), scale, tol):
            raise ClusteringAmbiguityError(
                f"chained eigenvalue cluster near {ev[c].mean():.6g} is wider than its merge radius")
    for a in range(len(clusters)):
        for b in range(a + 1, len(clusters)):
            merged = clusters[a] + clusters[b]
            if _diameter(ev[merged]) <= 4.0 * _merge_radius(len(merged), scale, tol):
                raise ClusteringAmbiguityError(
                    f"eigenvalue clusters near {ev[clusters[a]].mean():.6g} and "
                    f"{ev[clusters[b]].mean():.6g} are within 4x of the merge radius")
    return clusters


def jordan_chevalley(M, tol: float = 1e-9) -> JCDecomposition:
    """Semisimple + nilpotent split of a real square matrix.

    Eigenvalues are clustered (see `cluster_eigenvalues`); each cluster's
    invariant subspace comes from a reordered complex Schur form and the
    semisimple part acts on it by the cluster mean.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"jordan_chevalley needs a square matrix, got {M.shape}")
    d = M.shape[0]
    scale = float(np.linalg.norm(M, 2)) if d else 0.0
    if scale == 0.0:
        z = np.zeros((d, d))
        return JCDecomposition(z, z.copy(), (0.0,) if d else (), (d,) if d else ())
    ev = np.linalg.eigvals(M)
    clusters = cluster_eigenvalues(ev, scale, tol)
    means = [ev[c].mean() for c in clusters]
    Mc = M.astype(complex)
    bases = []
    for ci, c in enumerate(clusters):
        def member(z, ci=ci):
            return int(np.argmin([abs(z - m) for m in means])) == ci
        _, Z, sdim = scipy.linalg.schur(Mc, output="complex", sort=member)
        if sdim != len(c):
            raise DecompositionError(
                f"Schur reordering found {sdim} eigenvalues for a cluster of size {len(c)}")
        bases.append(Z[:, :sdim])
    W = np.hstack(bases)
    Winv = np.linalg.inv(W)
    S = np.zeros((d, d), dtype=complex)
    row = 0
    for m, Bc in zip(means, bases):
        k = Bc.shape[1]
        S += m * (Bc @ Winv[row:row + k, :])
        row += k
    if np.abs(S.imag).max() > 1e-8 * scale:
        raise DecompositionError("semisimple part is not real; clusters not conjugation-closed")
    s = S.real
    nil = M - s
    jc = JCDecomposition(s, nil, tuple(complex(m) for m in means),
                         tuple(len(c) for c in clusters))
    res = jc.residuals(M)
    if res["commute"] > 1e-6 * scale ** 2 or res["nilpotent"] > 1e-6 * scale ** d:
        raise DecompositionError(f"Jordan–Chevalley validation failed: {res}")
    return jc
