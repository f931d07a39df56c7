"""Structure constants for plane-wave symmetry algebras.

Basis ordering for the isometry algebra of (F, B):

    q, k_1..k_m, pwedge_e1..pwedge_en, p, e_1..e_n

where k_a span the skew matrices commuting with B and F and pwedge_ei stands
for the null rotation p∧e_i.  Brackets, with λ = 0 (kind a) or 1 (kind b):

    [q, p] = λp,  [q, p∧X] = p∧(λ + F)X − X,  [q, X] = p∧BX + FX,
    [p∧Y, X] = −(Y, X)p,  [k, p∧X] = p∧kX,  [k, X] = kX,

all others zero.  The conformal algebra appends D acting as id − p∧q.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    MinkowskiFrame,
    bivector_matrix,
    null_space,
    skew_basis,
    skew_part,
    so_residual,
    sym_part,
    witt_gram,
)
from .planewave import PlaneWaveSpec, SpecError, is_conformally_flat


class ConstraintError(ValueError):
    """Bracket data violating a Jacobi-derived constraint."""


@dataclass(frozen=True, eq=False)
class LieAlgebraData:
    labels: tuple
    c: np.ndarray  # [X_i, X_j] = Σ_k c[i, j, k] X_k
    jacobi: float = field(init=False)

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        d = len(self.labels)
        if c.shape != (d, d, d):
            raise ValueError(f"structure constants must have shape {(d, d, d)}, got {c.shape}")
        if not np.array_equal(c, -c.transpose(1, 0, 2)):
            raise ValueError("structure constants are not antisymmetric")
        c.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "jacobi", jacobi_residual(c))

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def bracket(self, x, y) -> np.ndarray:
        """Bracket of coefficient vectors."""
        return np.einsum("i,j,ijk->k", x, y, self.c)

    def bracket_labels(self, a: str, b: str) -> dict:
        v = self.c[self.index(a), self.index(b)]
        return {lab: float(v[k]) for k, lab in enumerate(self.labels) if v[k] != 0.0}

    def nonzero(self, atol: float = 0.0) -> list:
        out = []
        for i, j, k in zip(*np.nonzero(np.abs(self.c) > atol)):
            if i < j:
                out.append([int(i), int(j), int(k), float(self.c[i, j, k])])
        return out


def jacobi_residual(c) -> float:
    """max over basis triples of the norm of the cyclic Jacobi sum."""
    c = np.asarray(c, dtype=float)
    if c.size == 0:
        return 0.0
    # J[i,j,l,:] = [[X_i,X_j],X_l] + [[X_j,X_l],X_i] + [[X_l,X_i],X_j]
    A = np.einsum("ijm,mlr->ijlr", c, c)
    J = A + A.transpose(1, 2, 0, 3) + A.transpose(2, 0, 1, 3)
    return float(np.max(np.linalg.norm(J, axis=-1)))


def _project_columns(B, F, basis):
    return [np.concatenate([(K @ B - B @ K).ravel(), (K @ F - F @ K).ravel()]) for K in basis]


def centralizer_k(B, F, rtol: float = 1e-9) -> list[np.ndarray]:
    """Frobenius-orthonormal basis of {K ∈ so(n) : [K, B] = 0 = [K, F]}."""
    B = np.asarray(B, dtype=float)
    F = np.asarray(F, dtype=float)
    if B.ndim != 2 or B.shape != F.shape or B.shape[0] != B.shape[1]:
        raise ValueError(f"B and F must be square of equal size, got {B.shape} and {F.shape}")
    n = B.shape[0]
    basis = skew_basis(n)
    if not basis:
        return []
    A = np.column_stack(_project_columns(B, F, basis))
    scale = max(1.0, float(np.linalg.norm(B)), float(np.linalg.norm(F)))
    N = null_space(A, rtol=rtol, atol=rtol * scale)
    return [np.tensordot(N[:, j], np.array(basis), axes=1) for j in range(N.shape[1])]


# ---------------------------------------------------------------------------
# Bracket tables
# ---------------------------------------------------------------------------

def _table(lam, omega, L, K, T, ks) -> LieAlgebraData:
    """Algebra on (q, k.., p∧e.., p, e..) with the general plane-wave table.

    [X, Y] = ω(X, Y)p,  [q, p] = λp,  [q, p∧X] = p∧KX − X,  [q, X] = p∧TX + LX.
    """
    n = L.shape[0]
    m = len(ks)
    iq, ik, iw, ip, ie = 0, 1, 1 + m, 1 + m + n, 2 + m + n
    d = 2 + m + 2 * n
    labels = (["q"] + [f"k_{a + 1}" for a in range(m)] + [f"pwedge_e{i + 1}" for i in range(n)]
              + ["p"] + [f"e_{i + 1}" for i in range(n)])
    c = np.zeros((d, d, d))

    def put(i, j, vec):
        c[i, j] = vec
        c[j, i] = -vec

    e_vec = lambda block, y: _embed(d, block, y)  # noqa: E731
    put(iq, ip, e_vec(ip, [lam]))
    for i in range(n):
        put(iq, iw + i, e_vec(iw, K[:, i]) - e_vec(ie + i, [1.0]))
        put(iq, ie + i, e_vec(iw, T[:, i]) + e_vec(ie, L[:, i]))
        put(iw + i, ie + i, e_vec(ip, [-1.0]))
        for j in range(i + 1, n):
            put(ie + i, ie + j, e_vec(ip, [omega[j, i]]))
    if m:
        Kb = np.array(ks)
        for a in range(m):
            for b in range(a + 1, m):
                comm = ks[a] @ ks[b] - ks[b] @ ks[a]
                put(ik + a, ik + b, e_vec(ik, np.tensordot(Kb, comm, axes=([1, 2], [0, 1]))))
            for i in range(n):
                put(ik + a, iw + i, e_vec(iw, ks[a][:, i]))
                put(ik + a, ie + i, e_vec(ie, ks[a][:, i]))
    return LieAlgebraData(labels, c)


def _embed(d, start, y):
    out = np.zeros(d)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    out[start:start + y.size] = y
    return out


def _lam(spec: PlaneWaveSpec) -> float:
    return 0.0 if spec.kind == "a" else 1.0


def build_isom(spec: PlaneWaveSpec, include_k: bool = True) -> LieAlgebraData:
    lam = _lam(spec)
    n = spec.n
    ks = centralizer_k(spec.B, spec.F) if include_k else []
    return _table(lam, np.zeros((n, n)), spec.F, lam * np.eye(n) + spec.F, spec.B, ks)


def build_conf(spec: PlaneWaveSpec, include_k: bool = True,
               allow_conformally_flat: bool = False) -> LieAlgebraData:
    """Isometry algebra extended by the homothety generator D, appended last.

    For conformally flat specs the conformal algebra is larger than this
    extension; building it anyway needs allow_conformally_flat=True.
    """
    if is_conformally_flat(spec) and not allow_conformally_flat:
        raise SpecError("conformal algebra needs a non-conformally-flat spec "
                        "(Weyl profile vanishes, so the isotropy representation is not exact)")
    iso = build_isom(spec, include_k)
    d = iso.dim
    c = np.zeros((d + 1, d + 1, d + 1))
    c[:d, :d, :d] = iso.c
    D = d
    for k, lab in enumerate(iso.labels):
        # D acts as id − p∧q: weight 2 on p, 0 on q and 𝔨, 1 on E and p∧E
        w = {"p": 2.0, "q": 0.0}.get(lab, 0.0 if lab.startswith("k_") else 1.0)
        c[D, k, k] = w
        c[k, D, k] = -w
    return LieAlgebraData(iso.labels + ("D",), c)


def change_basis(alg: LieAlgebraData, P, labels=None) -> LieAlgebraData:
    """Structure constants in the basis whose a-th element is Σ_i P[i, a] X_i."""
    P = np.asarray(P, dtype=float)
    Pinv = np.linalg.inv(P)
    c = np.einsum("ia,jb,ijk,lk->abl", P, P, alg.c, Pinv)
    c = 0.5 * (c - c.transpose(1, 0, 2))
    return LieAlgebraData(labels or alg.labels, c)


# ---------------------------------------------------------------------------
# Raw brackets and frame normalization
# ---------------------------------------------------------------------------

def _tol(*mats) -> float:
    return 1e-10 * (1.0 + max(float(np.linalg.norm(M)) for M in mats))


@dataclass(frozen=True, eq=False)
class DerivationData:
    """Brackets of a transitive group with [X, Y] = ω(X, Y)p and ad_q = (λ, L) on (p, E).

    ω is stored as the skew matrix with ω(X, Y) = (ωX, Y).  c0 is the
    isotropy-commuting block, checked against L and ω but not used in brackets.
    """

    lam: float
    omega: np.ndarray
    L: np.ndarray
    c0: np.ndarray | None = None

    def __post_init__(self):
        omega = np.atleast_2d(np.array(self.omega, dtype=float))
        L = np.atleast_2d(np.array(self.L, dtype=float))
        n = L.shape[0]
        if L.shape != (n, n) or omega.shape != (n, n):
            raise ValueError(f"omega and L must be square of equal size, got {omega.shape} and {L.shape}")
        c0 = np.zeros((n, n)) if self.c0 is None else np.atleast_2d(np.array(self.c0, dtype=float))
        if c0.shape != (n, n):
            raise ValueError(f"c0 must be {n}x{n}, got {c0.shape}")
        if np.linalg.norm(omega + omega.T) > _tol(omega):
            raise ConstraintError("omega is not skew-symmetric")
        if np.linalg.norm(c0 + c0.T) > _tol(c0):
            raise ConstraintError("c0 is not skew-symmetric")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "c0", c0)
        object.__setattr__(self, "lam", float(self.lam))
        res = self.residuals()
        tol = _tol(omega, L, c0, np.eye(1) * self.lam)
        for name, r in res.items():
            if r > tol:
                raise ConstraintError(f"derivation constraint '{name}' violated: residual {r:.3e}")

    @property
    def n(self) -> int:
        return self.L.shape[0]

    def residuals(self) -> dict:
        w, L, c0 = self.omega, self.L, self.c0
        return {
            # ω(LX, Y) + ω(X, LY) = λ ω(X, Y)
            "omegaL": float(np.linalg.norm(L.T @ w + w @ L - self.lam * w)),
            "c0_L": float(np.linalg.norm(c0 @ L - L @ c0)),
            "c0_omega": float(np.linalg.norm(c0 @ w - w @ c0)),
        }

    def raw_brackets(self) -> "RawBrackets":
        n = self.n
        return RawBrackets(self.lam, self.omega, self.L,
                           self.lam * np.eye(n) - self.omega - self.L.T, np.zeros((n, n)))


@dataclass(frozen=True, eq=False)
class RawBrackets:
    """General isometry-algebra table before normalization.

    [X, Y] = ω(X, Y)p,  [q, p] = λp,  [q, p∧X] = p∧KX − X,  [q, X] = p∧TX + LX.
    """

    lam: float
    omega: np.ndarray
    L: np.ndarray
    K: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        for name in ("omega", "L", "K", "T"):
            object.__setattr__(self, name, np.atleast_2d(np.array(getattr(self, name), dtype=float)))
        object.__setattr__(self, "lam", float(self.lam))
        n = self.L.shape[0]
        for name in ("omega", "L", "K", "T"):
            if getattr(self, name).shape != (n, n):
                raise ValueError(f"{name} must be {n}x{n}")

    @property
    def n(self) -> int:
        return self.L.shape[0]

    def residuals(self) -> dict:
        """Jacobi identity components; all vanish exactly for a Lie algebra.

        "K": from (q, p∧X, Y); "omega_L_T": from (q, X, Y).
        """
        lam, w, L, K, T = self.lam, self.omega, self.L, self.K, self.T
        return {
            "K": float(np.linalg.norm(K - (lam * np.eye(self.n) - w - L.T))),
            "omega_L_T": float(np.linalg.norm(lam * w - w @ L - L.T @ w + T - T.T)),
            "omega_skew": float(np.linalg.norm(w + w.T)),
        }

    def tolerance(self) -> float:
        return _tol(self.omega, self.L, self.K, self.T, np.eye(1) * self.lam)


def raw_algebra(raw) -> LieAlgebraData:
    """Algebra on (q, p∧e.., p, e..) from raw brackets, without constraint checks."""
    if isinstance(raw, DerivationData):
        raw = raw.raw_brackets()
    return _table(raw.lam, raw.omega, raw.L, raw.K, raw.T, [])


@dataclass(frozen=True, eq=False)
class NormalizedFrame:
    F: np.ndarray
    B: np.ndarray
    phi: np.ndarray
    lam: float  # 0 or 1
    scale: float  # p ↦ scale·p, q ↦ q/scale
    residuals: dict
    basis_change: np.ndarray  # columns: normalized basis in raw coordinates

    @property
    def kind(self) -> str:
        return "a" if self.lam == 0.0 else "b"

    def spec(self) -> PlaneWaveSpec:
        return PlaneWaveSpec(self.kind, self.F.shape[0], self.F, self.B)


def normalize_frame(raw) -> NormalizedFrame:
    """Bring raw brackets to the table of build_isom via X ↦ X + p∧φX, φ = ½ω + L^s.

    Afterwards ω = 0 and ad_q on E is skew.  Nonzero λ is then scaled to 1.
    """
    if isinstance(raw, DerivationData):
        raw = raw.raw_brackets()
    res = raw.residuals()
    tol = raw.tolerance()
    bad = [f"{k} (residual {v:.3e})" for k, v in res.items() if v > tol]
    if bad:
        raise ConstraintError("Jacobi constraint violated: " + ", ".join(bad))
    n = raw.n
    lam, w, L, K, T = raw.lam, raw.omega, raw.L, raw.K, raw.T
    phi = 0.5 * w + sym_part(L)
    F = L - phi
    B = T + K @ phi - phi @ F
    res = dict(res)
    res["B_symmetry"] = float(np.linalg.norm(B - B.T))
    res["F_skew"] = float(np.linalg.norm(F + F.T))
    F = skew_part(F)
    B = sym_part(B)

    scale = lam if lam != 0.0 else 1.0
    d = 2 * n + 2
    P = np.eye(d)
    # columns (q, p∧e.., p, e..) in raw coordinates
    iw, ip, ie = 1, 1 + n, 2 + n
    P[0, 0] = 1.0 / scale
    P[iw:iw + n, iw:iw + n] *= scale
    P[ip, ip] = scale
    P[iw:iw + n, ie:ie + n] = phi
    if lam != 0.0:
        F = F / lam
        B = B / lam ** 2
        lam = 1.0
    return NormalizedFrame(F, B, phi, lam, scale, res, P)


# ---------------------------------------------------------------------------
# Nomizu map of a left-invariant metric
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NomizuMap:
    """Λ on the Witt basis (p, e_1..e_n, q) of V, as matrices in so(V)."""

    images: np.ndarray  # images[k] = Λ(basis_k)
    frame: MinkowskiFrame

    def of(self, label: str) -> np.ndarray:
        return self.images[self.frame.labels.index(label)]

    def so_residual(self) -> float:
        return max(so_residual(M, self.frame.gram) for M in self.images)


def nomizu(lam: float, omega, L) -> NomizuMap:
    """Levi-Civita connection of the left-invariant metric with Witt-orthonormal (p, E, q).

    Λ(p) = 0,  Λ(X) = −½ p∧(ω + L + Lᵀ)X,  Λ(q) = −λ p∧q + ½(−ω + L − Lᵀ) on E.
    """
    omega = np.atleast_2d(np.asarray(omega, dtype=float))
    L = np.atleast_2d(np.asarray(L, dtype=float))
    if omega.shape != L.shape or L.shape[0] != L.shape[1]:
        raise ValueError(f"omega and L must be square of equal size, got {omega.shape} and {L.shape}")
    n = L.shape[0]
    fr = MinkowskiFrame(n)
    d = fr.dim
    imgs = np.zeros((d, d, d))
    M = omega + L + L.T
    for i in range(n):
        imgs[1 + i] = -0.5 * bivector_matrix(fr.p(), fr.embed(M[:, i]), fr)
    Lq = -lam * bivector_matrix(fr.p(), fr.q(), fr)
    Lq[1:-1, 1:-1] += 0.5 * (-omega + L - L.T)
    imgs[-1] = Lq
    return NomizuMap(imgs, fr)


def group_algebra(lam: float, omega, L) -> LieAlgebraData:
    """Algebra on V = (p, e_1..e_n, q): [X, Y] = ω(X, Y)p, [q, p] = λp, [q, X] = LX."""
    omega = np.atleast_2d(np.asarray(omega, dtype=float))
    L = np.atleast_2d(np.asarray(L, dtype=float))
    n = L.shape[0]
    d = n + 2
    c = np.zeros((d, d, d))
    for i in range(n):
        for j in range(n):
            c[1 + i, 1 + j, 0] = omega[j, i]
        c[-1, 1 + i, 1:-1] = L[:, i]
        c[1 + i, -1, 1:-1] = -L[:, i]
    c[-1, 0, 0] = lam
    c[0, -1, 0] = -lam
    return LieAlgebraData(MinkowskiFrame(n).labels, c)


@dataclass(frozen=True, eq=False)
class NomizuCurvature:
    R: np.ndarray  # R[i, j] = R(X_i, X_j) in so(V)
    frame: MinkowskiFrame

    def profile(self) -> np.ndarray:
        """Matrix P with R(e_i, q) = p∧(P e_i)."""
        n = self.frame.n
        return np.array([self.R[1 + i, -1][1:-1, -1] for i in range(n)]).T

    def p_wedge_residual(self) -> float:
        """Distance of all values from span(p∧e_i)."""
        worst = 0.0
        fr = self.frame
        for M in self.R.reshape(-1, fr.dim, fr.dim):
            y = fr.embed(M[1:-1, -1])
            worst = max(worst, float(np.linalg.norm(M - bivector_matrix(fr.p(), y, fr))))
        return worst


def nomizu_curvature(nm: NomizuMap, brackets: LieAlgebraData, isotropy=None) -> NomizuCurvature:
    """R(X, Y) = [Λ_X, Λ_Y] − Λ_{[X,Y]_m} − ad([X,Y]_h)|_m.

    brackets lists the basis of V first; `isotropy`, if given, holds the
    indices of a complement h whose action on V is read from the constants.
    """
    d = nm.frame.dim
    h = list(isotropy or [])
    m = [k for k in range(brackets.dim) if k not in h]
    if len(m) != d:
        raise ValueError(f"bracket data has {len(m)} reductive directions, Nomizu map has {d}")
    c = brackets.c
    Lam = nm.images
    R = np.zeros((d, d, d, d))
    for a, i in enumerate(m):
        for b, j in enumerate(m):
            val = Lam[a] @ Lam[b] - Lam[b] @ Lam[a]
            val -= np.tensordot(c[i, j, m], Lam, axes=1)
            for k in h:
                # ad(X_k) restricted to m, as a matrix on V-coordinates
                val -= c[i, j, k] * c[k][np.ix_(m, m)].T
            R[a, b] = val
    return NomizuCurvature(R, nm.frame)


# ---------------------------------------------------------------------------
# First prolongation
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Prolongation:
    dimension: int
    basis: list  # each element φ with φ[k] = φ(e_k), a dim×dim matrix


def first_prolongation(g0, gram=None, rtol: float = 1e-9) -> Prolongation:
    """Solutions φ: V → span(g0) of φ(X)Y = φ(Y)X."""
    mats = [np.asarray(M, dtype=float) for M in g0]
    if not mats:
        return Prolongation(0, [])
    d = mats[0].shape[0]
    if any(M.shape != (d, d) for M in mats):
        raise ValueError("generators must all be square of the same size")
    gram = witt_gram(d - 2) if gram is None else np.asarray(gram, dtype=float)
    for M in mats:
        skew = M - np.trace(M) / d * np.eye(d)
        if so_residual(skew, gram) > 1e-10 * (1.0 + np.linalg.norm(M)):
            raise ValueError("generator is not in co(V)")
    # reduce to an independent spanning set so the solution count is intrinsic
    _, sv, vh = np.linalg.svd(np.array(mats).reshape(len(mats), -1), full_matrices=False)
    r = int(np.sum(sv > rtol * sv[0])) if sv[0] > 0 else 0
    if r == 0:
        return Prolongation(0, [])
    Gm = vh[:r].reshape(r, d, d)
    # unknown c[a, k]: φ(e_k) = Σ_a c[a, k] g_a; rows: (φ(e_k) e_l − φ(e_l) e_k) for k < l
    rows = []
    for k in range(d):
        for l in range(k + 1, d):
            block = np.zeros((d, r, d))
            block[:, :, k] += Gm[:, :, l].T
            block[:, :, l] -= Gm[:, :, k].T
            rows.append(block.reshape(d, r * d))
    A = np.vstack(rows) if rows else np.zeros((0, r * d))
    N = null_space(A, rtol=rtol) if A.size else np.eye(r * d)
    basis = []
    for j in range(N.shape[1]):
        coef = N[:, j].reshape(r, d)
        basis.append(np.einsum("ak,aij->kij", coef, Gm))
    return Prolongation(N.shape[1], basis)


def random_derivation(rng, n: int, lam: float = 0.0, omega_scale: float = 1.0) -> DerivationData:
    """Random (λ, ω, L) with ω(LX, Y) + ω(X, LY) = λω(X, Y).

    L = λ/2 + L0 where L0 spans the solutions of ωL0 + L0ᵀω = 0.
    """
    w = rng.normal(size=(n, n)) * omega_scale
    w = w - w.T
    cols = []
    for k in range(n * n):
        E = np.zeros(n * n)
        E[k] = 1.0
        E = E.reshape(n, n)
        cols.append((w @ E + E.T @ w).ravel())
    N = null_space(np.column_stack(cols), rtol=1e-12)
    L0 = (N @ rng.normal(size=N.shape[1])).reshape(n, n) if N.shape[1] else np.zeros((n, n))
    return DerivationData(lam, w, 0.5 * lam * np.eye(n) + L0)
