"""Property-based verification suite covering every module.

Each check is a pure function of a SuiteConfig and returns a CheckResult whose
metrics pair every measured quantity with the tolerance it is compared to.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import criteria, lie, lorentz, planewave as pw
from .io import residual
from .linalg import MinkowskiFrame, co_basis, so_basis, witt_gram


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 0
    jacobi_specs: int = 100
    jacobi_max_n: int = 6
    jacobi_time_limit: float = 10.0
    curvature_specs: int = 50
    curvature_points: int = 5
    curvature_max_n: int = 4
    curvature_time_limit: float = 30.0
    homothety_specs: int = 10
    homothety_lambdas: tuple = (0.5, 2.0, 3.0)
    conversion_specs: int = 10
    conversion_points: int = 20
    classify_trials: int = 1000
    classify_max_n: int = 5
    cw_max_n: int = 4
    cw_draws: int = 100_000
    cw_random: int = 100
    prolongation_dims: tuple = (3, 4, 5)
    pipeline_instances: int = 50
    pipeline_max_n: int = 4


@dataclass
class CheckResult:
    name: str
    criterion: int
    passed: bool
    metrics: dict
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def to_dict(self, timing: bool = False) -> dict:
        out = {"name": self.name, "criterion": self.criterion, "passed": self.passed,
               "metrics": self.metrics}
        if self.details:
            out["details"] = self.details
        if timing:
            out["elapsed_s"] = round(self.elapsed, 3)
        return out


def _rng(cfg: SuiteConfig, salt: int):
    return np.random.default_rng([cfg.seed, salt])


def _all_pass(metrics: dict) -> bool:
    return all(m["pass"] for m in metrics.values())


def _rel(a, b) -> float:
    return float(np.linalg.norm(a - b)) / max(1.0, float(np.linalg.norm(b)))


# ---------------------------------------------------------------------------

def check_jacobi(cfg: SuiteConfig) -> CheckResult:
    rng = _rng(cfg, 1)
    t0 = time.perf_counter()
    worst_iso = worst_conf = 0.0
    dim_ok = True
    for s in range(cfg.jacobi_specs):
        n = int(rng.integers(1, cfg.jacobi_max_n + 1))
        spec = pw.random_spec(rng, n, "ab"[s % 2])
        iso = lie.build_isom(spec)
        conf = lie.build_conf(spec, allow_conformally_flat=True)
        worst_iso = max(worst_iso, iso.jacobi)
        worst_conf = max(worst_conf, conf.jacobi)
        dim_ok &= conf.dim == iso.dim + 1
    elapsed = time.perf_counter() - t0
    metrics = {
        "isom_jacobi": residual(worst_iso, 1e-12),
        "conf_jacobi": residual(worst_conf, 1e-12),
    }
    ok = _all_pass(metrics) and dim_ok and elapsed < cfg.jacobi_time_limit
    return CheckResult("jacobi", 1, ok, metrics,
                       {"conf_dim_is_isom_plus_one": dim_ok, "time_limit_s": cfg.jacobi_time_limit},
                       elapsed)


def _curvature_cases(cfg: SuiteConfig):
    rng = _rng(cfg, 2)
    for s in range(cfg.curvature_specs):
        n = int(rng.integers(1, cfg.curvature_max_n + 1))
        spec = pw.random_spec(rng, n, "ab"[s % 2])
        yield spec, [pw.random_point(spec, rng) for _ in range(cfg.curvature_points)]


def check_curvature(cfg: SuiteConfig) -> CheckResult:
    t0 = time.perf_counter()
    worst = bianchi = 0.0
    for spec, pts in _curvature_cases(cfg):
        for pt in pts:
            Rf = pw.curvature_fd(spec, pt)
            Rc = pw.curvature_closed(spec, pt.u).tensor
            worst = max(worst, _rel(Rf, Rc))
            bianchi = max(bianchi, pw.bianchi_residual(Rf))
    elapsed = time.perf_counter() - t0
    metrics = {"fd_vs_closed_rel": residual(worst, 1e-5), "bianchi": residual(bianchi, 1e-6)}
    ok = _all_pass(metrics) and elapsed < cfg.curvature_time_limit
    return CheckResult("curvature", 2, ok, metrics,
                       {"curvature_sign": pw.CURVATURE_SIGN, "time_limit_s": cfg.curvature_time_limit},
                       elapsed)


def check_planewave(cfg: SuiteConfig) -> CheckResult:
    t0 = time.perf_counter()
    worst = 0.0
    control = 0.0
    for spec, pts in _curvature_cases(cfg):
        for pt in pts:
            chk = pw.planewave_condition_check(spec, pt)
            worst = max(worst, chk.residual)
            if np.linalg.norm(spec.F) > 0:
                control = max(control, chk.per_direction["u"])
    fixed = pw.PlaneWaveSpec("a", 2, [[0.0, 1.0], [-1.0, 0.0]], np.diag([1.0, 0.0]))
    fixed_u = pw.planewave_condition_check(fixed, pw.SpacetimePoint(0.0, [0.5, -0.3], 0.4)).per_direction["u"]
    metrics = {"nabla_X_R_orthogonal_to_p": residual(worst, 1e-5)}
    ok = _all_pass(metrics) and control > 1e-3 and fixed_u > 1e-3
    return CheckResult("planewave", 3, ok, metrics, {
        "negative_control_max_u_derivative": f"{control:.2e}",
        "fixed_control_u_derivative": f"{fixed_u:.2e}",
        "control_threshold": "1.00e-03",
    }, time.perf_counter() - t0)


def check_confflat(cfg: SuiteConfig) -> CheckResult:
    rng = _rng(cfg, 4)
    t0 = time.perf_counter()
    us = (-1.0, 0.0, 1.0, 2.0)
    flat_max = 0.0
    flags_ok = True
    for beta in (-2.0, 0.0, 0.5, 3.0):
        for n in (2, 3, 4):
            F = pw.random_spec(rng, n).F
            spec = pw.PlaneWaveSpec("a", n, F, beta * np.eye(n))
            flags_ok &= pw.is_conformally_flat(spec)
            flat_max = max(flat_max, max(np.linalg.norm(pw.weyl_closed(spec, u).T) for u in us))
    spec = pw.PlaneWaveSpec("a", 2, np.zeros((2, 2)), np.diag([1.0, 2.0]))
    flags_ok &= not pw.is_conformally_flat(spec)
    nonflat_min = min(np.linalg.norm(pw.weyl_closed(spec, u).T) for u in us)
    metrics = {"scalar_weyl_norm": residual(flat_max, 1e-9)}
    ok = _all_pass(metrics) and flags_ok and nonflat_min > 1e-3
    return CheckResult("confflat", 4, ok, metrics,
                       {"flags_correct": bool(flags_ok), "nonflat_weyl_min": f"{nonflat_min:.2e}",
                        "nonflat_threshold": "1.00e-03"}, time.perf_counter() - t0)


def check_homothety(cfg: SuiteConfig) -> CheckResult:
    rng = _rng(cfg, 5)
    t0 = time.perf_counter()
    worst = 0.0
    for s in range(cfg.homothety_specs):
        spec = pw.random_spec(rng, int(rng.integers(1, 5)), "ab"[s % 2])
        pt = pw.random_point(spec, rng)
        g = pw.metric_at(spec, pt)
        for lam in cfg.homothety_lambdas:
            worst = max(worst, _rel(pw.homothety_pullback(spec, lam, pt), lam * lam * g))
    metrics = {"pullback_minus_scaled_metric": residual(worst, 1e-12)}
    return CheckResult("homothety", 5, _all_pass(metrics), metrics, {}, time.perf_counter() - t0)


def check_conversion(cfg: SuiteConfig) -> CheckResult:
    rng = _rng(cfg, 6)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(cfg.conversion_specs):
        spec = pw.random_spec(rng, int(rng.integers(1, 5)), "b")
        target = pw.convert_b_to_a(spec).spec
        for _ in range(cfg.conversion_points):
            pt = pw.SpacetimePoint(rng.uniform(-2, 2), rng.uniform(-1.5, 1.5, spec.n), rng.uniform(0.1, 5.0))
            worst = max(worst, _rel(pw.conversion_pullback(spec, pt), pw.metric_at(target, pt)))
    metrics = {"pullback_rel": residual(worst, 1e-8)}
    return CheckResult("conversion", 6, _all_pass(metrics), metrics,
                       {"target_profile": "B + I/4"}, time.perf_counter() - t0)


def check_classify(cfg: SuiteConfig) -> CheckResult:
    rng = _rng(cfg, 7)
    t0 = time.perf_counter()
    kinds = list(lorentz.Kind)
    wrong = errors = 0
    worst_a = worst_rec = 0.0
    for t in range(cfg.classify_trials):
        kind = kinds[t % 3]
        n = int(rng.integers(1, cfg.classify_max_n + 1))
        C, a = lorentz.random_representative(kind, n, rng)
        g = lorentz.random_lorentz(MinkowskiFrame(n), rng)
        try:
            form = lorentz.classify(g @ C @ np.linalg.inv(g), n)
        except (ValueError, ArithmeticError):
            errors += 1
            continue
        wrong += form.kind is not kind
        worst_a = max(worst_a, abs(form.a - a))
        worst_rec = max(worst_rec, form.residual)
    metrics = {"abs_a_error": residual(worst_a, 1e-8), "reconstruction": residual(worst_rec, 1e-8)}
    ok = _all_pass(metrics) and wrong == 0 and errors == 0
    return CheckResult("classify", 7, ok, metrics,
                       {"trials": cfg.classify_trials, "wrong_kind": wrong, "errors": errors},
                       time.perf_counter() - t0)


def check_cw(cfg: SuiteConfig) -> CheckResult:
    rng = _rng(cfg, 8)
    t0 = time.perf_counter()
    corpus = criteria.spectrum_corpus(cfg.cw_max_n, seed=cfg.seed)
    disagree = 0
    rec = ac = 0.0
    for i, B in enumerate(corpus):
        w = criteria.cw_left_invariant(B)
        oracle = criteria.random_search_witness(B, draws=cfg.cw_draws, seed=cfg.seed * 1000 + i)
        disagree += w.yes != oracle.found
        if w.yes:
            r = criteria.witness_residuals(B, w.A, w.C)
            rec, ac = max(rec, r["reconstruction"]), max(ac, r["AC"])
    bi_mismatch = 0
    monotone = True
    extra = [rng.uniform(-2, 2, (n, n)) for n in rng.integers(1, 6, size=cfg.cw_random)]
    for B in corpus + [0.5 * (M + M.T) for M in extra]:
        bi = criteria.cw_bi_invariant(B)
        sign_test = bool(np.max(np.linalg.eigvalsh(B)) <= 1e-9 * max(1.0, np.linalg.norm(B, 2)))
        bi_mismatch += bi.yes != sign_test
        if bi.yes:
            rec = max(rec, bi.residuals["reconstruction"])
            monotone &= criteria.cw_left_invariant(B).yes
    metrics = {"witness_reconstruction": residual(rec, 1e-9), "witness_AC": residual(ac, 1e-9)}
    ok = _all_pass(metrics) and disagree == 0 and bi_mismatch == 0 and monotone
    return CheckResult("cw", 8, ok, metrics, {
        "corpus_size": len(corpus), "oracle_disagreements": disagree,
        "bi_invariant_sign_mismatches": bi_mismatch, "bi_implies_left": bool(monotone),
    }, time.perf_counter() - t0)


def check_prolongation(cfg: SuiteConfig) -> CheckResult:
    t0 = time.perf_counter()
    dims = {}
    ok = True
    for d in cfg.prolongation_dims:
        G = witt_gram(d - 2)
        got = {
            "co": lie.first_prolongation(co_basis(G), G).dimension,
            "so": lie.first_prolongation(so_basis(G), G).dimension,
            "identity": lie.first_prolongation([np.eye(d)], G).dimension,
        }
        ok &= got == {"co": d, "so": 0, "identity": 0}
        dims[str(d)] = got
    return CheckResult("prolongation", 9, bool(ok), {}, {"dimensions": dims}, time.perf_counter() - t0)


def check_pipeline(cfg: SuiteConfig) -> CheckResult:
    rng = _rng(cfg, 10)
    t0 = time.perf_counter()
    worst_c = worst_pe = worst_prof = 0.0
    for s in range(cfg.pipeline_instances):
        n = int(rng.integers(1, cfg.pipeline_max_n + 1))
        lam = (0.0, 1.0)[s % 2]
        data = lie.random_derivation(rng, n, lam)
        nf = lie.normalize_frame(data)
        spec = nf.spec()
        direct = lie.build_isom(spec, include_k=False)
        changed = lie.change_basis(lie.raw_algebra(data), nf.basis_change, direct.labels)
        worst_c = max(worst_c, float(np.max(np.abs(changed.c - direct.c))))
        curv = lie.nomizu_curvature(lie.nomizu(data.lam, data.omega, data.L),
                                    lie.group_algebra(data.lam, data.omega, data.L))
        worst_pe = max(worst_pe, curv.p_wedge_residual())
        closed = pw.curvature_closed(spec, 0.0 if spec.kind == "a" else 1.0)
        for i in range(n):
            worst_prof = max(worst_prof, float(np.max(np.abs(
                curv.R[1 + i, -1] / nf.scale ** 2 - closed.bivectors[i]))))
    metrics = {
        "structure_constants": residual(worst_c, 1e-12),
        "curvature_in_p_wedge_E": residual(worst_pe, 1e-10),
        "nomizu_vs_closed": residual(worst_prof, 1e-8),
    }
    return CheckResult("pipeline", 10, _all_pass(metrics), metrics, {}, time.perf_counter() - t0)


CHECKS = {
    "jacobi": check_jacobi,
    "curvature": check_curvature,
    "planewave": check_planewave,
    "confflat": check_confflat,
    "homothety": check_homothety,
    "conversion": check_conversion,
    "classify": check_classify,
    "cw": check_cw,
    "prolongation": check_prolongation,
    "pipeline": check_pipeline,
}


def run_suite(names=None, cfg: SuiteConfig | None = None) -> list[CheckResult]:
    cfg = cfg or SuiteConfig()
    names = list(CHECKS) if names in (None, "all", ["all"]) else list(names)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown suite item(s): {', '.join(unknown)}")
    results = [CHECKS[n](cfg) for n in names]
    return sorted(results, key=lambda r: r.name)


__all__ = ["SuiteConfig", "CheckResult", "CHECKS", "run_suite"]
