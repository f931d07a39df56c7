"""Command-line entry point `pwlab`.

Exit codes: 0 success, 1 invariant violation, 2 invalid input, 64 unknown
subcommand.  JSON goes to stdout; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time

import numpy as np

from . import criteria, io, lie, lorentz, planewave as pw
from .linalg import DecompositionError, witt_gram
from .suite import CHECKS, SuiteConfig, run_suite

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT, EXIT_USAGE = 0, 1, 2, 64

DEFAULT_TOL = 1e-9

SUBCOMMANDS = (
    "metric", "curvature", "weyl", "check-planewave", "check-confflat", "convert-ba",
    "homothety", "classify-element", "isom", "conf", "normalize", "prolong", "nomizu",
    "cw", "from-derivation", "verify",
)


class InvariantViolation(RuntimeError):
    def __init__(self, message: str, payload: dict):
        super().__init__(message)
        self.payload = payload


def default_tol(flag: float | None) -> float:
    if flag is not None:
        return flag
    env = os.environ.get("PWLAB_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            raise io.SchemaError(f"PWLAB_TOL must be a number, got {env!r}") from None
    return DEFAULT_TOL


def _digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()[:16]


def _algebra_payload(alg: lie.LieAlgebraData) -> dict:
    return {
        "dim": alg.dim,
        "labels": list(alg.labels),
        "nonzero": alg.nonzero(),
        "jacobi_residual": io.residual(alg.jacobi, 1e-12),
    }


def _require(payload: dict, *keys):
    bad = [k for k in keys if not payload[k]["pass"]]
    if bad:
        raise InvariantViolation(f"residual above tolerance: {', '.join(bad)}", payload)


# ---------------------------------------------------------------------------
# Handlers; each returns the JSON payload
# ---------------------------------------------------------------------------

def cmd_metric(a):
    spec = io.load_spec(a.spec)
    pt = io.parse_point(a.point, spec.n)
    return {"kind": spec.kind, "point": pt.as_array(), "coordinates": pw.coordinate_labels(spec.n),
            "metric": pw.metric_at(spec, pt)}


def cmd_curvature(a):
    spec = io.load_spec(a.spec)
    cm = pw.curvature_closed(spec, a.u)
    R = cm.tensor
    nz = [[int(i), int(j), int(k), int(l), float(R[i, j, k, l])] for i, j, k, l in zip(*np.nonzero(R))]
    return {"u": a.u, "T": cm.T, "bivector_form": "R(d_xi, d_u) = d_v ^ T d_xi",
            "curvature_sign": pw.CURVATURE_SIGN, "coordinates": pw.coordinate_labels(spec.n),
            "tensor_nonzero": nz}


def cmd_weyl(a):
    spec = io.load_spec(a.spec)
    W = pw.weyl_closed(spec, a.u).T
    return {"u": a.u, "weyl_profile": W, "trace": io.residual(abs(float(np.trace(W))), 1e-12),
            "norm": io.fmt(float(np.linalg.norm(W)))}


def cmd_check_planewave(a):
    spec = io.load_spec(a.spec)
    pt = io.parse_point(a.point, spec.n)
    chk = pw.planewave_condition_check(spec, pt, a.h)
    payload = {
        "residual": io.residual(chk.residual, chk.tol),
        "per_direction": {k: io.fmt(v) for k, v in chk.per_direction.items()},
        "note": "only directions orthogonal to p = d_v are constrained; d_u is reported",
    }
    _require(payload, "residual")
    return payload


def cmd_check_confflat(a):
    spec = io.load_spec(a.spec)
    tol = default_tol(a.tol)
    W = pw.weyl_profile(spec.B)
    return {"conformally_flat": pw.is_conformally_flat(spec, tol),
            "weyl_profile_norm": io.fmt(float(np.linalg.norm(W))),
            "tol": io.fmt(tol * (1.0 + float(np.linalg.norm(spec.B))))}


def cmd_convert_ba(a):
    spec = io.load_spec(a.spec)
    conv = pw.convert_b_to_a(spec)
    return {"spec": conv.spec.to_dict(), "conformal_factor": conv.factor,
            "coordinate_map": conv.coordinate_map}


def cmd_homothety(a):
    spec = io.load_spec(a.spec)
    pt = io.parse_point(a.point, spec.n)
    pb = pw.homothety_pullback(spec, a.lam, pt)
    target = a.lam ** 2 * pw.metric_at(spec, pt)
    err = float(np.max(np.abs(pb - target))) / max(1.0, float(np.max(np.abs(target))))
    payload = {"lambda": a.lam, "pullback": pb, "residual": io.residual(err, 1e-12)}
    _require(payload, "residual")
    return payload


def cmd_classify_element(a):
    C = io.load_matrix(a.matrix)
    tol = default_tol(a.tol)
    form = lorentz.classify(C, a.n, tol)
    payload = {
        "kind": form.kind.value,
        "a": form.a,
        "c0": form.c0,
        "frame": form.frame,
        "frame_convention": "orthonormal (e_-, e_1..e_{n+1})" if form.kind is lorentz.Kind.ELLIPTIC
        else "Witt (p, e_1..e_n, q)",
        "witt_frame": form.witt_frame,
        "residual": io.residual(form.residual, 1e-8),
    }
    _require(payload, "residual")
    return payload


def cmd_isom(a):
    return _algebra_payload(lie.build_isom(io.load_spec(a.spec)))


def cmd_conf(a):
    return _algebra_payload(lie.build_conf(io.load_spec(a.spec)))


def cmd_normalize(a):
    raw = io.load_derivation(a.data)
    nf = lie.normalize_frame(raw)
    tol = (raw.raw_brackets() if isinstance(raw, lie.DerivationData) else raw).tolerance()
    return {
        "kind": nf.kind, "lambda": nf.lam, "scale": nf.scale,
        "F": nf.F, "B": nf.B, "phi": nf.phi,
        "residuals": {k: io.residual(v, tol) for k, v in nf.residuals.items()},
    }


def cmd_prolong(a):
    mats = io.load_basis(a.basis)
    d = mats[0].shape[0]
    if d < 2:
        raise io.SchemaError("basis matrices must be at least 2x2")
    res = lie.first_prolongation(mats, witt_gram(d - 2))
    return {"dimension": res.dimension, "basis": res.basis}


def cmd_nomizu(a):
    raw = io.load_derivation(a.data)
    if not isinstance(raw, lie.DerivationData):
        raise io.SchemaError("nomizu needs group data (lambda, omega, L) without K, T")
    nm = lie.nomizu(raw.lam, raw.omega, raw.L)
    curv = lie.nomizu_curvature(nm, lie.group_algebra(raw.lam, raw.omega, raw.L))
    payload = {
        "images": {lab: nm.images[k] for k, lab in enumerate(nm.frame.labels)},
        "curvature_profile": curv.profile(),
        "so_residual": io.residual(nm.so_residual(), 1e-12),
        "p_wedge_residual": io.residual(curv.p_wedge_residual(), 1e-10),
    }
    _require(payload, "so_residual", "p_wedge_residual")
    return payload


def _witness_payload(w: criteria.DecisionWitness, tol: float) -> dict:
    out = {"verdict": w.verdict, "A": w.A, "C": w.C, "certificate": w.certificate}
    out["residuals"] = {k: io.residual(v, tol) for k, v in w.residuals.items()}
    return out


def cmd_cw(a):
    B = io.load_matrix(a.B, key="B")
    tol = default_tol(a.tol)
    if a.mode == "left-invariant":
        w = criteria.cw_left_invariant(B, tol)
        payload = _witness_payload(w, tol * (1.0 + float(np.linalg.norm(B, 2))))
        if a.oracle:
            s = criteria.random_search_witness(B, draws=a.draws, seed=a.seed)
            payload["oracle"] = {"found": s.found, "best": io.fmt(s.best), "seed": a.seed,
                                 "agrees": s.found == w.yes}
    else:
        w = criteria.cw_bi_invariant(B, tol)
        payload = _witness_payload(w, tol * (1.0 + float(np.linalg.norm(B, 2))))
    if w.yes:
        _require(payload["residuals"], *payload["residuals"])
    return payload


def cmd_from_derivation(a):
    data = io.load_derivation(a.data)
    if not isinstance(data, lie.DerivationData):
        raise io.SchemaError("from-derivation needs (lambda, omega, L[, c0]) without K, T")
    nf = lie.normalize_frame(data)
    spec = nf.spec()
    literal = criteria.uncorrected_profile_from_derivation(data)
    return {
        "spec": spec.to_dict(), "lambda": data.lam, "scale": nf.scale,
        "constraints": {k: io.residual(v, 1e-10) for k, v in data.residuals().items()},
        "commutator_term_norm": io.fmt(float(np.linalg.norm(
            criteria.corrected_profile_from_derivation(data) - literal))),
    }


def cmd_verify(a):
    names = None if a.suite == "all" else [s.strip() for s in a.suite.split(",")]
    unknown = [n for n in names or [] if n not in CHECKS]
    if unknown:
        raise io.SchemaError(f"unknown suite item(s): {', '.join(unknown)}; choose from {', '.join(CHECKS)}")
    t0 = time.perf_counter()
    results = run_suite(names, SuiteConfig(seed=a.seed))
    total = time.perf_counter() - t0
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.criterion:2d} {r.name} ({r.elapsed:.2f}s)",
              file=sys.stderr)
    print(f"suite wall-clock {total:.2f}s", file=sys.stderr)
    payload = {"seed": a.seed, "passed": all(r.passed for r in results),
               "checks": [r.to_dict(a.timing) for r in results]}
    if a.timing:
        payload["elapsed_s"] = round(total, 3)
    if not payload["passed"]:
        raise InvariantViolation("suite failed", payload)
    return payload


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pwlab", description="Homogeneous plane-wave toolkit")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        return sp

    def spec_arg(sp):
        sp.add_argument("--spec", required=True, help="plane-wave spec JSON")

    sp = add("metric", cmd_metric, "metric matrix at a point")
    spec_arg(sp)
    sp.add_argument("--point", required=True, help="v,x1,..,xn,u")
    for name, fn, h in (("curvature", cmd_curvature, "closed-form curvature at u"),
                        ("weyl", cmd_weyl, "Weyl profile at u")):
        sp = add(name, fn, h)
        spec_arg(sp)
        sp.add_argument("--u", type=float, required=True)
    sp = add("check-planewave", cmd_check_planewave, "finite-difference check of nabla_X R = 0")
    spec_arg(sp)
    sp.add_argument("--point", required=True)
    sp.add_argument("--h", type=float, default=1e-4)
    sp = add("check-confflat", cmd_check_confflat, "conformal flatness")
    spec_arg(sp)
    sp.add_argument("--tol", type=float)
    sp = add("convert-ba", cmd_convert_ba, "kind b to the conformally related kind a")
    spec_arg(sp)
    sp = add("homothety", cmd_homothety, "pullback under (v,x,u) -> (l^2 v, l x, u)")
    spec_arg(sp)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--point", required=True)
    sp = add("classify-element", cmd_classify_element, "canonical form of C in so(1,n+1)")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--tol", type=float)
    sp = add("isom", cmd_isom, "isometry algebra structure constants")
    spec_arg(sp)
    sp = add("conf", cmd_conf, "conformal algebra structure constants")
    spec_arg(sp)
    sp = add("normalize", cmd_normalize, "normalize raw bracket data to (F, B)")
    sp.add_argument("--data", required=True)
    sp = add("prolong", cmd_prolong, "first prolongation of a linear Lie algebra")
    sp.add_argument("--basis", required=True)
    sp = add("nomizu", cmd_nomizu, "Nomizu map and curvature of group data")
    sp.add_argument("--data", required=True)
    sp = add("cw", cmd_cw, "Lie group structures on Cahen-Wallach spaces")
    sp.add_argument("mode", choices=("left-invariant", "bi-invariant"))
    sp.add_argument("--B", required=True)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--oracle", action="store_true", help="also run the randomized search")
    sp.add_argument("--draws", type=int, default=100_000)
    sp = add("from-derivation", cmd_from_derivation, "plane-wave data of group brackets")
    sp.add_argument("--data", required=True)
    sp = add("verify", cmd_verify, "run the verification suite")
    sp.add_argument("--suite", default="all", help=f"all or comma list of: {', '.join(CHECKS)}")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--timing", action="store_true", help="include wall-clock times in the JSON")
    return p


def _error(kind: str, exc: Exception) -> dict:
    return {"error": {"type": kind, "exception": type(exc).__name__, "message": str(exc)}}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    first = next((x for x in argv if not x.startswith("-")), None)
    if first is not None and first not in SUBCOMMANDS:
        parser.print_usage(sys.stderr)
        print(f"pwlab: unknown subcommand {first!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    inputs = {k: getattr(args, k) for k in ("spec", "matrix", "data", "basis", "B") if getattr(args, k, None)}
    try:
        payload = args.func(args)
        code = EXIT_OK
    except InvariantViolation as exc:
        payload, code = exc.payload, EXIT_INVARIANT
        print(f"pwlab: {exc}", file=sys.stderr)
    except (io.SchemaError, pw.SpecError, lie.ConstraintError, lorentz.NotInAlgebraError,
            lorentz.AmbiguousSpectrumError, ValueError) as exc:
        print(io.dumps(_error("validation", exc)))
        print(f"pwlab: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DecompositionError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(io.dumps(_error("invariant", exc)))
        print(f"pwlab: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    try:
        digests = {k: _digest(v) for k, v in inputs.items()}
    except OSError:
        digests = {}
    report = {"command": args.command, "inputs": digests, "result": payload}
    print(io.dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
