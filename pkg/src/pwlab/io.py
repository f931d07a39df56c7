"""JSON input validation and deterministic serialization."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .lie import DerivationData, RawBrackets
from .planewave import PlaneWaveSpec, SpecError, SpacetimePoint


class SchemaError(ValueError):
    pass


def read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc


def _matrix(value, name: str, n: int | None = None) -> np.ndarray:
    try:
        M = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{name} must be a numeric matrix") from exc
    if M.ndim != 2 or (n is not None and M.shape != (n, n)):
        want = f"{n}x{n}" if n is not None else "a 2-d"
        raise SchemaError(f"{name} must be {want} matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise SchemaError(f"{name} has non-finite entries")
    return M


def parse_spec(obj) -> PlaneWaveSpec:
    if not isinstance(obj, dict):
        raise SchemaError("spec must be a JSON object with keys kind, n, F, B")
    missing = [k for k in ("kind", "n", "F", "B") if k not in obj]
    if missing:
        raise SchemaError(f"spec is missing keys: {', '.join(missing)}")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError(f"n must be a positive integer, got {n!r}")
    if obj["kind"] not in ("a", "b"):
        raise SchemaError(f"kind must be \"a\" or \"b\", got {obj['kind']!r}")
    return PlaneWaveSpec(obj["kind"], n, _matrix(obj["F"], "F", n), _matrix(obj["B"], "B", n))


def load_spec(path) -> PlaneWaveSpec:
    return parse_spec(read_json(path))


def load_matrix(path, key: str = "matrix") -> np.ndarray:
    obj = read_json(path)
    if isinstance(obj, dict):
        if key not in obj:
            raise SchemaError(f"expected key {key!r} in {path}")
        obj = obj[key]
    return _matrix(obj, key)


def parse_derivation(obj):
    """DerivationData, or RawBrackets when K and T are given."""
    if not isinstance(obj, dict):
        raise SchemaError("derivation data must be a JSON object")
    lam = obj.get("lambda", obj.get("lam"))
    if lam is None or not isinstance(lam, (int, float)) or isinstance(lam, bool) or not math.isfinite(lam):
        raise SchemaError("derivation data needs a finite numeric 'lambda'")
    if "L" not in obj:
        raise SchemaError("derivation data needs 'L'")
    L = _matrix(obj["L"], "L")
    n = L.shape[0]
    omega = _matrix(obj["omega"], "omega", n) if "omega" in obj else np.zeros((n, n))
    if "K" in obj or "T" in obj:
        if not ("K" in obj and "T" in obj):
            raise SchemaError("raw brackets need both 'K' and 'T'")
        return RawBrackets(lam, omega, L, _matrix(obj["K"], "K", n), _matrix(obj["T"], "T", n))
    c0 = _matrix(obj["c0"], "c0", n) if "c0" in obj else None
    return DerivationData(lam, omega, L, c0)


def load_derivation(path):
    return parse_derivation(read_json(path))


def load_basis(path) -> list[np.ndarray]:
    obj = read_json(path)
    if isinstance(obj, dict):
        obj = obj.get("basis")
    if not isinstance(obj, list) or not obj:
        raise SchemaError("basis file must hold a non-empty list of matrices (or {\"basis\": [...]})")
    mats = [_matrix(M, f"basis[{i}]") for i, M in enumerate(obj)]
    if len({M.shape for M in mats}) != 1 or mats[0].shape[0] != mats[0].shape[1]:
        raise SchemaError("basis matrices must be square and of equal size")
    return mats


def parse_point(text: str, n: int) -> SpacetimePoint:
    try:
        vals = [float(s) for s in text.split(",")]
    except ValueError as exc:
        raise SchemaError(f"point must be comma-separated numbers, got {text!r}") from exc
    if len(vals) != n + 2:
        raise SchemaError(f"point needs {n + 2} coordinates (v, x1..x{n}, u), got {len(vals)}")
    return SpacetimePoint.from_array(vals)


def to_jsonable(obj):
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return 0.0 if x == 0.0 else x  # no negative zero
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj


def dumps(payload) -> str:
    """Deterministic JSON; floats use the shortest round-trip representation."""
    return json.dumps(to_jsonable(payload), indent=2, ensure_ascii=False)


def fmt(x: float) -> str:
    return f"{x:.2e}"


def residual(value: float, tol: float) -> dict:
    """A residual together with the tolerance it was checked against."""
    return {"value": fmt(value), "tol": fmt(tol), "pass": bool(value <= tol)}


__all__ = [
    "SchemaError", "SpecError", "read_json", "parse_spec", "load_spec", "load_matrix",
    "parse_derivation", "load_derivation", "load_basis", "parse_point", "to_jsonable",
    "dumps", "fmt", "residual",
]
