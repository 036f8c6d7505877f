"""Problem and report files (UTF-8 JSON).

Complex numbers are always two-element ``[re, im]`` arrays, matrices are
nested row lists of such pairs.  Floats are written with ``repr`` precision so
that parse -> serialize -> parse is bit-exact.
"""
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .ar import ARModel, DEFAULT_ETA
from .errors import ParseError
from .series import TaylorSeries

SCHEMA_VERSION = 1
KINDS = ("analytic_series", "ar_model")


@dataclass
class Problem:
    kind: str
    series: TaylorSeries = None
    model: ARModel = None
    tolerances: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.series.dim if self.series is not None else self.model.dim


def _fail(path, msg):
    raise ParseError(f"{path}: {msg}")


def _complex(v, path):
    if (not isinstance(v, list) or len(v) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
        _fail(path, f"expected a [re, im] pair, got {json.dumps(v)[:40]}")
    re, im = float(v[0]), float(v[1])
    if not (math.isfinite(re) and math.isfinite(im)):
        _fail(path, "non-finite number")
    return complex(re, im)


def _matrix(v, n, path):
    if not isinstance(v, list) or len(v) != n:
        _fail(path, f"expected {n} rows")
    out = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(v):
        if not isinstance(row, list) or len(row) != n:
            _fail(f"{path}[{i}]", f"ragged row: expected {n} entries")
        for j, x in enumerate(row):
            out[i, j] = _complex(x, f"{path}[{i}][{j}]")
    return out


def _stack(v, n, path):
    if not isinstance(v, list) or not v:
        _fail(path, "expected a non-empty list of matrices")
    return np.stack([_matrix(m, n, f"{path}[{k}]") for k, m in enumerate(v)])


def _pair(z):
    return [float(z.real), float(z.imag)]


def matrix_to_json(m):
    return [[_pair(x) for x in row] for row in np.asarray(m)]


def stack_to_json(c):
    return [matrix_to_json(m) for m in c]


def problem_from_dict(doc):
    if not isinstance(doc, dict):
        _fail("$", "top level must be an object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        _fail("$.schema_version", f"unsupported schema version {doc.get('schema_version')!r}")
    kind = doc.get("kind")
    if kind not in KINDS:
        _fail("$.kind", f"must be one of {KINDS}")
    n = doc.get("dim")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        _fail("$.dim", "must be a positive integer")
    coeffs = _stack(doc.get("coeffs"), n, "$.coeffs")
    tolerances = doc.get("tolerances", {}) or {}
    oracle = doc.get("oracle", {}) or {}
    if not isinstance(tolerances, dict) or not isinstance(oracle, dict):
        _fail("$", "tolerances and oracle must be objects")
    if kind == "analytic_series":
        center = _complex(doc.get("center", [0.0, 0.0]), "$.center")
        radius = doc.get("validity_radius")
        if radius is not None and not (isinstance(radius, (int, float)) and radius > 0):
            _fail("$.validity_radius", "must be a positive number")
        series = TaylorSeries(coeffs, center=center, exact=bool(doc.get("polynomial", False)),
                              radius=None if radius is None else float(radius))
        return Problem(kind, series=series, tolerances=tolerances, oracle=oracle)
    cov = doc.get("covariance")
    cov = None if cov is None else _matrix(cov, n, "$.covariance")
    eta = doc.get("eta", DEFAULT_ETA)
    try:
        model = ARModel(coeffs, covariance=cov, eta=float(eta))
    except ValueError as exc:
        raise ParseError(f"$: invalid AR model: {exc}") from exc
    return Problem(kind, model=model, tolerances=tolerances, oracle=oracle)


def parse_problem(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno} "
                         f"(char {exc.pos}): {exc.msg}") from exc
    return problem_from_dict(doc)


def load_problem(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return parse_problem(text)


def problem_to_dict(p):
    doc = {"schema_version": SCHEMA_VERSION, "kind": p.kind, "dim": p.dim}
    if p.kind == "analytic_series":
        s = p.series
        doc["center"] = _pair(s.center)
        doc["coeffs"] = stack_to_json(s.coeffs)
        doc["polynomial"] = bool(s.exact)
        if s.radius is not None:
            doc["validity_radius"] = s.radius
    else:
        m = p.model
        doc["coeffs"] = stack_to_json(m.coeffs)
        doc["covariance"] = matrix_to_json(m.covariance)
        doc["eta"] = m.eta
    if p.tolerances:
        doc["tolerances"] = dict(p.tolerances)
    if p.oracle:
        doc["oracle"] = dict(p.oracle)
    return doc


def dumps(doc):
    """Canonical JSON: sorted keys, fixed indentation, repr floats."""
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def series_problem(series, **extra):
    return Problem("analytic_series", series=series, **extra)


def ar_problem(model, **extra):
    return Problem("ar_model", model=model, **extra)


def expansion_to_json(exp):
    return {
        "pole_order": exp.pole_order,
        "degrees": list(exp.degrees),
        "coeffs": stack_to_json(exp.coeffs),
    }


def trajectory_columns(t_index, columns):
    """Columnar view; imaginary parts are emitted only when nonzero."""
    out = {"t": [int(t) for t in t_index]}
    for name, vals in columns.items():
        vals = np.asarray(vals)
        out[name] = [float(v) for v in vals.real]
        if np.any(vals.imag != 0):
            out[name + "_im"] = [float(v) for v in vals.imag]
    return out


def write_trajectory(path, cols, fmt="json"):
    if fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps(cols))
        return
    import csv

    names = list(cols)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in zip(*(cols[k] for k in names)):
            w.writerow([repr(x) for x in row])
