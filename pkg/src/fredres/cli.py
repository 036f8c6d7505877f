"""Command-line interface: ``fredres invert | pole-order | ar analyze | ar simulate``."""
import argparse
import logging
import sys
import warnings

import numpy as np

from . import io
from .ar import (agreement, check_unit_root_config, granger_decomposition, reexpand_at_one)
from .closed_form import verify_annihilation, verify_nesting
from .conditions import check_conditions
from .config import AGREE_ATOL, rank_tol
from .errors import BudgetError, FredresError, ParseError, UnitRootConfigError
from .oracle import OracleConfig, cross_validate, default_radius, estimate_pole_order
from .quotient import DEFAULT_MAX_POLE_ORDER, factorize, laurent_inverse_sequential
from .subspace import rank_margin_warnings

logger = logging.getLogger("fredres")

EXIT_OK = 0
EXIT_STRICT = 5


def _emit(doc, path):
    text = io.dumps(doc)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tol(args, problem):
    if args.rank_tol is not None:
        return rank_tol(args.rank_tol)
    return rank_tol(problem.tolerances.get("rank_tol"))


def _oracle_cfg(problem, series, warns):
    o = problem.oracle
    if "r" in o:
        r = float(o["r"])
    else:
        r, w = default_radius(series)
        if w:
            warns.append(w)
    return OracleConfig(r=r, M=int(o.get("M", 256)))


def _series_of(problem):
    if problem.kind == "analytic_series":
        return problem.series
    return reexpand_at_one(problem.model)


def _chain_block(chain):
    nest = verify_nesting(chain.projectors, chain.dim)
    ann = verify_annihilation(chain.projectors, chain.d)
    return {
        "nesting": {"holds": all(nest), "per_step": nest},
        "annihilation": {"pass": bool(ann["pass"]), "max_residual": float(ann["max"])},
        "projector_ranks": [p.rank for p in chain.projectors],
    }


def _conditions_block(chain, tol, oracle_order=None):
    rep = check_conditions(chain, tol, oracle_order).to_dict()
    return _plain(rep)


def _plain(x):
    """Recursively coerce numpy scalars for JSON output."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return io.matrix_to_json(x) if x.ndim == 2 else [_plain(v) for v in x]
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def cmd_invert(args):
    problem = io.load_problem(args.input)
    if problem.kind != "analytic_series":
        raise ParseError("invert expects a problem of kind analytic_series")
    series = problem.series
    tol = _tol(args, problem)
    engines = ("sequential", "closed-form") if args.engine == "both" else (args.engine,)
    rng = np.random.default_rng(args.oblique_kernel) if args.oblique_kernel is not None else None
    oracle_check = args.oracle_check or args.strict
    warns = list(rank_margin_warnings(series.coeffs[0], tol, "A_0"))

    chain = factorize(series, max_pole_order=args.max_pole_order, tol=tol, rng=rng)
    warns.extend(chain.warnings)
    report = {
        "schema_version": io.SCHEMA_VERSION,
        "command": "invert",
        "config": {
            "input": str(args.input), "order": args.order, "engine": args.engine,
            "oracle_check": bool(oracle_check), "strict": bool(args.strict), "rank_tol": tol,
            "max_pole_order": args.max_pole_order, "oblique_kernel": args.oblique_kernel,
        },
        "pole_order": {"sequential": chain.d},
        "center": [series.center.real, series.center.imag],
    }
    verification = _chain_block(chain)
    verification["id_conditions"] = _conditions_block(chain, tol)
    status = {}
    psi = {}
    if oracle_check:
        cfg = _oracle_cfg(problem, series, warns)
        cv = cross_validate(series, args.order, cfg=cfg, tol=tol, max_pole_order=args.max_pole_order,
                            engines=engines, rng=np.random.default_rng(args.oblique_kernel)
                            if args.oblique_kernel is not None else None)
        warns.extend(w for w in cv.warnings if w not in warns)
        report["pole_order"].update(cv.pole_orders)
        for name, exp in cv.expansions.items():
            psi[name] = io.expansion_to_json(exp)
        verification["oracle"] = {
            "r": cfg.r, "M": cfg.M, "degrees": cv.degrees,
            "distances": cv.distances, "passes": cv.passes,
            "divergent_degrees": cv.divergent_degrees, "excess_norms": cv.oracle_excess,
        }
        for e in engines:
            if e in cv.errors:
                status[e] = "failed"
                continue
            ok = cv.pair_passes(e, "oracle")
            if e == "closed-form" and cv.closed_form_status != "verified":
                status[e] = "unverified"
            else:
                status[e] = "verified" if ok else "unverified"
        if cv.errors:
            report["errors"] = cv.errors
        if "closed-form" in engines:
            verification["closed_form_checks"] = _plain(cv.closed_form_checks)
        if len(engines) == 2 and "closed-form" in cv.expansions:
            verification["engines_agree"] = bool(cv.pair_passes("sequential", "closed-form"))
    else:
        from .closed_form import closed_form_inverse

        if "sequential" in engines:
            psi["sequential"] = io.expansion_to_json(laurent_inverse_sequential(chain, args.order))
            status["sequential"] = "not-checked"
        if "closed-form" in engines:
            try:
                cf = closed_form_inverse(chain, args.order, tol)
                psi["closed-form"] = io.expansion_to_json(cf.psi)
                status["closed-form"] = cf.status
                verification["closed_form_checks"] = _plain(cf.checks)
                if "sequential" in psi:
                    seq = laurent_inverse_sequential(chain, args.order)
                    gaps = [float(np.linalg.norm(seq.psi(j) - cf.psi.psi(j))) for j in seq.degrees]
                    verification["engine_distances"] = gaps
                    verification["engines_agree"] = bool(max(gaps) <= AGREE_ATOL)
            except BudgetError:
                raise
            except FredresError as exc:
                status["closed-form"] = "failed"
                report["errors"] = {"closed-form": f"{type(exc).__name__}: {exc}"}
    report["psi"] = psi
    report["status"] = status
    report["verification"] = verification
    report["warnings"] = warns
    _emit(_plain(report), args.output)
    if args.strict and any(v != "verified" for v in status.values()):
        print(f"strict: unverified engines {sorted(k for k, v in status.items() if v != 'verified')}",
              file=sys.stderr)
        return EXIT_STRICT
    return EXIT_OK


def cmd_pole_order(args):
    problem = io.load_problem(args.input)
    series = _series_of(problem)
    tol = _tol(args, problem)
    chain = factorize(series, max_pole_order=args.max_order, tol=tol)
    warns = list(chain.warnings)
    try:
        est = estimate_pole_order(series, max_order=max(args.max_order, chain.d + 1), details=True)
        oracle = {"slope_order": est.order, "slope": est.slope, "contour_order": est.contour_order,
                  "agree": est.agree}
    except FredresError as exc:
        oracle = {"error": f"{type(exc).__name__}: {exc}"}
    report = {
        "schema_version": io.SCHEMA_VERSION,
        "command": "pole-order",
        "config": {"input": str(args.input), "max_order": args.max_order, "rank_tol": tol,
                   "kind": problem.kind},
        "pole_order": {"sequential": chain.d, "oracle": oracle},
        "verification": _chain_block(chain),
        "warnings": warns,
    }
    print(chain.d)
    if args.output:
        _emit(_plain(report), args.output)
    return EXIT_OK


def _load_model(args):
    problem = io.load_problem(args.model)
    if problem.kind != "ar_model":
        raise ParseError("ar commands expect a problem of kind ar_model")
    return problem.model


def _granger_json(rep):
    return {
        "d": rep.d,
        "diagnosis": _plain(rep.diagnosis.to_dict()),
        "principal": {str(-m): io.matrix_to_json(rep.laurent.psi(-m)) for m in range(1, rep.d + 1)},
        "long_run": io.matrix_to_json(rep.long_run),
        "phi": io.stack_to_json(rep.phi),
        "phi_secondary": {"status": rep.phi_secondary_status, "max_diff": rep.phi_secondary_max_diff},
        "filter_residual": rep.filter_residual,
        "tail_norm": rep.tail_norm,
        "tail_ok": rep.tail_ok,
        "decay_ratio": rep.decay_ratio,
        "quotient_checks": _plain(rep.quotient_checks),
        "notes": rep.notes,
    }


def _violating(exc):
    diag = exc.diagnosis
    roots = ", ".join(f"{z.real:.6g}{z.imag:+.6g}j" for z in diag.roots)
    print(f"violating configuration: roots of det A(z) = [{roots}]", file=sys.stderr)
    return exc.exit_code


def cmd_ar(args):
    model = _load_model(args)
    eta = model.eta if args.eta is None else args.eta
    diag = check_unit_root_config(model, eta)
    if diag.kind == "violating":
        return _violating(UnitRootConfigError("violating", diag))
    rep = granger_decomposition(model, args.order, eta=eta, tol=args.rank_tol)
    if args.action == "analyze":
        doc = {
            "schema_version": io.SCHEMA_VERSION,
            "command": "ar analyze",
            "config": {"model": str(args.model), "order": args.order, "eta": eta},
            "granger": _granger_json(rep),
            "warnings": [],
        }
        _emit(_plain(doc), args.output)
        return EXIT_OK
    res = agreement(rep, model, args.steps, args.seed)
    t = np.arange(1, args.steps + 1)
    cols = {}
    for i in range(model.dim):
        cols[f"x{i + 1}"] = res["x_direct"][:, i]
    for i in range(model.dim):
        cols[f"x{i + 1}_rep"] = res["x_representation"][:, i]
    traj = io.trajectory_columns(t, cols)
    if args.output:
        io.write_trajectory(args.output, traj, args.format)
    metrics = {
        "schema_version": io.SCHEMA_VERSION,
        "command": "ar simulate",
        "config": {"model": str(args.model), "order": args.order, "steps": args.steps,
                   "seed": args.seed, "eta": eta, "format": args.format},
        "d": rep.d,
        "agreement": {"max_delta_gap": res["max_delta_gap"], "burn_in": res["burn_in"],
                      "difference_order": rep.d},
        "trajectory": str(args.output) if args.output else None,
    }
    sys.stdout.write(io.dumps(_plain(metrics)))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="fredres", description="Laurent inversion of analytic matrix functions.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    inv = sub.add_parser("invert", help="Laurent coefficients of A(z)^-1")
    inv.add_argument("--input", required=True)
    inv.add_argument("--order", type=int, default=5)
    inv.add_argument("--engine", choices=("sequential", "closed-form", "both"), default="both")
    inv.add_argument("--oracle-check", action="store_true")
    inv.add_argument("--strict", action="store_true")
    inv.add_argument("--rank-tol", type=float)
    inv.add_argument("--max-pole-order", type=int, default=DEFAULT_MAX_POLE_ORDER)
    inv.add_argument("--oblique-kernel", type=int, metavar="SEED",
                     help="use random oblique projector kernels drawn from SEED")
    inv.add_argument("--output")
    inv.set_defaults(func=cmd_invert)

    po = sub.add_parser("pole-order", help="pole order at the expansion point")
    po.add_argument("--input", required=True)
    po.add_argument("--max-order", type=int, default=DEFAULT_MAX_POLE_ORDER)
    po.add_argument("--rank-tol", type=float)
    po.add_argument("--output")
    po.set_defaults(func=cmd_pole_order)

    ar = sub.add_parser("ar", help="Granger-Johansen analysis of AR models")
    ar.add_argument("action", choices=("analyze", "simulate"))
    ar.add_argument("--model", required=True)
    ar.add_argument("--order", type=int, default=40)
    ar.add_argument("--steps", type=int, default=500)
    ar.add_argument("--seed", type=int, default=0)
    ar.add_argument("--eta", type=float)
    ar.add_argument("--rank-tol", type=float)
    ar.add_argument("--format", choices=("json", "csv"), default="json")
    ar.add_argument("--output")
    ar.set_defaults(func=cmd_ar)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except UnitRootConfigError as exc:
        return _violating(exc)
    except FredresError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
