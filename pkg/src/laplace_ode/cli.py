"""Command-line front end.

Commands: eval, verify, report, indicator, zeros, residues, symmetry.
Exit codes: 0 ok, 1 verification failure, 2 input error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .analysis import (indicator_empirical, nevanlinna_estimates,
                       nevanlinna_predicted, zero_count_sector)
from .errors import NumericError, SpecError
from .problem import Problem, sample_points
from .scalars import GaussRational
from .solutions import check_solution, symmetry_check

TOL_MIN, TOL_MAX = 1e-14, 1e-4


def _fmt(x) -> str:
    return "%.17g" % x


def _cnum(s: str) -> complex:
    s = s.strip().replace("i", "j")
    if "," in s:
        re, im = s.split(",")
        return complex(float(re), float(im))
    try:
        return complex(s)
    except ValueError as exc:
        raise SpecError("cannot parse complex number %r" % s) from exc


def _jsonable(x):
    if isinstance(x, complex):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, GaussRational):
        return {"re": str(x.re), "im": str(x.im)} if x.im else str(x.re)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return x
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    return x


def _emit(args, payload, csv_rows=None, csv_header=None):
    if args.format == "csv" and csv_rows is not None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(csv_header)
        for row in csv_rows:
            writer.writerow([_fmt(v) if isinstance(v, float) else v
                             for v in row])
        text = buf.getvalue()
    else:
        text = json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_problem(args) -> Problem:
    if not args.spec:
        raise SpecError("--spec is required")
    return Problem.from_file(args.spec)


def _zlist(args, default=None):
    if args.z:
        return [_cnum(s) for s in args.z]
    return default


def _spec_echo(problem: Problem):
    spec = problem.raw_spec
    return {
        "n": spec.n,
        "a": [_jsonable(complex(c)) for c in spec.a],
        "b": [_jsonable(complex(c)) for c in spec.b],
        "normalization_scale": _jsonable(complex(problem.scale)),
        "q": problem.indices.q,
        "p": problem.indices.p,
        "rho_max": str(problem.indices.rho_max),
    }


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------

def cmd_eval(args) -> int:
    problem = _load_problem(args)
    zs = _zlist(args)
    if not zs:
        raise SpecError("eval requires at least one --z value")
    js = [int(j) for j in (args.j or ["0"])]
    lam = problem.lam(args.nu)
    rows = []
    payload = []
    for z in zs:
        results = lam.eval_multi(z, js, args.tol)
        for j, qr in zip(js, results):
            val = qr.value if qr.log_scale < 700 else complex("nan")
            rows.append([z.real, z.imag, j, qr.mantissa.real, qr.mantissa.imag,
                         qr.log_scale, qr.est_error, val.real, val.imag])
            payload.append({"z": z, "j": j,
                            "mantissa": qr.mantissa,
                            "log_scale": qr.log_scale,
                            "est_error": qr.est_error,
                            "value": val,
                            "nodes": qr.nodes_used,
                            "flags": list(qr.flags)})
    _emit(args, {"command": "eval", "version": __version__,
                 "spec": _spec_echo(problem), "tol": args.tol,
                 "results": payload},
          rows, ["z_re", "z_im", "j", "mantissa_re", "mantissa_im",
                 "log_scale", "est_error", "value_re", "value_im"])
    return 0


def cmd_verify(args) -> int:
    problem = _load_problem(args)
    pts = _zlist(args, sample_points(20, 3.0))
    lam = problem.lam(args.nu)
    report = check_solution(problem.spec, lam, pts, args.tol)
    rows = [[z.real, z.imag, r] for z, r in zip(report["points"],
                                                report["residuals"])]
    payload = {"command": "verify", "version": __version__,
               "spec": _spec_echo(problem), "tol": args.tol,
               "residual_tol": args.residual_tol,
               "max_residual": report["max_residual"],
               "points": report["points"],
               "residuals": report["residuals"]}
    _emit(args, payload, rows, ["z_re", "z_im", "rel_residual"])
    return 0 if report["max_residual"] <= args.residual_tol else 1


def cmd_residues(args) -> int:
    problem = _load_problem(args)
    kd = problem.kernel
    poles = []
    for p in kd.poles:
        poles.append({
            "location": complex(p.location),
            "multiplicity": p.multiplicity,
            "lambda": complex(p.lam),
            "lambda_integer": p.lam_integer,
            "essential": p.is_essential,
            "singular": p.is_singular,
            "exponent": complex(p.exponent),
        })
    sols = []
    for rs in problem.residues(args.tol):
        entry = {"pole": complex(rs.pole), "form": rs.form,
                 "order_of_q0q1": rs.order,
                 "growth_order": str(rs.growth_order)}
        if rs.poly is not None and not rs.poly.is_zero:
            entry["poly"] = [_jsonable(c) for c in rs.poly.coeffs]
        sols.append(entry)
    payload = {"command": "residues", "version": __version__,
               "spec": _spec_echo(problem),
               "branch_note": getattr(problem.lam(0), "branch_note", None),
               "residue_sum": complex(kd.residue_sum_complex),
               "residue_sum_integer": kd.residue_sum_integer,
               "single_valued_outside": kd.single_valued_outside,
               "singular_radius": kd.singular_radius,
               "poles": poles, "residue_solutions": sols}
    _emit(args, payload)
    return 0


def cmd_symmetry(args) -> int:
    problem = _load_problem(args)
    ss = problem.symmetry(args.tol)
    pts = _zlist(args, sample_points(5, 2.0))
    deviation = symmetry_check(problem.kernel, pts, args.tol)
    payload = {"command": "symmetry", "version": __version__,
               "spec": _spec_echo(problem),
               "classification": ss.classification,
               "circle_radius": ss.radius,
               "check_points": pts,
               "max_relative_deviation": deviation}
    _emit(args, payload)
    return 0


def cmd_indicator(args) -> int:
    problem = _load_problem(args)
    thetas = _theta_grid(args)
    radii = [float(r) for r in (args.radii or "10,20,40").split(",")]
    lam = problem.lam(args.nu)
    prof = indicator_empirical(lam, problem.rho_max, thetas, radii,
                               tol=args.tol, case=problem.indicator_case)
    rows = []
    for i, th in enumerate(prof.thetas):
        for k, r in enumerate(prof.radii):
            rows.append([th, r, prof.h_emp[i, k], prof.h_pred[i],
                         abs(prof.h_emp[i, k] - prof.h_pred[i])])
    nev = nevanlinna_estimates(prof)
    payload = {"command": "indicator", "version": __version__,
               "spec": _spec_echo(problem), "rho": prof.rho,
               "case": prof.case,
               "thetas": list(prof.thetas), "radii": prof.radii,
               "h_emp": prof.h_emp, "h_pred": prof.h_pred,
               "deviation_per_radius": prof.deviations,
               "nevanlinna": nev}
    _emit(args, payload, rows, ["theta", "r", "h_emp", "h_pred", "deviation"])
    return 0


def cmd_zeros(args) -> int:
    problem = _load_problem(args)
    if not args.sector:
        raise SpecError("zeros requires --sector theta1,theta2,r")
    lam = problem.lam(args.nu)
    results = []
    rows = []
    for sec in args.sector:
        th1, th2, r = (float(x) for x in sec.split(","))
        zc = zero_count_sector(lam, (th1, th2, r), args.tol)
        results.append({"sector": [th1, th2, r], "count": zc.count,
                        "raw": zc.raw, "confidence": zc.confidence,
                        "reliable": zc.reliable, "samples": zc.samples})
        rows.append([th1, th2, r, zc.count, zc.confidence])
    payload = {"command": "zeros", "version": __version__,
               "spec": _spec_echo(problem), "results": results}
    _emit(args, payload, rows, ["theta1", "theta2", "r", "count", "confidence"])
    return 0


def cmd_report(args) -> int:
    problem = _load_problem(args)
    kd = problem.kernel
    payload = {"command": "report", "version": __version__,
               "spec": _spec_echo(problem), "tol": args.tol,
               "branch_note": getattr(problem.lam(0), "branch_note", None)}
    payload["order_catalog"] = [
        {"order": str(o), "status": st, "condition": cond}
        for o, st, cond in problem.catalog.entries]
    payload["poles"] = [{
        "location": complex(p.location), "multiplicity": p.multiplicity,
        "lambda": complex(p.lam), "lambda_integer": p.lam_integer,
        "essential": p.is_essential} for p in kd.poles]
    payload["residue_sum"] = complex(kd.residue_sum_complex)
    payload["residue_sum_integer"] = kd.residue_sum_integer
    sols = []
    for rs in problem.residues(args.tol):
        entry = {"pole": complex(rs.pole), "form": rs.form,
                 "growth_order": str(rs.growth_order)}
        if rs.poly is not None and not rs.poly.is_zero:
            entry["poly"] = [_jsonable(c) for c in rs.poly.coeffs]
        sols.append(entry)
    payload["residue_solutions"] = sols
    failures = {}
    try:
        ss = problem.symmetry(args.tol)
        pts = sample_points(5, 2.0)
        payload["symmetry"] = {
            "classification": ss.classification,
            "max_relative_deviation": symmetry_check(kd, pts, args.tol)}
    except NumericError as exc:
        failures["symmetry"] = str(exc)
    thetas = _theta_grid(args)
    radii = [float(r) for r in (args.radii or "10,20").split(",")]
    try:
        prof = indicator_empirical(problem.lam(0), problem.rho_max, thetas,
                                   radii, tol=args.tol,
                                   case=problem.indicator_case)
        payload["indicator"] = {
            "rho": prof.rho, "case": prof.case,
            "thetas": list(prof.thetas), "radii": prof.radii,
            "h_emp": prof.h_emp, "h_pred": prof.h_pred,
            "deviation_per_radius": prof.deviations}
        payload["nevanlinna"] = {
            "grid": nevanlinna_estimates(prof),
            "predicted_exact": nevanlinna_predicted(problem.rho_max,
                                                    problem.indicator_case)}
    except NumericError as exc:
        failures["indicator"] = str(exc)
    if not args.no_zeros:
        try:
            zc = zero_count_sector(problem.lam(0),
                                   (-math.pi, math.pi, args.zero_radius),
                                   args.tol)
            payload["zero_count_disk"] = {
                "radius": args.zero_radius, "count": zc.count,
                "raw": zc.raw, "confidence": zc.confidence,
                "reliable": zc.reliable}
        except NumericError as exc:
            failures["zeros"] = str(exc)
    payload["partial_failures"] = failures
    _emit(args, payload)
    return 0 if len(failures) < 4 else 3


def _theta_grid(args):
    spec = args.theta_grid or "25"
    if ":" in spec:
        lo, hi, n = spec.split(":")
        return np.linspace(float(lo), float(hi), int(n))
    n = int(spec)
    return np.linspace(-0.9 * math.pi, 0.9 * math.pi, n)


# ----------------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="laplace-ode",
        description="Contour-integral solutions of linear ODEs with "
                    "degree-one polynomial coefficients")
    sub = ap.add_subparsers(dest="command", required=True)
    commands = {
        "eval": cmd_eval, "verify": cmd_verify, "report": cmd_report,
        "indicator": cmd_indicator, "zeros": cmd_zeros,
        "residues": cmd_residues, "symmetry": cmd_symmetry,
    }
    for name, fn in commands.items():
        p = sub.add_parser(name)
        p.set_defaults(fn=fn)
        p.add_argument("--spec", required=True, help="path to the ODE spec JSON")
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--z", action="append",
                       help="complex point, e.g. 1.5, 2j, 1+2i, or re,im")
        p.add_argument("--theta-grid", dest="theta_grid",
                       help="N or lo:hi:N angle grid")
        p.add_argument("--radii", help="comma-separated radii")
        p.add_argument("--format", choices=("csv", "json"), default="json")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--nu", type=int, default=0,
                       help="index of the distinguished solution")
        p.add_argument("--j", action="append",
                       help="derivative order(s) for eval")
        p.add_argument("--sector", action="append",
                       help="theta1,theta2,r sector for zeros")
        p.add_argument("--residual-tol", dest="residual_tol", type=float,
                       default=1e-8)
        p.add_argument("--no-zeros", dest="no_zeros", action="store_true")
        p.add_argument("--zero-radius", dest="zero_radius", type=float,
                       default=4.0)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if not (TOL_MIN <= args.tol <= TOL_MAX):
            raise SpecError("tol must lie in [%g, %g]" % (TOL_MIN, TOL_MAX))
        return args.fn(args)
    except (SpecError, FileNotFoundError, ValueError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 2
    except NumericError as exc:
        print("numeric failure: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
