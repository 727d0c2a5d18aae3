"""Solution families: distinguished contour solutions, residue solutions,
rotational symmetry sums, substitution checks, independence tests.

Contours run counterclockwise (incoming ray below, outgoing above), so the
sum of the distinguished solutions over all sectors equals the positively
oriented circle integral (1/2 pi i) * closed integral of phi e^(-z t) dt,
i.e. plus the sum of the residues of the kernel.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .contour import (DEFAULT_TOL, QuadResult, circle_eval_multi,
                      combine_linear, laplace_eval_multi, plan_contour,
                      qr_zero)
from .errors import ResidueError
from .kernel import KernelData, KernelPole
from .odespec import OdeSpec
from .poly import Poly
from .scalars import GaussRational, is_exact
from .series import (poly_series, series_binomial, series_exp, series_mul,
                     series_trim)


# ----------------------------------------------------------------------------
# solution handles
# ----------------------------------------------------------------------------

@dataclass
class SolutionHandle:
    """Evaluator for one solution; eval(z, j, tol) returns the j-th
    derivative as a QuadResult."""

    kind: str                       # "contour" | "residue" | "closed_form" | "sum"
    label: str
    _multi: object = field(repr=False)   # callable(z, js, tol) -> [QuadResult]

    def eval(self, z, j: int = 0, tol: float = DEFAULT_TOL) -> QuadResult:
        return self._multi(complex(z), [j], tol)[0]

    def eval_multi(self, z, js, tol: float = DEFAULT_TOL):
        return self._multi(complex(z), list(js), tol)

    def value(self, z, tol: float = DEFAULT_TOL) -> complex:
        return self.eval(z, 0, tol).value


def lambda_solution(kd: KernelData, nu: int) -> SolutionHandle:
    """The nu-th distinguished contour solution (nu = 0 is the principal one).

    Each evaluation re-plans the contour for its z (radius and admissible
    ray angles), which keeps the path maximum of the integrand close to the
    result magnitude; by the contour-independence property this does not
    change the value.
    """
    if not 0 <= nu <= kd.m:
        raise ValueError("nu must lie in [0, %d]" % kd.m)

    def multi(z, js, tol):
        c = plan_contour(kd, nu, z, tol)
        return laplace_eval_multi(kd, c, z, js, tol)

    h = SolutionHandle(kind="contour", label="Lambda_%d" % nu, _multi=multi)
    if kd.poles and not kd.is_single_valued:
        # deterministic branch choice for many-valued kernels
        h.branch_note = ("log(t - t_nu) initialized with principal arguments "
                         "at the far end of the incoming ray and continued "
                         "along the contour")
    return h


def closed_form_solution(poly: Poly, exp_factor=GaussRational(0),
                         label: str = "closed_form") -> SolutionHandle:
    """Handle for P(z) * e^(c z); derivatives are exact polynomials."""
    c = exp_factor

    derivs = [poly]

    def dpoly(j):
        while len(derivs) <= j:
            p = derivs[-1]
            derivs.append(p * c + p.derivative())
        return derivs[j]

    def multi(z, js, tol):
        out = []
        cz = complex(c) * z
        scale = cz.real
        phase = cmath.exp(1j * cz.imag)
        for j in js:
            val = complex(dpoly(j)(z)) * phase
            out.append(QuadResult(mantissa=val, log_scale=scale,
                                  est_error=0.0, nodes_used=0))
        return out

    h = SolutionHandle(kind="closed_form", label=label, _multi=multi)
    h.poly = poly
    h.exp_factor = c
    return h


def parse_closed_form(doc: dict, label: str = "closed_form") -> SolutionHandle:
    """Closed-form JSON {"poly": [c_0..c_d], "exp_factor": c}."""
    from .odespec import _scalar_from_json
    coeffs = [_scalar_from_json(v, "poly[%d]" % k)
              for k, v in enumerate(doc.get("poly", []))]
    expf = _scalar_from_json(doc.get("exp_factor", 0), "exp_factor")
    return closed_form_solution(Poly(coeffs), expf, label)


# ----------------------------------------------------------------------------
# residue solutions
# ----------------------------------------------------------------------------

@dataclass
class ResidueSolution:
    """res at t0 of [phi(t) e^(-z t)], classified per its pole structure."""

    pole: object                    # location (exact or complex)
    lam: object                     # residue of Q0/Q1 there
    order: int                      # actual pole order of Q0/Q1 at t0
    form: str                       # "polynomial" | "exp_times_entire" | "identically_zero"
    handle: SolutionHandle
    poly: Poly = None               # exact polynomial factor when applicable
    exp_scale: object = None        # w = exp(exp_scale) * e^(-t0 z) * poly(z)
    growth_order: object = None     # rational order bound

    @property
    def pole_complex(self) -> complex:
        return complex(self.pole)


def _find_pole(kd: KernelData, pole) -> KernelPole:
    pc = complex(pole)
    for p in kd.poles:
        if abs(p.location_complex - pc) <= 1e-6 * (1.0 + abs(pc)):
            return p
    raise ResidueError("%r is not a singularity of the kernel" % (pole,))


def _regular_factor_series(kd: KernelData, pole: KernelPole, order: int):
    """Taylor series about the pole of phi with the (t - t0) power removed.

    Returns (exact, log_scale, coeffs): the factor is
    exp(log_scale) * sum coeffs[k] (t - t0)^k.
    """
    t0 = pole.location
    exact = kd.exact and pole.exact
    others = [p for p in kd.poles if p is not pole]
    for p in others:
        if exact and (p.lam_integer is None or not p.exact):
            exact = False
    if not exact:
        t0 = complex(t0)

    # exp(R0): split off the constant R0(t0)
    r0 = kd.r0 if exact else kd.r0.to_complex()
    r0_series = poly_series(r0, t0, order)
    log_scale = r0_series[0]
    r0_series[0] = GaussRational(0) if exact else 0j
    series = series_exp(r0_series, order)

    for p in others:
        d = (p.location - t0) * (GaussRational(-1) if exact else -1.0)
        # (t - t_nu) = (d + u) with u = t - t0
        e = p.exponent if exact else p.exponent_complex
        ei = p.lam_integer
        if ei is not None:
            e_int = -(ei + p.multiplicity)
            const = (d ** e_int) if exact else complex(d) ** e_int
        else:
            const = complex(d) ** complex(e)
            exact = False
        inv_d = (GaussRational(1) / d) if is_exact(d) else 1.0 / complex(d)
        u_over_d = [GaussRational(0) if is_exact(d) else 0j, inv_d]
        series = series_mul(series, series_binomial(e, u_over_d, order), order)
        series = [c * const for c in series]
        if not p.r_poly.is_zero:
            # R_nu(1/(d+u)) = R_nu(x0 (1 + u/d)^-1); expand and split constant
            x_series = [c * inv_d for c in
                        series_binomial(-1 if is_exact(d) else -1.0,
                                        u_over_d, order)]
            acc = series_trim([GaussRational(0) if exact else 0j], order)
            xp = series_trim([GaussRational(1) if exact else 1.0 + 0j], order)
            for ck in p.r_poly.coeffs[1:]:
                xp = series_mul(xp, x_series, order)
                acc = [ai + ck * xi for ai, xi in zip(acc, xp)]
            log_scale = log_scale + acc[0]
            acc[0] = GaussRational(0) if exact else 0j
            series = series_mul(series, series_exp(acc, order), order)
    return exact, log_scale, series_trim(series, order)


def residue_solution(kd: KernelData, pole, tol: float = DEFAULT_TOL) -> ResidueSolution:
    """Solution res_{t0}[phi(t) e^(-z t)].

    Requires an integer residue at the pole.  Non-essential singularities
    yield exact polynomials times e^(-t0 z) (via series arithmetic, exact
    when the kernel is); essential ones yield a circle-quadrature evaluator
    of order 1 - 1/order.
    """
    p = _find_pole(kd, pole)
    lam_int = p.lam_integer
    if lam_int is None:
        raise ResidueError(
            "residue at %s is not an integer (lambda = %s); the residue "
            "solution hypothesis fails" % (p.location_complex,
                                           complex(p.lam)))
    t0 = p.location
    t0c = complex(t0)

    if not p.is_essential:
        k0 = p.multiplicity + lam_int
        if k0 <= 0:
            h = SolutionHandle(kind="residue", label="res_%s" % t0c,
                               _multi=lambda z, js, tol: [qr_zero() for _ in js])
            return ResidueSolution(pole=t0, lam=p.lam, order=p.order_of_q0q1,
                                   form="identically_zero", handle=h,
                                   poly=Poly(), growth_order=0)
        exact, log_scale, hs = _regular_factor_series(kd, p, k0 + 2)
        # res = e^{-z t0} sum_{c} hs[k0-1-c] (-z)^c / c!
        coeffs = []
        fact = GaussRational(1) if exact else 1.0 + 0j
        for c in range(k0):
            if c > 0:
                fact = fact * (GaussRational(c) if exact else float(c))
            term = hs[k0 - 1 - c] * ((-1) ** c)
            coeffs.append(term / fact)
        wpoly = Poly(coeffs)
        handle = _poly_residue_handle(wpoly, log_scale, t0 if exact else t0c,
                                      "res_%s" % t0c)
        form = "polynomial" if t0c == 0 else "exp_times_entire"
        return ResidueSolution(pole=t0, lam=p.lam, order=p.order_of_q0q1,
                               form=form, handle=handle, poly=wpoly,
                               exp_scale=log_scale, growth_order=0)

    # essential singularity: circle quadrature, radius adapted to z
    rho_max = _half_distance(kd, p)
    mord = max(p.order_of_q0q1, 2)
    floor = 2e-3 * (1.0 + abs(t0c))

    def multi(z, js, tol):
        rho = min(rho_max, max(floor, abs(z) ** (-1.0 / mord)
                               if abs(z) > 1 else rho_max))
        return circle_eval_multi(kd, t0c, rho, z, js, tol)

    handle = SolutionHandle(kind="residue", label="res_%s" % t0c, _multi=multi)
    return ResidueSolution(pole=t0, lam=p.lam, order=p.order_of_q0q1,
                           form="exp_times_entire", handle=handle,
                           growth_order=Fraction(1) - Fraction(1, mord))


def _poly_residue_handle(wpoly: Poly, log_scale, t0,
                         label: str) -> SolutionHandle:
    scale_c = complex(log_scale)
    t0c = complex(t0)
    inner = closed_form_solution(wpoly.to_complex() * cmath.exp(1j * scale_c.imag),
                                 -t0c, label)

    def multi(z, js, tol):
        out = inner.eval_multi(z, js, tol)
        return [QuadResult(q.mantissa, q.log_scale + scale_c.real,
                           q.est_error, q.nodes_used, q.flags) for q in out]

    h = SolutionHandle(kind="residue", label=label, _multi=multi)
    h.poly = wpoly
    h.exp_scale = log_scale
    h.exp_factor = -t0 if is_exact(t0) else -t0c
    return h


def _half_distance(kd: KernelData, p: KernelPole) -> float:
    dists = [abs(q.location_complex - p.location_complex)
             for q in kd.poles if q is not p]
    if not dists:
        return 1.0
    return 0.5 * min(dists)


def residue_solutions(kd: KernelData, tol: float = DEFAULT_TOL):
    """Residue solutions at every singular pole with integer residue."""
    out = []
    for p in kd.poles:
        if not p.is_singular:
            continue
        if p.lam_integer is None:
            continue
        out.append(residue_solution(kd, p.location, tol))
    return out


# ----------------------------------------------------------------------------
# symmetry sum
# ----------------------------------------------------------------------------

@dataclass
class SymmetrySum:
    handle: SolutionHandle
    classification: str             # identically_zero | residue_combination | subnormal
    radius: float


def symmetry_sum(kd: KernelData, tol: float = DEFAULT_TOL) -> SymmetrySum:
    """Sum over all distinguished solutions, realized as the positively
    oriented circle integral over |t| = singular_radius + 1.

    Requires an integer residue sum (otherwise the kernel is not
    single-valued outside the poles and the circle realization is invalid).
    """
    if kd.residue_sum_integer is None:
        raise ResidueError(
            "sum of residues %s is not an integer; the symmetry sum has no "
            "single-valued circle realization" % kd.residue_sum_complex)
    radius = kd.singular_radius + 1.0
    singular = [p for p in kd.poles if p.is_singular]
    if not singular:
        classification = "identically_zero"
        handle = SolutionHandle(kind="sum", label="symmetry_sum",
                                _multi=lambda z, js, tol: [qr_zero() for _ in js])
        return SymmetrySum(handle=handle, classification=classification,
                           radius=radius)
    if all(p.lam_integer is not None for p in singular):
        classification = "residue_combination"
    else:
        classification = "subnormal"

    def multi(z, js, tol):
        return circle_eval_multi(kd, 0.0, radius, z, js, tol)

    handle = SolutionHandle(kind="sum", label="symmetry_sum", _multi=multi)
    return SymmetrySum(handle=handle, classification=classification,
                       radius=radius)


def symmetry_check(kd: KernelData, points, tol: float = DEFAULT_TOL) -> float:
    """Max deviation |sum_nu Lambda_nu(z) - circle integral| over the points,
    relative to the magnitude scale at each point."""
    ss = symmetry_sum(kd, tol)
    lams = [lambda_solution(kd, nu) for nu in range(kd.m + 1)]
    worst = 0.0
    for z in points:
        parts = [h.eval(z, 0, tol) for h in lams]
        total = combine_linear([(1.0, p) for p in parts])
        circ = ss.handle.eval(z, 0, tol)
        diff = combine_linear([(1.0, total), (-1.0, circ)])
        scale = max(max(p.log_abs() for p in parts), circ.log_abs())
        if scale == -math.inf:
            continue
        worst = max(worst, math.exp(diff.log_abs() - scale)
                    if diff.log_abs() > -math.inf else 0.0)
    return worst


# ----------------------------------------------------------------------------
# substitution checks
# ----------------------------------------------------------------------------

def apply_operator_exact(spec: OdeSpec, poly: Poly, exp_factor):
    """L[P e^(c z)] / e^(c z) as an exact polynomial in z."""
    c = exp_factor
    derivs = [poly]
    for _ in range(spec.n):
        p = derivs[-1]
        derivs.append(p * c + p.derivative())
    total = derivs[spec.n]
    z_poly = Poly([GaussRational(0), GaussRational(1)])
    for j in range(spec.n):
        aj, bj = spec.a[j], spec.b[j]
        if aj:
            total = total + derivs[j] * aj
        if bj:
            total = total + z_poly * derivs[j] * bj
    return total


def check_solution(spec: OdeSpec, handle: SolutionHandle, points,
                   tol: float = DEFAULT_TOL):
    """Relative ODE residual at each point.

    Closed-form handles with exact data are substituted exactly (returned
    residuals are exactly zero when the polynomial identity vanishes);
    other handles are checked with quadrature derivatives.
    """
    points = [complex(z) for z in points]
    report = {"kind": handle.kind, "label": handle.label, "points": [],
              "residuals": [], "exact": False, "max_residual": 0.0}
    if handle.kind in ("closed_form", "residue") and \
            getattr(handle, "poly", None) is not None and \
            handle.poly.is_exact and spec.is_exact and \
            is_exact(getattr(handle, "exp_factor", GaussRational(0))):
        lhs = apply_operator_exact(spec, handle.poly,
                                   getattr(handle, "exp_factor", GaussRational(0)))
        report["exact"] = True
        resid = 0.0 if lhs.is_zero else max(abs(complex(cc)) for cc in lhs.coeffs)
        report["points"] = points
        report["residuals"] = [resid] * len(points)
        report["max_residual"] = resid
        return report

    js = list(range(spec.n + 1))
    for z in points:
        z = complex(z)
        qs = handle.eval_multi(z, js, tol)
        coeffs = [complex(spec.a[j]) + complex(spec.b[j]) * z
                  for j in range(spec.n)] + [1.0 + 0j]
        scale = max(q.log_scale for q in qs)
        num = 0j
        den = 0.0
        for cj, q in zip(coeffs, qs):
            term = cj * q.mantissa * math.exp(q.log_scale - scale)
            num += term
            den += abs(term)
        resid = abs(num) / den if den > 0 else 0.0
        report["points"].append(z)
        report["residuals"].append(resid)
    report["max_residual"] = max(report["residuals"], default=0.0)
    return report


# ----------------------------------------------------------------------------
# linear independence (numerical verdict only)
# ----------------------------------------------------------------------------

def independence_check(handles, z0, tol: float = 1e-6):
    """Wronskian of the handles at z0 with a scale-aware verdict."""
    k = len(handles)
    if k == 0:
        raise ValueError("need at least one handle")
    cols = []
    scales = []
    for h in handles:
        qs = h.eval_multi(z0, list(range(k)), min(tol, 1e-8))
        s = max(q.log_scale for q in qs)
        col = np.array([q.mantissa * math.exp(q.log_scale - s) for q in qs])
        cols.append(col)
        scales.append(s)
    mat = np.array(cols).T
    det = np.linalg.det(mat)
    col_norms = np.linalg.norm(mat, axis=0)
    hadamard = float(np.prod(np.maximum(col_norms, 1e-300)))
    verdict = "independent" if abs(det) > tol * hadamard else "dependent-suspected"
    qr = QuadResult(mantissa=det, log_scale=float(sum(scales)),
                    est_error=tol * hadamard, nodes_used=0)
    return qr, verdict


# ----------------------------------------------------------------------------
# growth measurement
# ----------------------------------------------------------------------------

def empirical_growth(handle: SolutionHandle, radii, nrays: int = 16,
                     tol: float = 1e-8):
    """log max-modulus over rays at each radius, plus the fitted exponent
    of log log M(r) against log r."""
    radii = list(radii)
    logm = []
    for r in radii:
        best = -math.inf
        for k in range(nrays):
            th = 2 * math.pi * k / nrays
            q = handle.eval(r * cmath.exp(1j * th), 0, tol)
            best = max(best, q.log_abs())
        logm.append(best)
    xs = np.log(np.array(radii, dtype=float))
    ys = np.log(np.maximum(np.array(logm), 1e-12))
    slope = float(np.polyfit(xs, ys, 1)[0])
    return logm, slope
