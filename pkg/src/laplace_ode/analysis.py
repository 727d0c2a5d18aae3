"""Growth and value-distribution analytics.

Covers the characteristic-equation root classes, the catalog of possible
growth orders, predicted and empirical directional indicators, the derived
Nevanlinna coefficients, and argument-principle zero counting in sectors.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .errors import NumericError
from .odespec import OdeSpec, struct_indices
from .poly import Poly
from .ratfun import poly_roots
from .solutions import SolutionHandle

CLASSIFY_MIN_ABS_Z = 50.0


# ----------------------------------------------------------------------------
# characteristic equation
# ----------------------------------------------------------------------------

@dataclass
class CharRoots:
    z: complex
    roots: list
    classes: list                  # "outer" | "middle" | "inner" per root

    def counts(self):
        return (self.classes.count("outer"), self.classes.count("middle"),
                self.classes.count("inner"))


def char_roots(spec: OdeSpec, z: complex) -> CharRoots:
    """Roots of y^n + sum (a_j + b_j z) y^j = 0 with asymptotic classes.

    Classes (for large |z|): ``outer`` roots grow like z^(1/(n-q)),
    ``middle`` roots approach the nonzero roots of sum b_j y^j, ``inner``
    roots decay like z^(-1/p).  Classification is refused for small |z|.
    """
    z = complex(z)
    if abs(z) < CLASSIFY_MIN_ABS_Z:
        raise NumericError(
            "|z| = %.3g is below the classification threshold %.3g "
            "(asymptotic classes are ambiguous)" % (abs(z), CLASSIFY_MIN_ABS_Z))
    idx = struct_indices(spec)
    n, q, p = spec.n, idx.q, idx.p
    coeffs = [complex(spec.a[j]) + complex(spec.b[j]) * z for j in range(n)]
    coeffs.append(1.0 + 0j)
    roots = [c.center_complex for c in poly_roots(Poly(coeffs))
             for _ in range(c.multiplicity)]
    # magnitude-sorted assignment: n-q outer (largest), then q-p middle,
    # then p inner (smallest)
    order = sorted(range(len(roots)), key=lambda k: -abs(roots[k]))
    classes = [None] * len(roots)
    for pos, k in enumerate(order):
        if pos < n - q:
            classes[k] = "outer"
        elif pos < n - p:
            classes[k] = "middle"
        else:
            classes[k] = "inner"
    return CharRoots(z=z, roots=roots, classes=classes)


def char_models(spec: OdeSpec, z: complex):
    """Asymptotic model values for the three classes at z (for tests)."""
    idx = struct_indices(spec)
    n, q, p = spec.n, idx.q, idx.p
    m = n - q
    outer = []
    zr = z ** (1.0 / m)
    for k in range(m):
        gamma = cmath.exp(1j * math.pi * (m % 2) / m) * \
            cmath.exp(2j * math.pi * k / m)
        outer.append(gamma * zr)
    middle = []
    bpoly = Poly([complex(bj) for bj in spec.b])
    if bpoly.degree >= 1:
        for c in poly_roots(bpoly):
            for _ in range(c.multiplicity):
                if abs(c.center_complex) > 1e-12:
                    middle.append(c.center_complex)
    inner = []
    if p >= 1 and spec.a[0]:
        tau_p = -complex(spec.a[0]) / complex(spec.b[p])
        base = tau_p ** (1.0 / p)
        for k in range(p):
            inner.append(base * cmath.exp(2j * math.pi * k / p) * z ** (-1.0 / p))
    return outer, middle, inner


# ----------------------------------------------------------------------------
# order catalog
# ----------------------------------------------------------------------------

@dataclass
class OrderCatalog:
    entries: list                  # (order: Fraction, status: str, condition: str)

    def orders(self):
        return [e[0] for e in self.entries]


def order_catalog(spec: OdeSpec) -> OrderCatalog:
    """Possible orders of growth of transcendental (and polynomial)
    solutions, with the structural condition each row requires."""
    idx = struct_indices(spec)
    n, q, p = spec.n, idx.q, idx.p
    entries = [(Fraction(1) + Fraction(1, n - q), "guaranteed",
                "solutions of maximal order always exist")]
    if p < q:
        entries.append((Fraction(1), "possible", "requires p < q (holds)"))
    if p > 1:
        entries.append((Fraction(1) - Fraction(1, p), "possible",
                        "requires p > 1 (holds)"))
    if p == 1:
        entries.append((Fraction(0), "possible",
                        "polynomial solutions require p = 1 (holds)"))
    return OrderCatalog(entries=entries)


# ----------------------------------------------------------------------------
# indicator
# ----------------------------------------------------------------------------

def indicator_predicted(rho, theta: float, case: str = "generic") -> float:
    """Predicted directional indicator of the principal contour solution.

    generic:          -cos(rho theta)/rho on |theta| <= pi
    q_eq_n_minus_1:   -cos(2 theta)/2 on |theta| < 3 pi/4, 0 beyond
    """
    rho = float(rho)
    if case == "generic":
        return -math.cos(rho * theta) / rho
    if case == "q_eq_n_minus_1":
        if abs(theta) < 0.75 * math.pi:
            return -0.5 * math.cos(2.0 * theta)
        return 0.0
    raise ValueError("unknown indicator case %r" % case)


def local_indicator(rho, m: int, j: int, theta: float) -> float:
    """The j-th member of the admissible local-indicator family:
    -cos(rho theta + 2 pi j / m)/rho for 0 <= j < m, and 0 for j = m.

    Directional growth of any distinguished solution must locally agree
    with one of these candidates; the predicted indicator is the j = 0
    member on its central sector.
    """
    if not 0 <= j <= m:
        raise ValueError("j must lie in [0, m]")
    if j == m:
        return 0.0
    rho = float(rho)
    return -math.cos(rho * theta + 2 * math.pi * j / m) / rho


@dataclass
class IndicatorProfile:
    rho: float
    case: str
    thetas: np.ndarray
    radii: list
    h_emp: np.ndarray              # shape (len(thetas), len(radii))
    h_pred: np.ndarray
    est_rel_err: np.ndarray = None
    deviations: list = field(default_factory=list)   # sup|h_emp-h_pred| per radius

    def deviation_at_largest(self) -> float:
        return self.deviations[-1]


def indicator_empirical(handle: SolutionHandle, rho, thetas, radii,
                        tol: float = 1e-8, case: str = "generic",
                        workers: int = 4) -> IndicatorProfile:
    """Sampled log|f(r e^(i theta))| / r^rho on the grid.

    Magnitudes come from the log-scaled evaluator, never from folded
    values, so radii far beyond the overflow range are fine.  Cells where
    quadrature fails are recorded as NaN.
    """
    rho = float(rho)
    thetas = np.asarray(list(thetas), dtype=float)
    radii = list(radii)
    if np.any(np.abs(thetas) > math.pi - 0.05 + 1e-12):
        raise ValueError("indicator angles must satisfy |theta| <= pi - 0.05")
    if any(radii[i] >= radii[i + 1] for i in range(len(radii) - 1)):
        raise ValueError("radii must be increasing")
    h_emp = np.full((len(thetas), len(radii)), np.nan)
    est = np.full((len(thetas), len(radii)), np.nan)

    def cell(args):
        i, k = args
        z = radii[k] * cmath.exp(1j * thetas[i])
        try:
            qr = handle.eval(z, 0, tol)
            return i, k, qr.log_abs() / radii[k] ** rho, qr.rel_error()
        except NumericError:
            return i, k, math.nan, math.nan

    jobs = [(i, k) for i in range(len(thetas)) for k in range(len(radii))]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(cell, jobs))
    else:
        results = [cell(j) for j in jobs]
    for i, k, val, err in sorted(results):
        h_emp[i, k] = val
        est[i, k] = err
    h_pred = np.array([indicator_predicted(rho, th, case) for th in thetas])
    deviations = [float(np.nanmax(np.abs(h_emp[:, k] - h_pred)))
                  for k in range(len(radii))]
    return IndicatorProfile(rho=rho, case=case, thetas=thetas, radii=radii,
                            h_emp=h_emp, h_pred=h_pred, est_rel_err=est,
                            deviations=deviations)


# ----------------------------------------------------------------------------
# Nevanlinna coefficients
# ----------------------------------------------------------------------------

def nevanlinna_predicted(rho, case: str = "generic"):
    """(T, m_inv, N) coefficients from exact quadrature of the predicted
    indicator over the full circle: T ~ (1/2pi) int h+, m(r,1/f) ~
    (1/2pi) int h-, N(r,1/f) ~ (1/2pi) int h."""
    rho = float(rho)

    def h(th):
        return indicator_predicted(rho, th, case)

    # integrate piecewise between the sign changes of h
    if case == "generic":
        breaks = [-math.pi, -math.pi / (2 * rho), math.pi / (2 * rho), math.pi]
        extra = 3 * math.pi / (2 * rho)
        if extra < math.pi:
            breaks += [extra, -extra]
    else:
        breaks = [-math.pi, -0.75 * math.pi, -math.pi / 4, math.pi / 4,
                  0.75 * math.pi, math.pi]
    breaks = sorted(set(breaks))
    t_int = m_int = n_int = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        t_int += integrate.quad(lambda th: max(h(th), 0.0), a, b,
                                epsabs=1e-13)[0]
        m_int += integrate.quad(lambda th: max(-h(th), 0.0), a, b,
                                epsabs=1e-13)[0]
        n_int += integrate.quad(h, a, b, epsabs=1e-13)[0]
    c = 1.0 / (2 * math.pi)
    return c * t_int, c * m_int, c * n_int


def nevanlinna_estimates(profile: IndicatorProfile, radius_index: int = -1):
    """Trapezoid (T, m_inv, N) coefficients over the profile grid, for the
    predicted and the empirical indicator in parallel."""
    th = profile.thetas
    out = {}
    for name, h in (("pred", profile.h_pred),
                    ("emp", profile.h_emp[:, radius_index])):
        h = np.asarray(h, dtype=float)
        mask = np.isfinite(h)
        t = np.trapezoid(np.maximum(h[mask], 0.0), th[mask]) / (2 * math.pi)
        m = np.trapezoid(np.maximum(-h[mask], 0.0), th[mask]) / (2 * math.pi)
        n = np.trapezoid(h[mask], th[mask]) / (2 * math.pi)
        out[name] = (float(t), float(m), float(n))
    return out


# ----------------------------------------------------------------------------
# zero counting by the argument principle
# ----------------------------------------------------------------------------

@dataclass
class ZeroCount:
    count: int
    raw: complex
    confidence: float              # distance of raw winding to the integer
    reliable: bool
    samples: int


def _sector_boundary(theta1: float, theta2: float, radius: float):
    """Piecewise parametrization of the closed sector boundary.

    Radial pieces stop at a small inner radius; a reverse inner arc closes
    the loop there (the function is nonzero at the vertex, so the inner
    contribution is a tiny phase drift, not a winding).
    """
    full = abs(theta2 - theta1) >= 2 * math.pi - 1e-12
    segs = []
    if full:
        segs.append(("arc", theta1, theta1 + 2 * math.pi, radius))
    else:
        segs.append(("ray_out", theta1, radius))
        segs.append(("arc", theta1, theta2, radius))
        segs.append(("ray_in", theta2, radius))
        segs.append(("arc", theta2, theta1, 1e-3 * radius))
    return segs, full


def zero_count_sector(handle: SolutionHandle, sector, tol: float = 1e-8,
                      max_refine: int = 12) -> ZeroCount:
    """Winding number of f over the boundary of the sector
    {0 < |z| <= r, theta1 <= arg z <= theta2}.

    The log of f along the boundary comes from the evaluator's log scale
    and mantissa phase; steps are refined until each increment of log f is
    small, then the total imaginary variation is read off.
    """
    theta1, theta2, radius = sector
    segs, full = _sector_boundary(theta1, theta2, radius)

    cache = {}

    def logf(pt: complex):
        key = (round(pt.real, 13), round(pt.imag, 13))
        if key not in cache:
            qr = handle.eval(pt, 0, tol)
            if qr.mantissa == 0:
                raise NumericError("boundary hit an exact zero")
            cache[key] = (qr.log_abs(),
                          math.atan2(qr.mantissa.imag, qr.mantissa.real),
                          qr.rel_error())
        return cache[key]

    def seg_points(seg, n):
        kind = seg[0]
        if kind == "arc":
            _k, a, b, r = seg
            ts = np.linspace(a, b, n)
            return [r * cmath.exp(1j * t) for t in ts]
        _k, ang, r = seg
        rr = np.linspace(1e-3 * r, r, n)
        if kind == "ray_in":
            rr = rr[::-1]
        return [x * cmath.exp(1j * ang) for x in rr]

    total_im = 0.0
    worst_err = 0.0
    samples = 0
    for seg in segs:
        n = 33
        for attempt in range(max_refine):
            pts = seg_points(seg, n)
            vals = [logf(p) for p in pts]
            samples = len(cache)
            ok = True
            seg_im = 0.0
            for (la, aa, _ea), (lb, ab, _eb) in zip(vals[:-1], vals[1:]):
                dim = ab - aa
                dim = (dim + math.pi) % (2 * math.pi) - math.pi
                dre = lb - la
                if abs(dim) > math.pi / 4 or abs(dre) > 2.0:
                    ok = False
                    break
                seg_im += dim
            if ok:
                total_im += seg_im
                worst_err = max(worst_err, max(v[2] for v in vals))
                break
            n = 2 * n - 1
        else:
            raise NumericError("zero-count boundary refinement failed")
    raw = float(total_im) / (2 * math.pi)
    count = int(round(raw))
    confidence = float(abs(raw - count))
    reliable = bool(confidence <= 0.2 and worst_err < 0.3)
    return ZeroCount(count=count, raw=raw, confidence=confidence,
                     reliable=reliable, samples=samples)
