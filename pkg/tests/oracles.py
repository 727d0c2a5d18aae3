"""Independent oracles used by the tests.

Everything here is deliberately built from one-dimensional real quadrature
or direct coefficient enumeration, so it shares no code path with the
contour machinery it checks.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate


def _s_of_u(u: float, x: float, s_min: float) -> float:
    """Positive solution of s^3/3 + x s = u with s >= s_min (Newton)."""
    s = max(s_min, (3.0 * max(u, 1e-30)) ** (1.0 / 3.0))
    for _ in range(80):
        f = s ** 3 / 3.0 + x * s - u
        fp = s * s + x
        step = f / fp
        s -= step
        if abs(step) < 1e-15 * max(1.0, abs(s)):
            break
    return s


def _split_point(x: float) -> float:
    return max(4.0, 2.0 * math.sqrt(max(0.0, -x)) + 1.0)


def airy_value(x: float) -> float:
    """(1/pi) * integral_0^inf cos(s^3/3 + x s) ds by direct quadrature.

    Finite head by adaptive quadrature in s; oscillatory tail by a Fourier
    transform rule after substituting u = s^3/3 + x s (monotone there).
    """
    s0 = _split_point(x)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        head, _ = integrate.quad(lambda s: math.cos(s ** 3 / 3.0 + x * s),
                                 0.0, s0, limit=800, epsabs=1e-14,
                                 epsrel=1e-13)
        u0 = s0 ** 3 / 3.0 + x * s0
        tail, _ = integrate.quad(
            lambda u: 1.0 / (_s_of_u(u, x, s0) ** 2 + x),
            u0, np.inf, weight="cos", wvar=1.0, limlst=300)
    return (head + tail) / math.pi


def airy_derivative(x: float) -> float:
    """-(1/pi) * integral_0^inf s sin(s^3/3 + x s) ds, same scheme."""
    s0 = _split_point(x)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        head, _ = integrate.quad(
            lambda s: s * math.sin(s ** 3 / 3.0 + x * s),
            0.0, s0, limit=800, epsabs=1e-14, epsrel=1e-13)
        u0 = s0 ** 3 / 3.0 + x * s0

        def g(u):
            s = _s_of_u(u, x, s0)
            return s / (s * s + x)

        tail, _ = integrate.quad(g, u0, np.inf, weight="sin", wvar=1.0,
                                 limlst=300)
    return -(head + tail) / math.pi


def airy_zero_bisect(lo: float, hi: float, tol: float = 1e-6) -> float:
    """Bisection on the real-axis oracle; [lo, hi] must bracket one zero."""
    flo = airy_value(lo)
    fhi = airy_value(hi)
    if flo * fhi >= 0:
        raise ValueError("interval does not bracket a zero")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = airy_value(mid)
        if flo * fmid <= 0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


# ----------------------------------------------------------------------------
# series oracle for the fourth-order fixture (w'''' + z w''' - w = 0)
# ----------------------------------------------------------------------------

def quartic_residue_series_coeff(m: int, amax: int = 120) -> float:
    """Coefficient of z^(2m) in res_0[t^-3 exp(t^2/2 + 1/(2 t^2)) e^(-z t)].

    Brute-force Cauchy product: the coefficient of t^2 z^(2m) over the
    three exponential series, summed directly.
    """
    total = 0.0
    c = 2 * m
    for a in range(amax):
        b = a + m - 1
        if b < 0:
            continue
        total += 1.0 / (2.0 ** (a + b) * math.factorial(a) *
                        math.factorial(b) * math.factorial(c))
    return total


def published_series_coeff(m: int, kmax: int = 80) -> float:
    """Coefficient of z^(2m) as printed in the source material:
    C_m / (2^(m-1) m!), with C_m = sum_k 1/(4^k k! (k+m-1)!)."""
    cm = 0.0
    for k in range(kmax):
        if k + m - 1 < 0:
            continue
        cm += 1.0 / (4.0 ** k * math.factorial(k) * math.factorial(k + m - 1))
    return cm / (2.0 ** (m - 1) * math.factorial(m))


# ----------------------------------------------------------------------------
# random spec generator for property suites
# ----------------------------------------------------------------------------

def random_normalized_spec(rng, n_max: int = 6):
    """Random exact spec already satisfying the b_q normalization."""
    from laplace_ode.odespec import OdeSpec, normalization_target
    from laplace_ode.scalars import GaussRational
    while True:
        n = int(rng.integers(2, n_max + 1))
        q = int(rng.integers(0, n))
        a = [GaussRational(int(v)) for v in rng.integers(-3, 4, size=n)]
        b = [GaussRational(0)] * n
        for j in range(q):
            if rng.random() < 0.5:
                b[j] = GaussRational(int(rng.integers(-2, 3)))
        b[q] = GaussRational(normalization_target(n, q))
        if not a[0] and not b[0]:
            a[0] = GaussRational(1)
        try:
            return OdeSpec(n=n, a=tuple(a), b=tuple(b))
        except Exception:
            continue
