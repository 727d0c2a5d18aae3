"""Complex polynomial root finding and rational-function algebra.

Roots are located by Aberth-Ehrlich simultaneous iteration, merged into
multiplicity clusters, and confirmed by derivative tests.  When the input
polynomial has exact Gaussian-rational coefficients, rational roots are
peeled off by exact trial division first, so fixture kernels stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RootFindingError
from .poly import Poly
from .scalars import GaussRational, rational_snap_candidates
from .series import integer_value, poly_series, series_div

CLUSTER_TOL = 1e-6
ROOT_RESIDUAL_TOL = 1e-10
INT_TOL = 1e-8


@dataclass(frozen=True)
class RootCluster:
    """A root with multiplicity; exact is set when the root is certified."""

    center: object            # complex or GaussRational
    multiplicity: int
    cluster_radius: float = 0.0
    exact: bool = False

    @property
    def center_complex(self) -> complex:
        return complex(self.center)


@dataclass
class PoleData:
    """Pole of Q0/Q1 at a root of Q1.

    ``multiplicity`` is the multiplicity of the root of Q1; ``residue`` is
    the 1/(t - t0) Laurent coefficient of Q0/Q1 there; ``principal`` holds
    the full principal part [c_1 .. c_m] with c_k the coefficient of
    (t - t0)^(-k) (so c_1 == residue and trailing entries may vanish when
    Q0 cancels part of the pole).
    """

    location: object
    multiplicity: int
    residue: object
    principal: list = field(default_factory=list)
    exact: bool = False

    @property
    def location_complex(self) -> complex:
        return complex(self.location)

    @property
    def residue_complex(self) -> complex:
        return complex(self.residue)

    @property
    def residue_integer(self):
        """Integer value of the residue, or None (exact path decides exactly)."""
        if self.exact:
            lam = self.residue
            if isinstance(lam, GaussRational):
                return lam.as_int() if lam.is_integer else None
        return integer_value(self.residue, INT_TOL)

    @property
    def order_of_q0q1(self) -> int:
        """Actual pole order of Q0/Q1 (< multiplicity when Q0 cancels)."""
        for k in range(len(self.principal), 0, -1):
            c = self.principal[k - 1]
            if (self.exact and bool(c)) or (not self.exact and abs(complex(c)) > 1e-12):
                return k
        return 0


def _aberth(coeffs: np.ndarray, max_iter: int = 400) -> np.ndarray:
    """Aberth-Ehrlich iteration for all roots of a complex polynomial."""
    d = len(coeffs) - 1
    if d == 1:
        return np.array([-coeffs[0] / coeffs[1]])
    monic = coeffs / coeffs[-1]
    radius = 1.0 + max(abs(monic[:-1]))
    ks = np.arange(d)
    z = 0.6 * radius * np.exp(2j * np.pi * (ks + 0.25) / d + 1j * 0.4 * ks / d)
    dcoeffs = monic[1:] * np.arange(1, d + 1)

    def pval(x, c):
        acc = np.zeros_like(x)
        for ck in c[::-1]:
            acc = acc * x + ck
        return acc

    tol = 1e-14
    for _ in range(max_iter):
        p = pval(z, monic)
        dp = pval(z, dcoeffs)
        newton = np.where(dp != 0, p / np.where(dp == 0, 1, dp), 0.1)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        sums = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - newton * sums
        step = newton / np.where(np.abs(denom) < 1e-30, 1e-30, denom)
        z = z - step
        if np.max(np.abs(step)) < tol * (1.0 + np.max(np.abs(z))):
            break
    return z


def _exact_rational_roots(p: Poly):
    """Peel off Gaussian-rational roots by verified exact division."""
    roots = []
    work = p
    guard = 0
    while work.degree >= 1 and guard < 2 * p.degree + 8:
        guard += 1
        numeric = _aberth(np.array(work.complex_coeffs()))
        found = False
        for z in numeric:
            for cand in rational_snap_candidates(complex(z)):
                if work(cand):
                    continue
                mult = 0
                while work.degree >= 1:
                    quot, rem = divmod(work, Poly([-cand, GaussRational(1)]))
                    if rem.is_zero:
                        work = quot
                        mult += 1
                    else:
                        break
                if mult:
                    roots.append(RootCluster(center=cand, multiplicity=mult,
                                             exact=True))
                    found = True
                    break
            if found:
                break
        if not found:
            break
    return roots, work


def poly_roots(p: Poly, cluster_tol: float = CLUSTER_TOL,
               residual_tol: float = ROOT_RESIDUAL_TOL):
    """All roots of p as multiplicity clusters.

    Nearby numeric roots (within cluster_tol * (1 + |center|)) are merged;
    each merged cluster is confirmed by derivative tests and the center is
    polished on the (k-1)-th derivative, where the root is simple.
    """
    if p.degree < 1:
        raise ValueError("poly_roots requires degree >= 1")

    exact_clusters = []
    work = p
    if p.is_exact:
        exact_clusters, work = _exact_rational_roots(p)
        if work.degree < 1:
            _check_count(exact_clusters, p)
            return exact_clusters

    coeffs = np.array(work.complex_coeffs())
    raw = _aberth(coeffs)

    clusters = []
    used = np.zeros(len(raw), dtype=bool)
    order = np.argsort(np.abs(raw))
    for idx in order:
        if used[idx]:
            continue
        group = [idx]
        used[idx] = True
        for jdx in range(len(raw)):
            if used[jdx]:
                continue
            if abs(raw[jdx] - raw[idx]) <= cluster_tol * (1.0 + abs(raw[idx])):
                group.append(jdx)
                used[jdx] = True
        center = complex(np.mean(raw[group]))
        mult = len(group)
        mult = _confirm_multiplicity(work, center, mult)
        center = _polish(work, center, mult)
        radius = float(max(abs(raw[g] - center) for g in group))
        clusters.append(RootCluster(center=center, multiplicity=mult,
                                    cluster_radius=radius))

    clusters = _merge_confirmed(work, clusters, cluster_tol)
    clusters = _merge_by_derivative_test(work, clusters)
    _check_residuals(work, clusters, residual_tol)
    clusters = exact_clusters + clusters
    _check_count(clusters, p)
    return clusters


def _merge_by_derivative_test(p: Poly, clusters):
    """Merge near-clusters that double precision cannot separate.

    A multiplicity-m root is only computable to about eps^(1/m), which can
    exceed the nominal cluster tolerance; wider merges are accepted only
    when the derivative test confirms the combined multiplicity.
    """
    changed = True
    while changed and len(clusters) > 1:
        changed = False
        clusters.sort(key=lambda c: (abs(c.center_complex),
                                     c.center_complex.real,
                                     c.center_complex.imag))
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                a, b = clusters[i], clusters[j]
                gap = abs(a.center_complex - b.center_complex)
                if gap > 5e-4 * (1.0 + abs(a.center_complex)):
                    continue
                mult = a.multiplicity + b.multiplicity
                center = (a.center_complex * a.multiplicity +
                          b.center_complex * b.multiplicity) / mult
                polished = _polish(p, center, mult)
                if abs(polished - center) > 10 * gap + 1e-9 * (1 + abs(center)):
                    continue
                if _confirm_multiplicity(p, polished, mult) != mult:
                    continue
                center = polished
                merged = RootCluster(center=center, multiplicity=mult,
                                     cluster_radius=max(gap, a.cluster_radius,
                                                        b.cluster_radius))
                clusters = [c for k, c in enumerate(clusters) if k not in (i, j)]
                clusters.append(merged)
                changed = True
                break
            if changed:
                break
    return clusters


def _confirm_multiplicity(p: Poly, center: complex, mult: int) -> int:
    """Derivative test: smallest k with |p^(k)(center)| above noise scale."""
    for k in range(0, mult):
        dk = p.derivative(k)
        scale = sum(abs(c) * max(1.0, abs(center)) ** j
                    for j, c in enumerate(dk.complex_coeffs()))
        if abs(dk(center)) > 1e-6 * max(scale, 1e-300):
            return max(1, k)
    return mult


def _polish(p: Poly, center: complex, mult: int) -> complex:
    """Newton polish on p^(mult-1), where the cluster center is a simple root."""
    g = p.derivative(mult - 1)
    dg = g.derivative()
    z = center
    for _ in range(60):
        gv = g(z)
        dv = dg(z)
        if dv == 0:
            break
        step = gv / dv
        z = z - step
        if abs(step) <= 1e-16 * (1.0 + abs(z)):
            break
    return z


def _merge_confirmed(p: Poly, clusters, cluster_tol):
    """Re-merge clusters whose polished centers collided."""
    merged = []
    for c in sorted(clusters, key=lambda c: (abs(c.center_complex),
                                             c.center_complex.real,
                                             c.center_complex.imag)):
        for m in merged:
            if abs(m.center_complex - c.center_complex) <= \
                    cluster_tol * (1.0 + abs(m.center_complex)):
                mult = m.multiplicity + c.multiplicity
                merged.remove(m)
                merged.append(RootCluster(center=m.center, multiplicity=mult,
                                          cluster_radius=max(m.cluster_radius,
                                                             c.cluster_radius)))
                break
        else:
            merged.append(c)
    return merged


def _check_residuals(p: Poly, clusters, residual_tol):
    scale = p.max_abs_coeff()
    for c in clusters:
        dk = p.derivative(c.multiplicity - 1)
        val = abs(dk(c.center_complex))
        bound = residual_tol * max(dk.max_abs_coeff(), scale) * \
            max(1.0, abs(c.center_complex)) ** max(p.degree - c.multiplicity + 1, 0)
        if val > bound:
            raise RootFindingError(
                "root finder did not converge: residual %.3e at %s exceeds %.3e"
                % (val, c.center_complex, bound))


def _check_count(clusters, p: Poly):
    total = sum(c.multiplicity for c in clusters)
    if total != p.degree:
        raise RootFindingError("found multiplicity total %d for degree %d"
                               % (total, p.degree))


def principal_part(q0: Poly, q1: Poly, root: RootCluster):
    """Full principal part [c_1..c_m] of Q0/Q1 at one root of Q1.

    Writes Q1 = (t - t0)^m S(t) and series-divides Q0 by S about t0:
    c_k is the (m-k)-th Taylor coefficient of Q0/S.
    """
    m = root.multiplicity
    t0 = root.center
    exact = root.exact and q0.is_exact and q1.is_exact
    order = m - 1
    if exact:
        s_poly = _exact_deflate(q1, root)
        num = poly_series(q0, t0, order)
        den = poly_series(s_poly, t0, order)
        g = series_div(num, den, order)
    else:
        t0c = complex(t0)
        sc = _numeric_cofactor(q1, t0c, m)
        num = poly_series(q0.to_complex(), t0c, order)
        den = poly_series(sc, t0c, order)
        g = series_div(num, den, order)
    # c_k = g[m-k]
    return [g[m - k] for k in range(1, m + 1)], exact


def _exact_deflate(q1: Poly, root: RootCluster) -> Poly:
    s_poly = q1
    factor = Poly([-root.center, GaussRational(1)])
    for _ in range(root.multiplicity):
        s_poly, rem = divmod(s_poly, factor)
        if not rem.is_zero:
            raise RootFindingError("exact deflation failed at %r" % (root.center,))
    return s_poly


def _numeric_cofactor(q1: Poly, t0: complex, m: int) -> Poly:
    s_poly = q1.to_complex()
    factor = Poly([-t0, 1.0 + 0j])
    for _ in range(m):
        s_poly, _rem = divmod(s_poly, factor)
    return s_poly


def partial_fractions(q0: Poly, q1: Poly):
    """Decompose Q0/Q1 = outer + sum of principal parts at the roots of Q1.

    Returns (outer, poles); outer is the polynomial quotient and poles is a
    list of PoleData carrying full principal parts.
    """
    if q1.is_zero:
        raise ValueError("Q1 must not vanish identically")
    outer, _rem = divmod(q0, q1)
    if q1.degree == 0:
        return outer, []
    roots = poly_roots(q1)
    poles = []
    for r in roots:
        coeffs, exact = principal_part(q0, q1, r)
        poles.append(PoleData(location=r.center, multiplicity=r.multiplicity,
                              residue=coeffs[0], principal=coeffs, exact=exact))
    poles.sort(key=lambda p: (abs(p.location_complex),
                              p.location_complex.real, p.location_complex.imag))
    return outer, poles


def residue_at(q0: Poly, q1: Poly, pole: complex) -> complex:
    """Residue of Q0/Q1 at ``pole``, which must be a root of Q1."""
    _outer, poles = partial_fractions(q0, q1)
    for p in poles:
        if abs(p.location_complex - complex(pole)) <= \
                CLUSTER_TOL * (1.0 + abs(complex(pole))):
            return p.residue
    raise ValueError("%r is not a root of Q1 (within clustering tolerance)" % (pole,))


def reexpand(outer: Poly, poles, q1: Poly) -> Poly:
    """Rebuild Q0 from a decomposition: outer*Q1 + sum over poles.

    Used by tests to verify the decomposition identity.
    """
    total = outer * q1
    for p in poles:
        # principal part times Q1: c_k * Q1 / (t - t0)^k
        for k, ck in enumerate(p.principal, start=1):
            if (p.exact and not bool(ck)) or (not p.exact and complex(ck) == 0):
                continue
            num = q1
            factor = Poly([-p.location, GaussRational(1) if p.exact else 1.0 + 0j])
            for _ in range(k):
                num, _r = divmod(num, factor)
            total = total + num * ck
    return total
