"""Kernel construction and branch-continuous evaluation of its logarithm.

The kernel associated with the operator is stored in factored form

    phi(t) = prod_nu (t - t_nu)^(-m_nu - lambda_nu)
             * exp[ R0(t) + sum_nu R_nu(1/(t - t_nu)) ]

with R0 the negative antiderivative of the polynomial part of Q0/Q1
(integration constant 0) and R_nu built from the higher principal-part
coefficients.  The leading constant is fixed to 1, which pins the otherwise
free normalization; for the classical second-order fixture this makes the
distinguished contour solution equal the Airy function on the nose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BranchError, ContourError, SpecError
from .odespec import OdeSpec, build_q, is_normalized, struct_indices
from .poly import Poly
from .ratfun import partial_fractions
from .scalars import GaussRational
from .series import integer_value

PATH_CLEARANCE = 1e-3
MAX_ARG_STEP = math.pi / 8


@dataclass
class KernelPole:
    """One factored singularity of the kernel."""

    location: object                 # complex or GaussRational
    multiplicity: int                # root multiplicity in Q1
    lam: object                      # residue of Q0/Q1 there
    principal: list                  # [c_1..c_m] principal part of Q0/Q1
    r_poly: Poly                     # R_nu as a polynomial in 1/(t - t_nu), no const
    exact: bool = False

    @property
    def location_complex(self) -> complex:
        return complex(self.location)

    @property
    def exponent(self):
        """Exponent of (t - t_nu) in the factored kernel: -m - lambda."""
        return -(self.lam + self.multiplicity)

    @property
    def exponent_complex(self) -> complex:
        return complex(self.exponent)

    @property
    def lam_integer(self):
        if self.exact and isinstance(self.lam, GaussRational):
            return self.lam.as_int() if self.lam.is_integer else None
        return integer_value(self.lam)

    @property
    def is_singular(self) -> bool:
        """False when the factor is an entire power (nonneg integer exponent
        and no essential part), i.e. the kernel is analytic at the point."""
        if not self.r_poly.is_zero:
            return True
        e = integer_value(self.exponent) if not self.exact else (
            self.exponent.as_int() if isinstance(self.exponent, GaussRational)
            and self.exponent.is_integer else None)
        return e is None or e < 0

    @property
    def is_essential(self) -> bool:
        return not self.r_poly.is_zero

    @property
    def order_of_q0q1(self) -> int:
        """Actual pole order of Q0/Q1 here (< multiplicity when Q0 cancels)."""
        for k in range(len(self.principal), 0, -1):
            c = self.principal[k - 1]
            if (self.exact and bool(c)) or \
                    (not self.exact and abs(complex(c)) > 1e-12):
                return k
        return 0


@dataclass
class KernelData:
    """Factored kernel plus the structural data evaluation needs."""

    spec: OdeSpec
    q0: Poly
    q1: Poly
    outer: Poly                      # polynomial part of Q0/Q1
    r0: Poly                         # -antiderivative(outer)
    poles: list
    m: int                           # n - q
    exact: bool = False

    # filled in __post_init__
    singular_radius: float = 0.0
    residue_sum: complex = 0j
    _locs: np.ndarray = field(default=None, repr=False)
    _exps: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        locs = [p.location_complex for p in self.poles]
        self.singular_radius = max((abs(z) for z in locs), default=0.0)
        self.residue_sum = sum((p.lam for p in self.poles), GaussRational(0))
        self._locs = np.array(locs, dtype=complex)
        self._exps = np.array([p.exponent_complex for p in self.poles],
                              dtype=complex)

    @property
    def residue_sum_complex(self) -> complex:
        return complex(self.residue_sum)

    @property
    def residue_sum_integer(self):
        if self.exact and isinstance(self.residue_sum, GaussRational):
            return self.residue_sum.as_int() if self.residue_sum.is_integer else None
        return integer_value(self.residue_sum)

    @property
    def single_valued_outside(self) -> bool:
        """Single-valued on |t| > singular_radius iff sum of residues is integer."""
        return self.residue_sum_integer is not None

    @property
    def is_single_valued(self) -> bool:
        """Globally single-valued iff every exponent is an integer."""
        return all(p.lam_integer is not None for p in self.poles)

    @property
    def exponent_sum_total(self) -> complex:
        return complex(sum(p.exponent_complex for p in self.poles))

    def clearance(self) -> np.ndarray:
        return PATH_CLEARANCE * (1.0 + np.abs(self._locs))

    # -- pointwise pieces ---------------------------------------------------

    def log_magnitude_bound(self, t: np.ndarray) -> np.ndarray:
        """Upper estimate of Re log phi used for contour planning."""
        t = np.asarray(t, dtype=complex)
        val = self.r0.eval_array(t).real
        for p, loc, e in zip(self.poles, self._locs, self._exps):
            d = np.maximum(np.abs(t - loc), 1e-300)
            val = val + e.real * np.log(d) + abs(e.imag) * math.pi
            if not p.r_poly.is_zero:
                val = val + np.abs(p.r_poly.to_complex().eval_array(1.0 / (t - loc)))
        return val

    def log_phi_with_args(self, t: np.ndarray, args: np.ndarray) -> np.ndarray:
        """log phi at points t given continued arg(t - t_nu) per pole.

        ``args`` has shape (npoles, len(t)).
        """
        t = np.asarray(t, dtype=complex)
        out = self.r0.eval_array(t).astype(complex)
        for k, (loc, e) in enumerate(zip(self._locs, self._exps)):
            d = t - loc
            out = out + e * (np.log(np.abs(d)) + 1j * args[k])
            rp = self.poles[k].r_poly
            if not rp.is_zero:
                out = out + rp.to_complex().eval_array(1.0 / d)
        return out

    def principal_args(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=complex)
        if len(self._locs) == 0:
            return np.zeros((0, len(t)))
        return np.angle(t[None, :] - self._locs[:, None])

    def log_phi_principal(self, t: np.ndarray) -> np.ndarray:
        """log phi with principal-branch logs (fine for single-valued kernels)."""
        return self.log_phi_with_args(t, self.principal_args(np.asarray(t, dtype=complex)))


def build_kernel(spec: OdeSpec) -> KernelData:
    """Factor the kernel of a normalized spec."""
    if not is_normalized(spec):
        raise SpecError("spec must be normalized before building the kernel "
                        "(call normalize first)")
    idx = struct_indices(spec)
    q0, q1 = build_q(spec)
    outer, pf_poles = partial_fractions(q0, q1)
    r0 = -outer.antiderivative()
    poles = []
    exact = q0.is_exact and q1.is_exact and all(p.exact for p in pf_poles)
    for p in pf_poles:
        m = p.multiplicity
        # R_nu(x) = sum_{k=2}^{m} c_k x^(k-1) / (k-1), x = 1/(t - t_nu)
        r_coeffs = [GaussRational(0) if p.exact else 0j]
        for k in range(2, m + 1):
            ck = p.principal[k - 1]
            if p.exact:
                r_coeffs.append(ck / GaussRational(k - 1))
            else:
                r_coeffs.append(complex(ck) / (k - 1))
        poles.append(KernelPole(location=p.location, multiplicity=m,
                                lam=p.residue, principal=list(p.principal),
                                r_poly=Poly(r_coeffs), exact=p.exact))
    kd = KernelData(spec=spec, q0=q0, q1=q1, outer=outer, r0=r0,
                    poles=poles, m=spec.n - idx.q, exact=exact)
    lead = kd.r0.coeff(kd.m + 1)
    target = GaussRational(1) / GaussRational(kd.m + 1)
    if abs(complex(lead) - complex(target)) > 1e-12:
        raise SpecError("kernel leading term %r does not match 1/(m+1); "
                        "spec is not normalized" % (lead,))
    return kd


def log_q0_over_q1(kd: KernelData, t: np.ndarray) -> np.ndarray:
    """-(d/dt) log phi = Q0/Q1 + Q1'/Q1 evaluated directly (for checks)."""
    t = np.asarray(t, dtype=complex)
    q0 = kd.q0.eval_array(t)
    q1 = kd.q1.eval_array(t)
    dq1 = kd.q1.derivative().eval_array(t)
    return -(q0 / q1 + dq1 / q1)


class BranchState:
    """Continued arguments arg(t - t_nu) at the current path point."""

    __slots__ = ("point", "args")

    def __init__(self, point: complex, args: np.ndarray):
        self.point = complex(point)
        self.args = np.asarray(args, dtype=float)

    @classmethod
    def principal(cls, kd: KernelData, point: complex) -> "BranchState":
        args = np.angle(np.array([point], dtype=complex) - kd._locs) \
            if len(kd.poles) else np.zeros(0)
        return cls(point, args.reshape(-1))


def continue_args(kd: KernelData, pts: np.ndarray, start: BranchState,
                  max_refine: int = 14) -> np.ndarray:
    """Continue arg(t - t_nu) along an ordered point sequence.

    ``pts[0]`` must equal ``start.point``.  The sequence is densified (by
    chord midpoints) until every per-pole argument increment between
    consecutive samples is below MAX_ARG_STEP, then unwrapped.
    """
    pts = np.asarray(pts, dtype=complex)
    npol = len(kd.poles)
    if npol == 0:
        return np.empty((0, len(pts)))
    if abs(pts[0] - start.point) > 1e-9 * (1 + abs(start.point)):
        raise BranchError("path does not start at the branch-state point")
    locs = kd._locs
    clear = kd.clearance()

    work = pts
    index = np.arange(len(pts))          # positions of the requested points
    for _ in range(max_refine):
        if np.any(np.abs(work[:, None] - locs[None, :]) < clear[None, :]):
            raise ContourError("path passes within clearance of a kernel pole")
        raw = np.angle(work[None, :] - locs[:, None])
        jumps = np.angle(np.exp(1j * np.diff(raw, axis=1)))
        bad = np.any(np.abs(jumps) >= MAX_ARG_STEP, axis=0)
        if not bad.any():
            unwrapped = raw.copy()
            np.cumsum(np.concatenate([raw[:, :1] * 0, jumps], axis=1), axis=1,
                      out=unwrapped)
            unwrapped += raw[:, :1]
            # align with the incoming branch state
            shift = 2 * math.pi * np.round((start.args - unwrapped[:, 0]) /
                                           (2 * math.pi))
            unwrapped += shift[:, None]
            offset = start.args - unwrapped[:, 0]
            if np.max(np.abs(offset)) > 1e-6:
                raise BranchError("branch state inconsistent with path start")
            unwrapped += offset[:, None]
            return unwrapped[:, index]
        # insert chord midpoints everywhere a step is too large
        mids = 0.5 * (work[:-1][bad] + work[1:][bad])
        new_len = len(work) + len(mids)
        merged = np.empty(new_len, dtype=complex)
        pos = np.zeros(len(work), dtype=int)
        pos[1:] = np.cumsum(bad.astype(int))
        new_idx = np.arange(len(work)) + pos
        merged[new_idx] = work
        gap_idx = (np.arange(len(work) - 1) + pos[:-1] + 1)[bad]
        merged[gap_idx] = mids
        index = new_idx[index]
        work = merged
    raise BranchError("branch continuation could not refine the path enough")


def log_kernel(kd: KernelData, pts, state: BranchState = None):
    """log phi along an ordered path sample, branch-continued from ``state``.

    Returns (values, end_state).  When ``state`` is None the branch is
    initialized with principal arguments at the first point.
    """
    pts = np.asarray(pts, dtype=complex)
    if state is None:
        state = BranchState.principal(kd, pts[0])
    args = continue_args(kd, pts, state)
    vals = kd.log_phi_with_args(pts, args)
    end = BranchState(pts[-1], args[:, -1] if len(kd.poles) else np.zeros(0))
    return vals, end
