import math

import numpy as np
import pytest

from laplace_ode import (Contour, ContourError, canonical_contour,
                         combine_linear, laplace_eval, laplace_eval_multi,
                         plan_contour, truncation_bound)

from oracles import airy_derivative, airy_value


def test_canonical_contour_airy(airy):
    kd = airy.kernel
    c = canonical_contour(kd, 0)
    assert c.radius == 0.0
    # counterclockwise run: in along -pi/3, out along +pi/3
    assert abs(c.alpha + math.pi / 3) < 1e-15
    assert abs(c.beta - math.pi / 3) < 1e-15
    c1 = canonical_contour(kd, 1)
    assert abs(c1.alpha - math.pi / 3) < 1e-15
    assert abs(c1.beta - math.pi) < 1e-15


def test_canonical_contour_quartic(problems):
    kd = problems("ex7_3").kernel
    c = canonical_contour(kd, 0)
    assert c.radius == 1.0
    assert abs(abs(c.alpha) - math.pi / 2) < 1e-15
    assert abs(abs(c.beta) - math.pi / 2) < 1e-15


def test_canonical_contour_bounds(problems):
    kd = problems("airy").kernel
    with pytest.raises(ContourError):
        canonical_contour(kd, 3)


def test_decay_condition_rejected(airy):
    kd = airy.kernel
    # rays at +-pi/6 sit exactly on the decay boundary for m + 1 = 3
    c = Contour(radius=0.0, alpha=-math.pi / 6, beta=math.pi / 6, t_max=6.0)
    with pytest.raises(ContourError, match="decay"):
        laplace_eval(kd, c, 0.0, 0)


def test_radius_must_clear_poles(problems):
    kd = problems("ex7_1").kernel
    c = Contour(radius=0.5, alpha=-math.pi / 3, beta=math.pi / 3, t_max=6.0)
    with pytest.raises(ContourError, match="singular"):
        laplace_eval(kd, c, 0.0, 0)


def test_truncation_bound_airy_example(airy):
    kd = airy.kernel
    c = canonical_contour(kd, 0)
    t16 = truncation_bound(kd, c, 0.0, 1e-16)
    assert 4.5 <= t16 <= 9.0          # the bound solves near 6.1
    t8 = truncation_bound(kd, c, 0.0, 1e-8)
    assert t8 <= t16
    t_big = truncation_bound(kd, c, 8.0, 1e-16)
    assert t_big >= t16               # monotone in |z|


def test_airy_values_against_oracle(airy):
    kd = airy.kernel
    c = canonical_contour(kd, 0)
    for x in (0.0, 1.0, 2.0):
        got = laplace_eval(kd, c, x, 0, 1e-12).value
        want = airy_value(x)
        assert abs(got - want) <= 1e-9 * abs(want)
        got1 = laplace_eval(kd, c, x, 1, 1e-12).value
        want1 = airy_derivative(x)
        assert abs(got1 - want1) <= 1e-9 * abs(want1)


def test_contour_independence(airy):
    kd = airy.kernel
    c1 = canonical_contour(kd, 0)
    c2 = Contour(radius=2.0, alpha=-0.4 * math.pi, beta=0.4 * math.pi,
                 t_max=8.0)
    for z in (0.0, 2.0, 2j, -3.0):
        a = laplace_eval(kd, c1, z, 0, 1e-12)
        b = laplace_eval(kd, c2, z, 0, 1e-12)
        assert abs(a.value - b.value) <= 1e-9 * abs(a.value)


def test_derivative_consistency(problems):
    kd = problems("ex7_5").kernel
    c = canonical_contour(kd, 0)
    rng = np.random.default_rng(5)
    pts = rng.normal(0, 1.2, 10) + 1j * rng.normal(0, 1.2, 10)
    h = 1e-5
    for z in pts:
        d = laplace_eval(kd, c, z, 1, 1e-11)
        f_p = laplace_eval(kd, c, z + h, 0, 1e-11)
        f_m = laplace_eval(kd, c, z - h, 0, 1e-11)
        fd = combine_linear([(1.0 / (2 * h), f_p), (-1.0 / (2 * h), f_m)])
        scale = math.exp(fd.log_scale - d.log_scale)
        rel = abs(fd.mantissa * scale - d.mantissa) / abs(d.mantissa)
        assert rel <= 1e-5


def test_shared_scale_across_derivatives(problems):
    kd = problems("ex7_2").kernel
    c = canonical_contour(kd, 0)
    rs = laplace_eval_multi(kd, c, 1.0 + 0.5j, [0, 1, 2, 3], 1e-10)
    assert len({r.log_scale for r in rs}) == 1
    assert all(r.est_error <= 1e-9 * abs(r.mantissa) + 1e-300 for r in rs)


def test_node_budget_flag(airy):
    # the fixed canonical contour cannot resolve z = 40 within 100 nodes
    kd = airy.kernel
    c = canonical_contour(kd, 0, z=40.0)
    r = laplace_eval(kd, c, 40.0, 0, 1e-10, node_budget=100)
    assert "node_budget_exhausted" in r.flags


def test_plan_contour_small_z_is_canonical(airy):
    kd = airy.kernel
    c = plan_contour(kd, 0, 0.5, 1e-10)
    assert c.radius == 0.0
    assert abs(c.alpha + math.pi / 3) < 1e-12
    assert abs(c.beta - math.pi / 3) < 1e-12


def test_plan_contour_matches_canonical_value(problems):
    for name in ("airy", "ex7_2"):
        kd = problems(name).kernel
        for z in (0.7, -2.0 + 1.0j, 8.0, 20j):
            a = laplace_eval(kd, canonical_contour(kd, 0, z), z, 0, 1e-11)
            b = laplace_eval(kd, plan_contour(kd, 0, z, 1e-11), z, 0, 1e-11)
            assert abs(a.log_abs() - b.log_abs()) < 1e-7
            rel = abs(a.mantissa * math.exp(a.log_scale - b.log_scale)
                      - b.mantissa) / abs(b.mantissa)
            assert rel < 1e-7


def test_plan_contour_keeps_angles_for_many_valued(problems):
    kd = problems("ex7_6").kernel
    c = plan_contour(kd, 0, 30.0, 1e-10)
    assert abs(c.alpha + math.pi / 3) < 1e-12
    assert abs(c.beta - math.pi / 3) < 1e-12
    assert c.radius >= kd.singular_radius + 1.0


def test_large_z_log_scale_is_referenced_to_path_max(airy):
    kd = airy.kernel
    z = 40.0
    c = plan_contour(kd, 0, z, 1e-10)
    q = laplace_eval(kd, c, z, 0, 1e-10)
    want = -(2.0 / 3.0) * z ** 1.5
    assert abs(q.log_abs() - want) < 0.05 * abs(want)
    assert q.rel_error() < 1e-8


def test_large_positive_z_log_law(problems):
    # log|value| * rho / z^rho approaches -1 on the positive axis
    cases = (("ex7_3", 2.0, 25.0), ("cubic_airy", 4.0 / 3.0, 40.0))
    for name, rho, x in cases:
        kd = problems(name).kernel
        c = plan_contour(kd, 0, x, 1e-9)
        q = laplace_eval(kd, c, x, 0, 1e-9)
        ratio = q.log_abs() * rho / x ** rho
        assert abs(ratio + 1.0) < 0.06
