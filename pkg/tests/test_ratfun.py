import numpy as np
import pytest

from laplace_ode import (GaussRational, Poly, build_q, partial_fractions,
                         poly_roots, residue_at)
from laplace_ode.ratfun import reexpand

from oracles import random_normalized_spec


def _cluster_map(clusters):
    return {complex(c.center): c.multiplicity for c in clusters}


def test_roots_q1_of_fifth_order_fixture():
    got = _cluster_map(poly_roots(Poly.exact([0, -1, 0, 1])))   # t^3 - t
    assert got == {0j: 1, 1 + 0j: 1, -1 + 0j: 1}


def test_roots_q1_of_sixth_order_fixture():
    got = _cluster_map(poly_roots(Poly.exact([0, 0, -1, 0, -1])))  # -t^4 - t^2
    assert got == {0j: 2, 1j: 1, -1j: 1}


def test_roots_triple():
    got = poly_roots(Poly.exact([-8, 12, -6, 1]))               # (t-2)^3
    assert _cluster_map(got) == {2 + 0j: 3}
    assert got[0].exact


def test_roots_triple_numeric():
    r = 1.234567
    p = Poly([-(r ** 3), 3 * r * r, -3 * r, 1.0])
    got = poly_roots(p)
    assert len(got) == 1
    assert got[0].multiplicity == 3
    assert abs(got[0].center_complex - r) < 1e-9


def test_roots_requires_degree():
    with pytest.raises(ValueError):
        poly_roots(Poly.exact([3]))


def test_partial_fractions_airy(problems):
    outer, poles = partial_fractions(*build_q(problems("airy").spec))
    assert outer == Poly.exact([0, 0, -1])
    assert poles == []


def test_partial_fractions_quartic_transformed():
    # Q0 = t^4 - 1, Q1 = -t^3:  Q0/Q1 = -t + 1/t^3
    outer, poles = partial_fractions(Poly.exact([-1, 0, 0, 0, 1]),
                                     Poly.exact([0, 0, 0, -1]))
    assert outer == Poly.exact([0, -1])
    assert len(poles) == 1
    p = poles[0]
    assert complex(p.location) == 0j
    assert p.multiplicity == 3
    assert complex(p.residue) == 0j
    assert [complex(c) for c in p.principal] == [0j, 0j, 1 + 0j]


def test_residues_of_fifth_order_fixture(problems):
    q0, q1 = build_q(problems("ex7_1").spec)
    assert complex(residue_at(q0, q1, 0)) == 2 + 0j
    assert complex(residue_at(q0, q1, 1)) == 2 + 0j
    assert complex(residue_at(q0, q1, -1)) == 3 + 0j


def test_residue_simple():
    assert complex(residue_at(Poly.exact([1]), Poly.exact([0, 1]), 0)) == 1


def test_residue_rejects_non_pole():
    with pytest.raises(ValueError, match="not a root"):
        residue_at(Poly.exact([1]), Poly.exact([0, 1]), 3.0)


def test_exact_multiplicities_on_rational_roots():
    # (t-1)^2 (t+2)^3 t
    p = Poly.exact([1])
    for root, mult in ((1, 2), (-2, 3), (0, 1)):
        for _ in range(mult):
            p = p * Poly.exact([-root, 1])
    got = poly_roots(p)
    assert _cluster_map(got) == {1 + 0j: 2, -2 + 0j: 3, 0j: 1}
    assert all(c.exact for c in got)


def test_reexpansion_property_100_random():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        spec = random_normalized_spec(rng)
        q0, q1 = build_q(spec)
        outer, poles = partial_fractions(q0, q1)
        rebuilt = reexpand(outer, poles, q1)
        diff = rebuilt - q0
        scale = max(q0.max_abs_coeff(), 1.0)
        err = max((abs(complex(c)) for c in diff.coeffs), default=0.0)
        assert err <= 1e-10 * scale


def test_residue_matches_circle_quadrature_random():
    rng = np.random.default_rng(7)
    for _ in range(25):
        spec = random_normalized_spec(rng)
        q0, q1 = build_q(spec)
        outer, poles = partial_fractions(q0, q1)
        for p in poles:
            others = [complex(q.location) for q in poles if q is not p]
            dist = min((abs(complex(p.location) - o) for o in others),
                       default=1.0)
            if dist < 1e-6:
                continue
            radius = 0.5 * min(dist, 1.0)
            th = 2 * np.pi * np.arange(256) / 256
            t = complex(p.location) + radius * np.exp(1j * th)
            vals = q0.eval_array(t) / q1.eval_array(t)
            num = np.sum(vals * radius * np.exp(1j * th)) / 256
            assert abs(num - complex(p.residue)) <= \
                1e-9 * max(1.0, abs(complex(p.residue)))
