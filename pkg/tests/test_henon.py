import math

import numpy as np
import pytest

from horseshoe.errors import DegenerateCycle, DomainError, NoFixedPoint
from horseshoe.henon import (HenonParams, apply, apply_inverse, chebyshev_cycle, cycle_multipliers,
                             find_cycle, fixed_point_multipliers, fixed_points, iterate,
                             orbit_jacobian)


def test_inverse_round_trip():
    p = HenonParams(1.4, 0.3)
    z = np.array([[0.3, -0.2], [1.1, 0.4]])
    np.testing.assert_allclose(apply_inverse(p, apply(p, z)), z, atol=1e-14)
    np.testing.assert_allclose(iterate(p, iterate(p, z, 3), -3), z, atol=1e-11)


def test_jacobian_determinant_is_b():
    p = HenonParams(2.3, -0.4)
    M = orbit_jacobian(p, [np.array([0.7, 0.1])])
    assert math.isclose(np.linalg.det(M), -0.4, rel_tol=1e-14)


def test_fixed_points_at_chebyshev():
    P, Q = fixed_points((2.0, 0.0))
    np.testing.assert_allclose(P.point, [-1, -1])
    np.testing.assert_allclose(Q.point, [2, 2])
    (lp, _), (lq, _) = fixed_point_multipliers((2.0, 0.0))
    assert abs(lq - 4) < 1e-12 and abs(lp + 2) < 1e-12


def test_fixed_points_are_fixed():
    p = HenonParams(3.1, 0.45)
    for s in fixed_points(p):
        np.testing.assert_allclose(apply(p, s.point), s.point, atol=1e-13)
        assert s.is_saddle


def test_no_real_fixed_points():
    with pytest.raises(NoFixedPoint):
        fixed_points((-1.0, 0.0))


@pytest.mark.parametrize("period,branch,mu", [(2, "A", -4.0), (3, "A", 8.0), (3, "B", -8.0)])
def test_chebyshev_cycles(period, branch, mu):
    c = chebyshev_cycle(period, branch)
    assert c.period == period
    m, _ = cycle_multipliers((2.0, 0.0), c)
    assert abs(m - mu) < 1e-9


def test_multiplier_invariant_under_rotation():
    p = HenonParams(2.2, 0.1)
    c = find_cycle(p, chebyshev_cycle(3, "A").point, 3)
    m0 = c.mult_u
    for k in range(1, 3):
        rot = np.roll(c.points, -k, axis=0)
        mk = np.linalg.eigvals(orbit_jacobian(p, rot))
        assert min(abs(mk - m0)) < 1e-12 * abs(m0)


def test_degenerate_cycle_detected():
    with pytest.raises(DegenerateCycle):
        find_cycle((2.0, 0.0), np.array([2.0, 2.0]), 2)


def test_inverse_needs_nonzero_b():
    with pytest.raises(DomainError):
        apply_inverse((2.0, 0.0), np.array([0.0, 0.0]))


def test_multiplier_products_are_powers_of_b():
    p = HenonParams(2.4, -0.3)
    for s in fixed_points(p):
        assert abs(s.mult_u * s.mult_s - p.b) < 1e-12
    c = find_cycle(HenonParams(2.2, 0.1), chebyshev_cycle(3, "A").point, 3)
    assert abs(c.mult_u * c.mult_s - 0.1 ** 3) < 1e-12
