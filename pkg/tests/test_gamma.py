import math

import numpy as np
import pytest

from horseshoe.errors import DomainError
from horseshoe.gamma import (gamma_partials, gamma_value, lyapunov_exponent, nondegeneracy_scan,
                             trace_zero_curve)
from horseshoe.interval import Interval


def test_gamma_vanishes_at_chebyshev():
    assert abs(gamma_value(2.0, 0.0)) < 1e-12


def test_partials_at_chebyshev():
    gp = gamma_partials(2.0, 0.0)
    assert abs(gp.d_a + 0.25) < 1e-8
    assert abs(gp.slope - 23 / 8) < 1e-6
    assert gp.consistent


@pytest.mark.parametrize("a", [2.01, 2.05, 2.1])
def test_gamma_negative_on_axis(a):
    assert gamma_value(a, 0.0) < 0


def test_interval_enclosure_contains_point_value():
    a, b = 2.03, 0.015
    iv = gamma_value(Interval.around(a, 1e-9), Interval.around(b, 1e-9))
    assert iv.contains(gamma_value(a, b))
    with pytest.raises(DomainError):
        gamma_value(Interval.point(2.0), 0.0, period=2)


@pytest.mark.parametrize("period,branch", [(2, "A"), (3, "A"), (3, "B")])
def test_cycle_lyapunov_log2(period, branch):
    assert abs(lyapunov_exponent(2.0, 0.0, period, branch) - math.log(2)) < 1e-9


def test_zero_curve_residuals_and_slope():
    zc = trace_zero_curve(1, (-0.02, 0.02), 0.005)
    assert np.all(np.abs(zc.residual) < 1e-10)
    i0 = int(np.argmin(np.abs(zc.b)))
    assert abs(zc.a[i0] - 2.0) < 1e-12
    # the locus leaves (2, 0) with slope 23/8
    slope = (zc.a[i0 + 1] - zc.a[i0 - 1]) / (zc.b[i0 + 1] - zc.b[i0 - 1])
    assert abs(slope - 23 / 8) < 0.05
    rows = list(zc.rows())
    assert set(rows[0]) == {"period", "b", "a", "gamma_residual"}


def test_nondegeneracy_along_the_boundary(tables):
    from horseshoe.tangency import a_aprx
    # Gamma > 0 on the b > 0 side of the boundary near (2, 0)
    samples = [(a_aprx(b, tables), b) for b in np.linspace(0.01, 0.1, 10)]
    rep = nondegeneracy_scan(samples)
    assert rep.nondegenerate and rep.sign == 1
