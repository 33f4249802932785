import numpy as np
import pytest

from horseshoe.duality import extend_sign_verdict, phi, phi_interval, pushforward_slope
from horseshoe.errors import DomainError, EmptyInput
from horseshoe.interval import Interval
from horseshoe.tincan import certificate_chain


def test_phi_is_an_involution_up_to_rounding():
    rng = np.random.default_rng(7)
    for a, b in zip(rng.uniform(-5, 10, 200), rng.uniform(0.05, 3, 200) * rng.choice([-1, 1], 200)):
        a2, b2 = phi(*phi(float(a), float(b)))
        assert abs(b2 - b) <= np.spacing(abs(b))
        assert abs(a2 - a) <= 2 * np.spacing(abs(a))


def test_phi_interval_encloses():
    A, B = phi_interval(Interval.point(2.0), Interval.point(0.3))
    a, b = phi(2.0, 0.3)
    assert A.contains(a) and B.contains(b)


def test_pushforward_is_involutive():
    t, a, b = 1.3, 2.2, 0.4
    a2, b2 = phi(a, b)
    t2 = pushforward_slope(t, a, b)
    assert abs(pushforward_slope(t2, a2, b2) - t) < 1e-12
    with pytest.raises(DomainError):
        phi(1.0, 0.0)


def test_fixed_line_of_the_duality(tables):
    # at b = +-1 the duality fixes the parameter, so the slope satisfies s = 2a/b - s
    for r in tables:
        if abs(abs(r.b) - 1) < 1e-12:
            assert abs(r.s - r.a / r.b) <= 5e-3


def test_extend_verdicts(tables):
    for sign in "+-":
        v = extend_sign_verdict(tables, certificate_chain(tables, sign), sign)
        assert v.holds and v.extremal_row == 50
    with pytest.raises(EmptyInput):
        extend_sign_verdict(tables, [], "+")
