import pytest

from horseshoe.errors import DomainError, EmptyInput, RhoTooLarge
from horseshoe.interval import Interval
from horseshoe.tincan import (TinCan, can_certificate, center_can, center_slope_verdict,
                              certificate_chain, certificate_union, corner_verdict,
                              monotonicity_verdict, schwarz_center_bound, schwarz_general_bound)


def test_can_membership():
    can = TinCan(2.0, 0.0, 0.024, 0.021, 2.0)
    assert can.contains(2.0 + 2 * 0.01j, 0.01j)
    assert not can.contains(2.03, 0.0)
    assert not can.contains(2.0, 0.03)
    with pytest.raises(DomainError):
        TinCan(0, 0, 0, 1, 0)


def test_schwarz_bounds():
    assert schwarz_center_bound(0.024, 0.021).contains(0.021 / 0.024)
    w = schwarz_general_bound(0.01, 0.015, 0.005)
    assert w.contains(0.01 * 0.015 / (0.01 ** 2 - 0.005 ** 2))
    with pytest.raises(RhoTooLarge):
        schwarz_general_bound(0.01, 0.015, 0.01)


def test_generic_half_width_is_two():
    c = can_certificate(TinCan.for_row(2.5, 0.3, 1.7, 0.01), 15)
    half = (c.slope.hi - c.slope.lo) / 2
    assert abs(half - 2.0) <= 4e-15
    assert c.b_interval.contains(Interval(0.295, 0.305))


def test_center_verdict():
    w, ok = center_slope_verdict(center_can())
    assert ok and w.hi < 7 / 8
    s = Interval.around(2.0, w.hi)
    assert 1.125 < s.lo and s.hi < 2.875


def test_chain_union_and_gaps(tables):
    chain = certificate_chain(tables, "+")
    assert len(chain) == 51
    u = certificate_union(chain, Interval(0.0, 1.0))
    assert not u.covers_target
    assert len(u.uncovered) == 50
    contiguous = certificate_chain(tables, "+", preset="contiguous")
    assert certificate_union(contiguous, Interval(0.0, 1.0)).covers_target
    with pytest.raises(EmptyInput):
        certificate_union([])
    with pytest.raises(DomainError):
        certificate_chain(tables, "+", preset="nope")


def test_corner_and_monotonicity(tables):
    cp, cm = certificate_chain(tables, "+"), certificate_chain(tables, "-")
    v = corner_verdict(cp, cm)
    assert v.corner and v.separation > 0
    m = monotonicity_verdict(cp, cm)
    assert m.holds


def test_certificate_row_columns():
    c = can_certificate(TinCan.for_row(2.5, 0.3, 1.7, 0.01), 15)
    assert list(c.as_row()) == ["n", "b_lo", "b_hi", "slope_lo", "slope_hi", "alpha",
                                "flag_provenance"]
