"""Sampled tangency-defect scans over tin-can boundaries (slow: about 5 minutes)."""

import numpy as np
import pytest

from horseshoe.cmc import (HenonParams, PieceSpec, boundary_scan, build_piece, intersect_pieces,
                           load_box_family)
from horseshoe.tincan import TinCan, center_can

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def family():
    return load_box_family("+")


@pytest.fixture(scope="module")
def center_scan(family):
    return boundary_scan(center_can(), family.boxes, family.pieces, (16, 16))


def test_center_can_defect_positive(center_scan):
    assert center_scan.samples == 256
    assert not center_scan.failures
    assert center_scan.min_defect > 0.05
    assert center_scan.positive


def test_off_curve_can_defect_large(family, center_scan):
    can = TinCan(2.06, 0.0, 0.006, 0.004, 2.0)
    rep = boundary_scan(can, family.boxes, family.pieces, (8, 8))
    assert not rep.failures
    assert rep.min_defect > 0.3
    assert rep.min_defect > center_scan.min_defect


def _defect(family, a, b):
    p = HenonParams(complex(a), complex(b))
    u, s = (PieceSpec.parse(w, k) for w, k in zip(family.pieces, ("u", "s")))
    return intersect_pieces(build_piece(p, family.boxes, u),
                            build_piece(p, family.boxes, s)).defect


def test_defect_grows_away_from_tangency(family):
    # the defect vanishes like a square root of the distance to the tangency locus, so a
    # wider can's vertical boundary, which lies farther out, sees a larger defect
    b = 0.01
    a_t = 2.0202
    rs = [0.005, 0.01, 0.02, 0.04]
    d = [_defect(family, a_t + r, b) for r in rs]
    assert all(x < y for x, y in zip(d, d[1:]))
    ratio = np.log(d[-1] / d[0]) / np.log(rs[-1] / rs[0])
    assert 0.4 < ratio < 0.6


def test_fattened_can_defect_not_smaller(family, center_scan):
    E = center_can()
    fat = TinCan(E.a0, E.b0, E.h, 2 * E.r, E.s)
    rep = boundary_scan(fat, family.boxes, family.pieces, (8, 8))
    assert not rep.failures
    assert rep.min_defect > center_scan.min_defect
