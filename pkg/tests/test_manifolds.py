import numpy as np
import pytest

from horseshoe.errors import DomainError, NotHyperbolic
from horseshoe.henon import HenonParams, apply, apply_inverse, fixed_points
from horseshoe.manifolds import (Branch, conjugacy_coefficients, grow_manifold, polyline_distance,
                                 refine, turning_angles)

PARAMS = [(2.1, 0.05), (2.3, 0.1), (3.0, 0.5), (2.5, -0.3), (1.4, 0.3)]
TOL = 1e-8


def _tube_violations(p, side):
    pp = HenonParams(*p)
    _, Q = fixed_points(pp)
    br = Branch(pp, Q, side)
    grow = abs(br.mult) if side == "u" else 1 / abs(br.mult)
    fn = lambda s: br.points(s)
    s1 = 0.5
    _, piece = refine(fn, np.linspace(-s1, 0, 101), TOL)
    lo = -s1 * grow * 1.01
    # a negative multiplier swaps the two branches
    hi = -lo if br.mult < 0 else 0.0
    _, ext = refine(fn, np.linspace(lo, hi, 201), TOL)
    image = (apply if side == "u" else apply_inverse)(pp, piece)
    return int(np.sum(polyline_distance(image, ext) > 2 * TOL))


@pytest.mark.parametrize("p", PARAMS)
@pytest.mark.parametrize("side", ["u", "s"])
def test_tube_invariance(p, side):
    assert _tube_violations(p, side) == 0


@pytest.mark.parametrize("side", ["u", "s"])
def test_first_segment_along_eigenvector_and_turning(side):
    p = (2.3, 0.1)
    _, Q = fixed_points(p)
    c = grow_manifold(p, Q, side, arclength=2.0 if side == "u" else 0.5, tol=TOL)
    v = c.points[1] - c.points[0]
    e = np.real(Q.vec_u if side == "u" else Q.vec_s)
    angle = np.arccos(min(1.0, abs(v @ e) / np.linalg.norm(v)))
    assert angle < 1e-6
    assert turning_angles(c.points).max() <= 0.2


def test_conjugacy_is_invariant():
    p = HenonParams(2.4, 0.2)
    _, Q = fixed_points(p)
    x0, mu = float(Q.point[0]), float(np.real(Q.mult_u))
    xs, ys = conjugacy_coefficients(p, x0, mu)
    K = lambda t: np.array([np.polyval(xs[::-1], t), np.polyval(ys[::-1], t)])
    t = 1e-3
    z = K(t)
    fz = np.array([z[0] ** 2 - p.a - p.b * z[1], z[0]])
    np.testing.assert_allclose(fz, K(mu * t), atol=1e-14)


def test_branch_evaluation_is_conjugate():
    p = HenonParams(2.2, 0.15)
    _, Q = fixed_points(p)
    br = Branch(p, Q, "u")
    s = np.array([0.01, 0.1, 0.3])
    np.testing.assert_allclose(apply(p, br.points(s)), br.points(br.mult * s), atol=1e-10)


def test_polyline_distance():
    poly = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    d = polyline_distance([[0.5, 0.2], [1.3, 0.5], [0.0, 0.0]], poly)
    np.testing.assert_allclose(d, [0.2, 0.3, 0.0])


def test_errors():
    P, Q = fixed_points((2.0, 0.0))
    with pytest.raises(DomainError):
        Branch(HenonParams(2.0, 0.0), Q, "s")
    with pytest.raises(ValueError):
        Branch(HenonParams(2.3, 0.1), fixed_points((2.3, 0.1))[1], "x")
    # an attracting fixed point is not a saddle
    P, _ = fixed_points((0.1, 0.3))
    assert not P.is_saddle
    with pytest.raises(NotHyperbolic):
        Branch(HenonParams(0.1, 0.3), P, "u")
