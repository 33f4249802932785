"""Invariant manifolds of saddle orbits as adaptively refined polylines.

A branch is evaluated through the conjugacy with the linear part: for the
unstable side phi(sigma) = f^{k n}(K(sigma mu^{-n})), for the stable side
phi(sigma) = f^{-k n}(K(sigma mu_s^{n})), where K is a local
parametrization with f^k(K(t)) = K(mu t), K(0) = p, K'(0) = v. For fixed
points K is the Taylor polynomial of that conjugacy (solved order by order);
for longer cycles it is the linear part with a smaller seed. Then
f^k(phi(sigma)) = phi(mu sigma) and phi can be evaluated at any sigma
independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import ARCLENGTH, MAX_POINTS
from .errors import DomainError, ExcessiveGrowth, NotHyperbolic
from .henon import HenonParams, Saddle, _params
from .kernels import iterate_orbits

TAYLOR_ORDER = 14
SEED_SCALE = 1e-3  # seed radius with the Taylor parametrization
LINEAR_SEED_SCALE = 1e-6  # seed radius with the linear one


def conjugacy_coefficients(p: HenonParams, x0: complex, mu: complex, order: int = TAYLOR_ORDER):
    """Taylor coefficients (x_j, y_j) of K with f(K(t)) = K(mu t) at the fixed point x0.

    With x-coefficients x_j, y_j = x_j / mu^j and order j of the first
    component gives x_j (mu^j + b mu^-j - 2 x0) = sum_{i=1}^{j-1} x_i x_{j-i}.
    """
    xs = np.zeros(order + 1, dtype=complex)
    xs[0], xs[1] = x0, 1.0
    for j in range(2, order + 1):
        conv = np.dot(xs[1:j], xs[j - 1:0:-1])
        xs[j] = conv / (mu ** j + p.b * mu ** (-j) - 2 * x0)
    ys = xs / mu ** np.arange(order + 1)
    ys[0] = x0
    return xs, ys


@dataclass
class Branch:
    """Evaluator sigma -> point on W^u or W^s of a saddle orbit."""

    params: HenonParams
    anchor: Saddle
    side: str  # "u" or "s"
    n: int = field(init=False)
    factor: float = field(init=False)
    vec: np.ndarray = field(init=False)
    mult: float = field(init=False)

    def __post_init__(self):
        p, sad = self.params, self.anchor
        if not sad.is_saddle:
            raise NotHyperbolic(f"orbit {sad.label} is not a saddle")
        if self.side not in ("u", "s"):
            raise ValueError("side must be 'u' or 's'")
        if self.side == "s" and p.b == 0:
            raise DomainError("stable manifolds need b != 0")
        mu = float(np.real(sad.mult_u if self.side == "u" else sad.mult_s))
        vec = np.real(sad.vec_u if self.side == "u" else sad.vec_s)
        self.taylor = None
        seed = LINEAR_SEED_SCALE
        if sad.period == 1:
            xs, ys = conjugacy_coefficients(p, float(np.real(sad.point[0])), mu)
            # normalize so that K'(0) is the unit eigenvector
            scale = vec[0]
            c = scale ** np.arange(len(xs))
            self.taylor = (np.real(xs * c), np.real(ys * c))
            seed = SEED_SCALE
        if self.side == "u":
            self.n = max(1, math.ceil(math.log(1 / seed) / math.log(abs(mu))))
            self.factor = abs(mu) ** (-self.n)
        else:
            self.n = max(1, math.ceil(math.log(seed) / math.log(abs(mu))))
            self.factor = abs(mu) ** self.n
        self.vec = vec
        self.mult = mu
        # with mu < 0 the seed direction flips every step; fold the sign in
        self.factor *= np.sign(mu) ** self.n

    def seed(self, t):
        """Local parametrization K(t) near the anchor."""
        t = np.asarray(t)
        if self.taylor is None:
            p0 = self.anchor.point
            return p0[0] + t * self.vec[0], p0[1] + t * self.vec[1]
        xs, ys = self.taylor
        x = np.polyval(xs[::-1], t)
        y = np.polyval(ys[::-1], t)
        return x, y

    @property
    def steps(self) -> int:
        return self.anchor.period * self.n

    def __call__(self, sigma, extra: int = 0):
        """Points phi(sigma) as arrays (x, y); `extra` applies f (or f^-1) more times."""
        s = np.atleast_1d(np.asarray(sigma, dtype=float))
        x, y = self.seed(s * self.factor)
        x = np.ascontiguousarray(x, dtype=float)
        y = np.ascontiguousarray(y, dtype=float)
        a, b = float(np.real(self.params.a)), float(np.real(self.params.b))
        iterate_orbits(x, y, a, b, self.steps + extra, self.side == "s")
        return x, y

    def points(self, sigma, extra: int = 0) -> np.ndarray:
        return np.column_stack(self(sigma, extra))


def _chord_deviation(p0, p1, pm):
    d = p1 - p0
    L = np.hypot(d[:, 0], d[:, 1])
    w = pm - p0
    cross = np.abs(d[:, 0] * w[:, 1] - d[:, 1] * w[:, 0])
    with np.errstate(invalid="ignore", divide="ignore"):
        dev = np.where(L > 0, cross / L, np.hypot(w[:, 0], w[:, 1]))
    return dev, L


def refine(fn, sigma, tol: float, max_seg: float = 0.02, max_points: int = MAX_POINTS):
    """Insert midpoints until every chord is within `tol` of the curve.

    `fn(sigma) -> (N, 2)` must be vectorized. Returns (sigma, points).
    """
    s = np.asarray(sigma, dtype=float)
    pts = fn(s)
    while True:
        mid = 0.5 * (s[:-1] + s[1:])
        pm = fn(mid)
        dev, L = _chord_deviation(pts[:-1], pts[1:], pm)
        bad = (dev > tol) | (L > max_seg) | ~np.isfinite(dev)
        bad &= mid > s[:-1]  # stop at the double-precision limit of sigma
        if not bad.any():
            return s, pts
        if len(s) + bad.sum() > max_points:
            raise ExcessiveGrowth(f"refinement exceeds {max_points} points")
        idx = np.flatnonzero(bad) + 1
        s = np.insert(s, idx, mid[bad])
        pts = np.insert(pts, idx, pm[bad], axis=0)


@dataclass
class ManifoldCurve:
    """Polyline sampling of a manifold branch with its parameters."""

    anchor: str
    side: str
    sigma: np.ndarray
    points: np.ndarray
    tol: float

    @property
    def arclength(self) -> float:
        d = np.diff(self.points, axis=0)
        return float(np.hypot(d[:, 0], d[:, 1]).sum())

    def clipped_arclength(self, window) -> float:
        x0, x1, y0, y1 = window
        p = self.points
        inside = (p[:, 0] >= x0) & (p[:, 0] <= x1) & (p[:, 1] >= y0) & (p[:, 1] <= y1)
        d = np.diff(p, axis=0)
        seg = np.hypot(d[:, 0], d[:, 1])
        return float(seg[inside[:-1] & inside[1:]].sum())

    def __len__(self):
        return len(self.sigma)


def grow_manifold(params, anchor: Saddle, side: str = "u", arclength: float = ARCLENGTH,
                  tol: float = 1e-8, direction: int = -1, window=None,
                  max_points: int = MAX_POINTS) -> ManifoldCurve:
    """Grow one branch from the anchor until it has the requested arclength.

    `direction` picks the branch (sign of sigma); with `window` only the part
    inside the window counts toward the arclength.
    """
    p = _params(params)
    br = Branch(p, anchor, side)
    fn = lambda s: br.points(direction * s)
    s_max = 1.0
    s = np.concatenate([[0.0], np.geomspace(1e-6, s_max, 200)])
    s, pts = refine(fn, s, tol, max_points=max_points)
    while True:
        curve = ManifoldCurve(anchor.label, side, direction * s, pts, tol)
        have = curve.clipped_arclength(window) if window else curve.arclength
        if have >= arclength:
            return curve
        new = np.geomspace(s_max, 2 * s_max, 50)[1:]
        s2, p2 = refine(fn, np.concatenate([[s_max], new]), tol,
                        max_points=max_points - len(s))
        s, pts = np.concatenate([s, s2[1:]]), np.concatenate([pts, p2[1:]])
        s_max *= 2
        if len(s) > max_points or s_max > 1e12:
            raise ExcessiveGrowth("manifold growth hit the point cap")


def polyline_distance(points, polyline) -> np.ndarray:
    """Distance from each point to the polyline (nearest vertex's two segments)."""
    from scipy.spatial import cKDTree
    points = np.atleast_2d(np.asarray(points, dtype=float))
    poly = np.asarray(polyline, dtype=float)
    _, idx = cKDTree(poly).query(points)
    best = np.full(len(points), np.inf)
    for k in (-1, 0):
        i0 = np.clip(idx + k, 0, len(poly) - 2)
        p0, p1 = poly[i0], poly[i0 + 1]
        d = p1 - p0
        L2 = np.einsum("ij,ij->i", d, d)
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.clip(np.einsum("ij,ij->i", points - p0, d) / L2, 0, 1)
        t = np.where(L2 > 0, t, 0.0)
        proj = p0 + t[:, None] * d
        best = np.minimum(best, np.hypot(*(points - proj).T))
    return best


def turning_angles(points) -> np.ndarray:
    d = np.diff(np.asarray(points, dtype=float), axis=0)
    ang = np.arctan2(d[:, 1], d[:, 0])
    return np.abs((np.diff(ang) + np.pi) % (2 * np.pi) - np.pi)
