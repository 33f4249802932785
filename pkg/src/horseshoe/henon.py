"""The Henon family f(x, y) = (x^2 - a - b y, x): orbits, fixed points, cycles."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCycle, DomainError, NoFixedPoint, NotConverged


@dataclass(frozen=True)
class HenonParams:
    a: complex
    b: complex

    @property
    def is_real(self) -> bool:
        return np.isreal(self.a) and np.isreal(self.b)

    def real(self) -> "HenonParams":
        return HenonParams(float(np.real(self.a)), float(np.real(self.b)))


def _params(p) -> HenonParams:
    if isinstance(p, HenonParams):
        return p
    a, b = p
    return HenonParams(a, b)


def apply(p, z):
    """Image of points z (shape (..., 2)) under f."""
    p = _params(p)
    z = np.asarray(z)
    x, y = z[..., 0], z[..., 1]
    return np.stack([x * x - p.a - p.b * y, x], axis=-1)


def apply_inverse(p, z):
    p = _params(p)
    if p.b == 0:
        raise DomainError("the map is not invertible at b = 0")
    z = np.asarray(z)
    X, Y = z[..., 0], z[..., 1]
    return np.stack([Y, (Y * Y - p.a - X) / p.b], axis=-1)


def iterate(p, z, n: int):
    """f^n(z) for n >= 0, f^{-|n|}(z) for n < 0."""
    step = apply if n >= 0 else apply_inverse
    for _ in range(abs(n)):
        z = step(p, z)
    return z


def jacobian(p, z) -> np.ndarray:
    p = _params(p)
    return np.array([[2 * z[0], -p.b], [1, 0]])


def orbit_jacobian(p, points) -> np.ndarray:
    """Df^k along the orbit points[0], ..., points[k-1]."""
    p = _params(p)
    dtype = complex if (not p.is_real or np.iscomplexobj(points)) else float
    M = np.eye(2, dtype=dtype)
    for z in points:
        J = np.array([[2 * z[0], -p.b], [1, 0]], dtype=dtype)
        M = J @ M
    return M


@dataclass(frozen=True)
class Saddle:
    """A periodic orbit together with its multipliers and eigendirections.

    `points` has shape (period, 2). `mult_u`, `mult_s` are the eigenvalues
    of Df^period at points[0] (|mult_u| >= |mult_s|); `vec_u`, `vec_s` the
    matching unit eigenvectors there.
    """

    points: np.ndarray
    period: int
    mult_u: complex
    mult_s: complex
    vec_u: np.ndarray
    vec_s: np.ndarray
    label: str = ""

    @property
    def point(self) -> np.ndarray:
        return self.points[0]

    @property
    def is_saddle(self) -> bool:
        return abs(self.mult_u) > 1 > abs(self.mult_s)


def _eig_sorted(M):
    w, v = np.linalg.eig(M)
    order = np.argsort(-np.abs(w))
    w, v = w[order], v[:, order]
    if np.all(np.abs(np.imag(w)) < 1e-14 * max(1.0, np.max(np.abs(w)))) and np.isrealobj(M):
        w, v = np.real(w), np.real(v)
    return w, v


def _saddle(p, points, label="") -> Saddle:
    points = np.asarray(points)
    M = orbit_jacobian(p, points)
    w, v = _eig_sorted(M)
    vu, vs = v[:, 0], v[:, 1]
    # orientation conventions: unstable vector has positive x, stable positive y
    if np.real(vu[0]) < 0:
        vu = -vu
    if np.real(vs[1]) < 0:
        vs = -vs
    return Saddle(points, len(points), w[0], w[1], vu / np.linalg.norm(vu),
                  vs / np.linalg.norm(vs), label)


def fixed_point_coords(p):
    """Closed-form x-coordinates (x_P, x_Q) of the two fixed points."""
    p = _params(p)
    disc = (1 + p.b) ** 2 + 4 * p.a
    if p.is_real:
        disc = float(np.real(disc))
        if disc < 0:
            raise NoFixedPoint(f"no real fixed points at a={p.a}, b={p.b}")
        r = math.sqrt(disc)
        c = float(np.real(1 + p.b))
    else:
        r = cmath.sqrt(disc)
        c = 1 + p.b
    return (c - r) / 2, (c + r) / 2


def fixed_point_multipliers(p):
    """Closed-form multipliers (lam_u, lam_s) at P and at Q."""
    p = _params(p)
    xp, xq = fixed_point_coords(p)
    out = []
    for x in (xp, xq):
        d = x * x - p.b
        r = math.sqrt(d) if (p.is_real and np.real(d) >= 0) else cmath.sqrt(d)
        lu = x + r if abs(x + r) >= abs(x - r) else x - r
        out.append((lu, p.b / lu))
    return tuple(out)


def fixed_points(p):
    """The fixed points (P, Q), P on the left, with multipliers and eigenvectors."""
    p = _params(p)
    xp, xq = fixed_point_coords(p)
    P = _saddle(p, np.array([[xp, xp]]), "P")
    Q = _saddle(p, np.array([[xq, xq]]), "Q")
    return P, Q


def _residual(p, z, k):
    w = z
    J = np.eye(2, dtype=np.result_type(z, complex if not p.is_real else float))
    for _ in range(k):
        Jz = np.array([[2 * w[0], -p.b], [1, 0]], dtype=J.dtype)
        w = np.array([w[0] * w[0] - p.a - p.b * w[1], w[0]], dtype=J.dtype)
        J = Jz @ J
    return w - z, J - np.eye(2)


def find_cycle(p, seed, period: int, tol: float = 1e-13, max_iter: int = 60,
               label: str = "") -> Saddle:
    """Newton's method with backtracking on f^period(z) - z.

    Raises DegenerateCycle when the limit has a smaller true period.
    """
    p = _params(p)
    dtype = float if (p.is_real and np.isrealobj(seed)) else complex
    z = np.asarray(seed, dtype=dtype).reshape(2)
    F, DF = _residual(p, z, period)
    nF = np.linalg.norm(F)
    for _ in range(max_iter):
        if nF <= tol * max(1.0, np.linalg.norm(z)):
            break
        try:
            dz = np.linalg.solve(DF, -F)
        except np.linalg.LinAlgError as exc:
            raise NotConverged(f"singular Newton matrix: {exc}") from exc
        lam = 1.0
        while True:
            zn = z + lam * dz
            Fn, DFn = _residual(p, zn, period)
            if np.all(np.isfinite(Fn)) and np.linalg.norm(Fn) < (1 - 1e-4 * lam) * nF:
                break
            lam *= 0.5
            if lam < 1e-10:
                raise NotConverged("line search failed")
        z, F, DF, nF = zn, Fn, DFn, np.linalg.norm(Fn)
    else:
        raise NotConverged(f"no convergence after {max_iter} iterations (|F|={nF:.3g})")
    pts = [z]
    for _ in range(period - 1):
        pts.append(np.array([pts[-1][0] ** 2 - p.a - p.b * pts[-1][1], pts[-1][0]]))
    pts = np.array(pts)
    scale = max(1.0, float(np.max(np.abs(pts))))
    for j in range(1, period):
        if period % j == 0 and np.linalg.norm(pts[j] - pts[0]) < 1e-8 * scale:
            raise DegenerateCycle(f"orbit has period {j}, not {period}")
    return _saddle(p, pts, label)


def cycle_multipliers(p, cycle: Saddle):
    """(unstable, stable) multipliers of Df^k along the orbit."""
    M = orbit_jacobian(p, cycle.points)
    w, _ = _eig_sorted(M)
    return w[0], w[1]


# seeds at the Chebyshev parameter (a, b) = (2, 0): x = 2 cos(theta) with
# f(2 cos t) = 2 cos 2t, so cycles come from angles with 2^k theta = +-theta.
CHEBYSHEV_ANGLES = {
    (1, "Q"): 0.0,
    (1, "P"): 2 * math.pi / 3,
    (2, "A"): 2 * math.pi / 5,
    (3, "A"): 2 * math.pi / 7,
    (3, "B"): 2 * math.pi / 9,
}


def chebyshev_orbit(period: int, branch: str = "A") -> np.ndarray:
    theta = CHEBYSHEV_ANGLES[(period, branch)]
    xs = [2 * math.cos(theta * 2 ** j) for j in range(period + 1)]
    # point j is (x_j, x_{j-1}), with x_{-1} = x_{k-1}
    return np.array([[xs[j], xs[j - 1] if j > 0 else xs[period - 1]] for j in range(period)])


def chebyshev_cycle(period: int, branch: str = "A") -> Saddle:
    pts = chebyshev_orbit(period, branch)
    return find_cycle((2.0, 0.0), pts[0], period, label=f"{period}{branch}")


def continue_cycle(cycle: Saddle, p_from, p_to, max_step: float = 0.02) -> Saddle:
    """Follow a hyperbolic cycle along the segment from p_from to p_to."""
    p0, p1 = _params(p_from), _params(p_to)
    dist = abs(complex(p1.a - p0.a)) + abs(complex(p1.b - p0.b))
    n = max(1, int(math.ceil(dist / max_step)))
    z = cycle.points[0]
    t, dt = 0.0, 1.0 / n
    cur = cycle
    while t < 1.0 - 1e-15:
        dt = min(dt, 1.0 - t)
        tn = t + dt
        pn = HenonParams(p0.a + tn * (p1.a - p0.a), p0.b + tn * (p1.b - p0.b))
        try:
            nxt = find_cycle(pn, z, cycle.period, label=cycle.label)
            if np.linalg.norm(nxt.points[0] - z) > 0.1 + 5 * dt:
                raise NotConverged("continuation jumped to another orbit")
        except (NotConverged, DegenerateCycle):
            dt *= 0.5
            if dt < 1e-6:
                raise
            continue
        cur, z, t = nxt, nxt.points[0], tn
        dt = min(2 * dt, 1.0 / n)
    return cur


@dataclass
class CycleFamily:
    """Cycle continued from its Chebyshev seed, cached by parameter."""

    period: int
    branch: str = "A"
    _cache: dict = field(default_factory=dict, repr=False)

    def at(self, p) -> Saddle:
        p = _params(p)
        key = (complex(p.a), complex(p.b))
        if key in self._cache:
            return self._cache[key]
        if self.period == 1:
            P, Q = fixed_points(p)
            cyc = Q if self.branch == "Q" else P
        else:
            # start from the nearest cached parameter, else from the seed
            best, src = None, None
            for (ka, kb), c in self._cache.items():
                d = abs(ka - key[0]) + abs(kb - key[1])
                if best is None or d < best:
                    best, src = d, ((ka, kb), c)
            if src is None or best > 0.05:
                src = ((2.0, 0.0), chebyshev_cycle(self.period, self.branch))
            (sa, sb), c0 = src
            if not p.is_real:
                start = HenonParams(sa, sb)
            else:
                start = HenonParams(sa.real, sb.real)
            cyc = continue_cycle(c0, start, p)
        self._cache[key] = cyc
        return cyc
