"""Tin cans in complex (a, b)-space and slope certificates from Schwarz bounds.

A can C((a0, b0), h, r, s) = {|b - b0| <= h, |a - a0 - s (b - b0)| <= r}.
If the tangency locus crosses it as the graph a = kappa(b) of a holomorphic
function (degree one), phi(z) = kappa(b0 + z) - a0 - s z maps the h-disk
into the r-disk, and the Schwarz-Pick bound
    |phi'(z)| <= h (r^2 - |phi|^2) / (r (h^2 - |z|^2)) <= h r / (h^2 - |z|^2)
bounds the slope deviation from s for |z| <= rho < h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import constants as C
from .errors import DomainError, EmptyInput, RhoTooLarge
from .interval import Hull, Interval, hull


@dataclass(frozen=True)
class TinCan:
    a0: float
    b0: float
    h: float
    r: float
    s: float

    def __post_init__(self):
        if not (self.h > 0 and self.r > 0):
            raise DomainError("tin can needs h > 0 and r > 0")

    def contains(self, a: complex, b: complex) -> bool:
        return abs(b - self.b0) <= self.h and abs(a - self.a0 - self.s * (b - self.b0)) <= self.r

    def middle(self, alpha: float) -> "TinCan":
        return replace(self, h=self.h * alpha)

    @classmethod
    def for_row(cls, a: float, b: float, s: float, h: float,
                radius_factor: float = C.RADIUS_FACTOR) -> "TinCan":
        return cls(a, b, h, radius_factor * h, s)


def schwarz_center_bound(h: float, r: float) -> Interval:
    """|phi'(0)| <= r / h when phi(0) = 0 is anchored at the center."""
    return Interval.point(r) / Interval.point(h)


def schwarz_general_bound(h: float, r: float, rho: float) -> Interval:
    """Enclosure of h r / (h^2 - rho^2), the slope deviation bound on |z| <= rho."""
    if rho < 0:
        raise DomainError("rho must be non-negative")
    if rho >= h:
        raise RhoTooLarge(f"rho={rho} must be smaller than the can height h={h}")
    H, R, P = Interval.point(h), Interval.point(r), Interval.point(rho)
    # factored so that each operation is exact when r and rho are simple multiples of h
    return (R / (H + P)) * (H / (H - P))


@dataclass(frozen=True)
class Certificate:
    n: int
    sign: str
    b_interval: Interval
    slope: Interval
    alpha: float
    provenance: str  # how the degree-one hypothesis is supported

    def as_row(self) -> dict:
        return {"n": self.n, "b_lo": self.b_interval.lo, "b_hi": self.b_interval.hi,
                "slope_lo": self.slope.lo, "slope_hi": self.slope.hi, "alpha": self.alpha,
                "flag_provenance": self.provenance}


def can_certificate(can: TinCan, n: int = 0, sign: str = "+", alpha: float = C.CERT_ALPHA,
                    provenance: str = "degree-one:assumed") -> Certificate:
    """Slopes of the tangency locus over |b - b0| <= alpha h lie in s +- bound."""
    rho = alpha * can.h
    w = schwarz_general_bound(can.h, can.r, rho).hi
    slope = Interval.around(can.s, w)
    b_int = Interval.around(can.b0, rho)
    return Certificate(n, sign, b_int, slope, alpha, provenance)


def center_certificate(can: TinCan, provenance: str = "degree-one:assumed") -> Certificate:
    """Slope at b0 alone, for a locus through the can center (a0, b0)."""
    w = schwarz_center_bound(can.h, can.r).hi
    return Certificate(0, "0", Interval.point(can.b0), Interval.around(can.s, w), 0.0, provenance)


PRESETS = {
    # heights as tabulated, certificates on the middle halves |b - b_n| <= h/2
    "tabulated": {"height_factor": 1.0, "alpha": 0.5},
    # doubled heights with the same radius/height ratio: the middle halves then
    # tile the b-axis without gaps and the slope half-width stays 2
    "contiguous": {"height_factor": 2.0, "alpha": 0.5},
}


def grid_cans(grid, sign: str, height_factor: float = 1.0,
              radius_factor: float = C.RADIUS_FACTOR):
    """One can per grid row: C((a_n, b_n), h_n, 3 h_n / 2, s_n)."""
    rows = sorted((r for r in grid if r.sign == sign), key=lambda r: r.n)
    return [(r.n, TinCan.for_row(r.a, r.b, r.s, r.h * height_factor, radius_factor))
            for r in rows]


def certificate_chain(grid, sign: str, preset: str = "tabulated", alpha: float | None = None,
                      provenance: str = "degree-one:assumed",
                      radius_factor: float = C.RADIUS_FACTOR):
    if preset not in PRESETS:
        raise DomainError(f"unknown preset {preset!r}")
    cfg = PRESETS[preset]
    alpha = cfg["alpha"] if alpha is None else alpha
    return [can_certificate(can, n, sign, alpha, provenance)
            for n, can in grid_cans(grid, sign, cfg["height_factor"], radius_factor)]


@dataclass(frozen=True)
class UnionReport:
    slopes: Hull
    coverage: Hull
    target: Interval | None
    uncovered: tuple  # parts of the target missed by the b-intervals

    @property
    def covers_target(self) -> bool:
        return not self.uncovered


def certificate_union(chain, target: Interval | None = None) -> UnionReport:
    if not chain:
        raise EmptyInput("empty certificate chain")
    slopes = hull(c.slope for c in chain)
    cov = hull(c.b_interval for c in chain)
    uncovered = []
    if target is not None:
        for g in cov.gaps:
            part = g.intersect(target)
            if part is not None and part.lo < part.hi:
                uncovered.append(part)
        if cov.interval.lo > target.lo:
            uncovered.insert(0, Interval(target.lo, cov.interval.lo))
        if cov.interval.hi < target.hi:
            uncovered.append(Interval(cov.interval.hi, target.hi))
    return UnionReport(slopes, cov, target, tuple(uncovered))


def _origin(chain):
    for c in chain:
        if c.n == 0:
            return c
    raise EmptyInput("chain has no n = 0 row")


@dataclass(frozen=True)
class CornerVerdict:
    plus: Interval
    minus: Interval
    corner: bool  # disjoint one-sided slope enclosures at b = 0
    separation: float


def corner_verdict(chain_plus, chain_minus) -> CornerVerdict:
    p, m = _origin(chain_plus).slope, _origin(chain_minus).slope
    sep = max(m.lo - p.hi, p.lo - m.hi)
    return CornerVerdict(p, m, not p.overlaps(m), sep)


@dataclass(frozen=True)
class MonotonicityVerdict:
    margin_plus: float  # min slope lower bound over b > 0 rows
    margin_minus: float  # min of -(slope upper bound) over b < 0 rows
    holds: bool


def monotonicity_verdict(chain_plus, chain_minus) -> MonotonicityVerdict:
    mp = min(c.slope.lo for c in chain_plus)
    mm = min(-c.slope.hi for c in chain_minus)
    return MonotonicityVerdict(mp, mm, mp > 0 and mm > 0)


def center_can() -> TinCan:
    c = C.CENTER_CAN
    return TinCan(c["a"], c["b"], c["h"], c["r"], c["s"])


def center_slope_verdict(can: TinCan | None = None, bound: float = C.CENTER_SLOPE_BOUND):
    """Slope at the corner point from the central can: |slope - s| < bound."""
    can = can or center_can()
    w = schwarz_center_bound(can.h, can.r)
    return w, w.hi < bound
