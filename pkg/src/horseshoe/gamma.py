"""Lyapunov-exponent balance Gamma(a, b) = log|lam_Q|/2 - log|mu_u(cycle)|/k.

For k = 1 the cycle is the fixed point P. The zero set of Gamma near
(2, 0) is traced as a curve a = gamma(b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BracketLost, DomainError, NotConverged
from .henon import CycleFamily, fixed_point_multipliers
from .interval import Interval, as_interval

_FAMILIES: dict = {}


def cycle_family(period: int, branch: str = "A") -> CycleFamily:
    key = (period, "P" if period == 1 else branch)
    if key not in _FAMILIES:
        _FAMILIES[key] = CycleFamily(period, key[1])
    return _FAMILIES[key]


def _gamma_interval(a: Interval, b: Interval) -> Interval:
    """Enclosure of Gamma for the fixed-point pair (P, Q)."""
    one_b = b + 1.0
    r = (one_b.sqr() + a * 4.0).sqrt()
    xq = (one_b + r) * 0.5
    xp = (one_b - r) * 0.5
    lq = xq + (xq.sqr() - b).sqrt()
    lp = xp - (xp.sqr() - b).sqrt()
    return abs(lq).log() * 0.5 - abs(lp).log()


def lyapunov_exponent(a, b, period: int = 1, branch: str = "A") -> float:
    """log|mu_u| / k for the selected cycle (P when k = 1)."""
    if period == 1:
        (lp, _), _ = fixed_point_multipliers((a, b))
        return math.log(abs(lp))
    cyc = cycle_family(period, branch).at((a, b))
    return math.log(abs(cyc.mult_u)) / period


def gamma_value(a, b, period: int = 1, branch: str = "A"):
    """Gamma(a, b); an Interval when a or b is an Interval (k = 1 only)."""
    if isinstance(a, Interval) or isinstance(b, Interval):
        if period != 1:
            raise DomainError("interval evaluation is only available for the fixed-point pair")
        return _gamma_interval(as_interval(a), as_interval(b))
    _, (lq, _) = fixed_point_multipliers((a, b))
    return 0.5 * math.log(abs(lq)) - lyapunov_exponent(a, b, period, branch)


def _richardson(fn, x: float, h: float) -> float:
    d1 = (fn(x + h) - fn(x - h)) / (2 * h)
    d2 = (fn(x + h / 2) - fn(x - h / 2)) / h
    return (4 * d2 - d1) / 3


@dataclass(frozen=True)
class GammaPartials:
    d_a: float
    d_b: float
    slope: float  # d gamma / d b = -d_b / d_a along the zero set
    consistent: bool  # agreement with the coarser step


def gamma_partials(a: float, b: float, period: int = 1, branch: str = "A",
                   step: float = 1e-6, check_step: float = 1e-5) -> GammaPartials:
    """Central differences with one Richardson step, cross-checked at a coarser step."""
    def g(x, y):
        return gamma_value(x, y, period, branch)

    da = _richardson(lambda x: g(x, b), a, step)
    db = _richardson(lambda y: g(a, y), b, step)
    da2 = _richardson(lambda x: g(x, b), a, check_step)
    db2 = _richardson(lambda y: g(a, y), b, check_step)
    ok = all(abs(u - v) <= 1e-4 * max(abs(u), 1e-12) for u, v in ((da, da2), (db, db2)))
    return GammaPartials(da, db, -db / da, ok)


@dataclass
class ZeroCurve:
    period: int
    branch: str
    b: np.ndarray
    a: np.ndarray
    residual: np.ndarray

    def rows(self):
        for bi, ai, ri in zip(self.b, self.a, self.residual):
            yield {"period": self.period, "b": float(bi), "a": float(ai), "gamma_residual": float(ri)}


DEFAULT_BRACKETS = {1: (1.5, 7.0), 2: (1.5, 7.0), 3: (1.9, 3.0)}


def _solve_a(b, period, branch, lo, hi, xtol):
    g = lambda x: gamma_value(x, b, period, branch)
    glo, ghi = g(lo), g(hi)
    if glo * ghi > 0:
        raise BracketLost(f"no sign change of Gamma on [{lo}, {hi}] at b={b}")
    return brentq(g, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)


def trace_zero_curve(period: int = 1, b_range=(-0.1, 0.1), step: float = 0.005,
                     branch: str = "A", bracket=None, xtol: float = 1e-13) -> ZeroCurve:
    """Follow gamma(b) across b_range, starting at the grid point closest to 0."""
    lo_b, hi_b = b_range
    n = int(round((hi_b - lo_b) / step))
    bs = np.round(lo_b + step * np.arange(n + 1), 12)
    i0 = int(np.argmin(np.abs(bs)))
    bracket = bracket or DEFAULT_BRACKETS.get(period, (1.5, 7.0))
    a = np.full(len(bs), np.nan)
    a[i0] = _solve_a(bs[i0], period, branch, *bracket, xtol)
    for direction in (1, -1):
        i = i0 + direction
        while 0 <= i < len(bs):
            prev = a[i - direction]
            j = i - 2 * direction
            # linear predictor from the last two points
            guess = 2 * prev - a[j] if 0 <= j < len(bs) and np.isfinite(a[j]) else prev
            w = 2 * step
            for _ in range(6):
                try:
                    a[i] = _solve_a(bs[i], period, branch, guess - w, guess + w, xtol)
                    break
                except (BracketLost, NotConverged):
                    w *= 2
            else:
                raise BracketLost(f"lost the zero curve at b={bs[i]}")
            i += direction
    res = np.array([gamma_value(ai, bi, period, branch) for ai, bi in zip(a, bs)])
    return ZeroCurve(period, branch, bs, a, res)


@dataclass(frozen=True)
class NondegeneracyReport:
    period: int
    branch: str
    samples: tuple  # (a, b, Gamma)
    sign: int  # +1 all positive, -1 all negative, 0 mixed

    @property
    def nondegenerate(self) -> bool:
        return self.sign != 0


def nondegeneracy_scan(samples, period: int = 1, branch: str = "A") -> NondegeneracyReport:
    """Sign of Gamma at boundary samples (a, b); a uniform sign means no zero there."""
    vals = tuple((float(a), float(b), gamma_value(a, b, period, branch)) for a, b in samples)
    g = np.array([v[2] for v in vals])
    sign = 1 if np.all(g > 0) else (-1 if np.all(g < 0) else 0)
    return NondegeneracyReport(period, branch, vals, sign)
