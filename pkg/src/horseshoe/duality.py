"""Parameter duality Phi(a, b) = (a / b^2, 1 / b) and slope push-forward.

f_{a,b} and f_{Phi(a,b)} are conjugate to each others' inverses, so the
locus is invariant under Phi and a tangent slope t at (a, b) maps to
2 a / b - t at Phi(a, b).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, EmptyInput
from .interval import Interval, as_interval
from .tincan import TinCan
from . import constants as C


def phi(a, b):
    """Phi(a, b); real float inputs give correctly rounded components."""
    if b == 0:
        raise DomainError("the duality is undefined at b = 0")
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        fa, fb = Fraction(a), Fraction(b)
        return float(fa / (fb * fb)), float(1 / fb)
    return a / (b * b), 1 / b


def phi_interval(a, b):
    A, B = as_interval(a), as_interval(b)
    return A / B.sqr(), 1 / B


def pushforward_slope(t, a, b):
    """Slope at Phi(a, b) of the image of a curve with slope t at (a, b)."""
    if any(isinstance(v, Interval) for v in (t, a, b)):
        return (as_interval(a) * 2.0) / as_interval(b) - as_interval(t)
    if b == 0:
        raise DomainError("the duality is undefined at b = 0")
    return 2 * a / b - t


@dataclass(frozen=True)
class ExtensionVerdict:
    sign: str
    holds: bool
    extremal_row: int
    extremal_value: float  # 2 a_n / b_n at the extremal row
    min_margin: float
    violating_rows: tuple


def extend_sign_verdict(grid, chain, sign: str = "+",
                        radius_factor: float = C.RADIUS_FACTOR) -> ExtensionVerdict:
    """Check 2a/b - t > 0 (b > 0) or < 0 (b < 0) over every certified row.

    For row n the locus over |b - b_n| <= alpha h lies in the can, so
    a in a_n + s_n [-alpha h, alpha h] + [-r, r]; t is the row's slope enclosure.
    """
    rows = {r.n: r for r in grid if r.sign == sign and r.n >= 1}
    certs = [c for c in chain if c.n >= 1 and c.n in rows]
    if not certs:
        raise EmptyInput("no rows with n >= 1 to check")
    best = None
    margins = []
    for c in certs:
        r = rows[c.n]
        can = TinCan.for_row(r.a, r.b, r.s, r.h, radius_factor)
        half = c.b_interval.hi - r.b
        A = r.a + r.s * Interval(-half, half) + Interval(-can.r, can.r)
        q = (A * 2.0) / c.b_interval
        if sign == "+":
            m = q.lo - c.slope.hi
        else:
            m = c.slope.lo - q.hi
        margins.append((c.n, m))
        v = 2 * r.a / r.b
        if best is None or (v < best[1] if sign == "+" else v > best[1]):
            best = (c.n, v)
    bad = tuple(n for n, m in margins if not m > 0)
    return ExtensionVerdict(sign, not bad, best[0], best[1], min(m for _, m in margins), bad)
