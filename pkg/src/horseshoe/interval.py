"""Outward-rounded interval arithmetic on doubles.

Sums, products, quotients and square roots are computed round-to-nearest and
the exact rounding error is recovered with error-free transformations, so an
endpoint is moved by one ulp only toward the side where the true value lies.
log and exp (libm error below one ulp) are widened by one ulp on both sides.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Union

from .errors import DomainError, EmptyInput

Number = Union[int, float]

_SPLIT = 134217729.0  # 2**27 + 1
_SAFE = 1e150  # Dekker splitting is exact well inside this range
_TINY = 1e-280


def _down(x: float, k: int = 1) -> float:
    for _ in range(k):
        x = math.nextafter(x, -math.inf)
    return x


def _up(x: float, k: int = 1) -> float:
    for _ in range(k):
        x = math.nextafter(x, math.inf)
    return x


def _two_sum_err(a: float, b: float, s: float) -> float:
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _split(a: float):
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod_err(a: float, b: float, p: float) -> float:
    ah, al = _split(a)
    bh, bl = _split(b)
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _safe(*xs) -> bool:
    return all(math.isfinite(x) and (x == 0 or _TINY < abs(x) < _SAFE) for x in xs)


def _exact(q: Fraction):
    """Tightest float enclosure of an exact rational."""
    try:
        v = float(q)
    except OverflowError:
        big = sys.float_info.max
        return (big, math.inf) if q > 0 else (-math.inf, -big)
    if math.isinf(v):
        big = sys.float_info.max
        return (big, math.inf) if v > 0 else (-math.inf, -big)
    fv = Fraction(v)
    if fv < q:
        return v, _up(v)
    if fv > q:
        return _down(v), v
    return v, v


def _slow(a: float, b: float, op):
    """Exact fallback near underflow and overflow; infinities widen to the extended line."""
    if not (math.isfinite(a) and math.isfinite(b)):
        r = op(a, b)
        if math.isnan(r):
            return -math.inf, math.inf
        return _down(r), _up(r)
    return _exact(op(Fraction(a), Fraction(b)))


def _bracket(v: float, err: float):
    """Enclose v + err where err is the sign-exact rounding error."""
    if err > 0:
        return v, _up(v)
    if err < 0:
        return _down(v), v
    return v, v


def _add(a: float, b: float):
    s = a + b
    if not _safe(a, b, s):
        return _slow(a, b, lambda x, y: x + y)
    return _bracket(s, _two_sum_err(a, b, s))


def _mul(a: float, b: float):
    p = a * b
    if a == 0 or b == 0:
        return 0.0, 0.0
    if p == 0 or not _safe(a, b, p):
        return _slow(a, b, lambda x, y: x * y)
    return _bracket(p, _two_prod_err(a, b, p))


def _div(a: float, b: float):
    q = a / b
    if a == 0:
        return 0.0, 0.0
    if q == 0 or not _safe(a, b, q):
        return _slow(a, b, lambda x, y: x / y)
    # remainder a - q b, computed exactly; true quotient is q + r / b
    p = q * b
    r = (a - p) - _two_prod_err(q, b, p)
    return _bracket(q, r if b > 0 else -r)


def _sqrt(x: float):
    s = math.sqrt(x)
    if x == 0:
        return 0.0, 0.0
    if not _safe(x, s):
        return max(0.0, _down(s)), _up(s)
    p = s * s
    r = (x - p) - _two_prod_err(s, s, p)
    lo, hi = _bracket(s, r)
    return max(0.0, lo), hi


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise DomainError("interval endpoint is NaN")
        if lo > hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: Number) -> "Interval":
        return cls(x, x)

    @classmethod
    def around(cls, center: Number, radius: Number) -> "Interval":
        """Enclosure of [center - radius, center + radius]."""
        if radius < 0:
            raise DomainError("negative radius")
        return cls(_add(center, -radius)[0], _add(center, radius)[1])

    @property
    def width(self) -> float:
        return _add(self.hi, -self.lo)[1]

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    __contains__ = contains

    def overlaps(self, other: "Interval") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __add__(self, other):
        o = as_interval(other)
        return Interval(_add(self.lo, o.lo)[0], _add(self.hi, o.hi)[1])

    __radd__ = __add__

    def __sub__(self, other):
        o = as_interval(other)
        return Interval(_add(self.lo, -o.hi)[0], _add(self.hi, -o.lo)[1])

    def __rsub__(self, other):
        return as_interval(other) - self

    def __mul__(self, other):
        o = as_interval(other)
        p = [_mul(x, y) for x in (self.lo, self.hi) for y in (o.lo, o.hi)]
        return Interval(min(v[0] for v in p), max(v[1] for v in p))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = as_interval(other)
        if o.lo <= 0.0 <= o.hi:
            raise DomainError(f"division by interval containing zero {o}")
        q = [_div(x, y) for x in (self.lo, self.hi) for y in (o.lo, o.hi)]
        return Interval(min(v[0] for v in q), max(v[1] for v in q))

    def __rtruediv__(self, other):
        return as_interval(other) / self

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(0.0, max(-self.lo, self.hi))

    def sqr(self) -> "Interval":
        a = abs(self)
        return Interval(_mul(a.lo, a.lo)[0] if a.lo > 0 else 0.0, _mul(a.hi, a.hi)[1])

    def sqrt(self) -> "Interval":
        if self.lo < 0:
            raise DomainError(f"sqrt of interval with negative part {self}")
        return Interval(_sqrt(self.lo)[0], _sqrt(self.hi)[1])

    def log(self) -> "Interval":
        if self.lo <= 0:
            raise DomainError(f"log of interval not strictly positive {self}")
        lo = 0.0 if self.lo == 1.0 else _down(math.log(self.lo))
        hi = 0.0 if self.hi == 1.0 else _up(math.log(self.hi))
        return Interval(lo, hi)

    def exp(self) -> "Interval":
        lo = 1.0 if self.lo == 0.0 else max(0.0, _down(math.exp(self.lo)))
        hi = 1.0 if self.hi == 0.0 else _up(math.exp(self.hi))
        return Interval(lo, hi)

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"


def as_interval(x) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval(x, x)


def sqrt(x) -> Interval:
    return as_interval(x).sqrt()


def log(x) -> Interval:
    return as_interval(x).log()


class Hull(NamedTuple):
    interval: Interval
    gaps: tuple  # uncovered open intervals strictly between inputs

    @property
    def has_gaps(self) -> bool:
        return len(self.gaps) > 0


def hull(intervals: Iterable[Interval]) -> Hull:
    """Smallest interval containing all inputs, plus the gaps of their union."""
    items = sorted((as_interval(i) for i in intervals), key=lambda i: (i.lo, i.hi))
    if not items:
        raise EmptyInput("hull of no intervals")
    gaps = []
    reach = items[0].hi
    for it in items[1:]:
        if it.lo > reach:
            gaps.append(Interval(reach, it.lo))
        reach = max(reach, it.hi)
    return Hull(Interval(items[0].lo, reach), tuple(gaps))


@dataclass(frozen=True)
class ComplexRect:
    """Rectangle re x im in the complex plane."""

    re: Interval
    im: Interval

    @classmethod
    def point(cls, z: complex) -> "ComplexRect":
        z = complex(z)
        return cls(Interval.point(z.real), Interval.point(z.imag))

    @classmethod
    def around(cls, z: complex, radius: float) -> "ComplexRect":
        """Square enclosure of the disk |w - z| <= radius."""
        z = complex(z)
        return cls(Interval.around(z.real, radius), Interval.around(z.imag, radius))

    def contains(self, z) -> bool:
        z = complex(z)
        return self.re.contains(z.real) and self.im.contains(z.imag)

    __contains__ = contains

    def __add__(self, other):
        o = as_rect(other)
        return ComplexRect(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = as_rect(other)
        return ComplexRect(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return as_rect(other) - self

    def __neg__(self):
        return ComplexRect(-self.re, -self.im)

    def __mul__(self, other):
        o = as_rect(other)
        return ComplexRect(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def abs(self) -> Interval:
        """Enclosure of |z| over the rectangle."""
        return (self.re.sqr() + self.im.sqr()).sqrt()

    @property
    def mid(self) -> complex:
        return complex(self.re.mid, self.im.mid)


def as_rect(z) -> ComplexRect:
    if isinstance(z, ComplexRect):
        return z
    if isinstance(z, Interval):
        return ComplexRect(z, Interval.point(0.0))
    return ComplexRect.point(z)
