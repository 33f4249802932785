"""Projective boxes, crossed mappings by sampled winding numbers, and special pieces.

A chart projects C^2 from a focus onto a complex line; a box is the
preimage of a bidisk under two charts (pi_u, pi_v). f: B ∩ f^-1(B') -> B'
is crossed of degree d if (pi'_u o f, pi_v) is proper of degree d. On a
sampled v-fiber of B, F(u) = pi'_u(f) - c'_u and G(u) = pi'_v(f) - c'_v;
the winding of F on the u-circle counts all preimages of the center, the
roots inside disk_u are located with multiplicities, and the degree counts
those whose image also lies in disk_v'. Properness is a margin proxy: on
the u-boundary the image must leave the target bidisk, and at interior
samples over disk_u' the v-image must stay off the circle of disk_v'.

Pieces are built by graph transforms: horizontal disks v = psi(u) are
pushed forward, vertical disks u = chi(v) pulled back, each graph stored
by its Taylor coefficients in the normalized disk coordinate.
"""

from __future__ import annotations

import json
import math
import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import (ConfigError, DomainError, GraphTransformDiverged, HorseshoeError,
                     Inconclusive, OnExceptionalLine, SamplingTooCoarse)
from .henon import HenonParams, _params, apply
from .tincan import TinCan

PROPER_SLACK = 1e-12  # relative slack for boundary images landing on the target circle
GRAPH_SAMPLES = 64
MAX_GRAPH_SAMPLES = 256
TAIL_TOL = 1e-10  # relative size of the top quarter of Taylor coefficients
MAX_TRANSFORMS = 200


# ---------------------------------------------------------------- charts and boxes


def _vec(p) -> np.ndarray:
    """Point of C^2 from a pair of numbers or [re, im] pairs."""
    out = []
    for c in p:
        if isinstance(c, (list, tuple)):
            c = complex(c[0], c[1])
        out.append(complex(c))
    if len(out) != 2:
        raise ConfigError(f"expected a point of C^2, got {p!r}")
    return np.array(out)


def _cross(p, q):
    return p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0]


@dataclass(frozen=True)
class ProjectiveChart:
    """Central projection from `focus` onto the line anchor + t direction.

    With `focus` None the focus sits at infinity in `focus_direction`, so the
    projection is along parallel lines (a coordinate drop in affine charts).
    """

    anchor: np.ndarray
    direction: np.ndarray
    focus: np.ndarray | None = None
    focus_direction: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "anchor", _vec(self.anchor))
        object.__setattr__(self, "direction", _vec(self.direction))
        if abs(self.direction).max() == 0:
            raise DomainError("chart line needs a nonzero direction")
        if self.focus is None:
            e = _vec(self.focus_direction if self.focus_direction is not None else (0, 1))
            if abs(_cross(self.direction, e)) < 1e-14 * _norm(self.direction) * _norm(e):
                raise DomainError("projection direction is parallel to the chart line")
            object.__setattr__(self, "focus_direction", e)
        else:
            F = _vec(self.focus)
            if abs(_cross(self.direction, F - self.anchor)) < 1e-14 * _norm(self.direction) * (1 + _norm(F)):
                raise DomainError("the focus lies on the chart line")
            object.__setattr__(self, "focus", F)

    @classmethod
    def coordinate(cls, axis: int) -> "ProjectiveChart":
        """Affine chart returning the x (axis 0) or y (axis 1) coordinate."""
        d = np.eye(2)[axis]
        return cls((0, 0), d, None, np.eye(2)[1 - axis])

    def line_point(self, t):
        return self.anchor + np.asarray(t)[..., None] * self.direction

    def fiber(self, t):
        """Base point and direction of the projection fiber over t."""
        P = self.line_point(t)
        if self.focus is None:
            return P, np.broadcast_to(self.focus_direction, P.shape)
        return P, P - self.focus

    def as_dict(self) -> dict:
        enc = lambda v: None if v is None else [[c.real, c.imag] for c in v]
        return {"anchor": enc(self.anchor), "direction": enc(self.direction),
                "focus": enc(self.focus), "focus_direction": enc(self.focus_direction)}


def _norm(v) -> float:
    return float(np.sqrt(np.sum(np.abs(v) ** 2)))


def project(chart: ProjectiveChart, z):
    """Coordinate on the chart line of the central projection of z (shape (..., 2))."""
    z = np.asarray(z, dtype=complex)
    d = chart.direction
    if chart.focus is None:
        e = chart.focus_direction
        # t d - s e = z - anchor
        return _cross(z - chart.anchor, -e) / _cross(d, -e)
    w = z - chart.focus
    det = _cross(d, -w)
    if np.any(np.abs(det) <= 1e-14 * _norm(d) * np.maximum(np.sqrt(np.sum(np.abs(w) ** 2, axis=-1)), 1e-300)):
        raise OnExceptionalLine("point on the line through the focus parallel to the chart line")
    # t d - s w = focus - anchor
    return _cross(chart.focus - chart.anchor, -w) / det


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("disk radius must be positive")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    def circle(self, k: int, scale: float = 1.0):
        th = 2 * np.pi * np.arange(k) / k
        return self.center + scale * self.radius * np.exp(1j * th)

    def spiral(self, m: int):
        """m points spread over the open disk (Vogel spiral), center first."""
        k = np.arange(m)
        rad = self.radius * np.sqrt(k / m)
        return self.center + rad * np.exp(1j * k * np.pi * (3 - math.sqrt(5)))

    def polar(self, rings: int, spokes: int, rmax: float = 1.0):
        rr = rmax * (np.arange(rings) + 0.5) / rings
        th = 2 * np.pi * np.arange(spokes) / spokes
        return self.center + self.radius * (rr[:, None] * np.exp(1j * th[None, :])).ravel()

    def contains(self, w, slack: float = 0.0):
        return np.abs(np.asarray(w) - self.center) < self.radius * (1 + slack)


@dataclass(frozen=True)
class ProjectiveBox:
    chart_u: ProjectiveChart
    chart_v: ProjectiveChart
    disk_u: Disk
    disk_v: Disk
    label: str = ""

    def coords(self, z):
        return project(self.chart_u, z), project(self.chart_v, z)

    def point(self, u, v):
        """The point with pi_u = u and pi_v = v (intersection of the two fibers)."""
        u, v = np.broadcast_arrays(np.asarray(u, dtype=complex), np.asarray(v, dtype=complex))
        p1, q1 = self.chart_u.fiber(u)
        p2, q2 = self.chart_v.fiber(v)
        # p1 + s q1 = p2 + t q2
        det = _cross(q1, -q2)
        if np.any(det == 0):
            raise OnExceptionalLine("projection fibers are parallel")
        s = _cross(p2 - p1, -q2) / det
        return p1 + s[..., None] * q1

    def contains(self, z) -> np.ndarray:
        u, v = self.coords(z)
        return self.disk_u.contains(u) & self.disk_v.contains(v)

    def as_dict(self) -> dict:
        disk = lambda d: {"center": [d.center.real, d.center.imag], "radius": d.radius}
        return {"label": self.label, "chart_u": self.chart_u.as_dict(),
                "chart_v": self.chart_v.as_dict(), "disk_u": disk(self.disk_u),
                "disk_v": disk(self.disk_v)}


def affine_box(cu: complex, ru: float, cv: complex, rv: float, label: str = "") -> ProjectiveBox:
    """Bidisk in the (x, y) coordinates."""
    return ProjectiveBox(ProjectiveChart.coordinate(0), ProjectiveChart.coordinate(1),
                         Disk(cu, ru), Disk(cv, rv), label)


# ---------------------------------------------------------------- crossing degree


@dataclass(frozen=True)
class DegreeReport:
    degree: int | None  # common degree, None when inconclusive
    fiber_degrees: tuple
    margin_u: float  # boundary images: min of max(|F|/r' - 1, |G|/rho' - 1)
    margin_v: float  # min | |G|/rho' - 1 | where |F| < r' (distance from the side of B')
    fibers: int
    boundary_samples: int
    note: str = ""

    @property
    def conclusive(self) -> bool:
        return self.degree is not None

    @property
    def crossed(self) -> bool:
        """Proper of positive degree on B ∩ f^-1(B')."""
        return self.conclusive and self.degree >= 1 and self.margin_v > PROPER_SLACK

    def as_dict(self) -> dict:
        return {"degree": self.degree, "fiber_degrees": list(self.fiber_degrees),
                "margin_u": self.margin_u, "margin_v": self.margin_v,
                "conclusive": self.conclusive, "crossed": self.crossed,
                "fibers": self.fibers, "boundary_samples": self.boundary_samples,
                "note": self.note}


def winding_number(g) -> int:
    """Winding of the closed sampled loop g around 0; SamplingTooCoarse on big jumps."""
    g = np.asarray(g)
    if np.any(g == 0):
        raise Inconclusive("loop passes through the center")
    inc = np.angle(np.roll(g, -1, axis=-1) / g)
    if np.any(np.abs(inc) > np.pi / 2):
        raise SamplingTooCoarse("argument increment above pi/2 between adjacent samples")
    return np.rint(inc.sum(axis=-1) / (2 * np.pi)).astype(int)


def _roots_in_disk(F, disk: Disk, expected: int, grid=(6, 24)):
    """Zeros of the holomorphic F inside `disk` with multiplicity (repeated entries).

    Newton limits from a polar grid are clustered; each cluster's multiplicity
    is the winding of F on a small circle around it.
    """
    if expected <= 0:
        return np.zeros(0, dtype=complex)
    sol, res = _newton(F, 0.0, disk.polar(*grid))
    ok = np.isfinite(sol) & (res < 1e-9) & disk.contains(sol)
    eps = 1e-3 * disk.radius
    roots = []
    for c in _dedupe(sol[ok], 2 * eps):
        m = int(winding_number(F(c + eps * np.exp(2j * np.pi * np.arange(64) / 64))))
        roots += [c] * m
    if len(roots) != expected:
        raise Inconclusive(f"found {len(roots)} of {expected} preimages")
    return np.array(roots, dtype=complex)


def crossing_degree(f, B: ProjectiveBox, B2: ProjectiveBox, fibers: int = 8,
                    boundary_samples: int = 256, interior: tuple = (12, 48)) -> DegreeReport:
    """Degree of (pi'_u o f, pi_v): B ∩ f^-1(B2) -> disk_u' x disk_v by sampling.

    On each v-fiber the winding of F = pi'_u f - c'_u around the boundary of
    disk_u counts all preimages of c'_u; those whose image has G = pi'_v f - c'_v
    inside disk_v' make up the degree.
    """
    Du, Dv = B2.disk_u, B2.disk_v
    vs = B.disk_v.spiral(fibers)
    us = B.disk_u.circle(boundary_samples)
    w = f(B.point(us[None, :], vs[:, None]))
    F = project(B2.chart_u, w) - Du.center
    G = project(B2.chart_v, w) - Dv.center
    total = winding_number(F)
    margin_u = float(np.maximum(np.abs(F) / Du.radius - 1, np.abs(G) / Dv.radius - 1).min())
    ui = B.disk_u.polar(*interior)
    wi = f(B.point(ui[None, :], vs[:, None]))
    hit = Du.contains(project(B2.chart_u, wi))
    if hit.any():
        g = np.abs(project(B2.chart_v, wi[hit]) - Dv.center) / Dv.radius
        margin_v = float(np.abs(g - 1).min())
    else:
        margin_v = math.inf
    degs, note = [], ""
    for v, n in zip(vs, total):
        Fv = lambda u, v=v: project(B2.chart_u, f(B.point(u, v))) - Du.center
        try:
            roots = _roots_in_disk(Fv, B.disk_u, int(n))
        except Inconclusive as exc:
            degs.append(-1)
            note = str(exc)
            continue
        if len(roots) == 0:
            degs.append(0)
            continue
        gv = project(B2.chart_v, f(B.point(roots, v))) - Dv.center
        degs.append(int(np.sum(np.abs(gv) < Dv.radius)))
    degs = tuple(degs)
    proper = margin_u > -PROPER_SLACK
    degree = degs[0] if proper and len(set(degs)) == 1 and degs[0] >= 0 else None
    if not proper:
        note = note or "boundary image enters the target box"
    elif degree is None and not note:
        note = "fiber degrees disagree"
    return DegreeReport(degree, degs, margin_u, margin_v, fibers, boundary_samples, note)


def henon_map(p):
    p = _params(p)
    return lambda z: apply(p, z)


@dataclass(frozen=True)
class TransitionTable:
    sign: str
    pairs: frozenset

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(tuple(int(i) for i in q) for q in self.pairs))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(sorted(self.pairs))

    def admissible(self, i: int, j: int) -> bool:
        return (i, j) in self.pairs


TRANSITIONS_PLUS = TransitionTable("+", {(0, 0), (0, 2), (0, 3), (1, 0), (2, 2), (2, 3), (3, 1)})
TRANSITIONS_MINUS = TransitionTable("-", {(0, 0), (0, 2), (1, 0), (1, 2), (2, 4), (3, 4),
                                          (4, 1), (4, 3)})
TRANSITIONS = {"+": TRANSITIONS_PLUS, "-": TRANSITIONS_MINUS}


@dataclass
class TransitionReport:
    params: tuple
    reports: dict  # (i, j) -> DegreeReport or error dict
    doubled: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(isinstance(r, DegreeReport) and r.conclusive for r in self.reports.values())

    @property
    def stable(self) -> bool:
        """Degrees unchanged with doubled fibers and boundary samples."""
        if not self.doubled:
            return False
        for key, r in self.reports.items():
            r2 = self.doubled.get(key)
            if not (isinstance(r, DegreeReport) and isinstance(r2, DegreeReport)):
                return False
            if r.degree != r2.degree:
                return False
        return True

    def as_dict(self) -> dict:
        enc = lambda r: r.as_dict() if isinstance(r, DegreeReport) else r
        out = {"params": [str(c) for c in self.params], "passed": self.passed,
               "pairs": {f"{i},{j}": enc(r) for (i, j), r in sorted(self.reports.items())}}
        if self.doubled:
            out["stable_under_doubling"] = self.stable
            out["doubled"] = {f"{i},{j}": enc(r) for (i, j), r in sorted(self.doubled.items())}
        return out


def check_transitions(p, boxes, table: TransitionTable, fibers: int = 8,
                      boundary_samples: int = 256, doubled: bool = False) -> TransitionReport:
    """crossing_degree for every admissible pair; failures are recorded per pair."""
    p = _params(p)
    f = henon_map(p)

    def run(m, k):
        out = {}
        for i, j in table:
            try:
                out[(i, j)] = crossing_degree(f, boxes[i], boxes[j], m, k)
            except (HorseshoeError, IndexError, KeyError) as exc:
                out[(i, j)] = {"error": getattr(exc, "code", "error"), "message": str(exc)}
        return out

    rep = TransitionReport((p.a, p.b), run(fibers, boundary_samples))
    if doubled:
        rep.doubled = run(2 * fibers, 2 * boundary_samples)
    return rep


# ---------------------------------------------------------------- graphs on disks


@dataclass
class DiskGraph:
    """Holomorphic function on a disk stored by Taylor coefficients in (w - c) / r."""

    disk: Disk
    coeffs: np.ndarray

    @classmethod
    def constant(cls, disk: Disk, value: complex, n: int = GRAPH_SAMPLES) -> "DiskGraph":
        c = np.zeros(n, dtype=complex)
        c[0] = value
        return cls(disk, c)

    @classmethod
    def from_circle(cls, disk: Disk, values) -> "DiskGraph":
        values = np.asarray(values, dtype=complex)
        return cls(disk, np.fft.fft(values) / len(values))

    def __call__(self, w):
        t = (np.asarray(w) - self.disk.center) / self.disk.radius
        return np.polyval(self.coeffs[::-1], t)

    def derivative(self, w):
        k = np.arange(1, len(self.coeffs))
        t = (np.asarray(w) - self.disk.center) / self.disk.radius
        return np.polyval((k * self.coeffs[1:])[::-1], t) / self.disk.radius

    def samples(self):
        return self(self.disk.circle(len(self.coeffs)))


def _newton(F, target, x0, tol=1e-13, maxit=60, h=1e-7):
    """Vectorized complex Newton for F(x) = target with a central-difference derivative."""
    x = np.array(x0, dtype=complex)
    # lanes that run away overflow to inf/nan and are rejected by their residual
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for _ in range(maxit):
            r = F(x) - target
            d = (F(x + h) - F(x - h)) / (2 * h)
            step = np.where(d != 0, r / np.where(d != 0, d, 1), 0)
            x = x - step
            if np.all(np.abs(step) <= tol * (1 + np.abs(x))):
                break
        return x, np.abs(F(x) - target)


def _nearest_start(F, disk: Disk, targets, grid=(10, 40), admissible=None):
    """For each target the grid point of the disk whose image is closest.

    `admissible(points) -> bool mask` restricts the candidates.
    """
    pts = disk.polar(*grid)
    if admissible is not None:
        pts = pts[admissible(pts)]
        if len(pts) == 0:
            raise GraphTransformDiverged("no admissible grid point")
    vals = F(pts)
    k = np.argmin(np.abs(vals[None, :] - np.asarray(targets)[:, None]), axis=1)
    return pts[k]


def push_graph(f, B: ProjectiveBox, psi: DiskGraph, B2: ProjectiveBox):
    """Horizontal graph in B2 of f(graph psi ∩ f^-1 B2) for a degree-one transition."""
    image = lambda u: f(B.point(u, psi(u)))
    F = lambda u: project(B2.chart_u, image(u))
    inside = lambda u: B2.disk_v.contains(project(B2.chart_v, image(u)))
    targets = B2.disk_u.circle(len(psi.coeffs))
    u, res = _newton(F, targets, _nearest_start(F, B.disk_u, targets, admissible=inside))
    if not np.all(np.isfinite(u)) or np.any(res > 1e-9) or not np.all(inside(u)):
        raise GraphTransformDiverged(f"push {B.label}->{B2.label} did not converge")
    v2 = project(B2.chart_v, image(u))
    return DiskGraph.from_circle(B2.disk_u, v2), float(res.max())


def pull_graph(f, B: ProjectiveBox, chi: DiskGraph, B2: ProjectiveBox):
    """Vertical graph in B of f^-1(graph chi) ∩ B for a degree-one transition."""
    vs = B.disk_v.circle(len(chi.coeffs))

    def G(u, v=vs):
        w = f(B.point(u, v))
        return project(B2.chart_u, w) - chi(project(B2.chart_v, w))

    pts = B.disk_u.polar(10, 40)
    w = f(B.point(pts[None, :], vs[:, None]))
    wv = project(B2.chart_v, w)
    ok = B2.disk_v.contains(wv)
    vals = np.where(ok, np.abs(project(B2.chart_u, w) - chi(wv)), np.inf)
    u0 = pts[np.argmin(vals, axis=1)]
    u, res = _newton(G, 0.0, u0)
    inside = B2.disk_v.contains(project(B2.chart_v, f(B.point(u, vs))))
    if not np.all(np.isfinite(u)) or np.any(res > 1e-9) or not np.all(inside):
        raise GraphTransformDiverged(f"pull {B.label}<-{B2.label} did not converge")
    return DiskGraph.from_circle(B.disk_v, u), float(res.max())


# ---------------------------------------------------------------- pieces


@dataclass(frozen=True)
class PieceSpec:
    """Symbol word with one periodic block, written in parentheses: '31(0)', '(0)23', '(43)4124'.

    A block at the right end gives a stable piece, at the left end an
    unstable one; a bare block is unstable unless `kind` says otherwise.
    """

    prefix: tuple
    block: tuple
    suffix: tuple
    kind: str

    @classmethod
    def parse(cls, word: str, kind: str | None = None) -> "PieceSpec":
        w = _overline_to_parens(word.replace(".", "").replace("·", "").replace(" ", ""))
        m = re.fullmatch(r"(\d*)\((\d+)\)(\d*)", w)
        if not m:
            raise ConfigError(f"cannot parse piece word {word!r}")
        pre, blk, suf = (tuple(int(c) for c in g) for g in m.groups())
        if pre and suf:
            raise ConfigError("periodic block must sit at one end of the word")
        k = "s" if pre else "u"
        if kind is not None:
            if (pre and kind == "u") or (suf and kind == "s"):
                raise ConfigError(f"word {word!r} is not a {kind} piece")
            k = kind
        return cls(pre, blk, suf, k)

    @property
    def letters(self) -> tuple:
        return self.prefix + self.block + self.suffix

    def transitions(self) -> list:
        """Every transition the word uses, including the loop of the block."""
        loop = self.block + self.block[:1]
        out = [(loop[i], loop[i + 1]) for i in range(len(self.block))]
        if self.kind == "s":
            w = self.prefix + self.block[:1]
        else:
            w = self.block[-1:] + self.suffix
        out += [(w[i], w[i + 1]) for i in range(len(w) - 1)]
        return out

    def validate(self, table: TransitionTable) -> None:
        bad = [t for t in self.transitions() if not table.admissible(*t)]
        if bad:
            raise ConfigError(f"inadmissible transitions {bad}")

    def __str__(self):
        s = lambda t: "".join(str(c) for c in t)
        return f"{s(self.prefix)}({s(self.block)}){s(self.suffix)}"


def _overline_to_parens(w: str) -> str:
    """'0̄23' or '4̄3̄4124' (combining overline/macron) -> '(0)23' / '(43)4124'."""
    marks = {"̄", "̅"}
    if not any(c in marks for c in w):
        return w
    out, block = [], []
    chars = unicodedata.normalize("NFD", w)
    i = 0
    while i < len(chars):
        c = chars[i]
        barred = i + 1 < len(chars) and chars[i + 1] in marks
        if barred:
            block.append(c)
            i += 2
            continue
        if block:
            out.append("(" + "".join(block) + ")")
            block = []
        out.append(c)
        i += 1
    if block:
        out.append("(" + "".join(block) + ")")
    return "".join(out)


@dataclass
class Piece:
    """A holomorphic disk of a special piece, sampled.

    For stable pieces `graph` is u = chi(v) over disk_v of `box`. For unstable
    ones `graph` is v = psi(u) over disk_u of `base` (the last box reached by
    degree-one transitions) and `tail` lists the boxes visited afterwards;
    the disk is f^len(tail)(graph) and its degree over disk_u of `box` is
    `degree` (one value per preimage branch).
    """

    spec: PieceSpec
    box: ProjectiveBox
    base: ProjectiveBox
    graph: DiskGraph
    tail: tuple
    degree: int
    residuals: list  # sup-norm change per graph transform of the periodic block
    f: object = field(repr=False, default=None)

    @property
    def residual(self) -> float:
        return self.residuals[-1] if self.residuals else 0.0

    def point(self, s):
        """Disk point over parameter s (u in base for unstable, v in box for stable)."""
        if self.spec.kind == "s":
            return self.box.point(self.graph(s), s)
        z = self.base.point(s, self.graph(s))
        for _ in self.tail:
            z = self.f(z)
        return z

    def branches(self, u):
        """Values v of the disk over u in disk_u of `box`, one row per branch."""
        if self.spec.kind == "s":
            raise DomainError("stable pieces are graphs over v")
        u = np.atleast_1d(np.asarray(u, dtype=complex))
        U = lambda s: project(self.box.chart_u, self.point(s))
        pts = self.base.disk_u.polar(16, 64)
        vals = U(pts)
        rows = []
        for t in u:
            # one start per cluster of near-preimages
            order = np.argsort(np.abs(vals - t))
            starts = []
            for k in order[: 8 * self.degree]:
                if all(abs(pts[k] - s0) > 0.2 * self.base.disk_u.radius for s0 in starts):
                    starts.append(pts[k])
            sol, res = _newton(U, t, np.array(starts))
            keep = _dedupe(sol[(res < 1e-10) & self.base.disk_u.contains(sol)])
            rows.append(project(self.box.chart_v, self.point(keep)))
        n = max(len(r) for r in rows)
        out = np.full((n, len(u)), np.nan, dtype=complex)
        for k, r in enumerate(rows):
            out[: len(r), k] = r
        return out


def _dedupe(z, tol=1e-8):
    out = []
    for w in np.atleast_1d(z):
        if all(abs(w - q) > tol for q in out):
            out.append(w)
    return np.array(out, dtype=complex)


def _graph_degree(f, B, psi, B2) -> int:
    """Preimages of the center of disk_u(B2) on the graph whose image lies in B2."""
    image = lambda u: f(B.point(u, psi(u)))
    F = lambda u: project(B2.chart_u, image(u)) - B2.disk_u.center
    n = int(winding_number(F(B.disk_u.circle(4 * len(psi.coeffs)))))
    roots = _roots_in_disk(F, B.disk_u, n)
    if len(roots) == 0:
        return 0
    return int(np.sum(B2.disk_v.contains(project(B2.chart_v, image(roots)))))


def _tail(g: DiskGraph) -> float:
    c = np.abs(g.coeffs)
    return float(c[3 * len(c) // 4:].max() / max(1.0, c[0]))


def _local_graph(f, boxes, block, kind, resolution, max_iter=MAX_TRANSFORMS):
    """Invariant graph around the loop of boxes in `block` (fixed point of the transform).

    The sample count doubles until the Taylor tail is below TAIL_TOL.
    """
    n = GRAPH_SAMPLES
    while True:
        g, residuals = _loop_fixed_point(f, boxes, block, kind, resolution, n, max_iter)
        if _tail(g) <= TAIL_TOL or 2 * n > MAX_GRAPH_SAMPLES:
            return g, residuals
        n *= 2


def _loop_fixed_point(f, boxes, block, kind, resolution, n, max_iter):
    first = boxes[block[0]]
    if kind == "u":
        g = DiskGraph.constant(first.disk_u, first.disk_v.center, n)
    else:
        g = DiskGraph.constant(first.disk_v, first.disk_u.center, n)
    loop = list(block) + [block[0]]
    residuals = []
    for _ in range(max_iter):
        h = g
        if kind == "u":
            for i, j in zip(loop[:-1], loop[1:]):
                h, _r = push_graph(f, boxes[i], h, boxes[j])
        else:
            for i, j in reversed(list(zip(loop[:-1], loop[1:]))):
                h, _r = pull_graph(f, boxes[i], h, boxes[j])
        change = float(np.abs(h.samples() - g.samples()).max())
        residuals.append(change)
        g = h
        if change <= resolution:
            return g, residuals
        if len(residuals) > 3 and change > residuals[-2]:
            raise GraphTransformDiverged(f"graph transform stopped contracting at {change:.3g}")
    raise GraphTransformDiverged(f"no convergence after {max_iter} transforms")


def build_piece(p, boxes, spec, resolution: float = 1e-12, table: TransitionTable | None = None) -> Piece:
    """Graph-transform construction of the special piece `spec`."""
    p = _params(p)
    f = henon_map(p)
    if isinstance(spec, str):
        spec = PieceSpec.parse(spec)
    if table is not None:
        spec.validate(table)
    g, residuals = _local_graph(f, boxes, spec.block, spec.kind, resolution)
    if spec.kind == "s":
        path = spec.prefix + spec.block[:1]
        for i, j in reversed(list(zip(path[:-1], path[1:]))):
            g, _r = pull_graph(f, boxes[i], g, boxes[j])
        box = boxes[path[0]]
        return Piece(spec, box, box, g, (), 1, residuals, f)
    path = spec.block[-1:] + spec.suffix
    if spec.block[-1] != spec.block[0]:
        # the loop graph lives over the first block box; walk to the last one
        blk = spec.block
        for i, j in zip(blk[:-1], blk[1:]):
            g, _r = push_graph(f, boxes[i], g, boxes[j])
    base = path[0]
    k = 0
    while k < len(path) - 1:
        i, j = path[k], path[k + 1]
        d = _graph_degree(f, boxes[i], g, boxes[j])
        if d != 1:
            break
        g, _r = push_graph(f, boxes[i], g, boxes[j])
        base = j
        k += 1
    tail = tuple(path[k + 1:])
    degree = 1
    for i, j in zip(path[k:-1], path[k + 1:]):
        degree *= abs(_graph_degree(f, boxes[i], g, boxes[j])) if i == base else 1
    return Piece(spec, boxes[path[-1]], boxes[base], g, tail, degree, residuals, f)


# ---------------------------------------------------------------- tangency defect


@dataclass(frozen=True)
class Intersections:
    params: np.ndarray  # parameters s on the unstable piece
    points: np.ndarray
    derivative: np.ndarray  # H'(s), zero exactly at tangencies
    count: int  # winding of H around the boundary of the parameter disk, -1 if unresolved

    @property
    def defect(self) -> float:
        return float(np.abs(self.derivative).min()) if len(self.derivative) else math.inf


def intersect_pieces(unstable: Piece, stable: Piece, starts=(8, 32)) -> Intersections:
    """Points where the unstable disk meets the vertical graph u = chi(v)."""
    if unstable.spec.kind != "u" or stable.spec.kind != "s":
        raise DomainError("need an unstable and a stable piece")
    box = stable.box
    chi = stable.graph

    def H(s):
        u, v = box.coords(unstable.point(s))
        return u - chi(v)

    D = unstable.base.disk_u
    count = -1  # unknown when the boundary image winds too fast to sample
    for k in (512, 2048, 8192):
        try:
            count = int(winding_number(H(D.circle(k))))
            break
        except SamplingTooCoarse:
            continue
    pts = D.polar(*starts)
    sol, res = _newton(H, 0.0, pts)
    ok = np.isfinite(sol) & (res < 1e-10) & D.contains(sol)
    sol = _dedupe(sol[ok])
    if len(sol):
        z = unstable.point(sol)
        inside = box.contains(z)
        sol, z = sol[inside], z[inside]
    else:
        z = np.zeros((0, 2), dtype=complex)
    hd = 1e-6 * D.radius
    dH = (H(sol + hd) - H(sol - hd)) / (2 * hd) if len(sol) else np.zeros(0)
    return Intersections(sol, z, dH, count)


def _vogel(m: int):
    k = np.arange(m)
    return np.sqrt((k + 0.5) / m) * np.exp(1j * k * np.pi * (3 - math.sqrt(5)))


@dataclass
class ScanReport:
    min_defect: float
    argmin: tuple | None
    samples: int
    failures: list  # (a, b, error code) of samples whose pieces could not be built
    defects: np.ndarray

    @property
    def positive(self) -> bool:
        return self.min_defect > 0 and not self.failures

    def as_dict(self) -> dict:
        enc = lambda z: [z.real, z.imag]
        return {"min_defect": self.min_defect, "positive": self.positive,
                "argmin": None if self.argmin is None else [enc(complex(c)) for c in self.argmin],
                "samples": self.samples,
                "failures": [{"a": enc(complex(a)), "b": enc(complex(b)), "error": e}
                             for a, b, e in self.failures]}


def boundary_scan(can: TinCan, boxes, pieces=("(0)23", "31(0)"), samples=(16, 16),
                  resolution: float = 1e-12) -> ScanReport:
    """Minimum tangency defect over parameters on the vertical boundary of the can.

    b runs over a spiral in |b - b0| <= h, a over the slanted circle
    |a - a0 - s (b - b0)| = r.
    """
    mb, ma = samples
    bs = can.b0 + can.h * _vogel(mb)
    th = np.exp(2j * np.pi * np.arange(ma) / ma)
    u_spec, s_spec = (PieceSpec.parse(w, k) for w, k in zip(pieces, ("u", "s")))
    defects = np.full((mb, ma), np.nan)
    failures = []
    for i, b in enumerate(bs):
        for j, e in enumerate(th):
            a = can.a0 + can.s * (b - can.b0) + can.r * e
            p = HenonParams(complex(a), complex(b))
            try:
                U = build_piece(p, boxes, u_spec, resolution)
                S = build_piece(p, boxes, s_spec, resolution)
                defects[i, j] = intersect_pieces(U, S).defect
            except HorseshoeError as exc:
                failures.append((a, b, exc.code))
    if np.all(np.isnan(defects)):
        return ScanReport(math.nan, None, mb * ma, failures, defects)
    k = np.nanargmin(defects)
    i, j = np.unravel_index(k, defects.shape)
    a = can.a0 + can.s * (bs[i] - can.b0) + can.r * th[j]
    return ScanReport(float(defects[i, j]), (a, bs[i]), mb * ma, failures, defects)


# ---------------------------------------------------------------- configuration


def _disk(d) -> Disk:
    c = d["center"]
    if isinstance(c, (list, tuple)):
        c = complex(c[0], c[1])
    return Disk(c, d["radius"])


def _chart(d) -> ProjectiveChart:
    return ProjectiveChart(d["anchor"], d["direction"], d.get("focus"), d.get("focus_direction"))


@dataclass
class BoxFamily:
    sign: str
    params: tuple
    boxes: list
    table: TransitionTable
    pieces: tuple
    label: str = ""
    doc: str = ""

    def __getitem__(self, i):
        return self.boxes[i]

    def __len__(self):
        return len(self.boxes)


def load_box_family(source) -> BoxFamily:
    """Box family from a JSON file path, a JSON dict, or "+" / "-" for the bundled ones."""
    if source in ("+", "-"):
        name = "boxes_plus.json" if source == "+" else "boxes_minus.json"
        data = json.loads(resources.files("horseshoe").joinpath("data").joinpath(name).read_text())
    elif isinstance(source, dict):
        data = source
    else:
        with open(source) as fh:
            data = json.load(fh)
    try:
        boxes = []
        for k, b in enumerate(sorted(data["boxes"], key=lambda b: b["index"])):
            if b["index"] != k:
                raise ConfigError("box indices must be 0, 1, ..., n-1")
            boxes.append(ProjectiveBox(_chart(b["chart_u"]), _chart(b["chart_v"]),
                                       _disk(b["disk_u"]), _disk(b["disk_v"]), str(k)))
        sign = data["sign"]
        table = TransitionTable(sign, data["transitions"]) if "transitions" in data else TRANSITIONS[sign]
        pieces = tuple(data.get("pieces", {}).get(k) for k in ("unstable", "stable"))
        return BoxFamily(sign, tuple(data["params"]), boxes, table, pieces,
                         data.get("label", ""), data.get("doc", ""))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed box family: {exc}") from exc
