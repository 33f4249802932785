"""First tangency a_tgc(b) between an unstable fold and a stable leaf.

The stable leaf S is the preimage under f of the lower arc of W^s(Q) through
Q, restricted to the window around x = -x_Q where it is a graph over y. The
unstable side is a branch of W^u of the configured anchor; its folds that
reach toward S are tracked through the signed distance
  d(sigma) = x_u(sigma) - x_S(y_u(sigma)),
which is positive when the fold stays to the right of S. The innermost
fold is the one with the largest minimum of d; the tangency is the value of
a where that minimum is zero. The primary solver decides crossing vs no
crossing by counting polyline intersections and bisects on a; the minimum
of d itself gives a second, independent route.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.signal import find_peaks

from . import constants as C
from .errors import AmbiguousCount, BadBracket, DomainError, HorseshoeError, OutOfRange
from .henon import HenonParams, Saddle, CycleFamily, fixed_points
from .kernels import segment_crossings
from .manifolds import Branch, ManifoldCurve, refine

log = logging.getLogger(__name__)

FAR = 10.0  # defect assigned to samples that are not beside the leaf


@dataclass(frozen=True)
class PairSpec:
    """Which unstable anchor is matched against the stable leaf of Q.

    unstable: "Q" (left branch of W^u(Q)), "P" (both branches of W^u(P))
    or "period2" (both branches at both points of the 2-cycle).
    """

    unstable: str = "Q"
    stable: str = "Q"
    name: str = "plus"


PAIR_PLUS = PairSpec("Q", "Q", "plus")
PAIR_MINUS = PairSpec("P", "Q", "minus")
PAIR_MINUS_CYCLE = PairSpec("period2", "Q", "minus-cycle")
PAIRS = {p.name: p for p in (PAIR_PLUS, PAIR_MINUS, PAIR_MINUS_CYCLE)}


def default_pair(b: float) -> PairSpec:
    return PAIR_PLUS if b > 0 else PAIR_MINUS


_CYCLE2 = CycleFamily(2, "A")


def unstable_branches(p: HenonParams, pair: PairSpec):
    """List of (Branch, sign of sigma) making up the unstable side."""
    P, Q = fixed_points(p)
    if pair.unstable == "Q":
        return [(Branch(p, Q, "u"), -1.0)]
    if pair.unstable == "P":
        br = Branch(p, P, "u")
        return [(br, 1.0), (br, -1.0)]
    if pair.unstable == "period2":
        cyc = _CYCLE2.at(p)
        out = []
        for shift in (0, 1):
            pts = np.roll(cyc.points, -shift, axis=0)
            sad = Saddle(pts, 2, cyc.mult_u, cyc.mult_s, *_eigvecs(p, pts), label="2A")
            br = Branch(p, sad, "u")
            out += [(br, 1.0), (br, -1.0)]
        return out
    raise DomainError(f"unknown unstable anchor {pair.unstable!r}")


def _eigvecs(p, pts):
    from .henon import _saddle
    s = _saddle(p, pts)
    return s.vec_u, s.vec_s


# ---------------------------------------------------------------- stable leaf


@dataclass
class StableLeaf:
    sigma: np.ndarray
    points: np.ndarray
    ys: np.ndarray = field(init=False, repr=False)
    xs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        o = np.argsort(self.points[:, 1])
        self.ys = self.points[o, 1]
        self.xs = self.points[o, 0]

    def x_at(self, y):
        """x of the leaf at height y; NaN outside its y-range."""
        y = np.asarray(y, dtype=float)
        x = np.interp(y, self.ys, self.xs)
        return np.where((y >= self.ys[0]) & (y <= self.ys[-1]), x, np.nan)

    @property
    def curve(self) -> ManifoldCurve:
        return ManifoldCurve("Q", "s", self.sigma, self.points, 0.0)


def _inside(pts, window):
    x0, x1, y0, y1 = window
    return (pts[:, 0] >= x0) & (pts[:, 0] <= x1) & (pts[:, 1] >= y0) & (pts[:, 1] <= y1)


def stable_leaf(p, window=C.WINDOW, tol: float = C.ARC_TOLERANCE) -> StableLeaf:
    p = HenonParams(float(np.real(p.a)), float(np.real(p.b))) if isinstance(p, HenonParams) \
        else HenonParams(*map(float, p))
    _, Q = fixed_points(p)
    br = Branch(p, Q, "s")
    xq = float(Q.point[0])
    L = lambda s: br(-s)               # lower arc of W^s(Q)
    S = lambda s: br.points(-s, extra=1)  # its preimage

    # scan the lower arc until Y is well below -x_Q, stopping if it turns
    s_hi = 1.0
    for _ in range(60):
        s = np.geomspace(1e-8, s_hi, 4000)
        X, Y = L(s)
        turn = np.flatnonzero(np.diff(Y) > 1e-9 * (1 + np.abs(Y[1:])))
        end = turn[0] + 1 if len(turn) else len(s)
        if Y[:end].min() < -xq - 0.5 or len(turn):
            break
        s_hi *= 2
    s, X, Y = s[:end], X[:end], Y[:end]
    g = Y * Y - p.a - X
    cand = np.flatnonzero((Y[:-1] < 0) & (np.sign(g[:-1]) != np.sign(g[1:])))
    if not len(cand):
        raise DomainError(f"stable leaf does not reach x = -x_Q at a={p.a}, b={p.b}")
    k = cand[0]
    gfun = lambda t: (lambda u, v: v[0] * v[0] - p.a - u[0])(*L(t))
    s_star = brentq(gfun, s[k], s[k + 1], xtol=1e-15 * s[k], rtol=1e-15)

    def outside(t):
        pt = S(t)
        return not (t > 0 and _inside(pt, window)[0])

    lo_hi = []
    for sgn in (-1.0, 1.0):
        d = 1e-12 * s_star
        while not outside(s_star + sgn * d) and d < s_star:
            d *= 2
        inner, outer = d / 2, d
        for _ in range(60):
            m = 0.5 * (inner + outer)
            if outside(s_star + sgn * m):
                outer = m
            else:
                inner = m
            if outer - inner < 1e-9 * outer:
                break
        lo_hi.append(s_star + sgn * outer)
    grid = np.linspace(lo_hi[0], lo_hi[1], 2001)
    sig, pts = refine(S, grid, tol, max_seg=0.01)
    # keep the window part around s_star on which y is monotone
    ins = _inside(pts, window)
    i0 = int(np.searchsorted(sig, s_star))
    i0 = min(max(i0, 0), len(sig) - 1)
    dy = np.sign(np.diff(pts[:, 1]))
    ref = dy[min(i0, len(dy) - 1)]
    lo = i0
    while lo > 0 and ins[lo - 1] and dy[lo - 1] == ref:
        lo -= 1
    hi = i0
    while hi < len(sig) - 1 and ins[hi + 1] and dy[hi] == ref:
        hi += 1
    return StableLeaf(sig[lo:hi + 1], pts[lo:hi + 1])


# ---------------------------------------------------------------- folds


@dataclass
class Fold:
    branch: int  # index into unstable_branches
    sigma: float  # signed parameter of the deepest point
    depth: float  # minimum of d over the fold


def _defect(br, leaf, s):
    x, y = br(s)
    d = x - leaf.x_at(y)
    return np.where(np.isfinite(d) & (np.abs(d) < 1.0), d, FAR)


def _polish(br, leaf, s_lo, s_hi):
    g = lambda t: float(_defect(br, leaf, t)[0])
    r = minimize_scalar(g, bounds=(s_lo, s_hi), method="bounded",
                        options={"xatol": 1e-13 * max(abs(s_lo), abs(s_hi))})
    return float(r.x), float(r.fun)


def _branch_extent(br, sgn, window, arclength):
    """sigma_max such that the branch has `arclength` inside the window."""
    s_max = 1.0
    while s_max < 1e9:
        s = np.geomspace(1e-4, s_max, 20001)
        pts = br.points(sgn * s)
        ins = _inside(pts, window)
        d = np.diff(pts, axis=0)
        seg = np.hypot(d[:, 0], d[:, 1])
        if seg[ins[:-1] & ins[1:]].sum() >= arclength:
            return s_max
        s_max *= 2
    return s_max


def find_folds(p, pair: PairSpec, leaf: StableLeaf, window=C.WINDOW,
               arclength: float = C.ARCLENGTH, samples: int = 300001,
               prominence: float = 1e-2):
    """All prominent local minima of d along the unstable branches."""
    folds = []
    for i, (br, sgn) in enumerate(unstable_branches(p, pair)):
        s_max = _branch_extent(br, sgn, window, arclength)
        s = sgn * np.geomspace(1e-4, s_max, samples)
        d = _defect(br, leaf, s)
        peaks, _ = find_peaks(-d, prominence=prominence)
        for k in peaks:
            if d[k] >= FAR or k == 0 or k == len(s) - 1:
                continue
            lo, hi = sorted((s[k - 1], s[k + 1]))
            sig, dep = _polish(br, leaf, lo, hi)
            folds.append(Fold(i, sig, dep))
    return folds


def innermost_fold(p, pair, leaf, **kw) -> Fold:
    folds = find_folds(p, pair, leaf, **kw)
    if not folds:
        raise DomainError("no fold of the unstable side beside the stable leaf")
    return max(folds, key=lambda f: f.depth)


def track_fold(p, pair, leaf, prev: Fold, rel: float = 0.05, samples: int = 4001) -> Fold:
    """Follow a fold to new parameters starting from its previous location."""
    br, sgn = unstable_branches(p, pair)[prev.branch]
    s0 = abs(prev.sigma)
    s = sgn * np.linspace(s0 * (1 - rel), s0 * (1 + rel), samples)
    d = _defect(br, leaf, s)
    k = int(np.argmin(d))
    if k in (0, len(s) - 1) or d[k] >= FAR:
        if rel < 0.8:
            return track_fold(p, pair, leaf, prev, rel * 3, samples)
        raise DomainError("lost track of the designated fold")
    lo, hi = sorted((s[k - 1], s[k + 1]))
    sig, dep = _polish(br, leaf, lo, hi)
    return Fold(prev.branch, sig, dep)


def tangency_defect(a: float, b: float, pair: PairSpec | None = None, window=C.WINDOW,
                    tol: float = C.ARC_TOLERANCE) -> float:
    """Depth of the innermost fold: > 0 no crossing, < 0 crossing, 0 tangency."""
    p = HenonParams(float(a), float(b))
    pair = pair or default_pair(b)
    leaf = stable_leaf(p, window, tol)
    return innermost_fold(p, pair, leaf, window=window).depth


# ---------------------------------------------------------------- counting


def fold_piece(p, pair, leaf, fold: Fold, margin: float = 0.05,
               tol: float = C.ARC_TOLERANCE) -> ManifoldCurve:
    """Polyline of the fold where d <= max(depth, 0) + margin."""
    br, sgn = unstable_branches(p, pair)[fold.branch]
    thr = max(fold.depth, 0.0) + margin
    s0 = abs(fold.sigma)
    ends = []
    for direction in (-1.0, 1.0):
        step = 1e-4 * s0
        t = s0
        while True:
            tn = t + direction * step
            if tn <= 0:
                tn = 0.5 * t
            dn = float(_defect(br, leaf, sgn * tn)[0])
            if dn > thr:
                ends.append(tn)
                break
            t = tn
            step *= 1.5
            if step > 10 * s0:
                raise DomainError("fold piece does not close up")
    lo, hi = sorted(ends)
    fn = lambda s: br.points(sgn * s)
    sig, pts = refine(fn, np.linspace(lo, hi, 2001), tol, max_seg=0.005)
    return ManifoldCurve(br.anchor.label, "u", sgn * sig, pts, tol)


def crossings(cu: ManifoldCurve | np.ndarray, cs: ManifoldCurve | np.ndarray,
              window=None, merge_tol: float = C.MERGE_TOL) -> np.ndarray:
    """Crossing points of two polylines, deduplicated, optionally inside a window."""
    A = cu.points if isinstance(cu, ManifoldCurve) else np.asarray(cu, dtype=float)
    B = cs.points if isinstance(cs, ManifoldCurve) else np.asarray(cs, dtype=float)
    i, j, t, u = segment_crossings(np.ascontiguousarray(A), np.ascontiguousarray(B))
    pts = A[i] + t[:, None] * (A[i + 1] - A[i])
    if window is not None and len(pts):
        pts = pts[_inside(pts, window)]
    if len(pts) > 1:
        keep = [0]
        for k in range(1, len(pts)):
            if np.min(np.hypot(*(pts[keep] - pts[k]).T)) > merge_tol:
                keep.append(k)
        pts = pts[keep]
    return pts


def intersection_count(cu, cs, window=None, merge_tol: float = C.MERGE_TOL) -> int:
    return len(crossings(cu, cs, window, merge_tol))


def _leaf_slice(leaf: StableLeaf, piece: ManifoldCurve, pad: float = 0.05) -> np.ndarray:
    y0, y1 = piece.points[:, 1].min() - pad, piece.points[:, 1].max() + pad
    m = (leaf.points[:, 1] >= y0) & (leaf.points[:, 1] <= y1)
    idx = np.flatnonzero(m)
    if not len(idx):
        return leaf.points[:0]
    lo, hi = max(idx[0] - 1, 0), min(idx[-1] + 2, len(leaf.points))
    return leaf.points[lo:hi]


# ---------------------------------------------------------------- solver


@dataclass
class Evaluation:
    a: float
    count: int
    fold: Fold


@dataclass
class TangencyResult:
    a: float
    b: float
    bracket: tuple
    iterations: int
    evaluations: list = field(repr=False, default_factory=list)
    status: str = "ok"


class TangencySolver:
    """Count-based bisection for a_tgc at fixed b."""

    def __init__(self, b: float, pair: PairSpec | None = None, window=C.WINDOW,
                 arc_tol: float = C.ARC_TOLERANCE, merge_tol: float = C.MERGE_TOL,
                 margin: float = 0.05):
        if b == 0:
            raise DomainError("the tangency solver needs b != 0")
        self.b = float(b)
        self.pair = pair or default_pair(b)
        self.window = window
        self.arc_tol = arc_tol
        self.merge_tol = merge_tol
        self.margin = margin
        self.history: list[Evaluation] = []

    def _params(self, a):
        return HenonParams(float(a), self.b)

    def _nearest_fold(self, a):
        if not self.history:
            return None
        return min(self.history, key=lambda e: abs(e.a - a)).fold

    def evaluate(self, a: float, fold: Fold | None = None) -> Evaluation:
        p = self._params(a)
        leaf = stable_leaf(p, self.window, self.arc_tol)
        prev = fold or self._nearest_fold(a)
        if prev is None:
            fd = innermost_fold(p, self.pair, leaf, window=self.window)
        else:
            fd = track_fold(p, self.pair, leaf, prev)
        count = None
        for attempt in range(2):
            tol = self.arc_tol / (10 ** attempt)
            margin = self.margin * (2 ** attempt)
            piece = fold_piece(p, self.pair, leaf, fd, margin, tol)
            n = intersection_count(piece, _leaf_slice(leaf, piece), self.window, self.merge_tol)
            if n in (0, 2):
                count = n
                break
            log.debug("ambiguous count %d at a=%.12g b=%g, refining", n, a, self.b)
        if count is None:
            raise AmbiguousCount(f"{n} crossings at a={a}, b={self.b}")
        ev = Evaluation(float(a), count, fd)
        self.history.append(ev)
        return ev

    def solve(self, bracket, tol: float = C.BISECTION_TOL, max_iter: int = 200) -> TangencyResult:
        lo, hi = map(float, bracket)
        # designate the fold on the horseshoe side, then follow it down
        e_hi = self.evaluate(hi)
        if e_hi.count != 2:
            raise BadBracket(f"expected crossings at a={hi} (b={self.b}), found {e_hi.count}")
        e_lo = self.evaluate(lo, e_hi.fold)
        if e_lo.count != 0:
            raise BadBracket(f"expected no crossings at a={lo} (b={self.b}), found {e_lo.count}")
        it = 0
        while hi - lo > tol and it < max_iter:
            mid = 0.5 * (lo + hi)
            e = self.evaluate(mid)
            if e.count == 2:
                hi = mid
            else:
                lo = mid
            it += 1
        return TangencyResult(0.5 * (lo + hi), self.b, (lo, hi), it, list(self.history))


def a_tgc(b: float, pair: PairSpec | None = None, bracket=None, grid=None,
          tol: float = C.BISECTION_TOL, **kw) -> TangencyResult:
    """First tangency at fixed b.

    The bracket defaults to a_aprx(b) +- 0.1 from `grid` (or the bundled
    reference tables); with no grid a coarse scan of [1.5, 7] seeds it.
    """
    solver = TangencySolver(b, pair, **kw)
    if bracket is None:
        if grid is None:
            from .tables import load_reference_tables
            grid = load_reference_tables()
        if grid is not False:
            c = a_aprx(b, grid)
            bracket = (c - C.BRACKET_HALF_WIDTH, c + C.BRACKET_HALF_WIDTH)
        else:
            bracket = _scan_bracket(b, solver.pair, **kw)
    return solver.solve(bracket, tol)


def _scan_bracket(b, pair, step: float = 0.05, **kw):
    """Coarse scan of the default range for the last no-crossing -> crossing switch."""
    lo_a, hi_a = C.BRACKET_DEFAULT
    prev = None
    for a in np.arange(hi_a, lo_a - 1e-12, -step):
        d = tangency_defect(a, b, pair)
        if prev is not None and d > 0 >= prev[1]:
            return (float(a), prev[0])
        prev = (float(a), d)
    raise BadBracket(f"no tangency found in {C.BRACKET_DEFAULT} at b={b}")


def a_tgc_defect(b: float, pair: PairSpec | None = None, bracket=None, grid=None,
                 xtol: float = 1e-12) -> float:
    """Tangency as the root of the innermost-fold depth (independent route)."""
    pair = pair or default_pair(b)
    if bracket is None:
        from .tables import load_reference_tables
        c = a_aprx(b, grid if grid is not None else load_reference_tables())
        bracket = (c - 0.01, c + 0.01)
    return brentq(lambda a: tangency_defect(a, b, pair), *bracket, xtol=xtol)


# ---------------------------------------------------------------- slopes, grid


STENCIL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


def five_point_derivative(values, delta: float) -> float:
    """(f(-2d) - 8 f(-d) + 8 f(d) - f(2d)) / (12 d) from values at -2d..2d."""
    v = np.asarray(values, dtype=float)
    if v.shape != (5,):
        raise ValueError("need values at offsets -2, -1, 0, 1, 2")
    return float(STENCIL @ v / delta)


def slope_five_point(b: float, delta: float = C.SLOPE_DELTA, solve=None, **kw):
    """(a_tgc(b), slope) with the five-point stencil in b."""
    solve = solve or (lambda bb: a_tgc(bb, **kw).a)
    vals = [solve(b + k * delta) for k in (-2, -1, 0, 1, 2)]
    return vals[2], five_point_derivative(vals, delta), vals


def origin_row(sign: str, solve=None, **kw):
    """(a0, s0) at b = 0 by one-sided extrapolation from |b| = d, 2d."""
    d1, d2 = C.ORIGIN_STEPS
    sgn = 1.0 if sign == "+" else -1.0
    solve = solve or (lambda bb: a_tgc(bb, **kw).a)
    a1, a2 = solve(sgn * d1), solve(sgn * d2)
    a0 = 2 * a1 - a2
    s0 = (a2 - a1) / (sgn * (d2 - d1))
    return a0, s0, (a1, a2)


@dataclass
class GridRow:
    sign: str
    n: int
    b: float
    a: float
    s: float
    h: float
    status: str = "ok"

    def as_dict(self):
        return {"sign": self.sign, "n": self.n, "b": self.b, "a": self.a, "s": self.s,
                "h": self.h, "status": self.status}


def a_aprx(b, grid, reach: float = 5e-4) -> float:
    """Piecewise-linear interpolation of a grid (list of GridRow) in Re(b).

    Within `reach` beyond the grid ends the end segment is extended, so the
    stencil of the outermost row can be bracketed.
    """
    b = float(np.real(b))
    rows = sorted(({r.b: r for r in grid}).values(), key=lambda r: r.b)
    bs = np.array([r.b for r in rows])
    a_s = np.array([r.a for r in rows])
    if not (bs[0] - reach <= b <= bs[-1] + reach):
        raise OutOfRange(f"b={b} outside the grid range [{bs[0]}, {bs[-1]}]")
    if len(bs) > 1 and b < bs[0]:
        return float(a_s[0] + (b - bs[0]) * (a_s[1] - a_s[0]) / (bs[1] - bs[0]))
    if len(bs) > 1 and b > bs[-1]:
        return float(a_s[-1] + (b - bs[-1]) * (a_s[-1] - a_s[-2]) / (bs[-1] - bs[-2]))
    return float(np.interp(b, bs, a_s))


def compute_row(sign: str, n: int, cache=None, **kw) -> GridRow:
    b = C.grid_b(sign, n)
    h = C.can_height(sign, n)
    solve = _cached_solver(cache, **kw)
    try:
        if n == 0:
            a, s, _ = origin_row(sign, solve=solve)
        else:
            a, s, _ = slope_five_point(b, solve=solve)
        return GridRow(sign, n, b, a, s, h)
    except HorseshoeError as exc:
        log.warning("row %s%d failed: %s", sign, n, exc)
        return GridRow(sign, n, b, math.nan, math.nan, h, status=exc.code)


def _cached_solver(cache=None, **kw):
    def solve(bb):
        bb = round(bb, 12)
        key = {"op": "a_tgc", "b": bb, "tol": kw.get("tol", C.BISECTION_TOL),
               "arc_tol": kw.get("arc_tol", C.ARC_TOLERANCE),
               "pair": (kw.get("pair") or default_pair(bb)).name}
        if cache is not None:
            hit = cache.get(key)
            if hit is not None:
                return hit["a"]
        a = a_tgc(bb, **kw).a
        if cache is not None:
            cache.put(key, {"a": a})
        return a
    return solve


def _row_job(args):
    sign, n, cache_path, kw = args
    from .cache import ResultCache
    cache = ResultCache(cache_path) if cache_path else None
    return compute_row(sign, n, cache, **kw)


def build_grid(sign: str, rows=None, jobs: int = 1, cache=None, **kw) -> list[GridRow]:
    """Rows n = 0..50 (or the given subset) of the tangency grid for one sign."""
    if sign not in "+-" or len(sign) != 1:
        raise DomainError("sign must be '+' or '-'")
    rows = list(range(C.N_ROWS)) if rows is None else list(rows)
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        path = getattr(cache, "path", None)
        with ProcessPoolExecutor(jobs) as ex:
            out = list(ex.map(_row_job, [(sign, n, path, kw) for n in rows]))
    else:
        out = [compute_row(sign, n, cache, **kw) for n in rows]
    return out
