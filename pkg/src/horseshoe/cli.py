"""Command-line entry point: `horseshoe <subcommand> [options]`.

Every subcommand writes its artifacts into --out, prints a JSON summary on
stdout and exits 0 iff its verdicts hold. Failures print a structured error
JSON and exit with status 2.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import constants as C
from .config import RunConfig, load_config
from .errors import ConfigError, HorseshoeError
from .interval import Interval

log = logging.getLogger("horseshoe")

EXIT_FAIL = 1
EXIT_ERROR = 2

GRID_COLUMNS = ["sign", "n", "b", "a", "s", "h", "status"]
CERT_COLUMNS = ["n", "b_lo", "b_hi", "slope_lo", "slope_hi", "alpha", "flag_provenance"]
ZERO_COLUMNS = ["period", "b", "a", "gamma_residual"]


# ---------------------------------------------------------------- output helpers


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path: Path, columns, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])
    return path


def _jsonable(v):
    if isinstance(v, Interval):
        return [v.lo, v.hi]
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def write_json(path: Path, data) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _cache(cfg: RunConfig, args):
    if args.no_cache:
        return None
    from .cache import ResultCache
    return ResultCache(cfg.cache_path)


def _pair(cfg: RunConfig, b: float):
    from .tangency import PAIRS
    return PAIRS[cfg.pairs["+" if b > 0 else "-"]]


def _signs(args):
    return [args.sign] if args.sign else ["+", "-"]


# ---------------------------------------------------------------- subcommands


def cmd_fixpoints(cfg, args, out: Path):
    from .henon import CHEBYSHEV_ANGLES, chebyshev_cycle, cycle_multipliers, fixed_points
    a = C.A_CHEBYSHEV if args.a is None else args.a
    b = 0.0 if args.b is None else args.b
    P, Q = fixed_points((a, b))
    summary = {"a": a, "b": b, "fixed_points": {}}
    for s in (P, Q):
        summary["fixed_points"][s.label] = {
            "point": s.point.tolist(), "multiplier_u": s.mult_u, "multiplier_s": s.mult_s,
            "saddle": bool(s.is_saddle)}
    if a == C.A_CHEBYSHEV and b == 0.0:
        cyc = {}
        for (k, br) in CHEBYSHEV_ANGLES:
            if k < 2:
                continue
            c = chebyshev_cycle(k, br)
            mu, _ = cycle_multipliers((a, b), c)
            cyc[f"{k}{br}"] = {"points": c.points.tolist(), "multiplier_u": mu,
                               "lyapunov": math.log(abs(mu)) / k}
        summary["cycles"] = cyc
    write_json(out / "fixpoints.json", summary)
    return summary, P.is_saddle and Q.is_saddle


def _branches(period: int):
    return ["P"] if period == 1 else (["A"] if period == 2 else ["A", "B"])


def cmd_gamma_trace(cfg, args, out: Path):
    from .gamma import gamma_partials, gamma_value, trace_zero_curve
    k = args.period or 1
    if k not in (1, 2, 3):
        raise ConfigError("periods 1, 2 and 3 are supported")
    summary = {"period": k, "curves": {}}
    ok = True
    for br in _branches(k):
        zc = trace_zero_curve(k, tuple(cfg.gamma.b_range), cfg.gamma.step, branch=br)
        name = f"zero_curve_p{k}.csv" if k < 3 else f"zero_curve_p{k}{br}.csv"
        write_csv(out / name, ZERO_COLUMNS, zc.rows())
        res = float(np.max(np.abs(zc.residual)))
        gp = gamma_partials(C.A_CHEBYSHEV, 0.0, k, br)
        summary["curves"][br] = {
            "file": name, "samples": len(zc.b), "max_residual": res,
            "gamma_at_chebyshev": gamma_value(C.A_CHEBYSHEV, 0.0, k, br),
            "d_gamma_da": gp.d_a, "d_gamma_db": gp.d_b, "slope": gp.slope}
        ok &= bool(np.all(np.isfinite(zc.a))) and res < 1e-8
    write_json(out / f"gamma_p{k}.json", summary)
    return summary, ok


def cmd_tangency(cfg, args, out: Path):
    from .tangency import a_tgc, five_point_derivative
    if args.b is None:
        raise ConfigError("tangency needs --b")
    b = float(args.b)
    kw = cfg.solver_kwargs()
    res = a_tgc(b, pair=_pair(cfg, b), **kw)
    summary = {"b": b, "a": res.a, "bracket": list(res.bracket), "iterations": res.iterations,
               "pair": _pair(cfg, b).name}
    if args.slope:
        d = cfg.stencil_delta
        vals = [a_tgc(b + j * d, pair=_pair(cfg, b), **kw).a if j else res.a
                for j in (-2, -1, 0, 1, 2)]
        summary["slope"] = five_point_derivative(vals, d)
    write_json(out / "tangency.json", summary)
    return summary, True


def _can_height(cfg: RunConfig, sign: str, n: int) -> float:
    lo, hi = cfg.cans.wide_rows_minus
    return cfg.cans.height_wide if sign == "-" and lo <= n <= hi else cfg.cans.height


def cmd_table(cfg, args, out: Path):
    from .tables import reference_row
    from .tangency import build_grid
    sign = args.sign or cfg.grid.sign
    rows = _parse_rows(args.rows) if args.rows else list(range(cfg.grid.n_max + 1))
    kw = cfg.solver_kwargs()
    kw["pair"] = _pair(cfg, 1.0 if sign == "+" else -1.0)
    grid = build_grid(sign, rows, jobs=args.jobs or cfg.jobs, cache=_cache(cfg, args), **kw)
    for r in grid:
        r.h = _can_height(cfg, sign, r.n)
    write_csv(out / f"grid_{'plus' if sign == '+' else 'minus'}.csv", GRID_COLUMNS,
              (r.as_dict() for r in grid))
    diffs = []
    ok = True
    for r in grid:
        ref = reference_row(sign, r.n)
        wide = abs(r.b) >= 1.0 - 1e-12
        tol_a, tol_s = C.TABLE_TOL_A[wide], C.TABLE_TOL_S[wide]
        da, ds = r.a - ref.a, r.s - ref.s
        within = r.status == "ok" and abs(da) <= tol_a and abs(ds) <= tol_s
        ok &= within
        diffs.append({"n": r.n, "b": r.b, "da": da, "ds": ds, "within": within, "status": r.status})
    summary = {"sign": sign, "rows": len(grid), "diffs": diffs}
    write_json(out / f"table_{'plus' if sign == '+' else 'minus'}.json", summary)
    return summary, ok


def _parse_rows(text: str):
    out = []
    for part in text.split(","):
        if "-" in part.strip()[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _provenance(cfg: RunConfig, sign: str, n: int) -> str:
    waived = {str(w) for w in cfg.cans.degree_one_waived}
    return "degree-one:waived" if f"{sign}:{n}" in waived else "degree-one:assumed"


def _chains(cfg: RunConfig):
    from .tables import load_reference_tables
    from .tincan import certificate_chain
    grid = load_reference_tables()
    chains = {}
    for sign in "+-":
        chain = certificate_chain(grid, sign, cfg.cans.preset, cfg.cans.alpha,
                                  radius_factor=cfg.cans.radius_factor)
        chains[sign] = [c if c.provenance == _provenance(cfg, sign, c.n)
                        else type(c)(c.n, c.sign, c.b_interval, c.slope, c.alpha,
                                     _provenance(cfg, sign, c.n))
                        for c in chain]
    return grid, chains


def cmd_certify(cfg, args, out: Path):
    from .tincan import TinCan, center_slope_verdict, certificate_union
    grid, chains = _chains(cfg)
    c = C.CENTER_CAN
    center = TinCan(c["a"], c["b"], c["h"], 0.021 - cfg.cans.epsilon, c["s"])
    w, center_ok = center_slope_verdict(center)
    pipeline = Interval.around(center.s, w.hi)
    summary = {"center": {"half_width": w.hi, "slope": pipeline, "holds": center_ok},
               "preset": cfg.cans.preset, "alpha": cfg.cans.alpha, "chains": {}}
    ok = center_ok
    targets = {"+": Interval(0.0, 1.0), "-": Interval(-1.0, 0.0)}
    for sign in _signs(args):
        chain = chains[sign]
        name = f"certificates_{'plus' if sign == '+' else 'minus'}.csv"
        write_csv(out / name, CERT_COLUMNS, (x.as_row() for x in chain))
        u = certificate_union(chain, targets[sign])
        hw = max((x.slope.hi - x.slope.lo) / 2 for x in chain)
        waived = [x.n for x in chain if x.provenance != "degree-one:assumed"]
        summary["chains"][sign] = {
            "file": name, "hull": u.slopes.interval, "coverage": u.coverage.interval,
            "gaps": len(u.uncovered), "uncovered_length": sum(g.hi - g.lo for g in u.uncovered),
            "max_half_width": hw, "waived_rows": waived}
        ok &= not waived
    write_json(out / "certify.json", summary)
    return summary, ok


def cmd_corner(cfg, args, out: Path):
    from .tincan import corner_verdict, monotonicity_verdict
    _, chains = _chains(cfg)
    cv = corner_verdict(chains["+"], chains["-"])
    mv = monotonicity_verdict(chains["+"], chains["-"])
    summary = {"corner": cv.corner, "plus": cv.plus, "minus": cv.minus, "separation": cv.separation,
               "increasing_plus": mv.margin_plus > 0, "decreasing_minus": mv.margin_minus > 0,
               "margin_plus": mv.margin_plus, "margin_minus": mv.margin_minus}
    write_json(out / "corner.json", summary)
    return summary, cv.corner and mv.holds


def cmd_extend(cfg, args, out: Path):
    from .duality import extend_sign_verdict
    grid, chains = _chains(cfg)
    summary = {}
    ok = True
    for sign in _signs(args):
        v = extend_sign_verdict(grid, chains[sign], sign, cfg.cans.radius_factor)
        summary[sign] = {"holds": v.holds, "extremal_row": v.extremal_row,
                         "extremal_value": v.extremal_value, "min_margin": v.min_margin,
                         "violating_rows": list(v.violating_rows)}
        ok &= v.holds
    write_json(out / "extend.json", summary)
    return summary, ok


def cmd_cmc_check(cfg, args, out: Path):
    from .cmc import build_piece, check_transitions, load_box_family, PieceSpec
    summary = {}
    ok = True
    for sign in _signs(args):
        fam = load_box_family(cfg.boxes[sign])
        rep = check_transitions(fam.params, fam.boxes, fam.table, doubled=True)
        pieces = {}
        for word, kind in zip(fam.pieces, ("u", "s")):
            if word is None:
                continue
            try:
                pc = build_piece(fam.params, fam.boxes, PieceSpec.parse(word, kind))
                pieces[word] = {"degree": pc.degree, "residual": pc.residual, "box": pc.box.label}
            except HorseshoeError as exc:
                pieces[word] = exc.as_dict()
                ok = False
        summary[sign] = {"label": fam.label, "params": fam.params, "transitions": len(fam.table),
                         "passed": rep.passed, "stable": rep.stable, "report": rep.as_dict(),
                         "pieces": pieces}
        ok &= rep.passed and rep.stable
    write_json(out / "cmc_check.json", summary)
    return summary, ok


def cmd_scan_can(cfg, args, out: Path):
    from .cmc import boundary_scan, load_box_family
    from .tincan import TinCan
    sign = args.sign or "+"
    fam = load_box_family(cfg.scan_boxes if cfg.scan_boxes else cfg.boxes[sign])
    c = C.CENTER_CAN
    can = TinCan(c["a"], c["b"], c["h"], 0.021 - cfg.cans.epsilon, c["s"])
    rep = boundary_scan(can, fam.boxes, fam.pieces, tuple(cfg.scan_samples))
    summary = {"can": {"a0": can.a0, "b0": can.b0, "h": can.h, "r": can.r, "s": can.s},
               "family": fam.label, **rep.as_dict()}
    write_json(out / "scan_can.json", summary)
    return summary, rep.positive


def _boundary_column(bs, grid):
    from .tangency import a_aprx
    return [a_aprx(b, grid) for b in bs]


def cmd_emit_plots(cfg, args, out: Path):
    from .gamma import trace_zero_curve
    from .tables import load_reference_tables
    grid = load_reference_tables()
    b_range, step = tuple(cfg.gamma.b_range), cfg.gamma.step
    figures = {
        "figure2": [(1, "P")],
        "figure3": [(2, "A")],
        "figure4": [(3, "A"), (3, "B")],
    }
    summary = {}
    for name, curves in figures.items():
        cols, data = ["b", "a_boundary"], {}
        bs = None
        for k, br in curves:
            zc = trace_zero_curve(k, b_range, step, branch=br)
            bs = zc.b if bs is None else bs
            tag = f"p{k}" if k < 3 else f"p{k}{br}"
            data[f"a_gamma_{tag}"] = zc.a
            data[f"gamma_residual_{tag}"] = zc.residual
            cols += [f"a_gamma_{tag}", f"gamma_residual_{tag}"]
        data["b"], data["a_boundary"] = bs, _boundary_column(bs, grid)
        rows = [{c: float(data[c][i]) for c in cols} for i in range(len(bs))]
        write_csv(out / f"{name}.csv", cols, rows)
        summary[name] = {"file": f"{name}.csv", "columns": cols, "rows": len(rows)}
    # the central can around (2, 0) with the boundary and the P zero curve
    c = C.CENTER_CAN
    h, r, s = c["h"], 0.021 - cfg.cans.epsilon, c["s"]
    bs = np.round(np.linspace(-h, h, 25), 12)
    zc = trace_zero_curve(1, (-h, h), 2 * h / 24, branch="P")
    rows = [{"b": float(b), "a_boundary": ab, "a_gamma_p1": float(ag),
             "gamma_residual_p1": float(gr), "a_can_lo": c["a"] + s * float(b) - r,
             "a_can_hi": c["a"] + s * float(b) + r}
            for b, ab, ag, gr in zip(bs, _boundary_column(bs, grid), zc.a, zc.residual)]
    cols = ["b", "a_boundary", "a_gamma_p1", "gamma_residual_p1", "a_can_lo", "a_can_hi"]
    write_csv(out / "figure1.csv", cols, rows)
    summary["figure1"] = {"file": "figure1.csv", "columns": cols, "rows": len(rows)}
    write_json(out / "emit_plots.json", summary)
    return summary, True


COMMANDS = {
    "fixpoints": cmd_fixpoints,
    "gamma-trace": cmd_gamma_trace,
    "tangency": cmd_tangency,
    "table": cmd_table,
    "certify": cmd_certify,
    "corner": cmd_corner,
    "extend": cmd_extend,
    "cmc-check": cmd_cmc_check,
    "scan-can": cmd_scan_can,
    "emit-plots": cmd_emit_plots,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="horseshoe", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="run configuration JSON")
    common.add_argument("--out", type=Path, default=Path("out"), help="artifact directory")
    common.add_argument("--sign", choices=["+", "-"])
    common.add_argument("--b", type=float)
    common.add_argument("--period", type=int)
    common.add_argument("--jobs", type=int)
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "fixpoints":
            p.add_argument("--a", type=float)
        if name == "tangency":
            p.add_argument("--slope", action="store_true", help="also compute the five-point slope")
        if name == "table":
            p.add_argument("--rows", help="subset of rows, e.g. 1,5,20-25")
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        summary, ok = COMMANDS[args.command](cfg, args, args.out)
    except HorseshoeError as exc:
        err = {"command": args.command, **exc.as_dict()}
        print(json.dumps(err, sort_keys=True))
        return EXIT_ERROR
    print(json.dumps({"command": args.command, "ok": bool(ok), "summary": _jsonable(summary)},
                     sort_keys=True))
    return 0 if ok else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
