"""Timing of the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import sys
import timeit

import numpy as np

from horseshoe import _pykernels

try:
    from horseshoe import _kernels
except ImportError:
    _kernels = None


def _polylines(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    t = np.linspace(0, 1, n)
    A = np.column_stack([t, np.sin(40 * t) * 0.3 + rng.normal(0, 1e-3, n)])
    B = np.column_stack([0.5 + 0.3 * np.cos(25 * t), 2 * t - 1])
    return np.ascontiguousarray(A), np.ascontiguousarray(B)


def _orbit_inputs(n: int, seed: int = 1):
    rng = np.random.default_rng(seed)
    return rng.uniform(-0.5, 0.5, n), rng.uniform(-0.5, 0.5, n)


def cases(size: int):
    A, B = _polylines(size)
    x0, y0 = _orbit_inputs(size * 10)

    def crossings(mod):
        return lambda: mod.segment_crossings(A, B)

    def orbits(mod):
        def run():
            x, y = x0.copy(), y0.copy()
            mod.iterate_orbits(x, y, 1.4, 0.3, 20, False)
        return run

    return {"segment_crossings": crossings, "iterate_orbits": orbits}


def check_parity(size: int) -> None:
    if _kernels is None:
        return
    A, B = _polylines(size)
    ra = _kernels.segment_crossings(A, B)
    rb = _pykernels.segment_crossings(A, B)
    assert len(ra[0]) == len(rb[0]), "crossing counts differ between backends"
    x0, y0 = _orbit_inputs(size)
    xa, ya, xb, yb = x0.copy(), y0.copy(), x0.copy(), y0.copy()
    _kernels.iterate_orbits(xa, ya, 1.4, 0.3, 20, False)
    _pykernels.iterate_orbits(xb, yb, 1.4, 0.3, 20, False)
    assert np.allclose(xa, xb, equal_nan=True) and np.allclose(ya, yb, equal_nan=True)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=20000, help="points per polyline")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="write the timings here")
    args = ap.parse_args(argv)
    check_parity(2000)
    backends = {"numpy": _pykernels}
    if _kernels is not None:
        backends["cython"] = _kernels
    else:
        print("compiled kernels not built; timing numpy only", file=sys.stderr)
    results = {}
    for name, make in cases(args.size).items():
        row = {}
        for bname, mod in backends.items():
            fn = make(mod)
            fn()  # warm up
            row[bname] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
        if "cython" in row:
            row["speedup"] = row["numpy"] / row["cython"]
        results[name] = row
        cells = "  ".join(f"{k}={v:.4g}{'' if k == 'speedup' else 's'}" for k, v in row.items())
        print(f"{name:20s} {cells}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"size": args.size, "results": results}, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
