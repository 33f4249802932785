"""Bundled reference grids a_n, s_n for both signs of b."""

from __future__ import annotations

import csv
import hashlib
import io
from functools import lru_cache
from importlib import resources

from . import constants as C
from .errors import ChecksumMismatch, ConfigError

FILENAME = "reference_tables.csv"


def _raw() -> bytes:
    return resources.files("horseshoe").joinpath("data").joinpath(FILENAME).read_bytes()


def parse_tables(data: bytes, expected_sha256: str | None = C.REFERENCE_TABLES_SHA256):
    """Parse and validate the CSV (sign,n,b,a,s,h); returns a list of GridRow."""
    from .tangency import GridRow

    if expected_sha256 is not None:
        got = hashlib.sha256(data).hexdigest()
        if got != expected_sha256:
            raise ChecksumMismatch(f"reference tables checksum {got} != {expected_sha256}")
    rows = []
    for rec in csv.DictReader(io.StringIO(data.decode())):
        sign, n = rec["sign"], int(rec["n"])
        row = GridRow(sign, n, float(rec["b"]), float(rec["a"]), float(rec["s"]), float(rec["h"]),
                      "reference")
        if abs(row.b - C.grid_b(sign, n)) > 1e-12:
            raise ConfigError(f"row {sign}{n}: b={row.b} is off the grid")
        if row.h != C.can_height(sign, n):
            raise ConfigError(f"row {sign}{n}: height {row.h} breaks the height rule")
        rows.append(row)
    for sign in "+-":
        ns = sorted(r.n for r in rows if r.sign == sign)
        if ns != list(range(C.N_ROWS)):
            raise ConfigError(f"table {sign} does not have rows 0..{C.N_ROWS - 1}")
    return rows


@lru_cache(maxsize=1)
def _cached():
    return tuple(parse_tables(_raw()))


def load_reference_tables(sign: str | None = None):
    """Reference rows, both signs by default (the b = 0 rows appear once per sign)."""
    rows = list(_cached())
    if sign is not None:
        rows = [r for r in rows if r.sign == sign]
    return rows


def reference_row(sign: str, n: int):
    for r in _cached():
        if r.sign == sign and r.n == n:
            return r
    raise KeyError((sign, n))
