"""Numerical constants of the construction.

Everything that defines the published grids and tin cans lives here so the
pipeline has a single place to look.
"""

# parameter grid: b_n = +-STEP_B * n for n = 0..N_ROWS-1
STEP_B = 0.02
N_ROWS = 51

# tin can heights; the b<0 rows 19..21 use a taller can
CAN_HEIGHT = 0.01
CAN_HEIGHT_WIDE = 0.015
WIDE_ROWS_MINUS = range(19, 22)
# can radius as a multiple of the height
RADIUS_FACTOR = 1.5
# the certificates use the middle half of each can, |b - b_n| <= h/2
CERT_ALPHA = 0.5

# five-point slope step and the one-sided points used for the n = 0 row
SLOPE_DELTA = 1e-4
ORIGIN_STEPS = (1e-4, 2e-4)

# tangency search
BRACKET_HALF_WIDTH = 0.1
BRACKET_DEFAULT = (1.5, 7.0)
BISECTION_TOL = 1e-9
ARC_TOLERANCE = 1e-10
WINDOW = (-4.0, 4.0, -4.0, 4.0)
MERGE_TOL = 1e-9
MAX_POINTS = 2_000_000
ARCLENGTH = 40.0

# the central tin can around (2, 0)
CENTER_CAN = {"a": 2.0, "b": 0.0, "h": 0.024, "r": 0.021 - 1e-5, "s": 2.0}
CENTER_SLOPE_BOUND = 7.0 / 8.0

# tolerances for table reproduction (|b| < 1 rows, |b| = 1 rows)
TABLE_TOL_A = (5e-4, 5e-3)
TABLE_TOL_S = (5e-3, 1e-2)

# Chebyshev parameter
A_CHEBYSHEV = 2.0

# sha256 of data/reference_tables.csv
REFERENCE_TABLES_SHA256 = "5c9c207ceffab5f5e0af66b505ef1bc98e1c281deeba4af69c85dbb43878f226"

CACHE_VERSION = "1"


def can_height(sign: str, n: int) -> float:
    if sign == "-" and n in WIDE_ROWS_MINUS:
        return CAN_HEIGHT_WIDE
    return CAN_HEIGHT


def grid_b(sign: str, n: int) -> float:
    b = round(STEP_B * n, 10)
    return b if sign == "+" else -b
