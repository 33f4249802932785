"""Run configuration: defaults, JSON loading and validation."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import constants as C
from .errors import ConfigError


@dataclass
class GridSpec:
    sign: str = "+"
    n_max: int = C.N_ROWS - 1
    spacing: float = C.STEP_B


@dataclass
class Tolerances:
    bisection: float = C.BISECTION_TOL
    arc: float = C.ARC_TOLERANCE
    merge: float = C.MERGE_TOL


@dataclass
class CanRules:
    height: float = C.CAN_HEIGHT
    height_wide: float = C.CAN_HEIGHT_WIDE
    wide_rows_minus: tuple = (min(C.WIDE_ROWS_MINUS), max(C.WIDE_ROWS_MINUS))
    radius_factor: float = C.RADIUS_FACTOR
    epsilon: float = 1e-5  # the center can has radius 0.021 - epsilon
    alpha: float = C.CERT_ALPHA
    preset: str = "tabulated"
    # rows whose degree-one hypothesis is not granted (by "sign:n")
    degree_one_waived: tuple = ()


@dataclass
class GammaSpec:
    b_range: tuple = (-0.1, 0.1)
    step: float = 0.01  # b spacing of the zero curves and the boundary columns


@dataclass
class RunConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    tolerances: Tolerances = field(default_factory=Tolerances)
    window: tuple = C.WINDOW
    pairs: dict = field(default_factory=lambda: {"+": "plus", "-": "minus"})
    cans: CanRules = field(default_factory=CanRules)
    stencil_delta: float = C.SLOPE_DELTA
    gamma: GammaSpec = field(default_factory=GammaSpec)
    boxes: dict = field(default_factory=lambda: {"+": "+", "-": "-"})
    # box family for scan-can when it differs from the cmc-check one
    scan_boxes: str | None = None
    scan_samples: tuple = (16, 16)
    cache_path: str = ".horseshoe-cache/results.jsonl"
    jobs: int = 1

    def validate(self) -> "RunConfig":
        if self.grid.sign not in ("+", "-"):
            raise ConfigError(f"grid.sign must be '+' or '-', got {self.grid.sign!r}")
        if not 0 <= self.grid.n_max < C.N_ROWS:
            raise ConfigError(f"grid.n_max must lie in 0..{C.N_ROWS - 1}")
        if self.grid.spacing != C.STEP_B:
            raise ConfigError("only the tabulated grid spacing is supported")
        for name, v in asdict(self.tolerances).items():
            if not v > 0:
                raise ConfigError(f"tolerances.{name} must be positive")
        if len(self.window) != 4 or self.window[0] >= self.window[1] or self.window[2] >= self.window[3]:
            raise ConfigError("window must be [x0, x1, y0, y1] with x0 < x1, y0 < y1")
        from .tangency import PAIRS
        for sign, name in self.pairs.items():
            if sign not in ("+", "-") or name not in PAIRS:
                raise ConfigError(f"unknown pair {sign!r}: {name!r}")
        from .tincan import PRESETS
        if self.cans.preset not in PRESETS:
            raise ConfigError(f"unknown can preset {self.cans.preset!r}")
        if not 0 < self.cans.alpha < 1:
            raise ConfigError("cans.alpha must lie in (0, 1)")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        return self

    def solver_kwargs(self) -> dict:
        return {"window": tuple(self.window), "arc_tol": self.tolerances.arc,
                "merge_tol": self.tolerances.merge, "tol": self.tolerances.bisection}

    def as_dict(self) -> dict:
        return asdict(self)


_NESTED = {"grid": GridSpec, "tolerances": Tolerances, "cans": CanRules, "gamma": GammaSpec}


def _build(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be an object")
    names = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(names))
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {', '.join(unknown)}")
    kw = {}
    for k, v in data.items():
        if cls is RunConfig and k in _NESTED:
            v = _build(_NESTED[k], v, k)
        elif isinstance(v, list):
            v = tuple(v)
        kw[k] = v
    return cls(**kw)


def load_config(source=None) -> RunConfig:
    """RunConfig from a JSON path, a dict, or the defaults when None."""
    if source is None:
        return RunConfig().validate()
    if isinstance(source, dict):
        data = source
    else:
        try:
            data = json.loads(Path(source).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {source} is not valid JSON: {exc}") from exc
    return _build(RunConfig, data, "config").validate()
