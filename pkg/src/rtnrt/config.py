"""Scenario configuration: TOML loading, presets and validation."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, GeometryError, ParameterError, RtnrtError
from .geometry import (
    BoundaryCurve,
    make_circle,
    make_convex_polygon,
    make_ellipse,
    strictly_inside,
)
from .indicators import SLOPE_THRESHOLD, TRUNCATION, WINDOW, Schedule
from .reconstruction import METHODS, SweepPlan, polygon_hypothesis_warnings

OUTPUT_KINDS = ("indicators_csv", "mask_pgm", "duality_report_json", "cauchy_csv")
PRESETS = ("concentric", "offset_disk", "irrational_triangle", "distance_triangle")


@dataclass
class Violation:
    message: str
    severity: str = "error"

    def as_dict(self):
        return {"severity": self.severity, "message": self.message}

    def __str__(self):
        return f"{self.severity}: {self.message}"


@dataclass
class ScenarioConfig:
    omega: dict = field(default_factory=lambda: {"kind": "circle", "center": [0.0, 0.0], "radius": 1.0, "n": 128})
    obstacle: dict = field(default_factory=dict)
    excitation: object = "cos"
    data_source: str = "solver"
    noise_level: float = 0.0
    method: str = "both"
    sweep: dict = field(default_factory=dict)
    schedule: dict = field(default_factory=dict)
    truncation: float = TRUNCATION
    slope_threshold: float = SLOPE_THRESHOLD
    window: int = WINDOW
    grid_resolution: float = 0.01
    outputs: list = field(default_factory=lambda: list(OUTPUT_KINDS))
    seed: int = 0
    name: str = "scenario"
    green_check_densities: int = 5

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError([f"unknown key {k!r}" for k in unknown])
        return cls(**raw)

    @property
    def schedule_obj(self) -> Schedule:
        s = self.schedule
        return Schedule(float(s.get("alpha0", 1e-2)), float(s.get("q", 0.5)), int(s.get("K", 40)))


def load_config(source) -> ScenarioConfig:
    """Load a config from a TOML path or a preset name."""
    text = None
    p = Path(str(source))
    if p.is_file():
        text = p.read_text()
    elif str(source) in PRESETS:
        text = resources.files("rtnrt").joinpath("presets").joinpath(f"{source}.toml").read_text()
    else:
        raise ConfigError([f"no config file or preset named {source!r}"])
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"TOML parse error: {exc}"]) from exc
    return ScenarioConfig.from_dict(raw)


def build_curve(spec: dict) -> BoundaryCurve:
    kind = spec.get("kind")
    if kind == "circle":
        return make_circle(spec.get("center", (0.0, 0.0)), spec["radius"], spec.get("n", 128))
    if kind == "ellipse":
        return make_ellipse(spec.get("center", (0.0, 0.0)), spec["semi_axes"], spec.get("rotation", 0.0), spec.get("n", 128))
    if kind == "convex_polygon":
        return make_convex_polygon(spec["vertices"], spec.get("nodes_per_edge", 64), spec.get("grading", 3.0))
    raise ParameterError(f"unknown curve kind {kind!r}")


def build_plan(cfg: ScenarioConfig, obstacle: BoundaryCurve | None) -> SweepPlan:
    s = dict(cfg.sweep)
    s.pop("d0", None)
    if "margin_exclusion" not in s and obstacle is not None:
        s["margin_exclusion"] = 1.5 * obstacle.perimeter / obstacle.n
    for key in ("radii", "scales"):
        if key in s:
            s[key] = tuple(float(v) for v in s[key])
    for key in ("centers", "template"):
        if key in s and s[key] is not None:
            s[key] = tuple(tuple(map(float, c)) for c in s[key])
    return SweepPlan(**s)


def _excitation_nonzero(exc) -> bool:
    if isinstance(exc, dict):
        return any(float(v) != 0.0 for v in exc.values())
    return exc in ("cos", "exp_cos")


def validate(cfg: ScenarioConfig) -> list:
    out = []
    add = out.append
    if not _excitation_nonzero(cfg.excitation):
        add(Violation("excitation is identically zero or unknown"))
    if cfg.method not in METHODS:
        add(Violation(f"method must be one of {METHODS}"))
    if cfg.data_source not in ("solver", "oracle"):
        add(Violation("data_source must be 'solver' or 'oracle'"))
    if not cfg.noise_level >= 0:
        add(Violation("noise_level must be >= 0"))
    if not cfg.grid_resolution > 0:
        add(Violation("grid_resolution must be positive"))
    for o in cfg.outputs:
        if o not in OUTPUT_KINDS:
            add(Violation(f"unknown output {o!r}"))
    try:
        cfg.schedule_obj
    except ParameterError as exc:
        add(Violation(str(exc)))
    omega = obstacle = None
    try:
        omega = build_curve(cfg.omega)
    except (ParameterError, GeometryError, KeyError) as exc:
        add(Violation(f"omega: {exc}"))
    try:
        obstacle = build_curve(cfg.obstacle)
    except (ParameterError, GeometryError, KeyError) as exc:
        add(Violation(f"obstacle: {exc}"))
    if omega is not None:
        if not (omega.kind == "circle" and np.allclose(omega.spec["center"], 0.0) and omega.spec["radius"] == 1.0):
            add(Violation("omega must be the unit disk (rescale the scenario)"))
        if obstacle is not None:
            if not strictly_inside(obstacle, omega):
                add(Violation("obstacle is not strictly inside omega"))
            for note in polygon_hypothesis_warnings(obstacle, omega):
                add(Violation(note, "warning"))
    if cfg.data_source == "oracle" and obstacle is not None:
        if obstacle.kind != "circle" or not np.allclose(obstacle.spec["center"], 0.0):
            add(Violation("oracle data needs a circle obstacle centred at the origin"))
    if obstacle is not None and omega is not None and cfg.data_source == "solver":
        nodes = [omega.n] + [cfg.sweep.get("nodes", 64)]
        if obstacle.n in nodes:
            add(Violation("obstacle grid equals an inversion grid (inverse crime)", "warning"))
    try:
        plan = build_plan(cfg, obstacle)
        if omega is not None and plan.family in ("disks", "polygons"):
            plan.domains(omega)
    except (TypeError, ValueError, RtnrtError) as exc:
        add(Violation(f"sweep: {exc}"))
    if cfg.method in ("nrt", "both") and cfg.sweep.get("family") == "polygons" and "d0" not in cfg.sweep:
        add(Violation("polygon sweeps with the no-response test need an a priori polygon sweep.d0"))
    if not math.isfinite(cfg.slope_threshold) or cfg.slope_threshold <= 0:
        add(Violation("slope_threshold must be positive"))
    return out


def errors_only(violations) -> list:
    return [v for v in violations if v.severity == "error"]
