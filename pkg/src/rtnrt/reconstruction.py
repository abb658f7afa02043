"""Domain sampling: sweep a family of test domains, keep the positive ones and
intersect their closures on a pixel grid."""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.spatial.distance import directed_hausdorff

from .errors import MetricError, PlanError, RtnrtError
from .forward import CauchyData
from .geometry import (
    BoundaryCurve,
    TestDomain,
    check_distance_property,
    contains_points,
    distance_between,
    interior_angles,
    make_circle,
    make_convex_polygon,
    strictly_inside,
)
from .indicators import (
    FINITE,
    NRT_WINDOW,
    SLOPE_THRESHOLD,
    TAU_LADDER,
    TRUNCATION,
    WINDOW,
    IndicatorResult,
    Schedule,
    duality_gap,
    nrt_indicator,
    rt_indicator,
)
from .operators import assemble_R

METHODS = ("rt", "nrt", "both")


@dataclass(frozen=True)
class SweepConfig:
    schedule: Schedule = Schedule()
    taus: tuple = TAU_LADDER
    truncation: float = TRUNCATION
    slope_threshold: float = SLOPE_THRESHOLD
    window: int = WINDOW
    nrt_window: int = NRT_WINDOW
    threads: int = 1


@dataclass(frozen=True)
class SweepPlan:
    """A family of test domains.

    ``family="disks"`` uses a square grid of centers with spacing
    ``center_spacing`` and the radii in ``radii``; ``family="polygons"`` uses
    translates of ``template`` on the same kind of grid, scaled about the
    template centroid by each entry of ``scales``. Domains that do not keep a
    distance ``clearance`` from the outer boundary are dropped.
    """

    family: str = "disks"
    center_spacing: float = 0.1
    radii: tuple = ()
    centers: tuple | None = None
    template: tuple | None = None
    scales: tuple = (1.0,)
    nodes: int = 64
    nodes_per_edge: int = 16
    grading: float = 3.0
    clearance: float = 0.05
    margin_exclusion: float = 0.0

    def _center_grid(self, extent):
        if self.centers is not None:
            return [tuple(map(float, c)) for c in self.centers]
        h = self.center_spacing
        m = int(math.floor(extent / h + 1e-9))
        ticks = [round(k * h, 12) for k in range(-m, m + 1)]
        return [(x, y) for y in ticks for x in ticks]

    def domains(self, omega: BoundaryCurve) -> list:
        ro = omega.spec["radius"] if omega.kind == "circle" else float(np.max(np.hypot(*omega.nodes.T)))
        out = []
        if self.family == "disks":
            for r in self.radii:
                for cx, cy in self._center_grid(ro):
                    if math.hypot(cx, cy) + r > ro - self.clearance:
                        continue
                    curve = make_circle((cx, cy), r, self.nodes)
                    out.append(TestDomain(curve, f"disk_x{cx:+.4f}_y{cy:+.4f}_r{r:.4f}"))
        elif self.family == "polygons":
            if self.template is None:
                raise PlanError("polygon family needs a template")
            tv = np.asarray(self.template, dtype=np.float64)
            cen = tv.mean(axis=0)
            for s in self.scales:
                for cx, cy in self._center_grid(ro):
                    verts = cen + s * (tv - cen) + np.array([cx, cy])
                    if np.max(np.hypot(verts[:, 0], verts[:, 1])) > ro - self.clearance:
                        continue
                    curve = make_convex_polygon(verts, self.nodes_per_edge, self.grading)
                    out.append(TestDomain(curve, f"poly_x{cx:+.4f}_y{cy:+.4f}_s{s:.4f}"))
        else:
            raise PlanError(f"unknown family {self.family!r}")
        for d in out:
            if not strictly_inside(d.curve, omega):
                raise PlanError(f"{d.id} is not strictly inside the outer boundary")
        out.sort(key=lambda d: d.id)
        return out


@dataclass(frozen=True)
class SweepRecord:
    domain: TestDomain
    rt: IndicatorResult | None = None
    nrt: IndicatorResult | None = None
    duality_gap: float = math.nan
    in_margin: bool = False
    error: str = ""

    @property
    def id(self):
        return self.domain.id

    @property
    def positive(self) -> bool:
        if self.error:
            return False
        cls = [r.classification for r in (self.rt, self.nrt) if r is not None]
        return bool(cls) and all(c == FINITE for c in cls)


def evaluate_domain(data: CauchyData, domain: TestDomain, method: str, config: SweepConfig, true_d=None, margin=0.0):
    in_margin = bool(true_d is not None and margin > 0 and distance_between(domain.curve, true_d) < margin)
    try:
        R = assemble_R(domain.curve, data.omega)
        rt = nrt = None
        if method in ("rt", "both"):
            rt = rt_indicator(
                data, domain, config.schedule, R=R, slope_threshold=config.slope_threshold, window=config.window
            )
        if method in ("nrt", "both"):
            nrt = nrt_indicator(
                data, domain, config.taus, R=R, slope_threshold=config.slope_threshold, window=config.nrt_window
            )
        gap = duality_gap(R, data.dnu_w, config.schedule, config.truncation)
        return SweepRecord(domain, rt, nrt, gap, in_margin)
    except (RtnrtError, np.linalg.LinAlgError) as exc:
        return SweepRecord(domain, in_margin=in_margin, error=f"{type(exc).__name__}: {exc}")


def sweep_domains(data: CauchyData, domains, method="both", config: SweepConfig = SweepConfig(), true_d=None, margin=0.0):
    if method not in METHODS:
        raise PlanError(f"method must be one of {METHODS}")
    if not domains:
        return []

    def job(d):
        return evaluate_domain(data, d, method, config, true_d, margin)

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(job, domains))
    else:
        results = [job(d) for d in domains]
    return sorted(results, key=lambda r: r.id)


def sweep(data: CauchyData, plan: SweepPlan, method: str = "both", config: SweepConfig = SweepConfig(), true_d=None):
    """Evaluate every domain of ``plan``; results are ordered by domain id."""
    if method not in METHODS:
        raise PlanError(f"method must be one of {METHODS}")
    return sweep_domains(data, plan.domains(data.omega), method, config, true_d, plan.margin_exclusion)


@dataclass(frozen=True, eq=False)
class ReconstructionMask:
    origin: tuple
    h: float
    shape: tuple
    occupancy: np.ndarray
    positive_count: int
    empty_warning: bool = False
    inside_omega: np.ndarray = field(default=None, repr=False)

    def pixel_centers(self) -> np.ndarray:
        ny, nx = self.shape
        xs = self.origin[0] + (np.arange(nx) + 0.5) * self.h
        ys = self.origin[1] + (np.arange(ny) + 0.5) * self.h
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])

    def occupied_points(self) -> np.ndarray:
        return self.pixel_centers()[self.occupancy.ravel()]

    @property
    def area(self) -> float:
        return float(self.occupancy.sum()) * self.h**2

    def to_pgm(self) -> str:
        ny, nx = self.shape
        lines = ["P2", f"{nx} {ny}", "255"]
        # row 0 of the image is the top (largest y)
        for row in self.occupancy[::-1]:
            lines.append(" ".join("255" if v else "0" for v in row))
        return "\n".join(lines) + "\n"

    def sidecar(self) -> str:
        return json.dumps(
            {
                "origin": list(self.origin),
                "spacing": self.h,
                "shape": list(self.shape),
                "positive_count": self.positive_count,
                "empty_intersection": self.empty_warning,
                "pixel_convention": "pixel (i, j) covers [x0 + j h, x0 + (j+1) h] x [y0 + i h, y0 + (i+1) h]; PGM rows run top-down",
            },
            sort_keys=True,
            indent=1,
        )


def pixel_grid(omega: BoundaryCurve, h: float):
    if omega.kind == "circle":
        c = np.asarray(omega.spec["center"])
        r = omega.spec["radius"]
        lo, hi = c - r, c + r
    else:
        lo, hi = omega.nodes.min(axis=0), omega.nodes.max(axis=0)
    nx = int(math.ceil(round((hi[0] - lo[0]) / h, 9)))
    ny = int(math.ceil(round((hi[1] - lo[1]) / h, 9)))
    return (float(lo[0]), float(lo[1])), (ny, nx)


def intersect_positive(results, omega: BoundaryCurve, h_grid: float = 0.01) -> ReconstructionMask:
    """Pixels lying in the closure of every positive test domain."""
    origin, shape = pixel_grid(omega, h_grid)
    base = ReconstructionMask(origin, h_grid, shape, np.zeros(shape, bool), 0)
    pts = base.pixel_centers()
    inside = contains_points(omega, pts).reshape(shape)
    occ = inside.copy()
    count = 0
    for rec in results:
        if rec.positive:
            occ &= contains_points(rec.domain, pts).reshape(shape)
            count += 1
    empty = count == 0
    if empty:
        warnings.warn("no positive test domain: reconstruction is the whole outer domain", RuntimeWarning)
    return ReconstructionMask(origin, h_grid, shape, occ, count, empty, inside)


def rasterize(domain, like: ReconstructionMask) -> np.ndarray:
    return contains_points(domain, like.pixel_centers()).reshape(like.shape)


def hausdorff_distance(mask: ReconstructionMask, true_d) -> float:
    a = mask.occupied_points()
    if len(a) == 0:
        raise MetricError("reconstruction mask is empty")
    b = mask.pixel_centers()[rasterize(true_d, mask).ravel()]
    if len(b) == 0:
        curve = true_d.curve if isinstance(true_d, TestDomain) else true_d
        b = curve.all_points()
    return float(max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0]))


# --------------------------------------------------------- polygon checks


def possibly_rational_angles(curve: BoundaryCurve, max_den: int = 20, tol: float = 1e-9):
    """Interior angles within ``tol`` of 2π q/p with p <= ``max_den``."""
    flagged = []
    for ang in interior_angles(curve):
        frac = Fraction(ang / (2 * math.pi)).limit_denominator(max_den)
        if abs(ang - 2 * math.pi * frac) < tol:
            flagged.append((float(ang), frac.numerator, frac.denominator))
    return flagged


def polygon_hypothesis_warnings(d: BoundaryCurve, omega: BoundaryCurve) -> list:
    """Warnings when a polygonal obstacle satisfies neither the distance
    property nor the irrational-angle condition."""
    if d.kind != "convex_polygon":
        return []
    dist_ok = check_distance_property(d, omega)
    flagged = possibly_rational_angles(d)
    all_rational = len(flagged) == len(d.vertices)
    if not dist_ok and flagged:
        return [
            "obstacle fails the distance property and has corner angles that look "
            f"rational ({len(flagged)} of {len(d.vertices)}{', all' if all_rational else ''})"
        ]
    return []


def polygon_mode_sweep(
    data: CauchyData,
    template,
    d0=None,
    method: str = "rt",
    config: SweepConfig = SweepConfig(),
    plan: SweepPlan | None = None,
    h_grid: float = 0.01,
    true_d=None,
):
    """Sweep translated and scaled copies of a convex polygon template.

    For the NRT every generated polygon must lie inside the a priori convex
    polygon ``d0``.
    """
    tv = np.asarray(template.vertices if isinstance(template, BoundaryCurve) else template, dtype=np.float64)
    plan = plan or SweepPlan(family="polygons", template=tuple(map(tuple, tv)))
    if plan.template is None:
        plan = SweepPlan(**{**plan.__dict__, "family": "polygons", "template": tuple(map(tuple, tv))})
    domains = plan.domains(data.omega)
    if method in ("nrt", "both"):
        if d0 is None:
            raise PlanError("the no-response test needs an a priori polygon d0")
        d0_curve = d0.curve if isinstance(d0, TestDomain) else d0
        inside = [bool(np.all(contains_points(d0_curve, d.curve.vertices))) for d in domains]
        if plan.centers is None:
            # grid-generated families are clipped to the a priori polygon
            domains = [d for d, ok in zip(domains, inside) if ok]
        elif not all(inside):
            bad = next(d.id for d, ok in zip(domains, inside) if not ok)
            raise PlanError(f"{bad} is not contained in the a priori polygon")
    notes = polygon_hypothesis_warnings(true_d, data.omega) if true_d is not None else []
    for note in notes:
        warnings.warn(note, RuntimeWarning)
    results = sweep_domains(data, domains, method, config, true_d, plan.margin_exclusion)
    mask = intersect_positive(results, data.omega, h_grid) if results else None
    return results, mask


# ------------------------------------------------------------------ output

CSV_COLUMNS = (
    "domain_id",
    "kind",
    "center_x",
    "center_y",
    "size",
    "rt_value_or_inf",
    "rt_slope",
    "nrt_value_or_inf",
    "classification_rt",
    "classification_nrt",
    "duality_gap",
    "margin_band",
    "error",
)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "inf" if math.isinf(v) else ("nan" if math.isnan(v) else f"{v:.17g}")
    return str(v)


def _domain_params(d: TestDomain):
    c = d.curve
    if c.kind == "circle":
        return c.spec["center"][0], c.spec["center"][1], c.spec["radius"]
    cen = c.centroid
    size = float(np.max(np.hypot(*(c.vertices - cen).T)))
    return float(cen[0]), float(cen[1]), size


def indicators_csv(results, header: dict | None = None) -> str:
    buf = io.StringIO()
    if header:
        for key in sorted(header):
            buf.write(f"# {key}: {json.dumps(header[key], sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        cx, cy, size = _domain_params(r.domain)
        w.writerow(
            [
                r.id,
                r.domain.kind,
                _fmt(float(cx)),
                _fmt(float(cy)),
                _fmt(float(size)),
                _fmt(r.rt.value) if r.rt else "",
                _fmt(r.rt.slope) if r.rt else "",
                _fmt(r.nrt.value) if r.nrt else "",
                r.rt.classification if r.rt else "",
                r.nrt.classification if r.nrt else "",
                _fmt(float(r.duality_gap)),
                int(r.in_margin),
                r.error,
            ]
        )
    return buf.getvalue()
