"""Command-line entry point: ``rtnrt {run,validate,oracle} CONFIG``.

CONFIG is a TOML file or one of the shipped preset names. Exit codes: 0 on
success, 2 when the configuration is rejected, 3 on a numerical failure while
generating data.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .config import (
    PRESETS,
    ScenarioConfig,
    build_curve,
    build_plan,
    errors_only,
    load_config,
    validate,
)
from .errors import ConfigError, RtnrtError
from .forward import (
    CauchyData,
    add_noise,
    concentric_annulus_oracle,
    excitation_fourier,
    excitation_values,
    solve_annular_dirichlet,
)
from .geometry import make_convex_polygon
from .indicators import green_identity_check
from .reconstruction import (
    SweepConfig,
    hausdorff_distance,
    indicators_csv,
    intersect_positive,
    polygon_mode_sweep,
    sweep,
)

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3

log = logging.getLogger("rtnrt")


def _num(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else ("inf" if v > 0 else "nan")


def make_data(cfg: ScenarioConfig, obstacle=None) -> CauchyData:
    omega = build_curve(cfg.omega)
    obstacle = build_curve(cfg.obstacle) if obstacle is None else obstacle
    if cfg.data_source == "oracle":
        data = concentric_annulus_oracle(
            omega.spec["radius"], obstacle.spec["radius"], excitation_fourier(cfg.excitation), omega.n
        )
    else:
        data = solve_annular_dirichlet(omega, obstacle, excitation_values(cfg.excitation, omega.params))
    return add_noise(data, cfg.noise_level, cfg.seed)


def sweep_config(cfg: ScenarioConfig, threads: int = 1) -> SweepConfig:
    return SweepConfig(
        schedule=cfg.schedule_obj,
        truncation=cfg.truncation,
        slope_threshold=cfg.slope_threshold,
        window=cfg.window,
        threads=max(1, int(threads)),
    )


def green_checks(cfg: ScenarioConfig, data: CauchyData, obstacle) -> list:
    if data.solution is None or not obstacle.is_smooth or cfg.noise_level > 0:
        return []
    rng = np.random.default_rng(cfg.seed)
    th = data.omega.params
    out = []
    for k in range(cfg.green_check_densities):
        if k == 0:
            phi = np.cos(th)
        else:
            phi = sum(rng.standard_normal() * np.cos(j * th + rng.uniform(0, 2 * np.pi)) for j in range(9))
        out.append(green_identity_check(data, obstacle, phi))
    return out


def run_scenario(cfg: ScenarioConfig, threads: int = 1):
    """Generate data, sweep and intersect. Returns (data, results, mask, report)."""
    obstacle = build_curve(cfg.obstacle)
    data = make_data(cfg, obstacle)
    plan = build_plan(cfg, obstacle)
    scfg = sweep_config(cfg, threads)
    if plan.family == "polygons":
        d0 = cfg.sweep.get("d0")
        d0_curve = make_convex_polygon(d0, 8, 1.0) if d0 is not None else None
        results, mask = polygon_mode_sweep(
            data, plan.template, d0_curve, cfg.method, scfg, plan, cfg.grid_resolution, true_d=obstacle
        )
    else:
        results = sweep(data, plan, cfg.method, scfg, true_d=obstacle)
        mask = intersect_positive(results, data.omega, cfg.grid_resolution) if results else None
    report = {
        "scenario": cfg.name,
        "generator": data.meta.get("generator"),
        "domains": [
            {
                "id": r.id,
                "duality_gap": _num(r.duality_gap),
                "classification_rt": r.rt.classification if r.rt else None,
                "classification_nrt": r.nrt.classification if r.nrt else None,
                "rt_slope": _num(r.rt.slope) if r.rt else None,
                "nrt_slope": _num(r.nrt.slope) if r.nrt else None,
                "margin_band": r.in_margin,
                "error": r.error or None,
            }
            for r in results
        ],
        "green_identity": [_num(v) for v in green_checks(cfg, data, obstacle)],
    }
    if mask is not None:
        report["positive_count"] = mask.positive_count
        report["empty_intersection"] = mask.empty_warning
        try:
            report["hausdorff"] = _num(hausdorff_distance(mask, obstacle))
        except RtnrtError as exc:
            report["hausdorff"] = None
            report["hausdorff_error"] = str(exc)
    return data, results, mask, report


def write_outputs(cfg, out_dir: Path, data, results, mask, report) -> list:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name, text):
        path = out_dir / name
        path.write_text(text)
        written.append(path)

    if "indicators_csv" in cfg.outputs:
        header = {"scenario": cfg.name, "generator": data.meta.get("generator"), "method": cfg.method}
        put("indicators.csv", indicators_csv(results, header))
    if "mask_pgm" in cfg.outputs:
        if mask is None:
            from .reconstruction import ReconstructionMask, pixel_grid

            origin, shape = pixel_grid(data.omega, cfg.grid_resolution)
            mask = ReconstructionMask(origin, cfg.grid_resolution, shape, np.zeros(shape, bool), 0, True)
        put("mask.pgm", mask.to_pgm())
        put("mask.json", mask.sidecar())
    if "duality_report_json" in cfg.outputs:
        put("duality_report.json", json.dumps(report, indent=1, sort_keys=True) + "\n")
    if "cauchy_csv" in cfg.outputs:
        put("cauchy.csv", data.to_csv())
    return written


def _reject(violations, stream=sys.stdout) -> int:
    record = {"status": "invalid", "violations": [v.as_dict() if hasattr(v, "as_dict") else {"severity": "error", "message": str(v)} for v in violations]}
    print(json.dumps(record, sort_keys=True), file=stream)
    return EXIT_INVALID


def _load(source):
    try:
        return load_config(source), None
    except ConfigError as exc:
        return None, _reject(exc.violations)


def cmd_validate(args) -> int:
    cfg, status = _load(args.config)
    if cfg is None:
        return status
    violations = validate(cfg)
    print(json.dumps({"status": "invalid" if errors_only(violations) else "ok", "violations": [v.as_dict() for v in violations]}, sort_keys=True))
    return EXIT_INVALID if errors_only(violations) else EXIT_OK


def cmd_run(args) -> int:
    cfg, status = _load(args.config)
    if cfg is None:
        return status
    violations = validate(cfg)
    for v in violations:
        log.warning("%s", v)
    if errors_only(violations):
        return _reject(errors_only(violations))
    try:
        data, results, mask, report = run_scenario(cfg, args.threads)
    except RtnrtError as exc:
        print(json.dumps({"status": "numerical_failure", "error": f"{type(exc).__name__}: {exc}"}), file=sys.stdout)
        return EXIT_NUMERICAL
    written = write_outputs(cfg, Path(args.out_dir), data, results, mask, report)
    for p in written:
        log.info("wrote %s", p)
    return EXIT_OK


def cmd_oracle(args) -> int:
    cfg, status = _load(args.config)
    if cfg is None:
        return status
    cfg.data_source = "oracle"
    violations = errors_only(validate(cfg))
    if violations:
        return _reject(violations)
    data = make_data(cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "cauchy.csv").write_text(data.to_csv())
    log.info("wrote %s", out / "cauchy.csv")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rtnrt", description="Range test / no-response test toolkit")
    p.add_argument("--out-dir", default="rtnrt_out", help="directory for output files")
    p.add_argument("--threads", type=int, default=1, help="worker threads for the sweep")
    p.add_argument("--verbose", "-v", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn, text in (
        ("run", cmd_run, "run a scenario and write outputs"),
        ("validate", cmd_validate, "check a scenario config"),
        ("oracle", cmd_oracle, "write exact Cauchy data for a concentric scenario"),
    ):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("config", help=f"TOML file or preset ({', '.join(PRESETS)})")
        sp.add_argument("--out-dir", default=argparse.SUPPRESS)
        sp.add_argument("--threads", type=int, default=argparse.SUPPRESS)
        sp.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS)
        sp.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
