"""Command-line front end.

    pilotwave simulate | fit | oracle | coherence | predict-blocked

Exit codes: 0 success, 1 physics/validation error, 2 precondition error,
3 oracle failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .estimates import LIGHTYEAR_M, CoherenceInputs, coherence_summary, spin_population_ratio
from .fitting import FitConfig, chi2_objective, fit_data, fit_width
from .io import dumps, svg_plot, write_csv, write_json, write_svg
from .model import (
    BeamThermo,
    ExperimentGeometry,
    GridSpec,
    ModelError,
    PreconditionError,
    generate_pattern,
    predict_blocked_slit,
)
from .montecarlo import EnsembleConfig, oracle_report, radiation_depth_profile

EXIT_OK, EXIT_PHYSICS, EXIT_PRECONDITION, EXIT_ORACLE = 0, 1, 2, 3
FORMATS = ("csv", "json", "svg")

# per-subcommand defaults for the shared flags
SHARED_DEFAULTS = dict(
    slit_width=2e-5,
    screen_distance=5.0,
    n_slits=1,
    slit_separation=None,
    beta_e0=0.5,
    pilot_wavelength=2e-9,
    grid_points=2001,
    theta_range=3 * math.pi,
    geometry_factor=1.0,
    out="out",
    format="csv,json,svg",
)
COMMAND_DEFAULTS = {
    "fit": dict(grid_points=201, theta_range=2 * math.pi),
    "oracle": dict(grid_points=201),
    "predict-blocked": dict(n_slits=2),
}


def _add_shared(p: argparse.ArgumentParser):
    g = p.add_argument_group("geometry and beam")
    g.add_argument("--slit-width", type=float, help="slit width a in m (default 2e-5)")
    g.add_argument("--screen-distance", type=float, help="screen distance D in m (default 5)")
    g.add_argument("--n-slits", type=int, help="number of slits")
    g.add_argument(
        "--slit-separation", type=float,
        help="center-to-center slit separation in m (default 5 x slit width when n-slits > 1)",
    )
    g.add_argument("--beta-e0", type=float, help="coupling beta*E0 in [0, 1] (default 0.5)")
    g.add_argument("--pilot-wavelength", type=float, help="pilot wavelength in m; k = 2 pi / lambda")
    g.add_argument("--geometry-factor", type=float, help="multiplier in the y -> theta map (default 1)")
    g.add_argument("--grid-points", type=int, help="number of grid points / bins")
    g.add_argument("--theta-range", type=float, help="half-width of the grid in theta (radians)")
    o = p.add_argument_group("output")
    o.add_argument("--out", help="output directory (env PILOTWAVE_OUT overrides)")
    o.add_argument("--format", help="comma-separated subset of csv,json,svg")
    o.add_argument("--manifest", type=Path, help="re-run from a manifest.json written by a previous run")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pilotwave",
        description="Radiation vs particle-beam diffraction patterns under well trapping.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="paired radiation / trapping-probability patterns")
    _add_shared(p)
    p.add_argument("--with-chi2", action="store_true", help="add the per-bin chi^2 panel to the SVG")

    p = sub.add_parser("fit", help="fit slit width of the radiation pattern to the particle pattern")
    _add_shared(p)
    p.add_argument("--weighting", choices=("uniform", "poisson"))
    p.add_argument("--total-counts", type=float)
    p.add_argument("--bounds", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--tol", type=float)

    p = sub.add_parser("oracle", help="Monte-Carlo check of the trapping probability")
    _add_shared(p)
    p.add_argument("--n-particles", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--bins", type=int, help="position bins (alias of --grid-points)")
    p.add_argument("--expect-beta-e0", type=float, help="compare against this beta*E0 instead")
    p.add_argument("--workers", type=int, default=1, help="threads; results do not depend on it")

    p = sub.add_parser("coherence", help="coherence length / width estimates (JSON on stdout)")
    p.add_argument("--bandwidth", type=float, help="bandwidth in Hz (default 1)")
    p.add_argument("--source-distance", type=float, help="source distance in m")
    p.add_argument("--source-distance-ly", type=float, help="source distance in lightyears (default 1e9)")
    p.add_argument("--wavelength", type=float, help="wavelength in m (default 5e-12)")
    p.add_argument("--source-area", type=float, help="source area in m^2 (default 1e-20)")
    p.add_argument("--delta-e", type=float, help="spin energy splitting in J")
    p.add_argument("--beta-thermo", type=float, help="inverse background temperature in 1/J")
    p.add_argument("--out", help="also write coherence.json here")
    p.add_argument("--manifest", type=Path)

    p = sub.add_parser("predict-blocked", help="one slit blocked to particles but not to the pilot wave")
    _add_shared(p)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, manifest values and explicit flags (in that order)."""
    cmd = args.command
    cfg: dict = {}
    if cmd != "coherence":
        cfg.update(SHARED_DEFAULTS)
        cfg.update(COMMAND_DEFAULTS.get(cmd, {}))
    if cmd == "fit":
        fc = FitConfig()
        cfg.update(weighting=fc.weighting, total_counts=fc.total_counts,
                   bounds=list(fc.width_scale_bounds), tol=fc.tolerance)
    elif cmd == "oracle":
        cfg.update(n_particles=1_000_000, seed=42, expect_beta_e0=None)
    elif cmd == "simulate":
        cfg.update(with_chi2=False)
    elif cmd == "coherence":
        cfg.update(bandwidth=1.0, source_distance=None, source_distance_ly=1e9, wavelength=5e-12,
                   source_area=1e-20, delta_e=None, beta_thermo=None, out=None)

    if getattr(args, "manifest", None):
        data = json.loads(Path(args.manifest).read_text())
        if data.get("command") != cmd:
            raise PreconditionError(f"manifest is for {data.get('command')!r}, not {cmd!r}")
        cfg.update(data["config"])

    for key, value in vars(args).items():
        if key in ("command", "manifest", "workers"):
            continue
        if key == "bins":
            if value is not None:
                cfg["grid_points"] = value
            continue
        if key == "with_chi2":
            cfg["with_chi2"] = cfg.get("with_chi2", False) or value
            continue
        if value is not None:
            cfg[key] = list(value) if isinstance(value, tuple) else value

    env_out = os.environ.get("PILOTWAVE_OUT")
    if env_out:
        cfg["out"] = env_out
    if cmd != "coherence":
        if cfg["n_slits"] > 1 and cfg["slit_separation"] is None:
            cfg["slit_separation"] = 5 * cfg["slit_width"]
        formats = [f.strip() for f in cfg["format"].split(",") if f.strip()]
        bad = set(formats) - set(FORMATS)
        if bad:
            raise ModelError(f"unknown format(s) {sorted(bad)}; choose from {FORMATS}")
    return cfg


def _geometry(cfg) -> ExperimentGeometry:
    return ExperimentGeometry(
        n_slits=cfg["n_slits"],
        slit_width_a=cfg["slit_width"],
        slit_separation=cfg["slit_separation"] if cfg["n_slits"] > 1 else None,
        screen_distance_D=cfg["screen_distance"],
        geometry_factor=cfg["geometry_factor"],
    )


def _k_pilot(cfg) -> float:
    lam = cfg["pilot_wavelength"]
    if not lam > 0:
        raise ModelError("pilot wavelength must be > 0")
    return 2 * math.pi / lam


def _outdir(cfg) -> Path:
    out = Path(cfg["out"])
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ModelError(f"cannot create output directory {out}: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise ModelError(f"output directory {out} is not writable")
    return out


def _formats(cfg) -> set[str]:
    return {f.strip() for f in cfg["format"].split(",") if f.strip()}


def _write_manifest(out: Path, cmd: str, cfg: dict):
    write_json(out / "manifest.json", {"command": cmd, "config": cfg, "version": __version__})


def cmd_simulate(cfg: dict, out: Path) -> int:
    geom, k = _geometry(cfg), _k_pilot(cfg)
    thermo = BeamThermo(beta_E0=cfg["beta_e0"])
    rad, sed = generate_pattern(geom, thermo, k, GridSpec(cfg["grid_points"], cfg["theta_range"]))
    fmts = _formats(cfg)
    if "csv" in fmts:
        write_csv(out / "pattern.csv", ("y_m", "theta", "radiation", "sed"),
                  (rad.positions_y, rad.thetas, rad.values, sed.values))
    if "svg" in fmts:
        lower = ()
        if cfg["with_chi2"]:
            fc = FitConfig(theta_range=cfg["theta_range"], bins=_odd(cfg["grid_points"]))
            res = chi2_objective(sed, 1.0, geom, k, fc)
            lower = (("chi2 per bin", res.chi2_per_bin),)
        write_svg(out / "pattern.svg", svg_plot(
            rad.thetas, (("radiation", rad.values), ("particle beam", sed.values)),
            ylabel="peak-normalized", title=f"n_slits={geom.n_slits}, beta*E0={thermo.beta_E0:g}",
            lower_series=lower,
        ))
    return EXIT_OK


def _odd(n: int) -> int:
    return max(11, n if n % 2 else n + 1)


def cmd_fit(cfg: dict, out: Path) -> int:
    geom, k = _geometry(cfg), _k_pilot(cfg)
    thermo = BeamThermo(beta_E0=cfg["beta_e0"])
    fc = FitConfig(
        width_scale_bounds=tuple(cfg["bounds"]),
        tolerance=cfg["tol"],
        weighting=cfg["weighting"],
        total_counts=cfg["total_counts"],
        bins=cfg["grid_points"],
        theta_range=cfg["theta_range"],
    )
    data = fit_data(geom, thermo, k, fc)
    if thermo.beta_E0 == 0:
        # identical curves; the objective is zero everywhere near s = 1
        res = chi2_objective(data, 1.0, geom, k, fc)
        report_json = {
            "width_scale": 1.0, "width_reduction_percent": 0.0, "chi2_total": res.chi2_total,
            "chi2_per_bin": res.chi2_per_bin, "bin_center_theta": res.bin_thetas,
            "optimizer_evaluations": 0,
        }
        report_json["config_echo"] = asdict(fc)
        thetas, chi2 = res.bin_thetas, res.chi2_per_bin
        scale = 1.0
    else:
        report = fit_width(data, geom, k, fc)
        report_json = report.to_json()
        thetas, chi2 = report.bin_center_theta, report.chi2_per_bin
        scale = report.width_scale
    fmts = _formats(cfg)
    if "json" in fmts:
        write_json(out / "fit_report.json", report_json)
    if "csv" in fmts:
        write_csv(out / "chi2_bins.csv", ("bin_center_theta", "chi2"), (thetas, chi2))
    if "svg" in fmts:
        best = chi2_objective(data, scale, geom, k, fc)
        write_svg(out / "fit.svg", svg_plot(
            best.bin_thetas, (("particle beam", best.data), (f"radiation, width x {scale:.5f}", best.model)),
            ylabel="peak-normalized", title="slit-width fit", lower_series=(("chi2 per bin", best.chi2_per_bin),),
        ))
    print(f"width_reduction_percent={report_json['width_reduction_percent']:.6f}")
    return EXIT_OK


def cmd_oracle(cfg: dict, out: Path, workers: int = 1) -> int:
    geom, k = _geometry(cfg), _k_pilot(cfg)
    thermo = BeamThermo(beta_E0=cfg["beta_e0"])
    profile = radiation_depth_profile(geom, k, cfg["grid_points"], cfg["theta_range"])
    ens = EnsembleConfig(profile, thermo, n_particles=cfg["n_particles"], seed=cfg["seed"])
    rep = oracle_report(ens, cfg["expect_beta_e0"], workers=workers)
    h = rep.histogram
    fmts = _formats(cfg)
    if "csv" in fmts:
        write_csv(out / "oracle.csv",
                  ("bin_center_y", "bin_center_theta", "trapped_count", "normalized_value",
                   "expected_value", "z_score"),
                  (h.bin_center_y, h.bin_center_theta, h.trapped_count, h.normalized_value,
                   rep.expected_value, rep.per_bin_z))
    if "json" in fmts:
        write_json(out / "oracle_report.json", rep.to_json())
    if "svg" in fmts:
        write_svg(out / "oracle.svg", svg_plot(
            h.bin_center_theta, (("expected", rep.expected_value), ("simulated", h.normalized_value)),
            ylabel="peak-normalized occupancy", title="Monte-Carlo trapping oracle",
        ))
    print(f"max_z_score={rep.max_z_score:.4f} pass={str(rep.passed).lower()}")
    return EXIT_OK if rep.passed else EXIT_ORACLE


def cmd_coherence(cfg: dict) -> int:
    distance = cfg["source_distance"]
    if distance is None:
        distance = cfg["source_distance_ly"] * LIGHTYEAR_M
    inputs = CoherenceInputs(
        bandwidth=cfg["bandwidth"], source_distance_R=distance,
        wavelength=cfg["wavelength"], source_area_S=cfg["source_area"],
    )
    result = coherence_summary(inputs)
    if cfg["delta_e"] is not None:
        if cfg["beta_thermo"] is None:
            raise PreconditionError("--delta-e needs --beta-thermo")
        result["delta_e_j"] = cfg["delta_e"]
        result["beta_thermo_per_j"] = cfg["beta_thermo"]
        result["spin_population_ratio"] = spin_population_ratio(cfg["delta_e"], cfg["beta_thermo"])
    sys.stdout.write(dumps(result))
    if cfg["out"]:
        out = _outdir(cfg)
        write_json(out / "coherence.json", result)
        _write_manifest(out, "coherence", cfg)
    return EXIT_OK


def cmd_predict_blocked(cfg: dict, out: Path) -> int:
    geom, k = _geometry(cfg), _k_pilot(cfg)
    if geom.n_slits != 2:
        raise PreconditionError(f"predict-blocked needs --n-slits 2, got {geom.n_slits}")
    thermo = BeamThermo(beta_E0=cfg["beta_e0"])
    pred = predict_blocked_slit(geom, thermo, k, GridSpec(cfg["grid_points"], cfg["theta_range"]))
    s, o = pred.sed_prediction, pred.orthodox_prediction
    fmts = _formats(cfg)
    if "csv" in fmts:
        write_csv(out / "blocked.csv", ("y_m", "theta", "sed_prediction", "orthodox_prediction"),
                  (s.positions_y, s.thetas, s.values, o.values))
    if "svg" in fmts:
        write_svg(out / "blocked.svg", svg_plot(
            s.thetas, (("pilot-wave model", s.values), ("orthodox", o.values)),
            ylabel="relative intensity", title="one slit blocked to particles",
        ))
    return EXIT_OK


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            cfg = resolve_config(args)
            if args.command == "coherence":
                return cmd_coherence(cfg)
            out = _outdir(cfg)
            if args.command == "predict-blocked" and cfg["n_slits"] != 2:
                raise PreconditionError(f"predict-blocked needs --n-slits 2, got {cfg['n_slits']}")
            _write_manifest(out, args.command, cfg)
            if args.command == "simulate":
                return cmd_simulate(cfg, out)
            if args.command == "fit":
                return cmd_fit(cfg, out)
            if args.command == "oracle":
                return cmd_oracle(cfg, out, workers=args.workers)
            return cmd_predict_blocked(cfg, out)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ModelError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
