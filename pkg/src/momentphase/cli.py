"""Command-line driver: moments file in, densities and diagnostics out.

Exit codes are part of the contract so harnesses can assert on them:
0 success, 2 unreadable/invalid input, 3 maximum-entropy non-convergence
(the expected outcome when raw singular-measure moments bypass
conditioning), 4 phase values out of range at inversion time.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .conditioning import (
    MultiMoments,
    PowerMoments,
    TrigMoments,
    condition_circle,
    condition_line,
    condition_polydisk,
    hankel_feasibility,
    moments_from_json,
)
from .maxent import density_on, solve_power_moments, solve_trig_moments
from .raybeam import RayDirection, ray_sweep, support_cutoff
from .transform import (
    PLEMELJ_EXP_SIGN,
    GridFunction,
    PhaseRangeError,
    invert_circle,
    invert_line,
    write_csv,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOCONV = 3
EXIT_RANGE = 4

# Low moment orders overshoot a jumpy phase by tens of percent (the smooth
# exponential family rings around steps); that is approximation error and is
# projected back into range.  Overshoot beyond half the admissible range
# means the input moments were never a phase's, and the run stops instead.
CLAMP_MARGIN = 0.5

DEFAULTS = {
    "pipeline": "line",
    "grid": 1024,
    "tol": 1e-7,
    "max_sweeps": 500_000,
    "pad": 4,
    "delta": 1.0,
    "nodes": 301,
    "span": 1.0,
    "skip_condition": False,
    "directions": None,
    "output": "out",
    "phase_support": None,
    "window": None,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="momentphase",
        description="Reconstruct a positive measure from truncated moments "
        "by phase conditioning, entropy optimization, and inversion.",
    )
    p.add_argument("moments", help="moments file (JSON)")
    p.add_argument(
        "--pipeline",
        choices=["line", "circle", "polydisk", "raybeam"],
        default=None,
        help="which reconstruction pipeline to run",
    )
    p.add_argument("--grid", type=int, default=None, help="output grid size (power of two)")
    p.add_argument("--tol", type=float, default=None, help="maxent residual tolerance")
    p.add_argument(
        "--max-sweeps",
        type=int,
        default=None,
        dest="max_sweeps",
        help="maxent budget in coordinate updates",
    )
    p.add_argument("--pad", type=int, default=None, help="FFT zero-padding factor")
    p.add_argument("--delta", type=float, default=None, help="preconditioning offset")
    p.add_argument("--nodes", type=int, default=None, help="quadrature node count")
    p.add_argument(
        "--skip-condition",
        action="store_true",
        default=None,
        dest="skip_condition",
        help="feed raw moments to maxent (negative control)",
    )
    p.add_argument("--directions", default=None, help="JSON file with ray directions")
    p.add_argument("--config", default=None, help="JSON config file; overrides flags")
    p.add_argument("--output", "-o", default=None, help="output directory")
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    """defaults < command-line flags < config file."""
    cfg = dict(DEFAULTS)
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(cfg)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    return cfg


def _sign_oracle_residual() -> float:
    """Self-check of the inversion sign on the half-height jump phase.

    The phase (1/2) on [0, 1] inverts in closed form to
    sqrt((1-x)/x) / pi; any sign error in the exponent flips the profile and
    misses by orders of magnitude.  Returns the max relative error over the
    interior of a coarse grid.
    """
    g = 256
    phi = GridFunction.on_interval(0.0, 1.0, np.full(g, 0.5))
    rho = invert_line(phi).values
    x = phi.grid
    exact = np.sqrt((1.0 - x) / x) / np.pi
    inner = (x > 0.05) & (x < 0.95)
    return float(np.max(np.abs(rho[inner] - exact[inner]) / exact[inner]))


def _provenance(moments_path: str, cfg: dict) -> dict:
    digest = hashlib.sha256(Path(moments_path).read_bytes()).hexdigest()
    # file-system locations do not influence the computation and are kept
    # out of the block so identical runs give byte-identical reports
    computational = {
        k: v for k, v in sorted(cfg.items()) if k not in ("output", "directions")
    }
    prov = {
        "input_sha256": digest,
        "config": computational,
        "plemelj_sign": PLEMELJ_EXP_SIGN,
        "sign_oracle_residual": _sign_oracle_residual(),
        "version": __version__,
    }
    if cfg.get("directions"):
        prov["directions_sha256"] = hashlib.sha256(
            Path(cfg["directions"]).read_bytes()
        ).hexdigest()
    return prov


def _write_report(outdir: Path, report: dict) -> None:
    report["schema"] = 1
    with open(outdir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _clamped_phase(values: np.ndarray, hi: float, report: dict) -> np.ndarray:
    worst = max(float(-values.min()), float(values.max() - hi), 0.0)
    if worst > CLAMP_MARGIN * hi:
        raise PhaseRangeError(
            f"phase exceeds [0, {hi:g}] by {worst:.3g}, beyond the clamp margin"
        )
    report["phase_clamp"] = {"max_violation": worst}
    return np.clip(values, 0.0, hi)


def run_pipeline(cfg: dict, moments_path: str) -> int:
    outdir = Path(cfg["output"])
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        with open(moments_path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        moments = moments_from_json(payload)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: cannot parse moments file: {exc}", file=sys.stderr)
        return EXIT_PARSE

    report: dict = {
        "pipeline": cfg["pipeline"],
        "provenance": _provenance(moments_path, cfg),
    }
    try:
        if cfg["pipeline"] == "line":
            if not isinstance(moments, PowerMoments):
                raise TypeError("line pipeline expects power moments")
            return _run_line(cfg, moments, outdir, report)
        if cfg["pipeline"] == "circle":
            if not isinstance(moments, TrigMoments):
                raise TypeError("circle pipeline expects trigonometric moments")
            return _run_circle(cfg, moments, outdir, report)
        if cfg["pipeline"] == "polydisk":
            if not isinstance(moments, MultiMoments):
                raise TypeError("polydisk pipeline expects multivariate moments")
            return _run_polydisk(cfg, moments, outdir, report)
        if cfg["pipeline"] == "raybeam":
            if not isinstance(moments, MultiMoments):
                raise TypeError("raybeam pipeline expects multivariate moments")
            return _run_raybeam(cfg, moments, outdir, report)
        raise ValueError(f"unknown pipeline {cfg['pipeline']!r}")
    except (TypeError, ValueError) as exc:
        if isinstance(exc, PhaseRangeError):
            print(f"error: {exc}", file=sys.stderr)
            report["error"] = str(exc)
            _write_report(outdir, report)
            return EXIT_RANGE
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


def _phase_interval(cfg, conditioned: PowerMoments, source: PowerMoments):
    if cfg["phase_support"] is not None:
        lo, hi = cfg["phase_support"]
        return float(lo), float(hi)
    if source.support.kind == "interval":
        # The phase of a measure on [a, b] lives on [a, b] unless an atom
        # sits at the right endpoint (which pushes it right by its mass);
        # callers with edge atoms should pass half_line or a wider window.
        return source.support.bounds
    return 0.0, support_cutoff(conditioned.values, span=cfg["span"])


def _run_line(cfg, a_mu: PowerMoments, outdir: Path, report: dict) -> int:
    report["feasibility"] = hankel_feasibility(a_mu).value
    if cfg["skip_condition"]:
        # classical route: treat the measure moments as directly matchable
        target = a_mu
        report["conditioned_moments"] = None
    else:
        target = condition_line(a_mu)
        report["conditioned_moments"] = target.values.tolist()
    lo, hi = _phase_interval(cfg, target, a_mu)
    sol = solve_power_moments(
        target.values,
        (lo, hi),
        node_count=cfg["nodes"],
        tol=cfg["tol"],
        max_sweeps=cfg["max_sweeps"],
        delta=cfg["delta"],
    )
    report["solver"] = sol.report()
    report["phase_interval"] = [lo, hi]
    if not sol.converged:
        _write_report(outdir, report)
        print("maxent did not converge; see report.json", file=sys.stderr)
        return EXIT_NOCONV

    grid = GridFunction.on_interval(lo, hi, np.zeros(cfg["grid"]))
    profile = density_on(sol, grid.grid)
    if cfg["skip_condition"]:
        density = grid.with_values(profile)
    else:
        phi = grid.with_values(_clamped_phase(profile, 1.0, report))
        density = invert_line(phi, pad_factor=cfg["pad"])
        write_csv(phi, outdir / "phase.csv")
        report["outputs"] = {"density_csv": "density.csv", "phase_csv": "phase.csv"}
    write_csv(density, outdir / "density.csv")
    report.setdefault("outputs", {"density_csv": "density.csv"})
    report["mass"] = {
        "input": float(a_mu.values[0]),
        "recovered": float(np.sum(density.values) * density.step),
    }
    _write_report(outdir, report)
    return EXIT_OK


def _run_circle(cfg, tau_mu: TrigMoments, outdir: Path, report: dict) -> int:
    tau0 = float(tau_mu.values[0].real)
    if cfg["skip_condition"]:
        target = tau_mu
        report["conditioned_moments"] = None
    else:
        target = condition_circle(tau_mu)
        report["conditioned_moments"] = [
            [float(v.real), float(v.imag)] for v in target.values
        ]
    sol = solve_trig_moments(
        target.values,
        node_count=max(cfg["grid"], 4 * target.order + 4),
        tol=cfg["tol"],
        max_sweeps=cfg["max_sweeps"],
        delta=cfg["delta"],
    )
    report["solver"] = sol.report()
    if not sol.converged:
        _write_report(outdir, report)
        print("maxent did not converge; see report.json", file=sys.stderr)
        return EXIT_NOCONV

    grid = GridFunction.on_circle(np.zeros(cfg["grid"]))
    profile = density_on(sol, grid.grid)
    if cfg["skip_condition"]:
        density = grid.with_values(profile)
    else:
        phi = grid.with_values(_clamped_phase(profile, np.pi, report))
        density = invert_circle(phi, tau0)
        write_csv(phi, outdir / "phase.csv")
        report["outputs"] = {"density_csv": "density.csv", "phase_csv": "phase.csv"}
    write_csv(density, outdir / "density.csv")
    report.setdefault("outputs", {"density_csv": "density.csv"})
    report["mass"] = {
        "input": 2 * np.pi * tau0,
        "recovered": float(np.sum(density.values) * density.step),
    }
    _write_report(outdir, report)
    return EXIT_OK


def _run_polydisk(cfg, a_mu: MultiMoments, outdir: Path, report: dict) -> int:
    phase = condition_polydisk(a_mu)
    entries = [
        [list(idx), float(v.real), float(v.imag)]
        for idx, v in zip(phase.indices, phase.values)
        if v != 0
    ]
    conditioned = {
        "schema": 1,
        "kind": "multi_phase",
        "dimension": phase.dimension,
        "order": phase.order,
        "total_mass": a_mu.total_mass,
        "entries": entries,
    }
    with open(outdir / "conditioned.json", "w", encoding="utf-8") as fh:
        json.dump(conditioned, fh, sort_keys=True, indent=2)
        fh.write("\n")
    report["outputs"] = {"conditioned_json": "conditioned.json"}
    report["note"] = (
        "polydisk pipeline emits conditioned torus phase moments; "
        "multivariate pointwise inversion is delegated to the raybeam pipeline"
    )
    _write_report(outdir, report)
    return EXIT_OK


def _run_raybeam(cfg, gamma: MultiMoments, outdir: Path, report: dict) -> int:
    if cfg["directions"] is None:
        raise ValueError("raybeam pipeline needs --directions FILE")
    with open(cfg["directions"], "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    directions = [RayDirection.of(d) for d in raw]
    window = tuple(cfg["window"]) if cfg["window"] else None
    slices = ray_sweep(
        gamma,
        directions,
        window=window,
        grid_size=cfg["grid"],
        span=cfg["span"],
        node_count=cfg["nodes"],
        tol=cfg["tol"],
        max_sweeps=cfg["max_sweeps"],
        delta=cfg["delta"],
        pad_factor=cfg["pad"],
    )
    summaries = []
    all_converged = True
    for i, s in enumerate(slices):
        write_csv(s.phase_grid, outdir / f"phase_{i:03d}.csv")
        write_csv(s.radon_values, outdir / f"slice_{i:03d}.csv")
        entry = s.summary()
        entry["outputs"] = {
            "phase_csv": f"phase_{i:03d}.csv",
            "slice_csv": f"slice_{i:03d}.csv",
        }
        summaries.append(entry)
        all_converged &= s.solution.converged
    report["rays"] = summaries
    _write_report(outdir, report)
    if not all_converged:
        print("one or more rays did not converge; see report.json", file=sys.stderr)
        return EXIT_NOCONV
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return run_pipeline(cfg, args.moments)


if __name__ == "__main__":
    sys.exit(main())
