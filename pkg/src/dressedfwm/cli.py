"""Command-line front end: run configs, parameter sweeps, tabular output.

    dressedfwm simulate fig2a [--out fig2a.csv] [--format csv|json] [--threads N] [--no-doppler]
    dressedfwm validate my_run.cfg
    dressedfwm schemes

The worker count is ``--threads``, else ``$DRESSEDFWM_THREADS``, else the
logical core count. Grid points are distributed per parameter point and
collected in grid order, so the output does not depend on the worker count.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .analysis import duan_criterion, intensity_spectra, pair_correlations, sideband_decomposition, to_db
from .config import (
    ConfigError,
    Diagnostic,
    RunConfig,
    SweepAxis,
    list_schemes,
    parse_config,
    resolve_config_path,
    to_display,
)
from .noise import apply_detection_efficiency, min_physicality_eigenvalue, output_covariance
from .propagation import build_medium, matrix_exponential, medium_generator, propagate_carrier

SCHEMA_VERSION = "dressedfwm-sweep/1"
THREADS_ENV = "DRESSEDFWM_THREADS"
STEADY_STATE_TOL = 1e-10
PHYSICALITY_TOL = -1e-8


class NumericalFailure(RuntimeError):
    def __init__(self, point: dict, reason: str):
        self.point = point
        shown = ", ".join(f"{k}={v:.6g}" for k, v in point.items()) or "<no sweep>"
        super().__init__(f"numerical failure at grid point ({shown}): {reason}")


def code_version() -> str:
    try:
        from importlib.metadata import version

        return version("dressedfwm")
    except Exception:
        return "unknown"


def observable_columns(cfg: RunConfig) -> list[str]:
    cols = []
    if "gain" in cfg.observables:
        cols += ["gain_probe", "gain_conjugate"]
    if "intensity_noise" in cfg.observables:
        cols += ["noise_diff", "noise_sum", "noise_diff_dB", "noise_sum_dB"]
    if "duan" in cfg.observables:
        cols += ["duan"]
    if "sideband_pairs" in cfg.observables:
        cols += [f"{p}_{q}" for p in ("P1", "P2") for q in ("diff", "sum", "duan")]
    return cols


@dataclass(frozen=True)
class SweepResult:
    axes: tuple[SweepAxis, ...]
    columns: tuple[str, ...]
    rows: np.ndarray  # one row per grid point: axis columns then observables
    provenance: dict

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema: {self.provenance['schema']}\n")
        for key in ("config", "config_hash", "code_version", "timestamp"):
            buf.write(f"# {key}: {self.provenance[key]}\n")
        for ax in self.axes:
            buf.write(f"# axis: {ax.column} {ax.parameter} count={ax.count}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(x) for x in row])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "provenance": self.provenance,
            "axes": [
                {"column": a.column, "parameter": a.parameter, "count": a.count,
                 "start": to_display(a.start, a.dimension), "stop": to_display(a.stop, a.dimension)}
                for a in self.axes
            ],
            "columns": list(self.columns),
            "rows": [[float(_fmt(x)) for x in row] for row in self.rows],
        }
        return json.dumps(doc, indent=1) + "\n"


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the stamp for byte-identical reruns
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def _check_medium(medium, point):
    for _, sys_ in medium:
        M = np.asarray(sys_.M)
        x = np.asarray(sys_.x_s)
        res = np.linalg.norm(M @ x) / (np.linalg.norm(M, 2) * np.linalg.norm(x))
        if not res < STEADY_STATE_TOL:
            raise NumericalFailure(point, f"steady-state residual {res:.3g}")


def evaluate_point(cfg: RunConfig, point: dict, frequencies: np.ndarray) -> np.ndarray:
    """Observables at one parameter point for every analysis frequency.

    Returns an array of shape ``(len(frequencies), n_observables)``.
    """
    try:
        drives = cfg.drive_parameters(**point)
        scheme = cfg.scheme()
        diffusion = cfg.diffusion if cfg.needs_noise else None
        medium = build_medium(scheme, drives, cfg.doppler.grid(), diffusion=diffusion)
        _check_medium(medium, point)
        J = matrix_exponential(medium_generator(medium), drives.length)
        carrier = propagate_carrier(J, cfg.probe_amplitude)
    except NumericalFailure:
        raise
    except (ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
        raise NumericalFailure(point, str(exc)) from exc

    out = []
    for omega in frequencies:
        row = []
        if "gain" in cfg.observables:
            row += [carrier.gain_a, carrier.gain_b]
        if cfg.needs_noise:
            here = dict(point, frequency=float(omega))
            try:
                cov = output_covariance(medium, float(omega), carrier)
            except (ArithmeticError, np.linalg.LinAlgError) as exc:
                raise NumericalFailure(here, str(exc)) from exc
            Vp = apply_detection_efficiency(cov.V_out, cfg.eta)
            Vm = apply_detection_efficiency(cov.V_minus, cfg.eta)
            worst = min(min_physicality_eigenvalue(Vp), min_physicality_eigenvalue(Vm))
            # identity diffusion is a comparison mode and is not guaranteed physical
            if cfg.diffusion == "einstein" and worst < PHYSICALITY_TOL:
                raise NumericalFailure(here, f"unphysical covariance (min eigenvalue {worst:.3g})")
            if "intensity_noise" in cfg.observables:
                plus, minus = intensity_spectra(Vp, abs(carrier.alpha), abs(carrier.beta))
                row += [minus, plus, to_db(minus), to_db(plus)]
            if "duan" in cfg.observables:
                row += [duan_criterion(Vp)]
            if "sideband_pairs" in cfg.observables:
                doubled = np.zeros((8, 8), dtype=complex)
                doubled[:4, :4], doubled[4:, 4:] = Vp, Vm
                four = sideband_decomposition(doubled)
                for p in pair_correlations(four, swap=cfg.pair_swap):
                    row += [p.diff_variance, p.sum_variance, p.duan_value]
        out.append(row)
    return np.asarray(out, dtype=float)


def _task(args):
    cfg, point, freqs = args
    return evaluate_point(cfg, point, freqs)


def resolve_threads(requested: int | None = None) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError([Diagnostic(None, f"${THREADS_ENV} must be an integer, got {env!r}")])
    return os.cpu_count() or 1


def run(cfg: RunConfig, threads: int | None = None) -> SweepResult:
    """Evaluate every grid point of ``cfg``; the first axis varies slowest."""
    axes = cfg.axes
    freq_axis = next((a for a in axes if a.parameter == "frequency"), None)
    param_axes = [a for a in axes if a.parameter != "frequency"]
    freqs = freq_axis.values if freq_axis is not None else np.array([cfg.analysis_frequency])
    if cfg.needs_noise and np.any(freqs == 0.0):
        raise ConfigError([Diagnostic(None, "analysis frequency must be nonzero")])

    points = [dict(zip((a.parameter for a in param_axes), combo))
              for combo in itertools.product(*(a.values for a in param_axes))]
    jobs = [(cfg, {k: float(v) for k, v in p.items()}, freqs) for p in points]
    n = resolve_threads(threads)
    if n > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            blocks = list(pool.map(_task, jobs))  # map preserves job order
    else:
        blocks = [_task(j) for j in jobs]
    for p, b in zip(points, blocks):
        if not np.all(np.isfinite(b)):
            raise NumericalFailure(p, "non-finite observable")

    # assemble rows in axis order (frequency may be either axis)
    by_point = {tuple(p.values()): b for p, b in zip(points, blocks)}
    rows = []
    for combo in itertools.product(*(a.values for a in axes)):
        key = tuple(float(v) for v, a in zip(combo, axes) if a.parameter != "frequency")
        fi = 0
        if freq_axis is not None:
            fi = int(np.flatnonzero(freqs == combo[axes.index(freq_axis)])[0])
        axis_vals = [to_display(v, a.dimension) for v, a in zip(combo, axes)]
        rows.append(axis_vals + list(by_point[key][fi]))
    columns = tuple(a.column for a in axes) + tuple(observable_columns(cfg))
    provenance = {
        "schema": SCHEMA_VERSION,
        "config": Path(cfg.source_name).name,
        "config_hash": cfg.config_hash,
        "code_version": code_version(),
        "timestamp": _timestamp(),
        "doppler": cfg.doppler.enabled,
        "diffusion": cfg.diffusion,
    }
    return SweepResult(axes, columns, np.asarray(rows, dtype=float).reshape(len(rows), len(columns)), provenance)


def write_result(result: SweepResult, path: str | Path, fmt: str = "csv") -> Path:
    path = Path(path)
    text = result.to_csv() if fmt == "csv" else result.to_json()
    path.write_text(text, encoding="utf-8")
    return path


def validate(text: str, source_name: str = "<memory>") -> list[Diagnostic]:
    return parse_config(text, source_name)[1]


def _load(name: str) -> tuple[RunConfig | None, list[Diagnostic], Path | None]:
    try:
        path = resolve_config_path(name)
    except FileNotFoundError:
        return None, [Diagnostic(None, f"no such config file or bundled config: {name}")], None
    cfg, diags = parse_config(path.read_text(encoding="utf-8"), str(path))
    return cfg, diags, path


def _report(path, diags) -> None:
    for d in diags:
        print(f"{path}:{d.line or 0}: {d.message}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="dressedfwm", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", help="run a config and write its table")
    sim.add_argument("config", help="config file or bundled name (e.g. fig2a)")
    sim.add_argument("--out", help="output path (default: [output] path, else <config>.<format>)")
    sim.add_argument("--format", choices=("csv", "json"))
    sim.add_argument("--threads", type=int, help=f"worker processes (default ${THREADS_ENV}, else all logical cores)")
    sim.add_argument("--no-doppler", action="store_true", help="single stationary velocity class")
    val = sub.add_parser("validate", help="check a config and list every problem")
    val.add_argument("config")
    sub.add_parser("schemes", help="list built-in level schemes")
    args = ap.parse_args(argv)

    if args.command == "schemes":
        for name, d, desc in list_schemes():
            print(f"{name}\td={d}\t{desc}")
        return 0

    cfg, diags, path = _load(args.config)
    if diags:
        _report(path or args.config, diags)
        return 2
    if args.command == "validate":
        print(f"{path}: ok")
        return 0

    if args.no_doppler:
        cfg = dataclasses.replace(cfg, doppler=dataclasses.replace(cfg.doppler, enabled=False))
    fmt = args.format or cfg.output_format
    out = args.out or cfg.output_path or f"{path.stem}.{fmt}"
    try:
        result = run(cfg, args.threads)
    except ConfigError as exc:
        _report(path, exc.diagnostics)
        return 2
    except NumericalFailure as exc:
        print(f"{path}: {exc}", file=sys.stderr)
        return 3
    write_result(result, out, fmt)
    print(f"wrote {len(result.rows)} rows to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
