"""Run configuration files.

A run config is an INI file (``configparser`` syntax, ``;`` or ``#`` comments)
with the sections below. Quantities with a dimension need an explicit unit:
frequencies and rates take ``Hz``, ``kHz``, ``MHz``, ``GHz`` (cyclic, converted
to rad/s) or ``rad/s``; lengths ``m``, ``cm``, ``mm``, ``um``; areas ``m2``,
``cm2``, ``mm2``; temperatures ``K``.

.. code-block:: ini

    [run]
    scheme = rb-double-lambda        ; see `dressedfwm schemes`
    observables = gain, intensity_noise, duan, sideband_pairs
    diffusion = einstein             ; or identity
    eta = 1.0                        ; detection efficiency
    analysis_frequency = 1 MHz       ; used when no `frequency` axis is swept
    probe_amplitude = 1e5            ; input |alpha|, photon-amplitude units
    pair_swap = false

    [scheme]                         ; overrides of the built-in scheme
    gamma = 5.7 MHz
    ground_decay = 1 MHz
    ground_exchange = 1 MHz
    dressing_decay = 1 MHz
    hyperfine = 3.035 GHz
    branching = 0.5

    [drives]
    pump_rabi = 480 MHz
    dressing_ratio = 0.2             ; or dressing_rabi = 96 MHz
    one_photon_detuning = 875 MHz
    two_photon_detuning = -87 MHz
    dressing_detuning = -1040 MHz
    g_a = 1e5 rad/s
    g_b = 1e5 rad/s
    atom_number = 1.164e11           ; or density = 9.3e18 (m^-3)
    length = 12.5 mm
    area = 1 mm2

    [doppler]
    enabled = true
    temperature = 400 K
    points = 121
    truncation = 4

    [sweep.1]                        ; at most two axes
    parameter = two_photon_detuning  ; any drive field, dressing_ratio or frequency
    start = -150 MHz
    stop = -30 MHz
    count = 121

    [output]
    path = fig2a.csv
    format = csv                     ; or json
"""
from __future__ import annotations

import configparser
import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .doppler import DEFAULT_TEMPERATURE, RB85_MASS, VelocityGrid, build_velocity_grid
from .model import (
    TWO_PI,
    ConfigurationError,
    DriveParameters,
    LevelScheme,
    rb_double_lambda,
)

OBSERVABLES = ("gain", "intensity_noise", "duan", "sideband_pairs")
NOISE_OBSERVABLES = ("intensity_noise", "duan", "sideband_pairs")

_UNITS = {
    "frequency": {"Hz": TWO_PI, "kHz": TWO_PI * 1e3, "MHz": TWO_PI * 1e6, "GHz": TWO_PI * 1e9, "rad/s": 1.0},
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6},
    "area": {"m2": 1.0, "cm2": 1e-4, "mm2": 1e-6},
    "temperature": {"K": 1.0},
    "none": {"": 1.0},
}

DRIVE_FIELDS = {
    "pump_rabi": "frequency",
    "dressing_rabi": "frequency",
    "dressing_ratio": "none",
    "one_photon_detuning": "frequency",
    "two_photon_detuning": "frequency",
    "dressing_detuning": "frequency",
    "g_a": "frequency",
    "g_b": "frequency",
    "atom_number": "none",
    "density": "none",
    "length": "length",
    "area": "area",
}
SCHEME_FIELDS = {
    "gamma": "frequency",
    "ground_decay": "frequency",
    "ground_exchange": "frequency",
    "dressing_decay": "frequency",
    "hyperfine": "frequency",
    "branching": "none",
}
SWEEPABLE = tuple(k for k in DRIVE_FIELDS if k not in ("density",)) + ("frequency",)

# the figure configs and acceptance suite share these defaults
DEFAULT_DRIVES = {
    "pump_rabi": TWO_PI * 480e6,
    "one_photon_detuning": TWO_PI * 875e6,
    "g_a": 1.0e5,
    "g_b": 1.0e5,
    "length": 12.5e-3,
    "area": 1.0e-6,
    "atom_number": 1.16387e11,
}

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_QUANTITY = re.compile(rf"^\s*({_NUMBER})\s*([A-Za-z/0-9]*)\s*$")


@dataclass(frozen=True)
class Diagnostic:
    line: int | None
    message: str

    def __str__(self) -> str:
        where = f"line {self.line}" if self.line else "config"
        return f"{where}: {self.message}"


class ConfigError(ConfigurationError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


def parse_quantity(text: str, dimension: str) -> float:
    m = _QUANTITY.match(text)
    if not m:
        raise ValueError(f"cannot parse quantity {text!r}")
    value, unit = float(m.group(1)), m.group(2)
    table = _UNITS[dimension]
    if unit not in table:
        if unit == "" and dimension != "none":
            raise ValueError(f"{text!r} needs a unit ({', '.join(u for u in table if u)})")
        raise ValueError(f"unit {unit!r} is not a {dimension} unit")
    return value * table[unit]


def to_display(value: float, dimension: str) -> float:
    """SI/rad-s value back to the unit used in output columns (MHz, mm, ...)."""
    if dimension == "frequency":
        return value / (TWO_PI * 1e6)
    return value


SCHEMES = {
    "rb-double-lambda": dict(dressed=True),
    "rb-double-lambda-4": dict(dressed=False),
}


def list_schemes() -> list[tuple[str, int, str]]:
    """(name, level count, description) of the built-in schemes."""
    out = []
    for name, opts in SCHEMES.items():
        sch = rb_double_lambda(**opts)
        desc = "Rb D1 double-Lambda" + (" with 3->5 dressing ladder" if opts["dressed"] else "")
        out.append((name, sch.level_count, desc))
    return out


def build_scheme(name: str, **overrides) -> LevelScheme:
    if name not in SCHEMES:
        raise ConfigurationError(f"unknown scheme {name!r}; known: {', '.join(SCHEMES)}")
    kwargs = dict(SCHEMES[name])
    mapping = {
        "gamma": "gamma",
        "ground_decay": "ground_decay",
        "ground_exchange": "ground_exchange",
        "dressing_decay": "dressing_decay",
        "hyperfine": "hyperfine",
        "branching": "branching",
    }
    for key, val in overrides.items():
        kwargs[mapping[key]] = val
    return rb_double_lambda(**kwargs)


@dataclass(frozen=True)
class SweepAxis:
    parameter: str
    start: float
    stop: float
    count: int

    @property
    def dimension(self) -> str:
        return "frequency" if self.parameter == "frequency" else DRIVE_FIELDS[self.parameter]

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    @property
    def column(self) -> str:
        names = {
            "two_photon_detuning": "delta_MHz",
            "frequency": "frequency_MHz",
            "dressing_ratio": "dressing_ratio",
        }
        if self.parameter in names:
            return names[self.parameter]
        return f"{self.parameter}_MHz" if self.dimension == "frequency" else self.parameter


@dataclass(frozen=True)
class DopplerSettings:
    enabled: bool = True
    temperature: float = DEFAULT_TEMPERATURE
    points: int = 121
    truncation: float = 4.0
    mass: float = RB85_MASS

    def grid(self) -> VelocityGrid | None:
        if not self.enabled:
            return None
        return build_velocity_grid(self.temperature, self.mass, self.points, self.truncation)


@dataclass(frozen=True)
class RunConfig:
    scheme_name: str = "rb-double-lambda"
    scheme_overrides: dict = field(default_factory=dict)
    drives: dict = field(default_factory=dict)
    axes: tuple[SweepAxis, ...] = ()
    observables: tuple[str, ...] = ("gain",)
    doppler: DopplerSettings = DopplerSettings()
    diffusion: str = "einstein"
    eta: float = 1.0
    analysis_frequency: float = TWO_PI * 1e6
    probe_amplitude: float = 1.0e5
    pair_swap: bool = False
    output_path: str | None = None
    output_format: str = "csv"
    source_text: str = ""
    source_name: str = "<memory>"

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.source_text.encode("utf-8")).hexdigest()[:16]

    def scheme(self) -> LevelScheme:
        return build_scheme(self.scheme_name, **self.scheme_overrides)

    def drive_parameters(self, **point) -> DriveParameters:
        """Drive parameters at one grid point (``point`` overrides swept fields)."""
        values = dict(DEFAULT_DRIVES)
        values.update(self.drives)
        values.update({k: v for k, v in point.items() if k != "frequency"})
        ratio = values.pop("dressing_ratio", None)
        if ratio is not None:
            values["dressing_rabi"] = ratio * values["pump_rabi"]
        density = values.pop("density", None)
        if density is not None and "atom_number" not in self.drives:
            values["atom_number"] = density * values["area"] * values["length"]
        return DriveParameters(**values)

    @property
    def needs_noise(self) -> bool:
        return any(o in NOISE_OBSERVABLES for o in self.observables)


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    """Line number of every ``key = value`` per section (for diagnostics)."""
    lines: dict[tuple[str, str], int] = {}
    section = None
    for n, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s[0] in "#;":
            continue
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            lines[(section, "")] = n
            continue
        if "=" in s and section is not None:
            key = s.split("=", 1)[0].strip().lower()
            lines[(section, key)] = n
    return lines


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config(text: str, source_name: str = "<memory>") -> tuple[RunConfig | None, list[Diagnostic]]:
    """Parse and validate; returns ``(config or None, diagnostics)``.

    Every problem found is reported, not just the first one.
    """
    diags: list[Diagnostic] = []
    lines = _key_lines(text)

    def err(section, key, msg):
        diags.append(Diagnostic(lines.get((section, key)) or lines.get((section, "")), f"[{section}] {msg}"))

    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        parser.read_string(text, source=source_name)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        return None, [Diagnostic(line, f"syntax error: {exc.message if hasattr(exc, 'message') else exc}")]

    if not parser.sections():
        return None, [Diagnostic(None, "config is empty: at least a [drives] section is required")]

    known = {"run", "scheme", "drives", "doppler", "output"}
    for sec in parser.sections():
        if sec not in known and not sec.startswith("sweep"):
            err(sec, "", f"unknown section {sec!r}")

    kw: dict = {"source_text": text, "source_name": source_name}

    run = parser["run"] if parser.has_section("run") else {}
    run_keys = {"scheme", "observables", "diffusion", "eta", "analysis_frequency", "probe_amplitude", "pair_swap"}
    for key in run:
        if key not in run_keys:
            err("run", key, f"unknown key {key!r}")
    scheme_name = run.get("scheme", "rb-double-lambda").strip()
    if scheme_name not in SCHEMES:
        err("run", "scheme", f"unknown scheme {scheme_name!r}")
    kw["scheme_name"] = scheme_name
    if "observables" in run:
        obs = tuple(o.strip() for o in run["observables"].split(",") if o.strip())
        bad = [o for o in obs if o not in OBSERVABLES]
        if bad or not obs:
            err("run", "observables", f"observables must be drawn from {OBSERVABLES}, got {obs}")
        kw["observables"] = obs
    if "diffusion" in run:
        if run["diffusion"].strip() not in ("einstein", "identity"):
            err("run", "diffusion", "diffusion must be 'einstein' or 'identity'")
        kw["diffusion"] = run["diffusion"].strip()
    for key, dim, target in (
        ("eta", "none", "eta"),
        ("analysis_frequency", "frequency", "analysis_frequency"),
        ("probe_amplitude", "none", "probe_amplitude"),
    ):
        if key in run:
            try:
                kw[target] = parse_quantity(run[key], dim)
            except ValueError as exc:
                err("run", key, str(exc))
    if "eta" in kw and not 0.0 <= kw["eta"] <= 1.0:
        err("run", "eta", "eta must lie in [0, 1]")
    if "pair_swap" in run:
        try:
            kw["pair_swap"] = _bool(run["pair_swap"])
        except ValueError as exc:
            err("run", "pair_swap", str(exc))

    overrides = {}
    if parser.has_section("scheme"):
        for key, val in parser["scheme"].items():
            if key not in SCHEME_FIELDS:
                err("scheme", key, f"unknown scheme field {key!r}")
                continue
            try:
                overrides[key] = parse_quantity(val, SCHEME_FIELDS[key])
            except ValueError as exc:
                err("scheme", key, str(exc))
    kw["scheme_overrides"] = overrides

    drives = {}
    if not parser.has_section("drives"):
        diags.append(Diagnostic(None, "missing [drives] section"))
    else:
        for key, val in parser["drives"].items():
            if key not in DRIVE_FIELDS:
                err("drives", key, f"unknown drive field {key!r}")
                continue
            try:
                drives[key] = parse_quantity(val, DRIVE_FIELDS[key])
            except ValueError as exc:
                err("drives", key, str(exc))
        if "pump_rabi" not in drives:
            err("drives", "", "pump_rabi is required")
        if "atom_number" not in drives and "density" not in drives:
            err("drives", "", "one of atom_number or density is required")
    kw["drives"] = drives

    axes = []
    for sec in sorted(s for s in parser.sections() if s.startswith("sweep")):
        body = parser[sec]
        param = body.get("parameter", "").strip()
        if param not in SWEEPABLE:
            err(sec, "parameter", f"cannot sweep {param!r}; choose from {SWEEPABLE}")
            continue
        dim = "frequency" if param == "frequency" else DRIVE_FIELDS[param]
        try:
            start = parse_quantity(body.get("start", ""), dim)
            stop = parse_quantity(body.get("stop", ""), dim)
        except ValueError as exc:
            err(sec, "start", str(exc))
            continue
        try:
            count = int(body.get("count", ""))
        except ValueError:
            err(sec, "count", "count must be an integer")
            continue
        if count < 1:
            err(sec, "count", "count must be >= 1")
            continue
        axes.append(SweepAxis(param, start, stop, count))
    if len(axes) > 2:
        diags.append(Diagnostic(None, f"at most 2 sweep axes are allowed, found {len(axes)}"))
    if len({a.parameter for a in axes}) != len(axes):
        diags.append(Diagnostic(None, "the same parameter is swept twice"))
    kw["axes"] = tuple(axes)

    if parser.has_section("doppler"):
        body = parser["doppler"]
        dkw = {}
        for key, val in body.items():
            try:
                if key == "enabled":
                    dkw["enabled"] = _bool(val)
                elif key == "temperature":
                    dkw["temperature"] = parse_quantity(val, "temperature")
                elif key == "points":
                    dkw["points"] = int(val)
                elif key == "truncation":
                    dkw["truncation"] = float(val)
                else:
                    err("doppler", key, f"unknown key {key!r}")
            except ValueError as exc:
                err("doppler", key, str(exc))
        pts = dkw.get("points", 121)
        if pts != 1 and (pts < 3 or pts % 2 == 0):
            err("doppler", "points", "points must be 1 or an odd integer >= 3")
        kw["doppler"] = DopplerSettings(**dkw)

    if parser.has_section("output"):
        body = parser["output"]
        for key in body:
            if key not in ("path", "format"):
                err("output", key, f"unknown key {key!r}")
        if "path" in body:
            kw["output_path"] = body["path"].strip()
        fmt = body.get("format", "csv").strip()
        if fmt not in ("csv", "json"):
            err("output", "format", "format must be csv or json")
        kw["output_format"] = fmt

    if diags:
        return None, diags
    cfg = RunConfig(**kw)
    # semantic checks that need the assembled objects
    try:
        scheme = cfg.scheme()
    except ConfigurationError as exc:
        return None, [Diagnostic(lines.get(("scheme", "")), f"[scheme] {exc}")]
    axis_names = {a.parameter for a in cfg.axes}
    if "frequency" in axis_names and not cfg.needs_noise:
        diags.append(Diagnostic(None, "a frequency axis needs a noise observable"))
    try:
        probe = {a.parameter: a.values[0] for a in cfg.axes}
        drv = cfg.drive_parameters(**probe)
        if drv.dressing_rabi != 0 and scheme.level_count < 5:
            diags.append(
                Diagnostic(lines.get(("drives", "dressing_rabi")) or lines.get(("drives", "dressing_ratio")),
                           f"[drives] dressing requested but scheme {scheme.name!r} has d = {scheme.level_count}")
            )
    except (ConfigurationError, TypeError) as exc:
        diags.append(Diagnostic(lines.get(("drives", "")), f"[drives] {exc}"))
    if diags:
        return None, diags
    return cfg, []


def bundled_config_names() -> list[str]:
    return sorted(p.name for p in resources.files("dressedfwm.configs").iterdir() if p.name.endswith(".cfg"))


def resolve_config_path(name: str) -> Path:
    """A file path, or the name of a bundled config (``fig2a`` or ``fig2a.cfg``)."""
    p = Path(name)
    if p.exists():
        return p
    stem = name if name.endswith(".cfg") else name + ".cfg"
    bundled = resources.files("dressedfwm.configs") / stem
    if bundled.is_file():
        return Path(str(bundled))
    raise FileNotFoundError(name)


def load_config(name: str) -> RunConfig:
    path = resolve_config_path(name)
    cfg, diags = parse_config(path.read_text(encoding="utf-8"), str(path))
    if diags:
        raise ConfigError(diags)
    return cfg
