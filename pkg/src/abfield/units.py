"""Physical constants, experiment parameter records and configuration loading.

Everything in the analytic layer is Gaussian CGS.  The propagator works in
natural units with hbar = 1; :class:`ScalingMap` moves records between the two.
Charge in Gaussian units has mechanical dimensions g^1/2 cm^3/2 s^-1, so every
field below carries a (mass, length, time) exponent triple.
"""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Union


class ConfigError(ValueError):
    """Raised for malformed or invalid configuration documents."""


# (mass, length, time) exponents
_CHARGE = (0.5, 1.5, -1.0)
_ACTION = (1.0, 2.0, -1.0)
_SPEED = (0.0, 1.0, -1.0)
_MASS = (1.0, 0.0, 0.0)
_LENGTH = (0.0, 1.0, 0.0)
_TIME = (0.0, 0.0, 1.0)
_ENERGY = (1.0, 2.0, -2.0)


@dataclass(frozen=True)
class Constants:
    e_charge: float
    hbar: float
    h_planck: float
    c_light: float
    electron_mass: float

    _dims = {
        "e_charge": _CHARGE,
        "hbar": _ACTION,
        "h_planck": _ACTION,
        "c_light": _SPEED,
        "electron_mass": _MASS,
    }

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if not getattr(self, f.name) > 0:
                raise ConfigError(f"constants.{f.name} must be > 0")
        if abs(self.h_planck - 2 * math.pi * self.hbar) > 1e-15 * self.h_planck:
            raise ConfigError("constants: h_planck must equal 2*pi*hbar")

    @classmethod
    def cgs(cls) -> "Constants":
        """CODATA 2018 values in Gaussian CGS."""
        hbar = 1.054571817e-27
        return cls(
            e_charge=4.803204712570263e-10,
            hbar=hbar,
            h_planck=2 * math.pi * hbar,
            c_light=2.99792458e10,
            electron_mass=9.1093837015e-28,
        )

    @classmethod
    def natural(cls, e_charge=1.0, c_light=1.0, electron_mass=1.0) -> "Constants":
        """hbar = 1 with the remaining constants set to one unless given."""
        return cls(e_charge, 1.0, 2 * math.pi, c_light, electron_mass)


@dataclass(frozen=True)
class ElectricSetup:
    """Two source charges bouncing off mirrors at distance r from mirror A.

    Q is signed; the other fields must be positive and T < tau.
    """

    Q: float
    M: float
    v: float
    r: float
    T: float
    tau: float

    _dims = {"Q": _CHARGE, "M": _MASS, "v": _SPEED, "r": _LENGTH,
             "T": _TIME, "tau": _TIME}

    def __post_init__(self):
        for name in ("M", "v", "r", "T", "tau"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"setup.{name} must be > 0")
        if not math.isfinite(self.Q):
            raise ConfigError("setup.Q must be finite")
        if not self.T < self.tau:
            raise ConfigError("setup.T: invariant T < tau violated")


@dataclass(frozen=True)
class MagneticSetup:
    """Counter-rotating charged cylinders forming a solenoid, electron on an orbit of radius R."""

    Q: float
    M: float
    v: float
    r: float
    R: float
    L: float
    u: float

    _dims = {"Q": _CHARGE, "M": _MASS, "v": _SPEED, "r": _LENGTH,
             "R": _LENGTH, "L": _LENGTH, "u": _SPEED}

    def __post_init__(self):
        for name in ("M", "r", "R", "L", "u"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"setup.{name} must be > 0")
        # zero charge or zero rotation is the no-flux control case
        for name in ("Q", "v"):
            if not getattr(self, name) >= 0:
                raise ConfigError(f"setup.{name} must be >= 0")
        if not self.r < self.R < self.L:
            raise ConfigError("setup.R: invariant r < R < L violated")
        if self.R / self.r < 10 or self.L / self.R < 10:
            warnings.warn(
                f"aspect ratio: R/r = {self.R / self.r:.3g}, L/R = {self.L / self.R:.3g}; "
                "the thin-solenoid approximations want both >= 10",
                stacklevel=3,
            )


@dataclass(frozen=True)
class NullSetup:
    """Electron at mirror A with two charges Q at distance r on the perpendicular axis."""

    Q: float
    r: float

    _dims = {"Q": _CHARGE, "r": _LENGTH}

    def __post_init__(self):
        if not self.r > 0:
            raise ConfigError("setup.r must be > 0")


Setup = Union[ElectricSetup, MagneticSetup, NullSetup]


@dataclass(frozen=True)
class ScalingMap:
    """Physical units (cm, s, g) per simulation unit."""

    length_unit: float = 1.0
    time_unit: float = 1.0
    mass_unit: float = 1.0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"scaling map: {f.name} must be positive and finite")

    @property
    def energy_unit(self) -> float:
        return self.mass_unit * self.length_unit**2 / self.time_unit**2

    @classmethod
    def hbar_one(cls, length_unit: float, mass_unit: float, hbar: float) -> "ScalingMap":
        """Map in which the given hbar becomes exactly one."""
        return cls(length_unit, mass_unit * length_unit**2 / hbar, mass_unit)

    def unit_of(self, dims) -> float:
        a, b, c = dims
        return self.mass_unit**a * self.length_unit**b * self.time_unit**c

    def inverse(self) -> "ScalingMap":
        return ScalingMap(1 / self.length_unit, 1 / self.time_unit, 1 / self.mass_unit)


def _rescale(record, smap: ScalingMap, power: float):
    changes = {
        name: getattr(record, name) * smap.unit_of(dims) ** power
        for name, dims in record._dims.items()
    }
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return dataclasses.replace(record, **changes)


def to_natural_units(record, smap: ScalingMap):
    """Express a setup (or :class:`Constants`) in simulation units."""
    return _rescale(record, smap, -1.0)


def to_physical_units(record, smap: ScalingMap):
    """Inverse of :func:`to_natural_units`."""
    return _rescale(record, smap, 1.0)


# -- configuration documents -------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    points: int = 4096
    extent: float = 200.0


@dataclass(frozen=True)
class Schedule:
    """Times (simulation units) before the dwell, after it, and the sampling cadence."""

    approach: float = 50.0
    return_: float = 50.0
    sample_every: int = 10


@dataclass(frozen=True)
class Tolerances:
    phase: float = 0.02
    shift: float = 0.05


@dataclass(frozen=True)
class SimulationConfig:
    experiment: str
    setup: Setup
    units: Any = "natural"
    grid: GridSpec = field(default_factory=GridSpec)
    dt: float = 0.05
    sigma0: float = 1.0
    schedule: Schedule = field(default_factory=Schedule)
    mirror: Any = None  # MirrorSpec, resolved lazily to avoid an import cycle
    tolerances: Tolerances = field(default_factory=Tolerances)

    @property
    def constants(self) -> Constants:
        return Constants.natural() if self.units == "natural" else Constants.cgs()

    @property
    def scaling(self) -> ScalingMap:
        """Map from the setup's units to hbar = 1 simulation units."""
        if self.units == "natural":
            return ScalingMap()
        return ScalingMap.hbar_one(self.units["length_unit"], self.units["mass_unit"],
                                   Constants.cgs().hbar)

    def t_dwell(self) -> float:
        """Duration of the branch-dependent interaction phase, in simulation units."""
        s = to_natural_units(self.setup, self.scaling)
        if isinstance(s, ElectricSetup):
            return s.T
        if isinstance(s, MagneticSetup):
            return math.pi * s.R / s.u
        return 0.0

    def t_final(self) -> float:
        return self.schedule.approach + self.t_dwell() + self.schedule.return_


_SETUPS = {"electric": ElectricSetup, "magnetic": MagneticSetup, "null_check": NullSetup}
_TOP_KEYS = {"experiment", "units", "setup", "grid", "dt", "sigma0", "schedule",
             "mirror", "tolerances"}


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}")


def _number(where, value, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number")
    if kind is int and int(value) != value:
        raise ConfigError(f"{where}: expected an integer")
    return kind(value)


def _parse_units(units):
    if units == "natural":
        return units
    if isinstance(units, dict):
        _check_keys(units, {"system", "length_unit", "mass_unit"}, "units")
        if units.get("system") != "cgs":
            raise ConfigError("units.system: only 'cgs' is supported")
        try:
            out = {k: _number(f"units.{k}", units[k]) for k in ("length_unit", "mass_unit")}
        except KeyError as exc:
            raise ConfigError(f"units.{exc.args[0]}: required") from None
        ScalingMap(out["length_unit"], 1.0, out["mass_unit"])
        return {"system": "cgs", **out}
    raise ConfigError("units: expected 'natural' or a cgs scaling object")


def config_from_dict(doc: dict) -> SimulationConfig:
    """Validate a parsed document and fill defaults."""
    from .mirror import MirrorSpec

    _check_keys(doc, _TOP_KEYS, "config")
    kind = doc.get("experiment")
    if kind not in _SETUPS:
        raise ConfigError("experiment: expected 'electric', 'magnetic' or 'null_check'")
    units = _parse_units(doc.get("units", "natural"))

    cls = _SETUPS[kind]
    names = [f.name for f in dataclasses.fields(cls)]
    raw = doc.get("setup")
    _check_keys(raw, names, "setup")
    missing = [n for n in names if n not in raw]
    if missing:
        raise ConfigError(f"setup.{missing[0]}: required")
    setup = cls(**{n: _number(f"setup.{n}", raw[n]) for n in names})

    grid_doc = doc.get("grid", {})
    _check_keys(grid_doc, {"points", "extent"}, "grid")
    grid = GridSpec(
        points=_number("grid.points", grid_doc.get("points", 4096), int),
        extent=_number("grid.extent", grid_doc.get("extent", 200.0)),
    )
    if grid.points < 2 or grid.points & (grid.points - 1):
        raise ConfigError("grid.points must be a power of two")
    if not grid.extent > 0:
        raise ConfigError("grid.extent must be > 0")

    dt = _number("dt", doc.get("dt", 0.05))
    sigma0 = _number("sigma0", doc.get("sigma0", 1.0))
    if not dt > 0:
        raise ConfigError("dt must be > 0")
    if not sigma0 > 0:
        raise ConfigError("sigma0 must be > 0")

    sched_doc = doc.get("schedule", {})
    _check_keys(sched_doc, {"approach", "return", "sample_every"}, "schedule")
    schedule = Schedule(
        approach=_number("schedule.approach", sched_doc.get("approach", 50.0)),
        return_=_number("schedule.return", sched_doc.get("return", 50.0)),
        sample_every=_number("schedule.sample_every", sched_doc.get("sample_every", 10), int),
    )
    if schedule.approach < 0 or schedule.return_ < 0 or schedule.sample_every < 1:
        raise ConfigError("schedule: approach/return must be >= 0, sample_every >= 1")

    mirror_doc = doc.get("mirror", {})
    _check_keys(mirror_doc, {"V", "d", "w", "wall_scale"}, "mirror")
    mirror = None
    if kind == "electric":
        s_nat = to_natural_units(setup, ScalingMap() if units == "natural" else
                                 ScalingMap.hbar_one(units["length_unit"], units["mass_unit"],
                                                     Constants.cgs().hbar))
        d = s_nat.v * s_nat.T / 2
        if "d" in mirror_doc and abs(_number("mirror.d", mirror_doc["d"]) - d) > 1e-9 * d:
            raise ConfigError("mirror.d must equal v*T/2 (plateau round trip at speed v takes T)")
        mirror = MirrorSpec(
            V=_number("mirror.V", mirror_doc.get("V", 1.0)),
            d=d,
            w=_number("mirror.w", mirror_doc.get("w", d / 8)),
            wall_scale=_number("mirror.wall_scale", mirror_doc.get("wall_scale", d / 10)),
        )
    elif mirror_doc:
        mirror = MirrorSpec(**{k: _number(f"mirror.{k}", v) for k, v in mirror_doc.items()})

    tol_doc = doc.get("tolerances", {})
    _check_keys(tol_doc, {"phase", "shift"}, "tolerances")
    tolerances = Tolerances(**{k: _number(f"tolerances.{k}", v) for k, v in tol_doc.items()})

    cfg = SimulationConfig(kind, setup, units, grid, dt, sigma0, schedule, mirror, tolerances)
    if kind != "null_check":
        _check_coverage(cfg)
    return cfg


def _check_coverage(cfg: SimulationConfig):
    s = to_natural_units(cfg.setup, cfg.scaling)
    t = cfg.t_final()
    spread = cfg.sigma0 * math.sqrt(1 + (t / (2 * s.M * cfg.sigma0**2)) ** 2)
    needed = s.v * t + 2 * 6 * max(spread, cfg.sigma0)
    if needed > cfg.grid.extent:
        raise ConfigError(
            f"grid.extent: {cfg.grid.extent:g} does not cover the trajectory plus "
            f"6*sigma margins (needs {needed:.6g})"
        )
    if cfg.sigma0 < 4 * cfg.grid.extent / cfg.grid.points:
        raise ConfigError("sigma0: must be at least 4 grid spacings")


def load_config(text: str) -> SimulationConfig:
    """Parse a JSON configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from None
    return config_from_dict(doc)


def config_to_dict(cfg: SimulationConfig) -> dict:
    doc = {
        "experiment": cfg.experiment,
        "units": cfg.units,
        "setup": {f.name: getattr(cfg.setup, f.name) for f in dataclasses.fields(cfg.setup)},
        "grid": {"points": cfg.grid.points, "extent": cfg.grid.extent},
        "dt": cfg.dt,
        "sigma0": cfg.sigma0,
        "schedule": {"approach": cfg.schedule.approach, "return": cfg.schedule.return_,
                     "sample_every": cfg.schedule.sample_every},
        "tolerances": {"phase": cfg.tolerances.phase, "shift": cfg.tolerances.shift},
    }
    if cfg.mirror is not None:
        doc["mirror"] = dataclasses.asdict(cfg.mirror)
    return doc


def dump_config(cfg: SimulationConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2, sort_keys=True)
