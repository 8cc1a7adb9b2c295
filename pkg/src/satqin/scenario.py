"""Scenario files: schema, defaults, validation and topology construction.

Scenarios are INI-style text files with dotted section names::

    [detectors]
    efficiency = 0.9          # dimensionless, [0, 1]
    dark_count_rate_hz = 50   # counts/s

    [stations.calern]
    receiver_aperture_m = 1.5

Every omitted key takes its default; unknown sections or keys are rejected.
Fiber lengths are in km, apertures and altitudes in m, times in s, rates in
counts/s (Hz). Lists are comma separated.
"""

from __future__ import annotations

import configparser
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from satqin.chain import BsmNode, ChainTopology, ElementaryLink, EndUser, SpaceLink
from satqin.channel import FiberChannel, FreeSpaceParams
from satqin.devices import BsmModel, ConverterModel, DetectorModel, MemoryModel, SourceModel
from satqin.errors import ConfigurationError
from satqin.orbit import EarthModel, GeodeticPoint, OrbitSpec, greenwich_sidereal_angle

STATIONS = ("palaiseau", "calern")


@dataclass(frozen=True)
class Key:
    default: Any
    kind: str = "float"  # float | int | bool | str | floats | optional_float
    low: float | None = None
    high: float | None = None
    open_low: bool = False
    doc: str = ""

    def parse(self, path: str, raw: str) -> Any:
        raw = raw.strip()
        try:
            if self.kind == "float":
                value = float(raw)
            elif self.kind == "optional_float":
                value = None if raw.lower() in ("", "none", "off") else float(raw)
            elif self.kind == "int":
                value = int(raw)
            elif self.kind == "bool":
                lowered = raw.lower()
                if lowered not in ("true", "false", "yes", "no", "1", "0", "on", "off"):
                    raise ValueError(raw)
                value = lowered in ("true", "yes", "1", "on")
            elif self.kind == "floats":
                value = tuple(float(x) for x in raw.split(",") if x.strip())
            else:
                value = raw
        except ValueError:
            raise ConfigurationError(f"{path}: cannot parse {raw!r} as {self.kind}") from None
        self.check(path, value)
        return value

    def check(self, path: str, value: Any) -> None:
        values = value if isinstance(value, tuple) else (value,)
        for v in values:
            if v is None or isinstance(v, (str, bool)):
                continue
            if not math.isfinite(v):
                raise ConfigurationError(f"{path}: value {v} is not finite")
            if self.low is not None and (v < self.low or (self.open_low and v == self.low)):
                raise ConfigurationError(f"{path}: value {v} outside {self._range()}")
            if self.high is not None and v > self.high:
                raise ConfigurationError(f"{path}: value {v} outside {self._range()}")

    def _range(self) -> str:
        left = "(" if self.open_low else "["
        high = "inf" if self.high is None else f"{self.high:g}"
        return f"{left}{self.low:g}, {high}]"


def _unit(default: float, doc: str) -> Key:
    return Key(default, low=0.0, high=1.0, doc=doc)


def _positive(default: float, doc: str) -> Key:
    return Key(default, low=0.0, open_low=True, doc=doc)


def _station(lat: float, lon: float, alt: float, aperture: float) -> dict[str, Key]:
    return {
        "latitude_deg": Key(lat, low=-90.0, high=90.0, doc="geodetic latitude, degrees"),
        "longitude_deg": Key(lon, low=-180.0, high=360.0, doc="longitude east, degrees"),
        "altitude_m": Key(alt, low=0.0, doc="height above the sphere, m"),
        "receiver_aperture_m": _positive(aperture, "Rx telescope diameter D_RX, m"),
    }


SCHEMA: dict[str, dict[str, Key]] = {
    "orbit": {
        "altitude_m": _positive(600e3, "satellite altitude, m"),
        "inclination_deg": Key(60.0, low=0.0, high=180.0, doc="inclination, degrees"),
        "raan_deg": Key(72.5, low=-360.0, high=360.0, doc="inertial RAAN, degrees"),
        "epoch_utc": Key("2025-01-01T00:00:00", kind="str", doc="start simulation date (UTC, ISO 8601)"),
        "argument_of_latitude_deg": Key(-4.0, low=-360.0, high=360.0, doc="satellite phase at epoch, degrees"),
    },
    "earth": {
        "radius_m": _positive(6_371_000.0, "spherical Earth radius, m"),
        "gravitational_parameter_m3_s2": _positive(3.986004418e14, "mu, m^3/s^2"),
        "rotation_rate_rad_s": _positive(7.2921159e-5, "sidereal rotation rate, rad/s"),
    },
    "stations.palaiseau": _station(48.713, 2.208, 160.0, 1.0),
    "stations.calern": _station(43.754, 6.921, 1270.0, 1.5),
    "freespace": {
        "transmitter_aperture_m": _positive(0.4, "Tx telescope diameter D_TX, m"),
        "transmitter_internal_transmittance": _unit(0.7, "on-board telescope internal transmittance"),
        "receiver_internal_transmittance": _unit(0.1, "ground telescope internal transmittance"),
        "zenith_atmospheric_transmittance": _unit(0.2, "atmospheric transmittance at zenith"),
        "fidelity": _unit(0.99, "free-space link fidelity"),
    },
    "source": {
        "wavelength_m": _positive(1550e-9, "entangled photon wavelength, m"),
        "efficiency": _unit(0.25, "pair generation efficiency"),
        "rate_hz": _positive(1e9, "pair source rate, pairs/s"),
        "fidelity": _unit(0.99, "source fidelity"),
    },
    "converter": {
        "efficiency": _unit(0.8, "wavelength conversion efficiency"),
        "fidelity": _unit(0.98, "wavelength conversion fidelity"),
    },
    "memory": {
        "write_efficiency": _unit(0.98, "memory writing efficiency"),
        "fidelity": _unit(0.98, "memory fidelity"),
        "modes": Key(500, kind="int", low=1.0, doc="storage modes N"),
        "storage_time_s": _positive(10e-3, "characteristic storage time, s"),
        "storage_window_s": _positive(250e-12, "storage window, s (reporting only)"),
    },
    "detectors": {
        "efficiency": _unit(0.9, "SNSPD efficiency"),
        "dark_count_rate_hz": Key(50.0, low=0.0, doc="dark count rate, counts/s"),
    },
    "bsm": {
        "efficiency": Key(0.5, low=0.0, high=0.5, doc="BSM efficiency, at most 1/2"),
    },
    "fiber": {
        "attenuation_db_per_km": Key(0.2, low=0.0, doc="fiber attenuation, dB/km"),
        "fidelity": _unit(0.99, "fiber link fidelity"),
        "paris_lengths_km": Key((14.0, 45.0), kind="floats", low=0.0, doc="Paris link fibers, km"),
        "nice_lengths_km": Key((32.0, 35.0), kind="floats", low=0.0, doc="Nice link fibers, km"),
    },
    "straylight": {
        "levels_hz": Key((0.0, 1e3, 1e5), kind="floats", low=0.0, doc="straylight at space-facing BSMs, counts/s"),
    },
    "simulation": {
        "t0_s": Key(700.0, doc="first sample time since epoch, s"),
        "t1_s": Key(1250.0, doc="last sample time since epoch, s"),
        "dt_s": _positive(1.0, "sampling step, s"),
        "min_elevation_deg": Key(20.0, low=-90.0, high=90.0, doc="elevation mask, degrees"),
        "timeslot_s": Key(None, kind="optional_float", low=0.0, open_low=True, doc="delta t; 1/rate_hz when unset"),
        "seed": Key(0, kind="int", low=0.0, doc="random seed"),
        "trials": Key(100_000, kind="int", low=1.0, doc="Monte Carlo trials"),
        "strict_eq1": Key(False, kind="bool", doc="multiply end-user efficiency by the source rate"),
        "sat_window_mode": Key(False, kind="bool", doc="aggregate the space link over the swap window"),
        "fidelity_floor": Key(None, kind="optional_float", low=0.25, high=1.0, doc="gate-budget fidelity filter"),
    },
}

# Every reference device and orbit parameter, mapped to its single scenario key.
PARAMETER_KEYS: dict[str, str] = {
    "satellite altitude": "orbit.altitude_m",
    "orbit inclination": "orbit.inclination_deg",
    "ascending node": "orbit.raan_deg",
    "simulation epoch": "orbit.epoch_utc",
    "pair wavelength": "source.wavelength_m",
    "pair source efficiency": "source.efficiency",
    "pair source rate": "source.rate_hz",
    "converter efficiency": "converter.efficiency",
    "converter fidelity": "converter.fidelity",
    "pair source fidelity": "source.fidelity",
    "memory write efficiency": "memory.write_efficiency",
    "memory fidelity": "memory.fidelity",
    "memory modes": "memory.modes",
    "memory storage time": "memory.storage_time_s",
    "memory storage window": "memory.storage_window_s",
    "detector efficiency": "detectors.efficiency",
    "detector dark counts": "detectors.dark_count_rate_hz",
    "BSM efficiency": "bsm.efficiency",
    "fiber attenuation": "fiber.attenuation_db_per_km",
    "fiber fidelity": "fiber.fidelity",
    "transmitter aperture": "freespace.transmitter_aperture_m",
    "Calern receiver aperture": "stations.calern.receiver_aperture_m",
    "Palaiseau receiver aperture": "stations.palaiseau.receiver_aperture_m",
    "free-space fidelity": "freespace.fidelity",
    "zenith atmospheric transmittance": "freespace.zenith_atmospheric_transmittance",
    "ground telescope transmittance": "freespace.receiver_internal_transmittance",
    "onboard telescope transmittance": "freespace.transmitter_internal_transmittance",
}


@dataclass(frozen=True)
class Station:
    name: str
    point: GeodeticPoint
    receiver_aperture: float


@dataclass(frozen=True)
class SimulationControls:
    t0: float
    t1: float
    dt: float
    min_elevation: float  # rad
    timeslot: float
    seed: int
    trials: int
    strict_eq1: bool
    sat_window_mode: bool
    fidelity_floor: float | None


@dataclass(frozen=True)
class Scenario:
    orbit: OrbitSpec
    earth: EarthModel
    stations: dict[str, Station]
    freespace: FreeSpaceParams
    freespace_fidelity: float
    source: SourceModel
    converter: ConverterModel
    memory: MemoryModel
    detector: DetectorModel
    bsm: BsmModel
    fiber_attenuation: float
    fiber_fidelity: float
    paris_lengths: tuple[float, float]
    nice_lengths: tuple[float, float]
    straylight_levels: tuple[float, ...]
    simulation: SimulationControls
    values: dict[str, dict[str, Any]] = field(default_factory=dict, compare=False, repr=False)

    def get(self, path: str) -> Any:
        section, _, key = path.rpartition(".")
        return self.values[section][key]

    def optics(self, station: str) -> FreeSpaceParams:
        return FreeSpaceParams(
            wavelength=self.freespace.wavelength,
            transmitter_aperture=self.freespace.transmitter_aperture,
            receiver_aperture=self.stations[station].receiver_aperture,
            transmitter_internal=self.freespace.transmitter_internal,
            receiver_internal=self.freespace.receiver_internal,
            zenith_atmospheric=self.freespace.zenith_atmospheric,
        )

    def station_points(self) -> dict[str, GeodeticPoint]:
        return {name: st.point for name, st in self.stations.items()}


def default_values() -> dict[str, dict[str, Any]]:
    return {section: {k: key.default for k, key in keys.items()} for section, keys in SCHEMA.items()}


def parse_scenario(text: str) -> Scenario:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), comment_prefixes=("#", ";")
    )
    parser.optionxform = str  # type: ignore[assignment]
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"scenario parse error: {exc}") from None
    values = default_values()
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigurationError(f"{section}: unknown section")
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigurationError(f"{section}.{key}: unknown key")
            values[section][key] = SCHEMA[section][key].parse(f"{section}.{key}", raw)
    return build_scenario(values)


def load_scenario(path: str | Path | None) -> Scenario:
    if path is None:
        return default_scenario()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read scenario {path}: {exc}") from None
    return parse_scenario(text)


def default_scenario() -> Scenario:
    return build_scenario(default_values())


def _checked(path: str, build: Callable[[], Any]) -> Any:
    try:
        return build()
    except ConfigurationError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None


def _pair(path: str, lengths: tuple[float, ...]) -> tuple[float, float]:
    if len(lengths) != 2:
        raise ConfigurationError(f"{path}: expected two fiber lengths, got {len(lengths)}")
    return lengths[0], lengths[1]


def build_scenario(values: dict[str, dict[str, Any]]) -> Scenario:
    o = values["orbit"]
    try:
        epoch = datetime.fromisoformat(o["epoch_utc"])
    except ValueError:
        raise ConfigurationError(f"orbit.epoch_utc: cannot parse {o['epoch_utc']!r}") from None
    if epoch.tzinfo is None:
        epoch = epoch.replace(tzinfo=timezone.utc)
    orbit = _checked(
        "orbit",
        lambda: OrbitSpec(
            altitude=o["altitude_m"],
            inclination=o["inclination_deg"],
            raan=o["raan_deg"],
            argument_of_latitude_at_epoch=o["argument_of_latitude_deg"],
            epoch=0.0,
            greenwich_angle_at_epoch=greenwich_sidereal_angle(epoch),
        ),
    )
    e = values["earth"]
    earth = EarthModel(e["radius_m"], e["gravitational_parameter_m3_s2"], e["rotation_rate_rad_s"])
    stations = {}
    for name in STATIONS:
        s = values[f"stations.{name}"]
        stations[name] = Station(
            name,
            GeodeticPoint(s["latitude_deg"], s["longitude_deg"], s["altitude_m"]),
            s["receiver_aperture_m"],
        )
    src, fs = values["source"], values["freespace"]
    freespace = FreeSpaceParams(
        wavelength=src["wavelength_m"],
        transmitter_aperture=fs["transmitter_aperture_m"],
        receiver_aperture=1.0,
        transmitter_internal=fs["transmitter_internal_transmittance"],
        receiver_internal=fs["receiver_internal_transmittance"],
        zenith_atmospheric=fs["zenith_atmospheric_transmittance"],
    )
    source = SourceModel(src["efficiency"], src["rate_hz"], src["fidelity"], src["wavelength_m"])
    mem = values["memory"]
    memory = MemoryModel(
        mem["write_efficiency"], mem["storage_time_s"], mem["modes"], mem["storage_window_s"], mem["fidelity"]
    )
    sim = values["simulation"]
    if not sim["t0_s"] < sim["t1_s"]:
        raise ConfigurationError(f"simulation.t1_s: must exceed t0_s ({sim['t0_s']})")
    controls = SimulationControls(
        t0=sim["t0_s"],
        t1=sim["t1_s"],
        dt=sim["dt_s"],
        min_elevation=math.radians(sim["min_elevation_deg"]),
        timeslot=sim["timeslot_s"] if sim["timeslot_s"] is not None else source.timeslot,
        seed=sim["seed"],
        trials=sim["trials"],
        strict_eq1=sim["strict_eq1"],
        sat_window_mode=sim["sat_window_mode"],
        fidelity_floor=sim["fidelity_floor"],
    )
    fiber = values["fiber"]
    return Scenario(
        orbit=orbit,
        earth=earth,
        stations=stations,
        freespace=freespace,
        freespace_fidelity=fs["fidelity"],
        source=source,
        converter=ConverterModel(values["converter"]["efficiency"], values["converter"]["fidelity"]),
        memory=memory,
        detector=DetectorModel(values["detectors"]["efficiency"], values["detectors"]["dark_count_rate_hz"]),
        bsm=BsmModel(values["bsm"]["efficiency"]),
        fiber_attenuation=fiber["attenuation_db_per_km"],
        fiber_fidelity=fiber["fidelity"],
        paris_lengths=_pair("fiber.paris_lengths_km", fiber["paris_lengths_km"]),
        nice_lengths=_pair("fiber.nice_lengths_km", fiber["nice_lengths_km"]),
        straylight_levels=tuple(values["straylight"]["levels_hz"]),
        simulation=controls,
        values=values,
    )


def build_topology(scenario: Scenario, **overrides: Any) -> ChainTopology:
    """Alice - Paris link - satellite link - Nice link - Bob, with four BSM nodes.

    ``overrides`` replace ``strict_eq1`` / ``sat_window_mode`` from the scenario.
    """
    s = scenario
    att = s.fiber_attenuation

    def ground(name: str, lengths: tuple[float, float]) -> ElementaryLink:
        return ElementaryLink(
            name=name,
            source=s.source,
            left_channel=FiberChannel(lengths[0], att),
            right_channel=FiberChannel(lengths[1], att),
            left_memory=s.memory,
            right_memory=s.memory,
            fidelity_medium=s.fiber_fidelity,
        )

    space = SpaceLink(
        name="satellite",
        source=s.source,
        left_station="palaiseau",
        right_station="calern",
        left_optics=s.optics("palaiseau"),
        right_optics=s.optics("calern"),
        left_memory=s.memory,
        right_memory=s.memory,
        fidelity_medium=s.freespace_fidelity,
        min_elevation=s.simulation.min_elevation,
    )

    def node(name: str, space_facing: bool = False) -> BsmNode:
        return BsmNode(name, s.bsm, s.detector, space_facing)

    return ChainTopology(
        alice=EndUser("alice", s.source, s.converter, s.memory),
        bob=EndUser("bob", s.source, s.converter, s.memory),
        links=(ground("paris", s.paris_lengths), space, ground("nice", s.nice_lengths)),
        nodes=(node("alice"), node("trt", True), node("calern", True), node("bob")),
        modes=s.memory.modes,
        timeslot=s.simulation.timeslot,
        strict_eq1=overrides.get("strict_eq1", s.simulation.strict_eq1),
        sat_window_mode=overrides.get("sat_window_mode", s.simulation.sat_window_mode),
    )
