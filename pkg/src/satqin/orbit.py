"""Circular LEO propagation over a rotating spherical Earth.

Positions are expressed in an Earth-fixed frame whose x axis points at the
Greenwich meridian. The inertial frame coincides with it at the instant where
the Greenwich sidereal angle is zero; ``OrbitSpec.greenwich_angle_at_epoch``
carries the offset for a real calendar epoch.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from satqin.errors import ConfigurationError

J2000 = datetime(2000, 1, 1, 12, 0, 0, tzinfo=timezone.utc)


@dataclass(frozen=True)
class EarthModel:
    radius: float = 6_371_000.0
    gravitational_parameter: float = 3.986004418e14
    rotation_rate: float = 7.2921159e-5

    def __post_init__(self) -> None:
        for name in ("radius", "gravitational_parameter", "rotation_rate"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"EarthModel.{name} must be > 0")


@dataclass(frozen=True)
class GeodeticPoint:
    """A point on or above the spherical Earth (degrees, degrees, meters)."""

    latitude: float
    longitude: float
    altitude: float = 0.0

    def __post_init__(self) -> None:
        if not -90.0 <= self.latitude <= 90.0:
            raise ConfigurationError(f"latitude {self.latitude} outside [-90, 90]")
        lon = (self.longitude + 180.0) % 360.0 - 180.0
        object.__setattr__(self, "longitude", lon)

    def position(self, earth: EarthModel) -> np.ndarray:
        lat = math.radians(self.latitude)
        lon = math.radians(self.longitude)
        r = earth.radius + self.altitude
        return np.array(
            [r * math.cos(lat) * math.cos(lon), r * math.cos(lat) * math.sin(lon), r * math.sin(lat)]
        )


@dataclass(frozen=True)
class OrbitSpec:
    """Circular orbit. Angles in degrees, altitude in meters, epoch in seconds."""

    altitude: float
    inclination: float
    raan: float = 0.0
    argument_of_latitude_at_epoch: float = 0.0
    epoch: float = 0.0
    greenwich_angle_at_epoch: float = 0.0

    def __post_init__(self) -> None:
        if not self.altitude > 0:
            raise ConfigurationError(f"orbit altitude must be > 0, got {self.altitude}")
        if not 0.0 <= self.inclination <= 180.0:
            raise ConfigurationError(f"inclination {self.inclination} outside [0, 180]")

    def semi_major_axis(self, earth: EarthModel) -> float:
        return earth.radius + self.altitude

    def mean_motion(self, earth: EarthModel) -> float:
        return math.sqrt(earth.gravitational_parameter / self.semi_major_axis(earth) ** 3)

    def period(self, earth: EarthModel) -> float:
        return 2.0 * math.pi / self.mean_motion(earth)


@dataclass(frozen=True)
class PassSample:
    """Geometry at one instant: station name -> (elevation rad, slant range m)."""

    time: float
    stations: dict[str, tuple[float, float]] = field(default_factory=dict)

    def elevation(self, name: str) -> float:
        return self.stations[name][0]

    def slant_range(self, name: str) -> float:
        return self.stations[name][1]


@dataclass(frozen=True)
class VisibilityWindow:
    start: float
    end: float
    first_index: int
    last_index: int

    @property
    def duration(self) -> float:
        return self.end - self.start


def greenwich_sidereal_angle(when: datetime) -> float:
    """Greenwich mean sidereal angle in degrees (linear IAU expression, UT1 ~ UTC)."""
    if when.tzinfo is None:
        when = when.replace(tzinfo=timezone.utc)
    days = (when - J2000).total_seconds() / 86400.0
    return (280.46061837 + 360.98564736629 * days) % 360.0


def inertial_position(spec: OrbitSpec, earth: EarthModel, t: np.ndarray | float) -> np.ndarray:
    """Position(s) in the inertial frame, shape (3,) or (3, len(t))."""
    a = spec.semi_major_axis(earth)
    u = math.radians(spec.argument_of_latitude_at_epoch) + spec.mean_motion(earth) * (
        np.asarray(t, dtype=float) - spec.epoch
    )
    inc = math.radians(spec.inclination)
    raan = math.radians(spec.raan)
    # orbital plane -> inclination about x -> RAAN about z
    x_p, y_p = a * np.cos(u), a * np.sin(u)
    x_i, y_i, z_i = x_p, y_p * math.cos(inc), y_p * math.sin(inc)
    cr, sr = math.cos(raan), math.sin(raan)
    return np.array([cr * x_i - sr * y_i, sr * x_i + cr * y_i, z_i])


def propagate(spec: OrbitSpec, earth: EarthModel, t: np.ndarray | float) -> np.ndarray:
    """Earth-fixed satellite position at time ``t`` (seconds); vectorized over ``t``."""
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ConfigurationError("propagation time must be finite")
    r_in = inertial_position(spec, earth, t)
    theta = math.radians(spec.greenwich_angle_at_epoch) + earth.rotation_rate * (t - spec.epoch)
    c, s = np.cos(theta), np.sin(theta)
    # rotate by -theta about z
    return np.array([c * r_in[0] + s * r_in[1], -s * r_in[0] + c * r_in[1], r_in[2]])


def elevation_and_range(
    sat_position: np.ndarray, station: GeodeticPoint, earth: EarthModel
) -> tuple[np.ndarray | float, np.ndarray | float]:
    """Elevation (rad) above the local horizontal plane and slant range (m).

    ``sat_position`` may be a single 3-vector or an array of shape (3, n).
    """
    g = station.position(earth)
    up = g / np.linalg.norm(g)
    sat = np.asarray(sat_position, dtype=float)
    d = sat - (g if sat.ndim == 1 else g[:, None])
    rng = np.linalg.norm(d, axis=0)
    sin_el = np.clip(np.tensordot(up, d, axes=(0, 0)) / rng, -1.0, 1.0)
    el = np.arcsin(sin_el)
    if sat.ndim == 1:
        return float(el), float(rng)
    return el, rng


def _named(stations: Mapping[str, GeodeticPoint] | Sequence[GeodeticPoint]) -> dict[str, GeodeticPoint]:
    if isinstance(stations, Mapping):
        return dict(stations)
    return {f"station{i}": st for i, st in enumerate(stations)}


def sample_times(t0: float, t1: float, dt: float) -> np.ndarray:
    if not t0 < t1:
        raise ConfigurationError(f"t0 ({t0}) must be < t1 ({t1})")
    if not dt > 0:
        raise ConfigurationError(f"dt must be > 0, got {dt}")
    count = int(math.floor((t1 - t0) / dt + 1e-9)) + 1
    return t0 + dt * np.arange(count)


def sample_pass(
    spec: OrbitSpec,
    earth: EarthModel,
    stations: Mapping[str, GeodeticPoint] | Sequence[GeodeticPoint],
    t0: float,
    t1: float,
    dt: float,
) -> list[PassSample]:
    """Sample per-station elevation and slant range at t0, t0 + dt, ... <= t1."""
    named = _named(stations)
    if not named:
        raise ConfigurationError("at least one ground station is required")
    times = sample_times(t0, t1, dt)
    sat = propagate(spec, earth, times)
    geometry = {name: elevation_and_range(sat, st, earth) for name, st in named.items()}
    return [
        PassSample(
            time=float(t),
            stations={name: (float(el[i]), float(rng[i])) for name, (el, rng) in geometry.items()},
        )
        for i, t in enumerate(times)
    ]


def find_dual_visibility(samples: Sequence[PassSample], min_elevation: float) -> list[VisibilityWindow]:
    """Maximal runs of samples where every station is at or above ``min_elevation``.

    Runs made of a single sample have zero duration and are dropped.
    """
    windows: list[VisibilityWindow] = []
    start = None
    for i, sample in enumerate(samples):
        visible = all(el >= min_elevation for el, _ in sample.stations.values())
        if visible and start is None:
            start = i
        elif not visible and start is not None:
            if i - 1 > start:
                windows.append(VisibilityWindow(samples[start].time, samples[i - 1].time, start, i - 1))
            start = None
    if start is not None and len(samples) - 1 > start:
        last = len(samples) - 1
        windows.append(VisibilityWindow(samples[start].time, samples[last].time, start, last))
    return windows
