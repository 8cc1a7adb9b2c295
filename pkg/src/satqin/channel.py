"""Photon transmission through fiber and the satellite-to-ground downlink."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from satqin.errors import ConfigurationError, DomainError


def _check_efficiency(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ConfigurationError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class FiberChannel:
    length: float  # km
    attenuation: float = 0.2  # dB/km

    def __post_init__(self) -> None:
        if self.length < 0 or self.attenuation < 0:
            raise ConfigurationError("fiber length and attenuation must be >= 0")


@dataclass(frozen=True)
class FreeSpaceParams:
    """Downlink optics: wavelength and apertures in meters, internal efficiencies in [0, 1]."""

    wavelength: float = 1550e-9
    transmitter_aperture: float = 0.4
    receiver_aperture: float = 1.0
    transmitter_internal: float = 0.7
    receiver_internal: float = 0.1
    zenith_atmospheric: float = 0.2

    def __post_init__(self) -> None:
        for name in ("wavelength", "transmitter_aperture", "receiver_aperture"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be > 0")
        for name in ("transmitter_internal", "receiver_internal", "zenith_atmospheric"):
            _check_efficiency(name, getattr(self, name))

    @property
    def waist(self) -> float:
        """Beam waist at the transmitter output, half the aperture."""
        return self.transmitter_aperture / 2.0


def fiber_efficiency(ch: FiberChannel) -> float:
    return 10.0 ** (-ch.attenuation * ch.length / 10.0)


def atmospheric_transmittance(zenith_transmittance: float, elevation: float) -> float:
    """Zenith transmittance scaled by the air mass 1/sin(elevation)."""
    if not elevation > 0:
        raise DomainError(f"elevation must be > 0 rad, got {elevation}")
    return zenith_transmittance ** (1.0 / math.sin(min(elevation, math.pi / 2)))


def rayleigh_length(waist: float, wavelength: float) -> float:
    return math.pi * waist**2 / wavelength


def beam_waist(waist: float, distance: float, wavelength: float) -> float:
    """Gaussian beam radius after propagating ``distance`` meters."""
    return waist * math.sqrt(1.0 + (distance / rayleigh_length(waist, wavelength)) ** 2)


def receiver_capture(p: FreeSpaceParams, slant_range: float) -> float:
    """Fraction of the Gaussian beam collected by the receiver aperture."""
    spread = 16.0 * p.wavelength**2 * slant_range**2 / (math.pi**2 * p.transmitter_aperture**4)
    exponent = 2.0 * p.receiver_aperture**2 / p.transmitter_aperture**2 / (1.0 + spread)
    return -math.expm1(-exponent)


def single_path_efficiency(p: FreeSpaceParams, slant_range: float, elevation: float) -> float:
    """Satellite-to-ground single photon transmission for one downlink path.

    Transmitter clipping at a waist of half the aperture contributes the
    constant ``1 - exp(-2)``; the receiver term collects the diffracted
    Gaussian beam over the ground aperture.
    """
    if not slant_range > 0:
        raise DomainError(f"slant range must be > 0, got {slant_range}")
    eta_atm = atmospheric_transmittance(p.zenith_atmospheric, elevation)
    transmitter = p.transmitter_internal * -math.expm1(-2.0)
    return transmitter * eta_atm * p.receiver_internal * receiver_capture(p, slant_range)


def link_budget_db(efficiency: float) -> float:
    return 10.0 * math.log10(efficiency) if efficiency > 0 else -np.inf
