"""Device parameter records and the Werner-parameter algebra.

Component Werner parameters are taken equal to the raw fidelity figures of
sources, fibers and memories; only the end-to-end parameter is mapped back to
a fidelity through ``F = (1 + 3W) / 4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from satqin.errors import ConfigurationError, DomainError


def _unit(owner: str, **values: float) -> None:
    for name, value in values.items():
        if not 0.0 <= value <= 1.0:
            raise ConfigurationError(f"{owner}.{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class SourceModel:
    efficiency: float = 0.25
    rate: float = 1e9  # pairs/s
    fidelity: float = 0.99
    wavelength: float = 1550e-9

    def __post_init__(self) -> None:
        _unit("source", efficiency=self.efficiency, fidelity=self.fidelity)
        if not self.rate > 0:
            raise ConfigurationError(f"source.rate must be > 0, got {self.rate}")

    @property
    def timeslot(self) -> float:
        return 1.0 / self.rate


@dataclass(frozen=True)
class MemoryModel:
    write_efficiency: float = 0.98
    storage_time: float = 10e-3  # s, characteristic 1/e time
    modes: int = 500
    storage_window: float = 250e-12  # s, reporting only
    fidelity: float = 0.98

    def __post_init__(self) -> None:
        _unit("memory", write_efficiency=self.write_efficiency, fidelity=self.fidelity)
        if not self.storage_time > 0:
            raise ConfigurationError("memory.storage_time must be > 0")
        if int(self.modes) != self.modes or self.modes < 1:
            raise ConfigurationError(f"memory.modes must be a positive integer, got {self.modes}")

    def storage_time_in_slots(self, timeslot: float) -> float:
        return self.storage_time / timeslot


@dataclass(frozen=True)
class DetectorModel:
    efficiency: float = 0.9
    dark_count_rate: float = 50.0  # counts/s
    straylight_rate: float = 0.0  # counts/s

    def __post_init__(self) -> None:
        _unit("detector", efficiency=self.efficiency)
        if self.dark_count_rate < 0 or self.straylight_rate < 0:
            raise ConfigurationError("detector rates must be >= 0")

    @property
    def false_click_rate(self) -> float:
        return self.dark_count_rate + self.straylight_rate


@dataclass(frozen=True)
class BsmModel:
    """Linear-optics Bell state measurement; at most two of four Bell states resolved."""

    efficiency: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.efficiency <= 0.5:
            raise ConfigurationError(f"bsm.efficiency must lie in [0, 0.5], got {self.efficiency}")


@dataclass(frozen=True)
class ConverterModel:
    efficiency: float = 0.8
    fidelity: float = 0.98

    def __post_init__(self) -> None:
        _unit("converter", efficiency=self.efficiency, fidelity=self.fidelity)


@dataclass(frozen=True)
class WernerState:
    parameter: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.parameter <= 1.0:
            raise DomainError(f"Werner parameter must lie in [0, 1], got {self.parameter}")

    @property
    def fidelity(self) -> float:
        return fidelity_from_werner(self)

    def __mul__(self, other: WernerState) -> WernerState:
        return WernerState(self.parameter * other.parameter)


def memory_efficiency(mem: MemoryModel, storage: float) -> float:
    """Write-then-read efficiency after ``storage`` seconds in memory."""
    if storage < 0:
        raise DomainError(f"storage time must be >= 0, got {storage}")
    return mem.write_efficiency * math.exp(-storage / mem.storage_time)


def swap_efficiency(bsm: BsmModel, det: DetectorModel) -> float:
    return bsm.efficiency * det.efficiency**2


def fidelity_from_werner(w: WernerState | float) -> float:
    value = w.parameter if isinstance(w, WernerState) else w
    return (1.0 + 3.0 * value) / 4.0


def werner_from_fidelity(fidelity: float) -> WernerState:
    if not 0.25 <= fidelity <= 1.0:
        raise DomainError(f"Werner fidelity must lie in [0.25, 1], got {fidelity}")
    return WernerState((4.0 * fidelity - 1.0) / 3.0)


def true_click_probability(true_rate: float, false_rate: float) -> float:
    """Probability that a detector click comes from a source photon."""
    if true_rate < 0 or false_rate < 0:
        raise DomainError("click rates must be >= 0")
    total = true_rate + false_rate
    if total == 0:
        raise DomainError("click probability undefined when both rates are zero")
    return true_rate / total


def bsm_werner(
    eta_left: float,
    eta_right: float,
    source_rate: float,
    false_left: float,
    false_right: float,
) -> WernerState:
    """Werner factor of a swap between two elementary links with noisy detectors."""
    left = true_click_probability(source_rate * eta_left, false_left)
    right = true_click_probability(source_rate * eta_right, false_right)
    return WernerState(left * right)


def source_werner_with_conversion(src: SourceModel, conv: ConverterModel) -> WernerState:
    return WernerState(src.fidelity * conv.fidelity)
