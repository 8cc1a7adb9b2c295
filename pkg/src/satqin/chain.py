"""Repeater chain composition: elementary links, swaps, rates and Werner parameters.

The chain alternates BSM nodes and elementary links::

    Alice | BSM | link_0 | BSM | link_1 | ... | link_{M-1} | BSM | Bob

Swaps are synchronized every ``modes`` timeslots, so the swap rate is
``R_src / modes``. A ground link succeeds in a window when at least one of
its slots delivered a pair to both memories. The satellite link enters the
rate per attempt by default (a lower bound) or per window when
``sat_window_mode`` is set.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from satqin.channel import FiberChannel, FreeSpaceParams, fiber_efficiency, single_path_efficiency
from satqin.devices import (
    BsmModel,
    ConverterModel,
    DetectorModel,
    MemoryModel,
    SourceModel,
    WernerState,
    fidelity_from_werner,
    memory_efficiency,
    swap_efficiency,
    true_click_probability,
)
from satqin.errors import ConfigurationError
from satqin.orbit import PassSample


@dataclass(frozen=True)
class ElementaryLink:
    """Fiber elementary link: one source, two fibers, two memories."""

    name: str
    source: SourceModel
    left_channel: FiberChannel
    right_channel: FiberChannel
    left_memory: MemoryModel
    right_memory: MemoryModel
    fidelity_medium: float = 0.99

    def channel_efficiencies(self, sample: PassSample | None = None) -> tuple[float, float]:
        return fiber_efficiency(self.left_channel), fiber_efficiency(self.right_channel)

    def is_up(self, sample: PassSample | None = None) -> bool:
        return True


@dataclass(frozen=True)
class SpaceLink:
    """Satellite elementary link: onboard source, two downlinks, two ground memories.

    ``left_station``/``right_station`` name the ground stations in the pass
    samples; each has its own downlink optics.
    """

    name: str
    source: SourceModel
    left_station: str
    right_station: str
    left_optics: FreeSpaceParams
    right_optics: FreeSpaceParams
    left_memory: MemoryModel
    right_memory: MemoryModel
    fidelity_medium: float = 0.99
    min_elevation: float = math.radians(20.0)

    def is_up(self, sample: PassSample | None) -> bool:
        if sample is None:
            return False
        return all(
            sample.elevation(st) >= self.min_elevation and sample.elevation(st) > 0
            for st in (self.left_station, self.right_station)
        )

    def path_efficiency(self, sample: PassSample, station: str) -> float:
        """Single path link budget, 0 at or below the horizon."""
        optics = self.left_optics if station == self.left_station else self.right_optics
        elevation, slant_range = sample.stations[station]
        if elevation <= 0:
            return 0.0
        return single_path_efficiency(optics, slant_range, elevation)

    def channel_efficiencies(self, sample: PassSample | None) -> tuple[float, float]:
        if not self.is_up(sample):
            return 0.0, 0.0
        return (
            self.path_efficiency(sample, self.left_station),
            self.path_efficiency(sample, self.right_station),
        )


Link = ElementaryLink | SpaceLink


@dataclass(frozen=True)
class BsmNode:
    name: str
    bsm: BsmModel
    detector: DetectorModel
    space_facing: bool = False

    def false_click_rate(self, straylight: float) -> float:
        return self.detector.dark_count_rate + self.detector.straylight_rate + (
            straylight if self.space_facing else 0.0
        )


@dataclass(frozen=True)
class EndUser:
    """Trapped-ion node: photon emission converted to 1550 nm and stored in memory."""

    name: str
    source: SourceModel
    converter: ConverterModel
    memory: MemoryModel


@dataclass(frozen=True)
class ChainTopology:
    alice: EndUser
    bob: EndUser
    links: tuple[Link, ...]
    nodes: tuple[BsmNode, ...]
    modes: int = 500
    timeslot: float = 1e-9
    strict_eq1: bool = False
    sat_window_mode: bool = False

    def __post_init__(self) -> None:
        if len(self.nodes) != len(self.links) + 1:
            raise ConfigurationError(
                f"a chain of {len(self.links)} links needs {len(self.links) + 1} BSM nodes, "
                f"got {len(self.nodes)}"
            )
        if self.modes < 1 or not self.timeslot > 0:
            raise ConfigurationError("modes must be >= 1 and timeslot > 0")

    @property
    def source_rate(self) -> float:
        return self.alice.source.rate

    @property
    def window(self) -> float:
        return self.modes * self.timeslot

    def space_link(self) -> SpaceLink | None:
        return next((ln for ln in self.links if isinstance(ln, SpaceLink)), None)


def slot_probabilities(
    source_efficiency: float,
    channel_left: float,
    channel_right: float,
    left_memory: MemoryModel,
    right_memory: MemoryModel,
    modes: int,
    timeslot: float,
) -> np.ndarray:
    """Per-slot probability that a pair reaches and is stored in both memories."""
    t = timeslot * np.arange(1, modes + 1)
    eta_mem = (
        left_memory.write_efficiency
        * np.exp(-t / left_memory.storage_time)
        * right_memory.write_efficiency
        * np.exp(-t / right_memory.storage_time)
    )
    return source_efficiency * channel_left * channel_right * eta_mem


def at_least_one(p: np.ndarray) -> float:
    """Probability that at least one of independent events with probabilities ``p`` occurs."""
    p = np.asarray(p, dtype=float)
    if np.any(p >= 1.0):
        return 1.0
    return float(-np.expm1(np.sum(np.log1p(-p))))


def link_slot_probabilities(
    link: Link, modes: int, timeslot: float, sample: PassSample | None = None
) -> np.ndarray:
    eta1, eta2 = link.channel_efficiencies(sample)
    return slot_probabilities(
        link.source.efficiency, eta1, eta2, link.left_memory, link.right_memory, modes, timeslot
    )


def elementary_link_efficiency(
    link: Link, modes: int, timeslot: float, sample: PassSample | None = None
) -> float:
    """Probability of at least one stored pair on the link within ``modes`` slots."""
    if modes < 1 or not timeslot > 0:
        raise ConfigurationError("modes must be >= 1 and timeslot > 0")
    return at_least_one(link_slot_probabilities(link, modes, timeslot, sample))


def space_elementary_efficiency(
    link: SpaceLink, sample: PassSample, modes: int, timeslot: float
) -> float:
    """Per-attempt success probability of the space link, memories read at ``modes * timeslot``."""
    if not link.is_up(sample):
        return 0.0
    eta_a, eta_b = link.channel_efficiencies(sample)
    storage = modes * timeslot
    return (
        link.source.efficiency
        * eta_a
        * eta_b
        * memory_efficiency(link.left_memory, storage)
        * memory_efficiency(link.right_memory, storage)
    )


def end_user_efficiency(user: EndUser, topology: ChainTopology) -> float:
    eta = user.converter.efficiency * memory_efficiency(user.memory, topology.window)
    if topology.strict_eq1:
        eta *= user.source.rate
    return eta


def _rate_link_efficiency(link: Link, topology: ChainTopology, sample: PassSample | None) -> float:
    if isinstance(link, SpaceLink) and not topology.sat_window_mode:
        return space_elementary_efficiency(link, sample, topology.modes, topology.timeslot)
    if isinstance(link, SpaceLink) and not link.is_up(sample):
        return 0.0
    return elementary_link_efficiency(link, topology.modes, topology.timeslot, sample)


def transmission_factor(topology: ChainTopology, sample: PassSample | None = None) -> float:
    """Bracketed product of end-user, swap and link efficiencies along the chain."""
    factor = end_user_efficiency(topology.alice, topology)
    for node in topology.nodes:
        factor *= swap_efficiency(node.bsm, node.detector)
    for link in topology.links:
        factor *= _rate_link_efficiency(link, topology, sample)
    return factor * end_user_efficiency(topology.bob, topology)


def end_to_end_rate(topology: ChainTopology, sample: PassSample | None = None) -> float:
    """End-to-end pair rate (pairs/s) at the geometry of ``sample``."""
    return topology.source_rate / topology.modes * transmission_factor(topology, sample)


def satellite_pair_rate(topology: ChainTopology, sample: PassSample) -> float:
    """Pairs/s stored at the two ground stations, source rate times per-attempt efficiency."""
    link = topology.space_link()
    if link is None:
        return 0.0
    return link.source.rate * space_elementary_efficiency(link, sample, topology.modes, topology.timeslot)


def elementary_werner(link: Link) -> WernerState:
    return WernerState(
        link.source.fidelity
        * link.fidelity_medium**2
        * link.left_memory.fidelity
        * link.right_memory.fidelity
    )


def _click_probability(true_rate: float, false_rate: float) -> float:
    # no signal: every click is noise
    if true_rate == 0:
        return 0.0
    return true_click_probability(true_rate, false_rate)


def click_statistics_efficiencies(topology: ChainTopology, sample: PassSample | None) -> list[float]:
    """Efficiencies feeding the true-click rates on either side of each BSM node.

    Returns ``len(links) + 2`` values: Alice interface, each link aggregated
    over the swap window, Bob interface.
    """
    etas = [topology.alice.converter.efficiency * memory_efficiency(topology.alice.memory, topology.window)]
    for link in topology.links:
        if isinstance(link, SpaceLink) and not link.is_up(sample):
            etas.append(0.0)
        else:
            etas.append(elementary_link_efficiency(link, topology.modes, topology.timeslot, sample))
    etas.append(topology.bob.converter.efficiency * memory_efficiency(topology.bob.memory, topology.window))
    return etas


def bsm_werner_factors(
    topology: ChainTopology, sample: PassSample | None, straylight: float = 0.0
) -> list[WernerState]:
    etas = click_statistics_efficiencies(topology, sample)
    rates = [topology.alice.source.rate] + [ln.source.rate for ln in topology.links] + [topology.bob.source.rate]
    factors = []
    for i, node in enumerate(topology.nodes):
        false_rate = node.false_click_rate(straylight)
        left = _click_probability(rates[i] * etas[i], false_rate)
        right = _click_probability(rates[i + 1] * etas[i + 1], false_rate)
        factors.append(WernerState(left * right))
    return factors


def end_to_end_werner(
    topology: ChainTopology, sample: PassSample | None = None, straylight: float = 0.0
) -> WernerState:
    """Product of end-user source, BSM and elementary-link Werner factors."""
    nodes = bsm_werner_factors(topology, sample, straylight)
    w = topology.alice.source.fidelity * topology.alice.converter.fidelity
    for node_w, link in zip(nodes, topology.links):
        w *= node_w.parameter * elementary_werner(link).parameter
    w *= nodes[-1].parameter
    w *= topology.bob.source.fidelity * topology.bob.converter.fidelity
    return WernerState(w)


def cumulate(times: Sequence[float] | np.ndarray, rates: Sequence[float] | np.ndarray) -> np.ndarray:
    """Running trapezoidal integral of ``rates`` over ``times``, starting at 0."""
    t = np.asarray(times, dtype=float)
    r = np.asarray(rates, dtype=float)
    if t.size == 0:
        return np.zeros(0)
    steps = 0.5 * (r[1:] + r[:-1]) * np.diff(t)
    return np.concatenate([[0.0], np.cumsum(steps)])


@dataclass
class SimulationSeries:
    """Per-sample rates, cumulative counts and end-to-end fidelity over a pass."""

    straylight: float
    time: np.ndarray
    elevation: dict[str, np.ndarray]
    link_budget: dict[str, np.ndarray]
    sigma_sat: np.ndarray
    sigma_end: np.ndarray
    cum_sat: np.ndarray
    cum_end: np.ndarray
    werner_end: np.ndarray
    fidelity_end: np.ndarray
    link_up: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    def __len__(self) -> int:
        return len(self.time)

    def columns(self) -> dict[str, np.ndarray]:
        cols: dict[str, np.ndarray] = {"time_s": self.time}
        for name in sorted(self.elevation):
            cols[f"elevation_{name}_rad"] = self.elevation[name]
        for name in sorted(self.link_budget):
            cols[f"link_budget_{name}"] = self.link_budget[name]
        cols.update(
            sigma_sat_pairs_per_s=self.sigma_sat,
            sigma_end_pairs_per_s=self.sigma_end,
            cum_sat_pairs=self.cum_sat,
            cum_end_pairs=self.cum_end,
            werner_end=self.werner_end,
            fidelity_end=self.fidelity_end,
        )
        return cols


def simulate_pass(
    topology: ChainTopology, samples: Sequence[PassSample], straylight: float = 0.0
) -> SimulationSeries:
    """Evaluate rates and fidelity at every pass sample for one straylight level."""
    link = topology.space_link()
    stations = [] if link is None else [link.left_station, link.right_station]
    n = len(samples)
    time = np.array([s.time for s in samples], dtype=float)
    elevation = {st: np.array([s.elevation(st) for s in samples]) for st in stations}
    budget = {st: np.array([link.path_efficiency(s, st) for s in samples]) for st in stations}
    sigma_sat = np.array([satellite_pair_rate(topology, s) for s in samples])
    sigma_end = np.array([end_to_end_rate(topology, s) for s in samples])
    werner = np.array([end_to_end_werner(topology, s, straylight).parameter for s in samples])
    up = np.array([link.is_up(s) if link is not None else True for s in samples], dtype=bool)
    return SimulationSeries(
        straylight=straylight,
        time=time,
        elevation=elevation,
        link_budget=budget,
        sigma_sat=sigma_sat.reshape(n),
        sigma_end=sigma_end.reshape(n),
        cum_sat=cumulate(time, sigma_sat),
        cum_end=cumulate(time, sigma_end),
        werner_end=werner.reshape(n),
        fidelity_end=fidelity_from_werner(werner.reshape(n)),
        link_up=up,
    )
