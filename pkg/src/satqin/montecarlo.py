"""Monte Carlo swap-window simulation of an elementary link.

Each trial plays one window of ``modes`` timeslots. In every slot the source
emits a pair, each photon crosses its channel and is written to and read
back from its memory, all as independent Bernoulli events. The window
succeeds when some slot stored the pair on both sides.

Trials are split into fixed-size chunks with child seeds spawned from one
``SeedSequence``, so results do not depend on how chunks are scheduled.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from satqin.chain import Link, SpaceLink
from satqin.errors import ConfigurationError
from satqin.orbit import PassSample

CHUNK = 2048


@dataclass(frozen=True)
class SlotComponents:
    """Independent per-slot success probabilities of one elementary link."""

    source: float
    channel_left: float
    channel_right: float
    memory_left: np.ndarray
    memory_right: np.ndarray

    @property
    def modes(self) -> int:
        return len(self.memory_left)

    def slot_probabilities(self) -> np.ndarray:
        return self.source * self.channel_left * self.channel_right * self.memory_left * self.memory_right


@dataclass(frozen=True)
class MonteCarloEstimate:
    successes: int
    trials: int

    @property
    def estimate(self) -> float:
        return self.successes / self.trials

    @property
    def standard_error(self) -> float:
        p = self.estimate
        return math.sqrt(p * (1.0 - p) / self.trials)

    def wilson_interval(self, z: float = 1.959964) -> tuple[float, float]:
        n, p = self.trials, self.estimate
        denom = 1.0 + z * z / n
        centre = (p + z * z / (2 * n)) / denom
        half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
        return max(0.0, centre - half), min(1.0, centre + half)

    def z_score(self, expected: float) -> float:
        """Deviation from ``expected`` in units of its binomial standard error."""
        se = math.sqrt(expected * (1.0 - expected) / self.trials)
        diff = self.estimate - expected
        if se == 0:
            return 0.0 if diff == 0 else math.copysign(math.inf, diff)
        return diff / se


def link_components(link: Link, modes: int, timeslot: float, sample: PassSample | None = None) -> SlotComponents:
    if isinstance(link, SpaceLink) and not link.is_up(sample):
        eta1 = eta2 = 0.0
    else:
        eta1, eta2 = link.channel_efficiencies(sample)
    t = timeslot * np.arange(1, modes + 1)
    mem_l = link.left_memory.write_efficiency * np.exp(-t / link.left_memory.storage_time)
    mem_r = link.right_memory.write_efficiency * np.exp(-t / link.right_memory.storage_time)
    return SlotComponents(link.source.efficiency, eta1, eta2, mem_l, mem_r)


def _simulate_chunk(components: SlotComponents, trials: int, seed: np.random.SeedSequence) -> int:
    rng = np.random.default_rng(seed)
    shape = (trials, components.modes)
    stored = rng.random(shape) < components.source
    stored &= rng.random(shape) < components.channel_left
    stored &= rng.random(shape) < components.channel_right
    stored &= rng.random(shape) < components.memory_left
    stored &= rng.random(shape) < components.memory_right
    return int(np.count_nonzero(stored.any(axis=1)))


def monte_carlo_elementary(
    components: SlotComponents, trials: int, seed: int = 0, chunk: int = CHUNK
) -> MonteCarloEstimate:
    """Estimate the window success probability from ``trials`` simulated windows."""
    if trials < 1:
        raise ConfigurationError(f"trials must be >= 1, got {trials}")
    n_chunks = -(-trials // chunk)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [chunk] * (n_chunks - 1) + [trials - chunk * (n_chunks - 1)]
    successes = sum(_simulate_chunk(components, n, ss) for n, ss in zip(sizes, children))
    return MonteCarloEstimate(successes, trials)


def enumerate_window_success(p: np.ndarray) -> float:
    """Exact window success probability by summing over all 2**N slot patterns."""
    p = np.asarray(p, dtype=float)
    if p.size > 20:
        raise ConfigurationError("enumeration is limited to N <= 20 slots")
    total = 0.0
    for pattern in itertools.product((False, True), repeat=p.size):
        if not any(pattern):
            continue
        mask = np.array(pattern)
        total += float(np.prod(np.where(mask, p, 1.0 - p)))
    return total
