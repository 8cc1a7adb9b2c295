"""Self-checks of the analytic identities the model relies on."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from satqin import teleport
from satqin.chain import BsmNode, ChainTopology, ElementaryLink, EndUser, transmission_factor
from satqin.channel import FiberChannel, FreeSpaceParams, beam_waist, receiver_capture
from satqin.devices import (
    BsmModel,
    ConverterModel,
    DetectorModel,
    MemoryModel,
    SourceModel,
    fidelity_from_werner,
    werner_from_fidelity,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_bell_expansion(bell: dict[str, np.ndarray] = teleport.BELL, tol: float = 1e-12) -> CheckResult:
    state = teleport.build_initial_state()
    coeffs = teleport.bell_decompose(state, bell)
    matched = 0
    stray = 0
    for key, value in coeffs.items():
        expected = teleport.EXPECTED_EXPANSION.get(key, 0.0)
        ok = abs(value - expected) <= tol
        if key in teleport.EXPECTED_EXPANSION:
            matched += ok
        elif not ok:
            stray += 1
    roundtrip = float(np.max(np.abs(teleport.recompose(coeffs, bell) - state)))
    spin, _ = teleport.project_bsm(state, "phi+", "psi+")
    target = teleport.BELL["phi+"]
    projection = float(np.max(np.abs(spin - target)))
    passed = matched == 16 and stray == 0 and roundtrip <= tol and projection <= tol
    detail = (
        f"{matched}/16 Bell coefficients matched, {stray} unexpected nonzero, "
        f"round-trip error {roundtrip:.1e}, (phi+, psi+) projection error {projection:.1e}"
    )
    return CheckResult("bell_expansion", passed, detail)


def perfect_chain(bsm_efficiency: float = 0.5) -> ChainTopology:
    """Three-link chain where only the BSMs lose photons."""
    source = SourceModel(efficiency=1.0, rate=1e9, fidelity=1.0)
    memory = MemoryModel(write_efficiency=1.0, storage_time=math.inf, modes=1, fidelity=1.0)
    link = ElementaryLink("lossless", source, FiberChannel(0.0), FiberChannel(0.0), memory, memory, 1.0)
    user = EndUser("user", source, ConverterModel(1.0, 1.0), memory)
    node = BsmNode("bsm", BsmModel(bsm_efficiency), DetectorModel(1.0, 0.0))
    return ChainTopology(user, user, (link, link, link), (node,) * 4, modes=1, timeslot=1e-9)


def check_bsm_identity() -> CheckResult:
    factor = transmission_factor(perfect_chain())
    passed = factor == 0.0625
    return CheckResult("bsm_loss_identity", passed, f"transmission {factor!r}, loss {1 - factor:.2%}")


def check_gaussian_bracket(draws: int = 200, seed: int = 7, tol: float = 1e-12) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        d_t = rng.uniform(0.05, 1.0)
        d_r = rng.uniform(0.1, 3.0)
        lam = rng.uniform(400e-9, 2000e-9)
        r = rng.uniform(1e3, 3e6)
        p = FreeSpaceParams(wavelength=lam, transmitter_aperture=d_t, receiver_aperture=d_r)
        waist = beam_waist(d_t / 2.0, r, lam)
        gaussian = -math.expm1(-(d_r**2) / (2.0 * waist**2))
        worst = max(worst, abs(gaussian - receiver_capture(p, r)) / gaussian)
    return CheckResult("gaussian_bracket", worst <= tol, f"max relative difference {worst:.1e}")


def check_werner_inverse(tol: float = 1e-12) -> CheckResult:
    grid = np.linspace(0.0, 1.0, 1001)
    worst = max(abs(werner_from_fidelity(fidelity_from_werner(w)).parameter - w) for w in grid)
    return CheckResult("werner_fidelity_inverse", worst <= tol, f"max error {worst:.1e}")


def run_checks(bell: dict[str, np.ndarray] = teleport.BELL) -> list[CheckResult]:
    return [
        check_bell_expansion(bell),
        check_bsm_identity(),
        check_gaussian_bracket(),
        check_werner_inverse(),
    ]
