"""Acceptance criteria 1-11, one test each.

Every test records a PASS/FAIL line through the ``criterion`` fixture; the
lines are printed in the terminal summary after the run.
"""

import math
import time

import numpy as np
import pytest

import oracles
from satqin import teleport
from satqin.chain import (
    BsmNode,
    ChainTopology,
    ElementaryLink,
    EndUser,
    SpaceLink,
    elementary_link_efficiency,
    elementary_werner,
    end_to_end_werner,
    transmission_factor,
)
from satqin.channel import FiberChannel, FreeSpaceParams, atmospheric_transmittance, fiber_efficiency, single_path_efficiency
from satqin.cli import main, pass_samples, run_mc, run_simulate
from satqin.devices import (
    BsmModel,
    ConverterModel,
    DetectorModel,
    MemoryModel,
    SourceModel,
    bsm_werner,
    fidelity_from_werner,
    memory_efficiency,
)
from satqin.montecarlo import SlotComponents, enumerate_window_success, monte_carlo_elementary
from satqin.orbit import PassSample, find_dual_visibility
from satqin.verify import perfect_chain

DRAWS = 100
TOL = 1e-12


def _random_chain(rng):
    """Chain with every Werner and efficiency input drawn at random, plus one geometry sample."""
    modes = int(rng.integers(1, 40))
    timeslot = rng.uniform(1e-10, 1e-8)

    def source():
        return SourceModel(efficiency=rng.uniform(0.01, 1), rate=rng.uniform(1e6, 1e10), fidelity=rng.uniform(0.5, 1))

    def memory():
        return MemoryModel(rng.uniform(0.5, 1), rng.uniform(1e-8, 1e-2), modes, fidelity=rng.uniform(0.5, 1))

    def fiber():
        return FiberChannel(rng.uniform(0, 80), rng.uniform(0.1, 0.4))

    def optics():
        return FreeSpaceParams(
            transmitter_aperture=rng.uniform(0.1, 1), receiver_aperture=rng.uniform(0.3, 2),
            transmitter_internal=rng.uniform(0.1, 1), receiver_internal=rng.uniform(0.05, 1),
            zenith_atmospheric=rng.uniform(0.1, 1),
        )

    links = (
        ElementaryLink("g1", source(), fiber(), fiber(), memory(), memory(), rng.uniform(0.5, 1)),
        SpaceLink("s", source(), "a", "b", optics(), optics(), memory(), memory(), rng.uniform(0.5, 1), 0.0),
        ElementaryLink("g2", source(), fiber(), fiber(), memory(), memory(), rng.uniform(0.5, 1)),
    )
    nodes = tuple(
        BsmNode(f"n{i}", BsmModel(rng.uniform(0.1, 0.5)), DetectorModel(rng.uniform(0.5, 1), rng.uniform(0, 1e4)), i in (1, 2))
        for i in range(4)
    )
    users = [EndUser(u, source(), ConverterModel(rng.uniform(0.3, 1), rng.uniform(0.5, 1)), memory()) for u in "AB"]
    topo = ChainTopology(users[0], users[1], links, nodes, modes, timeslot)
    sample = PassSample(
        0.0,
        {
            "a": (rng.uniform(0.2, math.pi / 2), rng.uniform(5e5, 2e6)),
            "b": (rng.uniform(0.2, math.pi / 2), rng.uniform(5e5, 2e6)),
        },
    )
    return topo, sample, rng.uniform(0, 1e5)


def _oracle_werner_end(topo, sample, straylight):
    """Independent evaluation of the nine-factor end-to-end Werner product."""
    n, dt = topo.modes, topo.timeslot

    def user_eta(u):
        return u.converter.efficiency * oracles.memory(u.memory.write_efficiency, u.memory.storage_time, n * dt)

    def channels(link):
        if isinstance(link, SpaceLink):
            return [
                oracles.single_path(p.wavelength, p.transmitter_aperture, p.receiver_aperture, p.transmitter_internal,
                                    p.receiver_internal, p.zenith_atmospheric, sample.stations[st][1], sample.stations[st][0])
                for p, st in ((link.left_optics, link.left_station), (link.right_optics, link.right_station))
            ]
        return [oracles.fiber(c.length, c.attenuation) for c in (link.left_channel, link.right_channel)]

    etas = [user_eta(topo.alice)]
    for link in topo.links:
        ch1, ch2 = channels(link)
        lm, rm = link.left_memory, link.right_memory
        etas.append(oracles.window(link.source.efficiency, ch1, ch2, lm.write_efficiency, lm.storage_time,
                                   rm.write_efficiency, rm.storage_time, n, dt))
    etas.append(user_eta(topo.bob))
    rates = [topo.alice.source.rate] + [ln.source.rate for ln in topo.links] + [topo.bob.source.rate]
    w = oracles.mp.mpf(1)
    for u in (topo.alice, topo.bob):
        w *= oracles.mp.mpf(u.source.fidelity) * u.converter.fidelity
    for i, node in enumerate(topo.nodes):
        false = node.detector.dark_count_rate + (straylight if node.space_facing else 0.0)
        w *= oracles.click(rates[i] * etas[i], false) * oracles.click(rates[i + 1] * etas[i + 1], false)
    for link in topo.links:
        w *= oracles.werner_elem(link.source.fidelity, link.fidelity_medium, link.left_memory.fidelity, link.right_memory.fidelity)
    return w


def test_criterion_01_analytic_oracles(criterion):
    rng = np.random.default_rng(2024)
    worst: dict[str, float] = {}

    def record(name, got, ref):
        worst[name] = max(worst.get(name, 0.0), float(oracles.rel(got, ref)))

    start = time.perf_counter()
    for _ in range(DRAWS):
        length, att = rng.uniform(0, 200), rng.uniform(0.05, 0.5)
        record("fiber", fiber_efficiency(FiberChannel(length, att)), oracles.fiber(length, att))

        eta0, theta = rng.uniform(0.05, 1), rng.uniform(0.1, math.pi / 2)
        record("atmosphere", atmospheric_transmittance(eta0, theta), oracles.atmosphere(eta0, theta))

        p = FreeSpaceParams(
            wavelength=rng.uniform(500e-9, 1600e-9), transmitter_aperture=rng.uniform(0.1, 1),
            receiver_aperture=rng.uniform(0.3, 2), transmitter_internal=rng.uniform(0.1, 1),
            receiver_internal=rng.uniform(0.05, 1), zenith_atmospheric=rng.uniform(0.1, 1),
        )
        r = rng.uniform(3e5, 2.5e6)
        record("single_path", single_path_efficiency(p, r, theta), oracles.single_path(
            p.wavelength, p.transmitter_aperture, p.receiver_aperture, p.transmitter_internal,
            p.receiver_internal, p.zenith_atmospheric, r, theta))

        mem = MemoryModel(rng.uniform(0.5, 1), rng.uniform(1e-6, 1))
        t = rng.uniform(0, 1e-2)
        record("memory", memory_efficiency(mem, t), oracles.memory(mem.write_efficiency, mem.storage_time, t))

        w = rng.uniform(0, 1)
        record("fidelity", fidelity_from_werner(w), oracles.fidelity(w))

        modes = int(rng.integers(1, 200))
        link = ElementaryLink(
            "x", SourceModel(efficiency=rng.uniform(1e-4, 1)), FiberChannel(rng.uniform(0, 60)),
            FiberChannel(rng.uniform(0, 60)), mem, MemoryModel(rng.uniform(0.5, 1), rng.uniform(1e-6, 1)),
            rng.uniform(0.5, 1),
        )
        dt = rng.uniform(1e-10, 1e-8)
        record("window", elementary_link_efficiency(link, modes, dt), oracles.window(
            link.source.efficiency, fiber_efficiency(link.left_channel), fiber_efficiency(link.right_channel),
            mem.write_efficiency, mem.storage_time, link.right_memory.write_efficiency,
            link.right_memory.storage_time, modes, dt))

        link = ElementaryLink(
            "y", SourceModel(fidelity=rng.uniform(0, 1)), FiberChannel(1.0), FiberChannel(1.0),
            MemoryModel(fidelity=rng.uniform(0, 1)), MemoryModel(fidelity=rng.uniform(0, 1)), rng.uniform(0, 1),
        )
        record("elementary_werner", elementary_werner(link).parameter, oracles.werner_elem(
            link.source.fidelity, link.fidelity_medium, link.left_memory.fidelity, link.right_memory.fidelity))

        eta_l, eta_r = 10 ** rng.uniform(-8, 0), 10 ** rng.uniform(-8, 0)
        rate, fl, fr = rng.uniform(1e6, 1e10), rng.uniform(0, 1e5), rng.uniform(0, 1e5)
        record("bsm_werner", bsm_werner(eta_l, eta_r, rate, fl, fr).parameter,
               oracles.werner_bsm(eta_l, eta_r, rate, fl, fr))

        topo, sample, straylight = _random_chain(rng)
        record("end_to_end_werner", end_to_end_werner(topo, sample, straylight).parameter,
               _oracle_werner_end(topo, sample, straylight))
    elapsed = time.perf_counter() - start

    bad = {k: v for k, v in worst.items() if v > TOL}
    detail = f"{len(worst)} formulas x {DRAWS} draws, max rel error {max(worst.values()):.1e}, {elapsed:.2f} s (incl. oracles)"
    assert criterion("1 analytic oracle suite", not bad and elapsed < 1.0, detail), bad


def test_criterion_02_bsm_loss_identity(criterion):
    factor = transmission_factor(perfect_chain())
    assert criterion("2 BSM loss identity", factor == 0.0625, f"transmission {factor!r}, loss {1 - factor:.2%}")


def test_criterion_03_bell_expansion(criterion):
    start = time.perf_counter()
    state = teleport.build_initial_state()
    coeffs = teleport.bell_decompose(state)
    matched = sum(
        abs(coeffs[key] - value) <= TOL for key, value in teleport.EXPECTED_EXPANSION.items()
    )
    others = max(abs(v) for k, v in coeffs.items() if k not in teleport.EXPECTED_EXPANSION)
    spin, _ = teleport.project_bsm(state, "phi+", "psi+")
    target = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2)  # (|dd> + |uu>)/sqrt2
    proj_err = float(np.max(np.abs(spin - target)))
    elapsed = time.perf_counter() - start
    ok = matched == 16 and others <= TOL and proj_err <= TOL and elapsed < 1.0
    detail = f"{matched}/16 coefficients, off-expansion max {others:.1e}, projection error {proj_err:.1e}, {elapsed:.3f} s"
    assert criterion("3 Bell expansion", ok, detail)


def test_criterion_04_monte_carlo(criterion, scenario):
    start = time.perf_counter()
    rng = np.random.default_rng(99)
    small_z = []
    for i in range(10):
        modes = int(rng.integers(1, 17))
        mem = rng.uniform(0.3, 1.0, size=modes)
        comps = SlotComponents(rng.uniform(0.01, 1), rng.uniform(0.05, 1), rng.uniform(0.05, 1), mem, mem.copy())
        exact = enumerate_window_success(comps.slot_probabilities())
        small_z.append(monte_carlo_elementary(comps, 20_000, seed=i).z_score(exact))
    rows = run_mc(scenario, 100_000, seed=0)
    elapsed = time.perf_counter() - start
    big_z = {r.link: r.z for r in rows}
    ok = max(map(abs, small_z)) <= 3 and all(abs(z) <= 3 for z in big_z.values()) and elapsed < 60
    zs = ", ".join(f"{k} {v:+.2f}" for k, v in big_z.items())
    detail = f"N<=16 brute force max |z| {max(map(abs, small_z)):.2f}; N=500 at 1e5 trials z: {zs}; {elapsed:.1f} s"
    assert criterion("4 Monte Carlo equivalence", ok, detail)


def test_criterion_05_pass_geometry(criterion, scenario):
    start = time.perf_counter()
    windows = find_dual_visibility(pass_samples(scenario), scenario.simulation.min_elevation)
    elapsed = time.perf_counter() - start
    duration = windows[0].duration if windows else 0.0
    ok = len(windows) == 1 and 265 <= duration <= 397 and elapsed < 5
    assert criterion("5 pass geometry", ok, f"dual visibility {duration:g} s in [265, 397], {elapsed:.2f} s")


def test_criterion_06_peak_satellite_rate(criterion, default_run):
    peak = float(default_run.series[0.0].sigma_sat.max())
    assert criterion("6 peak satellite pair rate", 2000 <= peak <= 8000, f"max sigma_sat {peak:.1f} pairs/s in [2000, 8000]")


def test_criterion_07_cumulative_ground_pairs(criterion, default_run):
    s = default_run.series[0.0]
    w = default_run.window
    plateau = float(s.cum_sat[-1])
    # trapezoid: the plateau value is reached one step after the last visible sample
    flat = bool(np.all(s.cum_sat[w.last_index + 1 :] == plateau))
    reached = w.last_index + 1 < len(s)
    ok = 190_000 <= plateau <= 780_000 and flat and reached
    detail = f"Sigma_sat {plateau:.0f} in [190000, 780000]; flat after window end: {flat}"
    assert criterion("7 cumulative ground pairs", ok, detail)


def test_criterion_08_end_to_end_pairs(criterion, default_run):
    s = default_run.series[0.0]
    cum_end, cum_sat = float(s.cum_end[-1]), float(s.cum_sat[-1])
    ratio = cum_end / cum_sat
    window_mode = default_run.alternate_cum_end
    ok = 10 <= cum_end <= 1000 and 1e-5 <= ratio <= 1e-3
    detail = (
        f"Sigma_end {cum_end:.3g} in [10, 1000] (window-mode {window_mode:.4g}); "
        f"ratio {ratio:.2e} in [1e-5, 1e-3]"
    )
    assert criterion("8 end-to-end pairs", ok, detail)


def test_criterion_09_fidelity_curve(criterion, default_run):
    w = default_run.window
    sl = slice(w.first_index, w.last_index + 1)
    clean = default_run.series[0.0]
    noisy = default_run.series[max(default_run.series)]
    peak = float(clean.fidelity_end[sl].max())
    edges = (float(noisy.fidelity_end[w.first_index]), float(noisy.fidelity_end[w.last_index]))
    el = np.minimum(*(clean.elevation[n][sl] for n in clean.elevation))
    at_peak = el[int(np.argmax(clean.fidelity_end[sl]))]
    top_third = el.min() + 2.0 * (el.max() - el.min()) / 3.0
    ok = 0.78 <= peak <= 0.86 and all(0.25 <= e <= 0.30 for e in edges) and at_peak >= top_third
    detail = (
        f"peak F {peak:.4f} in [0.78, 0.86]; edge F at {max(default_run.series):g}/s "
        f"{edges[0]:.4f}/{edges[1]:.4f} in [0.25, 0.30]; peak elevation {math.degrees(at_peak):.1f} deg "
        f">= top-third bound {math.degrees(top_third):.1f} deg"
    )
    assert criterion("9 fidelity curve", ok, detail)


def test_criterion_10_gate_budget(criterion, default_run):
    pairs = int(math.floor(default_run.series[0.0].cum_end[-1]))
    run = teleport.gate_budget(pairs)
    ref = teleport.gate_budget(99)
    ok = (
        run.cz_gates == pairs
        and run.arbitrary_two_qubit_unitaries == pairs // 3
        and (ref.cz_gates, ref.arbitrary_two_qubit_unitaries) == (99, 33)
    )
    detail = f"run: {pairs} pairs -> {run.cz_gates} CZ, {run.arbitrary_two_qubit_unitaries} unitaries; 99 -> (99, 33)"
    assert criterion("10 gate budget", ok, detail)


def test_criterion_11_determinism(criterion, tmp_path):
    start = time.perf_counter()
    codes = [main(["simulate", "--out", str(tmp_path / d), "--seed", "0"]) for d in ("a", "b")]
    elapsed = (time.perf_counter() - start) / 2
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    same = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes() for f in files)
    ok = codes == [0, 0] and same and len(files) == 4 and elapsed < 30
    assert criterion("11 determinism", ok, f"{len(files)} files byte-identical: {same}; {elapsed:.2f} s per run")
