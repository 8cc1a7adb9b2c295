"""Command line entry point: ``satqin {pass,simulate,verify,mc}``.

Exit codes: 0 success, 1 verification or statistical failure, 2 scenario or
geometry failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from collections.abc import Sequence
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np

from satqin import teleport
from satqin.chain import SimulationSeries, cumulate, elementary_link_efficiency, simulate_pass
from satqin.errors import ConfigurationError
from satqin.montecarlo import link_components, monte_carlo_elementary
from satqin.orbit import PassSample, VisibilityWindow, find_dual_visibility, sample_pass
from satqin.scenario import Scenario, build_topology, load_scenario
from satqin.verify import CheckResult, run_checks

EXIT_OK, EXIT_CHECK, EXIT_SCENARIO = 0, 1, 2
DIGITS = 12


class NoVisibilityError(RuntimeError):
    pass


def fmt(x: float) -> str:
    return f"{x:.{DIGITS}g}"


def rounded(x: float) -> float:
    return float(fmt(x))


def write_csv(path: Path, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*(columns[n] for n in names)):
            writer.writerow([fmt(float(v)) for v in row])


def straylight_tag(level: float) -> str:
    return f"{level:g}".replace("+", "")


def series_filename(level: float) -> str:
    return f"series_straylight_{straylight_tag(level)}hz.csv"


def pass_samples(scenario: Scenario) -> list[PassSample]:
    sim = scenario.simulation
    return sample_pass(scenario.orbit, scenario.earth, scenario.station_points(), sim.t0, sim.t1, sim.dt)


def main_window(scenario: Scenario, samples: Sequence[PassSample]) -> VisibilityWindow:
    windows = find_dual_visibility(samples, scenario.simulation.min_elevation)
    if not windows:
        raise NoVisibilityError(geometry_report(scenario, samples))
    return max(windows, key=lambda w: w.duration)


def geometry_report(scenario: Scenario, samples: Sequence[PassSample]) -> str:
    lines = [
        f"no dual-visibility window above {math.degrees(scenario.simulation.min_elevation):g} deg "
        f"between t={scenario.simulation.t0:g} s and t={scenario.simulation.t1:g} s"
    ]
    for name in scenario.stations:
        peak = max(s.elevation(name) for s in samples)
        lines.append(f"  {name}: max elevation {math.degrees(peak):.2f} deg")
    joint = max(min(el for el, _ in s.stations.values()) for s in samples)
    lines.append(f"  best joint elevation {math.degrees(joint):.2f} deg")
    return "\n".join(lines)


@dataclass
class RunResult:
    window: VisibilityWindow
    series: dict[float, SimulationSeries]
    alternate_cum_end: float
    summary: dict[str, Any]


def fidelity_stats(series: SimulationSeries, window: VisibilityWindow) -> dict[str, float]:
    sl = slice(window.first_index, window.last_index + 1)
    f = series.fidelity_end[sl]
    t = series.time[sl]
    return {
        "peak": rounded(float(f.max())),
        "floor": rounded(float(f.min())),
        "peak_time_s": rounded(float(t[int(np.argmax(f))])),
        "window_start": rounded(float(f[0])),
        "window_end": rounded(float(f[-1])),
    }


def pairs_above_floor(series: SimulationSeries, floor: float) -> float:
    rate = np.where(series.fidelity_end >= floor, series.sigma_end, 0.0)
    return float(cumulate(series.time, rate)[-1])


def run_simulate(scenario: Scenario, levels: Sequence[float] | None = None) -> RunResult:
    levels = tuple(scenario.straylight_levels if levels is None else levels)
    if not levels:
        raise ConfigurationError("straylight.levels_hz: at least one level is required")
    samples = pass_samples(scenario)
    window = main_window(scenario, samples)
    topology = build_topology(scenario)
    series = {level: simulate_pass(topology, samples, level) for level in levels}
    alternate = build_topology(scenario, sat_window_mode=not scenario.simulation.sat_window_mode)
    alt_series = simulate_pass(alternate, samples, levels[0])

    first = series[levels[0]]
    cum_sat = float(first.cum_sat[-1])
    cum_end = float(first.cum_end[-1])
    mode = "window" if scenario.simulation.sat_window_mode else "per_attempt"
    other = "per_attempt" if mode == "window" else "window"
    budget = teleport.gate_budget(int(math.floor(cum_end)))
    summary: dict[str, Any] = {
        "pass": {
            "window_start_s": rounded(window.start),
            "window_end_s": rounded(window.end),
            "duration_s": rounded(window.duration),
            "min_elevation_deg": rounded(math.degrees(scenario.simulation.min_elevation)),
        },
        "rates": {
            "peak_sigma_sat_pairs_per_s": rounded(float(first.sigma_sat.max())),
            "cum_sat_pairs": rounded(cum_sat),
            "cum_end_pairs": rounded(cum_end),
            "end_to_ground_ratio": rounded(cum_end / cum_sat) if cum_sat > 0 else 0.0,
            "sat_link_mode": mode,
            "cum_end_pairs_by_sat_mode": {
                mode: rounded(cum_end),
                other: rounded(float(alt_series.cum_end[-1])),
            },
            "strict_eq1": scenario.simulation.strict_eq1,
        },
        "fidelity": {straylight_tag(level): fidelity_stats(s, window) for level, s in series.items()},
        "gate_budget": asdict(budget),
    }
    floor = scenario.simulation.fidelity_floor
    if floor is not None:
        summary["gate_budget_above_fidelity_floor"] = {
            "floor": floor,
            **{
                straylight_tag(level): asdict(teleport.gate_budget(int(math.floor(pairs_above_floor(s, floor)))))
                for level, s in series.items()
            },
        }
    return RunResult(window, series, float(alt_series.cum_end[-1]), summary)


def write_simulation(result: RunResult, out: Path) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for level, series in result.series.items():
        path = out / series_filename(level)
        write_csv(path, series.columns())
        written.append(path)
    summary_path = out / "summary.json"
    summary_path.write_text(json.dumps(result.summary, indent=2) + "\n", encoding="utf-8")
    written.append(summary_path)
    return written


def run_verify(bell: dict[str, np.ndarray] = teleport.BELL) -> list[CheckResult]:
    return run_checks(bell)


@dataclass(frozen=True)
class McRow:
    link: str
    modes: int
    closed_form: float
    estimate: float
    standard_error: float
    z: float


def run_mc(scenario: Scenario, trials: int, seed: int | None = None) -> list[McRow]:
    if trials < 100:
        raise ConfigurationError(f"--trials must be >= 100, got {trials}")
    seed = scenario.simulation.seed if seed is None else seed
    topology = build_topology(scenario)
    samples = pass_samples(scenario)
    window = main_window(scenario, samples)
    in_window = samples[window.first_index : window.last_index + 1]
    space = topology.space_link()
    culmination = max(in_window, key=lambda s: min(s.elevation(space.left_station), s.elevation(space.right_station)))
    rows = []
    for i, link in enumerate(topology.links):
        sample = culmination if link is space else None
        closed = elementary_link_efficiency(link, topology.modes, topology.timeslot, sample)
        comps = link_components(link, topology.modes, topology.timeslot, sample)
        est = monte_carlo_elementary(comps, trials, seed + i)
        rows.append(McRow(link.name, topology.modes, closed, est.estimate, est.standard_error, est.z_score(closed)))
    return rows


def mc_table(rows: Sequence[McRow]) -> str:
    header = f"{'link':<10} {'N':>5} {'closed_form':>14} {'monte_carlo':>14} {'std_error':>12} {'z':>8}"
    lines = [header]
    for r in rows:
        lines.append(
            f"{r.link:<10} {r.modes:>5} {r.closed_form:>14.8g} {r.estimate:>14.8g} "
            f"{r.standard_error:>12.4g} {r.z:>8.3f}"
        )
    return "\n".join(lines)


def _levels(text: str | None) -> tuple[float, ...] | None:
    if text is None:
        return None
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigurationError(f"--straylight: cannot parse {text!r}") from None


def _apply_overrides(scenario: Scenario, args: argparse.Namespace) -> Scenario:
    if getattr(args, "seed", None) is not None:
        scenario = replace(scenario, simulation=replace(scenario.simulation, seed=args.seed))
    return scenario


def cmd_pass(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    samples = pass_samples(scenario)
    names = sorted(scenario.stations)
    columns: dict[str, np.ndarray] = {"time_s": np.array([s.time for s in samples])}
    for name in names:
        columns[f"elevation_{name}_rad"] = np.array([s.elevation(name) for s in samples])
        columns[f"slant_range_{name}_m"] = np.array([s.slant_range(name) for s in samples])
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / "pass.csv", columns)
    windows = find_dual_visibility(samples, scenario.simulation.min_elevation)
    if not windows:
        print(geometry_report(scenario, samples), file=sys.stderr)
        return EXIT_SCENARIO
    for w in windows:
        print(f"dual visibility {w.start:g} s -> {w.end:g} s ({w.duration:g} s)")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = _apply_overrides(load_scenario(args.scenario), args)
    try:
        result = run_simulate(scenario, _levels(args.straylight))
    except NoVisibilityError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_SCENARIO
    for path in write_simulation(result, Path(args.out)):
        print(f"wrote {path}")
    print(json.dumps(result.summary, indent=2))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_verify()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_mc(args: argparse.Namespace) -> int:
    scenario = _apply_overrides(load_scenario(args.scenario), args)
    trials = args.trials if args.trials is not None else scenario.simulation.trials
    try:
        rows = run_mc(scenario, trials)
    except NoVisibilityError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_SCENARIO
    table = mc_table(rows)
    print(table)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "mc.txt").write_text(table + "\n", encoding="utf-8")
    return EXIT_CHECK if any(abs(r.z) > 5 for r in rows) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="satqin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pass", help="sample pass geometry and report dual-visibility windows")
    p.add_argument("--scenario", help="scenario file (defaults when omitted)")
    p.add_argument("--out", help="directory for pass.csv")
    p.set_defaults(func=cmd_pass)

    s = sub.add_parser("simulate", help="rate and fidelity series over the pass")
    s.add_argument("--scenario")
    s.add_argument("--out", default="out", help="output directory (default: out)")
    s.add_argument("--seed", type=int)
    s.add_argument("--straylight", help="comma separated straylight levels, counts/s")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="check analytic identities and the Bell expansion")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("mc", help="Monte Carlo vs closed-form elementary link efficiency")
    m.add_argument("--scenario")
    m.add_argument("--out")
    m.add_argument("--seed", type=int)
    m.add_argument("--trials", type=int)
    m.set_defaults(func=cmd_mc)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO


if __name__ == "__main__":
    sys.exit(main())
