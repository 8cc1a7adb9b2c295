import math

import pytest

from satqin.errors import ConfigurationError
from satqin.scenario import (
    SCHEMA,
    PARAMETER_KEYS,
    build_topology,
    default_scenario,
    load_scenario,
    parse_scenario,
)


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.ini"
    path.write_text("")
    assert load_scenario(path) == default_scenario()
    assert load_scenario(None) == default_scenario()


def test_default_values():
    s = default_scenario()
    assert s.source.rate == 1e9 and s.source.efficiency == 0.25
    assert s.memory.modes == 500 and s.memory.storage_time == 10e-3
    assert s.stations["calern"].receiver_aperture == 1.5
    assert s.stations["palaiseau"].receiver_aperture == 1.0
    assert s.simulation.timeslot == pytest.approx(1e-9)
    assert s.simulation.min_elevation == pytest.approx(math.radians(20))
    assert s.straylight_levels == (0.0, 1e3, 1e5)
    assert s.orbit.greenwich_angle_at_epoch == pytest.approx(100.8995, abs=1e-3)


def test_out_of_range_names_key():
    with pytest.raises(ConfigurationError, match=r"detectors\.efficiency"):
        parse_scenario("[detectors]\nefficiency = 1.2\n")
    with pytest.raises(ConfigurationError, match=r"bsm\.efficiency"):
        parse_scenario("[bsm]\nefficiency = 0.7\n")


def test_explicit_rate():
    s = parse_scenario("[source]\nrate_hz = 1e9  # pairs/s\n")
    assert s.source.rate == 1e9


def test_overrides_reach_topology():
    s = parse_scenario(
        "[stations.calern]\nreceiver_aperture_m = 2.0\n"
        "[fiber]\nparis_lengths_km = 10, 20\n"
        "[simulation]\nsat_window_mode = true\n"
    )
    topo = build_topology(s)
    assert topo.links[1].right_optics.receiver_aperture == 2.0
    assert (topo.links[0].left_channel.length, topo.links[0].right_channel.length) == (10.0, 20.0)
    assert topo.sat_window_mode
    assert not build_topology(s, sat_window_mode=False).sat_window_mode


@pytest.mark.parametrize(
    "text,match",
    [
        ("[nonsense]\nx = 1\n", "nonsense"),
        ("[memory]\nsize = 3\n", r"memory\.size"),
        ("[memory]\nmodes = many\n", r"memory\.modes"),
        ("[fiber]\nnice_lengths_km = 1, 2, 3\n", "nice_lengths_km"),
        ("[simulation]\nt0_s = 10\nt1_s = 5\n", r"simulation\.t1_s"),
        ("[orbit]\nepoch_utc = yesterday\n", r"orbit\.epoch_utc"),
        ("not an ini file", "parse"),
    ],
)
def test_rejections(text, match):
    with pytest.raises(ConfigurationError, match=match):
        parse_scenario(text)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_scenario(tmp_path / "absent.ini")


def test_parameter_table_coverage():
    paths = list(PARAMETER_KEYS.values())
    assert len(paths) == len(set(paths)) == 27
    s = default_scenario()
    for path in paths:
        section, _, key = path.rpartition(".")
        assert key in SCHEMA[section]
        s.get(path)


def test_shipped_scenario_matches_defaults():
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "scenarios" / "default.ini"
    assert load_scenario(path) == default_scenario()
