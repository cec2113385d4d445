import json
import math

import numpy as np
import pytest

from formationsim import cli, config
from formationsim.errors import ConfigError

PRESET = config.preset_path("vshape5")


def test_preset_loads_and_matches_tables():
    sc, _ = config.load_scenario(PRESET)
    assert sc.n == 5
    assert sc.params.mass == pytest.approx(9295.44)
    assert sc.params.wing_area == pytest.approx(27.87)
    assert sc.params.drag_coeff == pytest.approx(0.0794)
    assert sc.graph.adjacency.sum(axis=1).tolist() == [2, 3, 4, 3, 2]
    # offsets resolved from wing-span multiples
    assert np.allclose(sc.layout.offsets[0], [8 * 9.144, 0.0, 0.0])
    assert np.allclose(sc.layout.offsets[4], [-6 * 9.144, -9.144, 0.0])
    assert sc.center_initial.position.tolist() == [26.87, 200.0, -5000.0]
    assert sc.command.rates_at(20.0) == (0.0, math.pi / 60, math.pi / 1080)
    assert sc.vehicle_initial[2].course_angle == pytest.approx(math.pi / 120)
    assert np.allclose(sc.ude_time_constants, 0.2)
    assert sc.dt == 0.01 and sc.duration == 120.0


def test_parse_number_expressions():
    assert config.parse_number("pi/60") == pytest.approx(math.pi / 60)
    assert config.parse_number("-pi/1080") == pytest.approx(-math.pi / 1080)
    assert config.parse_number("2*(1+3)") == 8.0
    assert config.parse_number(5) == 5.0


def test_parse_number_rejects_junk():
    for bad in ("__import__('os')", "pi;", "abc", True, None):
        with pytest.raises(ConfigError):
            config.parse_number(bad)


def test_override_by_axis_letter():
    sc, resolved = config.load_scenario(PRESET, [("controller.Kp.x", "0.5")])
    assert sc.controller_gains.k_p[0] == 0.5
    assert resolved["controller"]["Kp"][0] == 0.5


def test_override_by_one_based_index():
    sc, _ = config.load_scenario(PRESET, [("vehicles.initial.2.V", "130")])
    assert sc.vehicle_initial[1].total_speed == 130.0


def test_override_whole_list():
    sc, _ = config.load_scenario(
        PRESET, [("disturbance.kind", "constant"),
                 ("disturbance.constant", "[1.0, 0.01, 0.0]")]
    )
    assert sc.disturbance.kind == "constant"
    assert sc.disturbance.constant == (1.0, 0.01, 0.0)


def test_override_bad_index():
    with pytest.raises(ConfigError):
        config.load_scenario(PRESET, [("vehicles.initial.9.V", "130")])


def test_malformed_config_names_key(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text(
        (open(PRESET).read()).replace("[1, 2]", "[0, 2]")
    )
    with pytest.raises(ConfigError) as err:
        config.load_scenario(p)
    assert "graph.edges" in str(err.value)


def test_edges_must_be_in_range(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text(open(PRESET).read().replace("n: 5", "n: 4"))
    with pytest.raises(ConfigError):
        config.load_scenario(p)


def test_unknown_preset():
    with pytest.raises(ConfigError):
        config.preset_path("nosuch")


def test_cli_run_writes_artifacts(tmp_path):
    out = tmp_path / "out"
    code = cli.main([
        "run", "--scenario", PRESET, "--out", str(out),
        "--set", "sim.duration=1.0", "--decimate", "10",
    ])
    assert code == 0
    assert (out / "log.csv").exists()
    assert (out / "scenario_resolved.cfg").exists()
    m = json.loads((out / "metrics.json").read_text())
    assert len(m["vehicles"]) == 5
    header = (out / "log.csv").read_text().splitlines()[0]
    assert header.startswith("t,xc,yc,zc")


def test_cli_run_echoes_override(tmp_path):
    out = tmp_path / "out"
    code = cli.main([
        "run", "--scenario", PRESET, "--out", str(out),
        "--set", "controller.Kp.x=0.5", "--set", "sim.duration=0.2",
    ])
    assert code == 0
    assert "0.5" in (out / "scenario_resolved.cfg").read_text()


def test_cli_validation_failure_exit_code(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("uav: 3\n")
    assert cli.main(["run", "--scenario", str(bad), "--out",
                     str(tmp_path / "o")]) == cli.EXIT_VALIDATION


def test_cli_bad_override_exit_code(tmp_path):
    assert cli.main([
        "run", "--scenario", PRESET, "--out", str(tmp_path / "o"),
        "--set", "nonsense",
    ]) == cli.EXIT_VALIDATION


def test_cli_check_suite_passes(capsys):
    assert cli.main(["check", "conversions"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out


def test_cli_unknown_suite_is_usage_error():
    with pytest.raises(SystemExit) as err:
        cli.main(["check", "nosuch"])
    assert err.value.code != 0


def test_csv_floats_roundtrip_17_digits(tmp_path):
    out = tmp_path / "out"
    cli.main(["run", "--scenario", PRESET, "--out", str(out),
              "--set", "sim.duration=0.1"])
    data = np.loadtxt(out / "log.csv", delimiter=",", skiprows=1)
    # 17 significant digits print/parse is lossless for doubles
    txt = (out / "log.csv").read_text().splitlines()
    row = np.array([float(v) for v in txt[1].split(",")])
    assert np.array_equal(row, data[0])
