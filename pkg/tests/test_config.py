"""Config parsing: defaults, overrides, rejection, echo round-trip."""

import pytest

from plaplab import ConfigError, config_echo, parse_config


def write(tmp_path, text):
    p = tmp_path / "run.cfg"
    p.write_text(text)
    return p


def test_empty_config_gets_defaults(tmp_path):
    rc = parse_config(write(tmp_path, ""), experiment="simulate")
    assert rc.get_int("grid", "m") == 257
    assert rc.get_float("grid", "R_dom") == 8.0
    assert rc.get_float("theory", "p") == 4.0
    assert rc.get_float("step", "dt") == 0.01
    assert rc.get_bool("run", "plots") is True
    assert rc.seed() == 20260819


def test_overrides_apply(tmp_path):
    rc = parse_config(
        write(tmp_path, "[grid]\nm = 65\n\n[forcing]\nL = 0.5\n"), "simulate"
    )
    assert rc.get_int("grid", "m") == 65
    assert rc.get_float("forcing", "L") == 0.5
    assert rc.get_float("grid", "R_dom") == 8.0  # untouched default


def test_unknown_section_rejected(tmp_path):
    with pytest.raises(ConfigError) as exc:
        parse_config(write(tmp_path, "[plasma]\nx = 1\n"), "simulate")
    assert "plasma" in str(exc.value)


def test_unknown_key_rejected_with_field(tmp_path):
    with pytest.raises(ConfigError) as exc:
        parse_config(write(tmp_path, "[grid]\nspacing = 0.1\n"), "simulate")
    assert exc.value.field == "grid.spacing"


def test_bad_number_names_field(tmp_path):
    rc = parse_config(write(tmp_path, "[grid]\nm = many\n"), "simulate")
    with pytest.raises(ConfigError) as exc:
        rc.get_int("grid", "m")
    assert exc.value.field == "grid.m"


def test_bad_float_list(tmp_path):
    rc = parse_config(write(tmp_path, "[sweep]\neps_list = 0.4, x\n"), "sweep")
    with pytest.raises(ConfigError) as exc:
        rc.get_floats("sweep", "eps_list")
    assert exc.value.field == "sweep.eps_list"


def test_missing_file():
    with pytest.raises(ConfigError):
        parse_config("/nonexistent/path.cfg", "simulate")


def test_builders_produce_consistent_objects(tmp_path):
    rc = parse_config(write(tmp_path, "[grid]\nm = 33\n\n[weights]\neps = 0.1\n"), "bounds")
    g = rc.build_grid()
    assert g.m == 33
    tp = rc.build_theory()
    assert tp.p == 4.0
    w = rc.build_weight(g)
    assert w.eps == 0.1
    w0 = rc.build_weight(g, eps=0.0)
    assert w0.eps == 0.0
    E = rc.build_energy(g, tp, eps=0.0)
    assert E.p == 4.0
    F = rc.build_forcing(g)
    assert F.lipschitz == 0.25
    step = rc.build_step()
    assert step.dt == 0.01
    pb = rc.build_pullback()
    assert pb.seed == rc.seed()
    assert pb.depth_schedule[0] == 1.0


def test_echo_roundtrip(tmp_path):
    rc = parse_config(write(tmp_path, "[grid]\nm = 65\n\n[run]\nseed = 3\n"), "perturb")
    echoed = tmp_path / "echo.cfg"
    echoed.write_text(config_echo(rc))
    rc2 = parse_config(echoed, experiment="perturb")
    assert rc2.raw == rc.raw
    assert config_echo(rc2) == config_echo(rc)


def test_echo_carries_experiment_line(tmp_path):
    rc = parse_config(write(tmp_path, ""), experiment="sweep")
    assert "experiment = sweep" in config_echo(rc)
