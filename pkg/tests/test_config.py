import math

import pytest

from invivolink.config import ConfigError, load_config


def write(tmp_path, text):
    p = tmp_path / "run.yaml"
    p.write_text(text)
    return str(p)


def test_defaults_without_file():
    cfg = load_config()
    assert cfg.get("budget", "power_mw") == 0.412
    assert cfg.get("budget", "noise_dbm_per_hz") == -174.0
    assert cfg.get("budget", "bandwidth_mhz") == 20.0
    assert cfg.get("budget", "n_data") == 52
    assert cfg.get("budget", "t_sym_us") == 4.0
    assert cfg.get("sim", "max_frames") == 100_000
    b = cfg.budget(2)
    assert b.power_w == pytest.approx(0.412e-3)
    assert b.n_streams == 2


def test_file_values_applied(tmp_path):
    path = write(tmp_path, "budget:\n  bandwidth_mhz: 40\nsim:\n  seed: 77\n")
    cfg = load_config(path)
    assert cfg.get("budget", "bandwidth_mhz") == 40.0
    assert cfg.get("sim", "seed") == 77


def test_unknown_key_rejected(tmp_path):
    path = write(tmp_path, "budget:\n  powr_mw: 1\n")
    with pytest.raises(ConfigError, match="budget.powr_mw"):
        load_config(path)


def test_unknown_section_rejected(tmp_path):
    path = write(tmp_path, "budgets:\n  power_mw: 1\n")
    with pytest.raises(ConfigError, match="budgets"):
        load_config(path)


def test_type_errors(tmp_path):
    with pytest.raises(ConfigError, match="budget.n_data"):
        load_config(write(tmp_path, "budget:\n  n_data: 52.5\n"))
    with pytest.raises(ConfigError, match="sim.mcs"):
        load_config(write(tmp_path, "sim:\n  mcs: 3\n"))
    with pytest.raises(ConfigError, match="budget.sar_cap"):
        load_config(write(tmp_path, "budget:\n  sar_cap: 3\n"))


def test_yaml_syntax_error_has_location(tmp_path):
    path = write(tmp_path, "budget:\n  power_mw: [unclosed\n")
    with pytest.raises(ConfigError, match="line"):
        load_config(path)


def test_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        load_config("/nonexistent/run.yaml")


def test_overrides_win(tmp_path):
    path = write(tmp_path, "sim:\n  seed: 5\n  max_frames: 10\n")
    cfg = load_config(path, overrides={"sim.seed": 9, "sim.max_frames": None})
    assert cfg.get("sim", "seed") == 9
    assert cfg.get("sim", "max_frames") == 10  # None override is "not given"


def test_sar_warning_emitted(tmp_path):
    warnings = []
    load_config(write(tmp_path, "budget:\n  power_mw: 1.0\n  sar_cap: false\n"),
                warn=warnings.append)
    assert len(warnings) == 1 and "SAR" in warnings[0]
    # budget construction succeeds because the cap flag is off
    cfg = load_config(write(tmp_path, "budget:\n  power_mw: 1.0\n  sar_cap: false\n"),
                      warn=lambda m: None)
    assert cfg.budget(2).power_w == pytest.approx(1e-3)


def test_sar_cap_enforced_fails_budget(tmp_path):
    cfg = load_config(write(tmp_path, "budget:\n  power_mw: 1.0\n"),
                      warn=lambda m: None)
    with pytest.raises(ConfigError, match="SAR"):
        cfg.budget(2)


def test_bad_case_and_mcs_ranges(tmp_path):
    with pytest.raises(ConfigError, match="case 9"):
        load_config(write(tmp_path, "run:\n  cases: [1, 9]\n"))
    with pytest.raises(ConfigError, match="16"):
        load_config(write(tmp_path, "sim:\n  mcs: [16]\n"))


def test_bad_detector(tmp_path):
    with pytest.raises(ConfigError, match="detector"):
        load_config(write(tmp_path, "sim:\n  detector: ml\n"))


def test_noise_override_minus_inf(tmp_path):
    path = write(tmp_path, "sim:\n  noise_override_dbm_per_hz: -.inf\n")
    cfg = load_config(path)
    assert cfg.budget(1).noise_density_w_per_hz == 0.0


def test_config_hash_stable_and_sensitive(tmp_path):
    a = load_config(write(tmp_path, "sim:\n  seed: 5\n"))
    b = load_config(write(tmp_path, "sim:\n  seed: 5\n"))
    c = load_config(write(tmp_path, "sim:\n  seed: 6\n"))
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != c.config_hash()


def test_path_model_built_from_config(tmp_path):
    cfg = load_config(write(tmp_path, "model:\n  exponent: 4.5\n  carrier_ghz: 2.4\n"))
    m = cfg.path_model()
    assert m.exponent == 4.5
    assert m.carrier_hz == pytest.approx(2.4e9)
    assert math.isclose(m.path_loss_db(70.0), 60.0)
