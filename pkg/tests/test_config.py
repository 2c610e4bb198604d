"""Flat dotted-key experiment configuration."""

import pytest

from pinsker.config import KEYS, ConfigError, ExperimentConfig, load_config, parse_config

GOOD = """
# model
model.function = S2
model.k = 2
model.r = 3.5
model.scale.kind = quadratic
model.scale.c0 = 1.0
model.scale.c3 = 0.25   # volume term
model.noise = gaussian, uniform
run.ns = 101, 301
run.M = 50
run.seed = 17
lowerbound.N_rule = 7
"""


def test_parse_types(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(GOOD)
    cfg = load_config(path)
    assert cfg.function == "S2" and cfg.k == 2 and cfg.r == 3.5
    assert cfg.c3 == 0.25
    assert cfg.ns == (101, 301) and cfg.M == 50 and cfg.seed == 17
    assert cfg.lb_N_rule == 7
    assert [d.tag for d in cfg.densities] == ["gaussian", "uniform"]
    assert cfg.scale_family().params["c3"] == 0.25


def test_overrides_win_and_none_is_ignored(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(GOOD)
    cfg = load_config(path, seed=99, M=None)
    assert cfg.seed == 99 and cfg.M == 50


def test_defaults_need_seed():
    with pytest.raises(ConfigError) as info:
        load_config()
    assert info.value.field == "run.seed"
    assert load_config(seed=1) == ExperimentConfig(seed=1)


@pytest.mark.parametrize("line, field", [
    ("run.ns = 100", "run.ns"),
    ("run.M = 1", "run.M"),
    ("model.function = S7", "model.function"),
    ("model.scale.c0 = 0", "model.scale.c0"),
    ("model.scale.c3 = 1", "model.scale.c3"),
    ("model.noise = cauchy", "model.noise"),
    ("estimator.xi_star = 2", "estimator.xi_star"),
    ("lowerbound.eta = 0.6", "lowerbound.eta"),
    ("lowerbound.N_rule = cubic", "lowerbound.N_rule"),
    ("run.M = many", "run.M"),
    ("run.colour = blue", "run.colour"),
])
def test_errors_name_the_field(line, field):
    with pytest.raises(ConfigError) as info:
        ExperimentConfig(**parse_config(line + "\nrun.seed = 1")).replace(seed=1).validate()
    assert info.value.field == field
    assert field in str(info.value)


def test_case_sensitive_keys():
    with pytest.raises(ConfigError):
        parse_config("run.m = 5")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.cfg")


def test_every_key_maps_to_a_field():
    fields = set(ExperimentConfig.__dataclass_fields__)
    assert all(attr in fields for attr, _ in KEYS.values())
