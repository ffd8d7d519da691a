"""配置加载、覆盖项解析与实验参数校验。"""

import logging

import pytest

from config import Config, ConfigError, ExperimentConfig
from logger import resolve_level

DEFAULTS = {"d": 3, "eps": 0.1, "slices": [2, 4], "seed": None}


def test_missing_default_file_uses_empty_config(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("CONFIG_PATH", str(tmp_path / "absent.yaml"))
    config = Config(required=False)
    assert config.config == {}


def test_explicit_missing_file_is_an_error(tmp_path):
    with pytest.raises(ConfigError):
        Config(str(tmp_path / "absent.yaml"))


def test_load_yaml_file(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("LEVEL: DEBUG\nEXPERIMENT: map\nPARAMS:\n  seed: 7\n  d: 2\n", encoding="utf-8")
    config = Config(str(path))
    assert config.get("EXPERIMENT") == "map"
    assert config.get_nested("PARAMS.seed") == 7
    assert config.get_nested("PARAMS.missing", "x") == "x"


def test_unknown_top_level_key(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("DB_HOST: localhost\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        Config(str(path))


def test_malformed_yaml(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("PARAMS: [unclosed\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        Config(str(path))


def test_overrides_route_bare_keys():
    config = Config.from_mapping({})
    config.apply_overrides(["seed=3", "LEVEL=DEBUG", "NUMERIC.equality_tol=1e-9", "slices=[2, 6]"])
    assert config.get_nested("PARAMS.seed") == 3
    assert config.get("LEVEL") == "DEBUG"
    assert config.get_nested("NUMERIC.equality_tol") == 1e-9
    assert config.get_nested("PARAMS.slices") == [2, 6]


@pytest.mark.parametrize("item", ["noequals", "=5", "BOGUS.key=1"])
def test_bad_overrides(item):
    with pytest.raises(ConfigError):
        Config.from_mapping({}).apply_overrides([item])


def test_build_merges_defaults():
    config = Config.from_mapping({"PARAMS": {"seed": 5, "d": 2.0}, "NUMERIC": {"equality_tol": 1e-8}})
    built = ExperimentConfig.build(config, DEFAULTS, randomized=True, experiment="map")
    assert built.params == {"d": 2, "eps": 0.1, "slices": [2, 4], "seed": 5}
    assert isinstance(built.params["d"], int)
    assert built.policy.equality_tol == 1e-8
    assert built.overridden == ["d", "seed"]
    assert str(built.output_dir) == "output"


def test_randomized_experiment_requires_seed():
    with pytest.raises(ConfigError):
        ExperimentConfig.build(Config.from_mapping({}), DEFAULTS, randomized=True, experiment="map")
    ExperimentConfig.build(Config.from_mapping({}), DEFAULTS, randomized=False, experiment="map")


@pytest.mark.parametrize("params", [
    {"seed": -1},
    {"seed": True},
    {"seed": 1.5},
    {"seed": 1, "unknown": 2},
    {"seed": 1, "d": "three"},
    {"seed": 1, "d": 2.5},
])
def test_invalid_params(params):
    with pytest.raises(ConfigError):
        ExperimentConfig.build(Config.from_mapping({"PARAMS": params}), DEFAULTS, randomized=True, experiment="map")


def test_unknown_numeric_policy_key():
    config = Config.from_mapping({"PARAMS": {"seed": 1}, "NUMERIC": {"bogus": 1}})
    with pytest.raises(ConfigError):
        ExperimentConfig.build(config, DEFAULTS, randomized=True, experiment="map")


def test_experiment_name_required():
    with pytest.raises(ConfigError):
        ExperimentConfig.build(Config.from_mapping({}), DEFAULTS, randomized=False)


def test_resolve_level():
    assert resolve_level("debug") == logging.DEBUG
    assert resolve_level("nonsense") == logging.INFO
