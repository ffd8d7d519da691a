"""实验注册表与命令行：列表、参数校验、退出码、输出的可复现性。"""

import json

import pytest

from config import ConfigError
from constants import ExperimentNames
from experiments import REGISTRY, Experiment, get_experiment, list_experiments, register
from kg_modes import AccuracyError
from lattice import ProbeError, StabilityError
from main import EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_PASS, main
from models import NumericPolicy
from operator_core import ShapeError


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("CONFIG_PATH", str(tmp_path / "absent.yaml"))
    return tmp_path


def _run(workdir, *args, output="output"):
    return main(["run", *args, "--output-dir", str(workdir / output), "--set", f"LOG_DIR={workdir / 'logs'}"])


def test_registry_matches_names():
    names = [name for name, _ in list_experiments()]
    assert len(names) == len(set(names)) == 14
    expected = {value for key, value in vars(ExperimentNames).items() if not key.startswith("_")}
    assert set(names) == expected


def test_randomized_experiments_declare_seed():
    for experiment in REGISTRY.values():
        assert ("seed" in experiment.defaults) == experiment.randomized
    assert get_experiment("map").randomized
    assert not get_experiment("matsubara").randomized


def test_unknown_experiment():
    with pytest.raises(ConfigError):
        get_experiment("nope")


def test_duplicate_registration_is_rejected():
    with pytest.raises(ValueError):
        register("map", "重复")(lambda params, policy: None)


def test_list_command(capsys):
    assert main(["list"]) == EXIT_PASS
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 14
    assert lines[0].split("\t")[0] == "map"


@pytest.mark.parametrize("args", [
    ("map",),
    ("nope", "seed=1"),
    ("p0-modes", "bogus=1"),
    ("p0-modes", "slices=two"),
])
def test_invalid_invocations_exit_2(workdir, args):
    assert _run(workdir, *args) == EXIT_INVALID
    assert not (workdir / "output" / args[0] / "report.json").exists()


def test_missing_experiment_name(workdir):
    assert _run(workdir) == EXIT_INVALID


def test_run_writes_report(workdir):
    assert _run(workdir, "p0-modes", "slices=3") == EXIT_PASS
    payload = json.loads((workdir / "output" / "p0-modes" / "report.json").read_text(encoding="utf-8"))
    assert payload["overall_pass"] is True
    assert payload["parameters"] == {"slices": 3, "eps": 0.2}
    assert (workdir / "output" / "p0-modes" / "p0_modes.csv").exists()


def test_experiment_option_and_config_file(workdir):
    config = workdir / "config.yaml"
    config.write_text("EXPERIMENT: vacuum-scaling\nPARAMS:\n  points: 11\n", encoding="utf-8")
    assert main(["run", "--config", str(config), "--output-dir", str(workdir / "a"),
                 "--set", f"LOG_DIR={workdir / 'logs'}"]) == EXIT_PASS
    assert (workdir / "a" / "vacuum-scaling" / "report.json").exists()
    assert _run(workdir, "--experiment", "matsubara", "points=3", output="b") == EXIT_PASS
    assert (workdir / "b" / "matsubara" / "matsubara.csv").exists()


def test_failed_check_exits_1(workdir):
    # 零容差下 Fourier 重建的舍入误差即判为失败
    assert _run(workdir, "p0-modes", "--set", "NUMERIC.equality_tol=0") == EXIT_CHECK_FAILED
    payload = json.loads((workdir / "output" / "p0-modes" / "report.json").read_text(encoding="utf-8"))
    assert payload["overall_pass"] is False


@pytest.mark.parametrize("error, code", [
    (AccuracyError("误差界 2e-3 超过容差", 2e-3), EXIT_CHECK_FAILED),
    (StabilityError("场范数增长过快"), EXIT_CHECK_FAILED),
    (ProbeError("采样点落在块外"), EXIT_CHECK_FAILED),
    (ShapeError("形状不符"), EXIT_INVALID),
])
def test_runtime_errors_map_to_exit_codes(workdir, monkeypatch, error, code):
    def runner(params, policy):
        raise error

    monkeypatch.setitem(REGISTRY, "raising", Experiment("raising", "运行中抛错", {}, False, runner))
    assert _run(workdir, "raising") == code


def test_map_output_is_byte_identical(workdir):
    params = ("map", "d=2", "max_slices=2", "trials=5", "seed=3")
    assert _run(workdir, *params, "workers=1", output="one") == EXIT_PASS
    assert _run(workdir, *params, "workers=3", output="two") == EXIT_PASS
    for name in ("map_trials.csv", "swap_test.csv"):
        first = (workdir / "one" / "map" / name).read_bytes()
        assert first == (workdir / "two" / "map" / name).read_bytes()


@pytest.mark.parametrize("name, overrides", [
    ("p0-modes", {}),
    ("vacuum-scaling", {}),
    ("matsubara", {}),
    ("thermal", {"seed": 11}),
    ("timedep-map", {"seed": 5, "trials": 10, "workers": 1}),
    ("qubit-appendix-d", {"seed": 2, "draws": 3}),
    ("classical-kg", {}),
    ("pb-generators", {}),
])
def test_fast_experiments_pass(name, overrides):
    experiment = get_experiment(name)
    params = {**experiment.defaults, **overrides}
    result = experiment.runner(params, NumericPolicy())
    failed = [c.name for c in result.checks if not c.passed]
    assert result.checks and not failed
    assert result.tables
