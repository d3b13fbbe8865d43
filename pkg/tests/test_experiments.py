import numpy as np
import pandas as pd
import pytest
import yaml

from isoq import setup_config
from isoq.exceptions import CheckFailed, ConfigError
from isoq.experiments import EXPERIMENTS, build_config, hiding_pgm, run
from isoq.report import read_table

SMALL = {
    "net-build": dict(eps=1.0),
    "hiding-sample": dict(n=4, nb=2, seeds=2),
    "hiding-pgm": dict(n=6, nb=2, seeds=3),
    "hiding-game": dict(n=4, nb=2, eps=1.0, seeds=2),
    "hiding-search": dict(n=2, nb=1, eps=1.0, seeds=1),
    "hiding-collision": dict(n=4, nb=2, eps=1.0, samples=50, seeds=1),
    "otm-sample": dict(n=16, k=2, seeds=2),
    "otm-encode": dict(n=16, k=2, seeds=2),
    "otm-honest": dict(n=32, k=2, trials=20, seeds=1),
    "otm-leak": dict(n=4, k=2, seeds=2),
    "otm-info": dict(n=3, k=1, eps=1.0, depth=1, seeds=1),
    "otm-collision": dict(n=4, k=2, eps=1.0, samples=50, seeds=1),
    "otm-phases": dict(n=4, k=2, seeds=2),
    "codes-params": dict(n=1000),
    "codes-bound": dict(n=1000),
    "codes-montecarlo": dict(n=16, k=2, trials=20, seeds=2),
}


@pytest.fixture(scope="module")
def settings():
    return setup_config()


def _config(settings, experiment, tmp_path=None, **overrides):
    if tmp_path is not None:
        overrides.setdefault("out", str(tmp_path / f"{experiment}.csv"))
    return build_config(experiment, settings, overrides)


def test_layers(settings):
    config = build_config("otm-honest", settings, {"trials": 5, "k": None})
    assert config.n == 64 and config.k == 8
    assert config.trials == 5
    assert config.theta == 0.05
    assert config.cap == settings["caps"]["max_enumeration"]
    assert config.output_path.endswith("otm-honest.csv")


def test_custom_file_updates_nested_sections(tmp_path):
    path = tmp_path / "custom.yaml"
    with open(path, "w") as handle:
        yaml.safe_dump({"experiments": {"otm-leak": {"seeds": 3}}}, handle)
    config = setup_config(str(path))
    assert config["experiments"]["otm-leak"] == {"n": 8, "k": 3, "seeds": 3}
    assert "defaults" in config["experiments"]
    with pytest.raises(OSError):
        setup_config(str(tmp_path / "missing.yaml"))


def test_unknown_setting(settings):
    with pytest.raises(ConfigError):
        build_config("codes-params", settings, {"colour": 1})
    with pytest.raises(ConfigError):
        build_config("codes-params", settings, {"n": "many"})


@pytest.mark.parametrize(
    "experiment, overrides",
    [
        ("hiding-pgm", dict(nb=11, n=10)),
        ("hiding-pgm", dict(n=15, nb=2)),
        ("otm-leak", dict(k=7)),
        ("otm-leak", dict(n=13)),
        ("otm-collision", dict(h=1.0)),
        ("hiding-search", dict(n=3, nb=1, eps=0.2, cap=100)),
        ("codes-params", dict(theta=0.01)),
        ("codes-bound", dict(lam=0.5)),
        ("net-build", dict(eps=0.0)),
        ("otm-honest", dict(side="X")),
        ("codes-params", dict(format="xml")),
        ("codes-params", dict(float_format="%d %d")),
    ],
)
def test_invalid_configurations(settings, experiment, overrides):
    with pytest.raises(ConfigError):
        _config(settings, experiment, **overrides).validate()


def test_unknown_experiment(settings):
    with pytest.raises(ConfigError):
        _config(settings, "hiding-everything").validate()


@pytest.mark.parametrize("experiment", sorted(SMALL))
def test_every_experiment_writes_a_table(settings, tmp_path, experiment):
    summary = run(_config(settings, experiment, tmp_path, **SMALL[experiment]))
    df = read_table(summary["path"])
    assert summary["rows"] == len(df) > 0
    assert summary["experiment"] == experiment


def test_registry_is_complete():
    assert set(SMALL) | {"check-all"} == set(EXPERIMENTS)


def test_results_do_not_depend_on_workers(settings):
    serial = hiding_pgm(_config(settings, "hiding-pgm", n=6, nb=2, seeds=4, workers=1))
    parallel = hiding_pgm(_config(settings, "hiding-pgm", n=6, nb=2, seeds=4, workers=2))
    pd.testing.assert_frame_equal(serial, parallel)


def test_same_seed_same_table(settings, tmp_path):
    first = run(_config(settings, "otm-leak", tmp_path, n=4, k=2, seeds=2, seed=5))
    second = run(_config(settings, "otm-leak", tmp_path, n=4, k=2, seeds=2, seed=5, out=str(tmp_path / "b.csv")))
    with open(first["path"]) as a, open(second["path"]) as b:
        assert a.read() == b.read()


def test_codes_tables(settings, tmp_path):
    params = read_table(run(_config(settings, "codes-params", tmp_path, n=1000))["path"])
    assert params["k"].iloc[0] == 349
    bound = read_table(run(_config(settings, "codes-bound", tmp_path, n=1000))["path"])
    assert list(bound["n"]) == [1000, 2000, 4000, 8000, 16000]
    assert (bound["success_bound"].diff().dropna() >= 0).all()


@pytest.mark.parametrize("experiment", ["net-build", "codes-params", "codes-bound"])
def test_deterministic_rows_carry_the_master_seed(settings, tmp_path, experiment):
    summary = run(_config(settings, experiment, tmp_path, seed=17, **SMALL[experiment]))
    assert set(read_table(summary["path"])["seed"]) == {17}


def test_float_format_comes_from_the_configuration(settings, tmp_path):
    assert build_config("codes-params", settings).float_format == settings["float_format"]
    layered = dict(settings, float_format="%.3g")
    summary = run(build_config("codes-params", layered, {"n": 1000, "out": str(tmp_path / "p.csv")}))
    with open(summary["path"]) as handle:
        assert handle.read().splitlines()[2].split(",")[5] == "156"


def test_search_and_game_orderings(settings, tmp_path):
    search = read_table(run(_config(settings, "hiding-search", tmp_path, **SMALL["hiding-search"]))["path"])
    assert (search["greedy"] <= search["exhaustive_max"] + 1e-9).all()
    assert (search["exhaustive_max"] <= search["holevo"] + 1e-9).all()
    game = read_table(run(_config(settings, "hiding-game", tmp_path, **SMALL["hiding-game"]))["path"])
    assert (game["mutual_info"] <= game["holevo"] + 1e-9).all()


def test_otm_tables(settings, tmp_path):
    encode = read_table(run(_config(settings, "otm-encode", tmp_path, **SMALL["otm-encode"]))["path"])
    assert np.allclose(encode["norm"], 1)
    info = read_table(run(_config(settings, "otm-info", tmp_path, **SMALL["otm-info"]))["path"])
    assert "exhaustive" in set(info["strategy"])
    assert (info["mutual_info"] <= info["limit"] + 1e-9).all()
    phases = read_table(run(_config(settings, "otm-phases", tmp_path, **SMALL["otm-phases"]))["path"])
    assert (phases["chain_error"] <= 1e-9).all()


def test_sample_experiments_save_artifacts(settings, tmp_path):
    run(_config(settings, "otm-sample", tmp_path, **SMALL["otm-sample"]))
    assert (tmp_path / "otm-sample.device0.params.yaml").exists()
    assert (tmp_path / "otm-sample.device1.C.txt").exists()
    run(_config(settings, "net-build", tmp_path, eps=1.0))
    assert (tmp_path / "net-build.net.yaml").exists()


def test_json_output(settings, tmp_path):
    summary = run(_config(settings, "codes-params", n=1000, format="json", out=str(tmp_path / "p.json")))
    assert read_table(summary["path"])["k"].iloc[0] == 349


def test_check_all_selected_criteria(settings, tmp_path):
    checks = dict(settings["checks"])
    checks.update({"criteria": [1, 2, 3], "uncertainty": {"states": 200}, "fourth_moment": {"states": 200}})
    config = build_config("check-all", dict(settings, checks=checks), {"out": str(tmp_path / "checks.csv")})
    summary = run(config)
    df = read_table(summary["path"])
    assert summary["failed"] == []
    assert set(df["criterion"]) == {1, 2, 3}


def test_failing_check_still_writes_table(settings, tmp_path):
    checks = dict(settings["checks"])
    checks.update({"criteria": [11], "leak": {"n": 4, "k": 1, "seeds": 2, "threshold": 100, "fraction": 0.9}})
    config = build_config("check-all", dict(settings, checks=checks), {"out": str(tmp_path / "checks.csv")})
    with pytest.raises(CheckFailed):
        run(config)
    df = read_table(tmp_path / "checks.csv")
    assert not df["passed"].all()
