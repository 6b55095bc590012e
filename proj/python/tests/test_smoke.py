import json

import pytest

import sotest


SMALL = {
    "model": {
        "agents": [2, 40],
        "cases_per_sequence": [30, 60],
        "sequences_per_suite": 2,
        "psopp_runtime": [0.05, 0.1],
    },
    "campaign": {"suites": 2},
}


def test_fault_catalog():
    names = sotest.fault_names()
    assert len(names) == 10
    assert "spada-f1" in names and "psopp-f5d" in names
    assert sotest.fault_algorithm("psopp-f3") == "psopp"
    assert sotest.fault_algorithm("spada-f4") == "spada"
    with pytest.raises(sotest.ConfigError):
        sotest.fault_algorithm("nonsense")


def test_config_roundtrip(tmp_path):
    cfg = sotest.default_config()
    assert cfg["faults"]["t1"] == 2
    cfg["campaign"]["suites"] = 3
    path = str(tmp_path / "cfg.json")
    sotest.save_config(path, cfg)
    back = sotest.load_config(path)
    assert back["campaign"]["suites"] == 3
    with pytest.raises(sotest.IoError):
        sotest.load_config(str(tmp_path / "missing.json"))


def test_generate_execute_report(tmp_path):
    suites = str(tmp_path / "suites.jsonl")
    results = str(tmp_path / "results.jsonl")
    n = sotest.generate(suites, seed=11, config=SMALL, fault="spada-f2")
    assert n == 2

    with open(suites) as fh:
        header = json.loads(fh.readline())
    assert header["schema"] == sotest.SUITE_SCHEMA

    row = sotest.execute(results, mode="offline", in_path=suites, config=SMALL)
    assert row["suites"] == 2 and row["sequences"] == 4
    assert row["fault"] == "spada-f2"

    again = sotest.report(results)
    assert again == row

    table = sotest.metrics_table([results])
    assert "spada-f2" in table


def test_offline_matches_online(tmp_path):
    suites = str(tmp_path / "suites.jsonl")
    sotest.generate(suites, seed=7, config=SMALL, algorithm="spada")
    off = sotest.execute("", mode="offline", in_path=suites, config=SMALL)
    on = sotest.execute("", mode="online", seed=7, config=SMALL, algorithm="spada")
    assert off == on

    with pytest.raises(sotest.ConfigError):
        sotest.execute("", mode="offline", config=SMALL)  # no in_path


def test_online_psopp_runs():
    row = sotest.execute("", mode="online", seed=3, config=SMALL, suites=1,
                         sequences=1, algorithm="psopp")
    assert row["algorithm"] == "psopp"
    assert row["suites"] == 1 and row["sequences"] == 1
