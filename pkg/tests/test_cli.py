import json
import subprocess
import sys

import pytest

from topodisc.cli import main
from topodisc.harness import config_to_dict, desk_config, read_raw_csv
from topodisc.scenario import read_scenarios, validate_scenario


@pytest.fixture
def small_config(tmp_path):
    d = config_to_dict(desk_config())
    d.update(n_channels=16, n_users=6, area_side=500, n_pus=5, pu_range=250, n_scenarios=4,
             mttd_batch_size=2, n_common_grid=[2], algorithms=["sweep", "prs"])
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(d))
    return path


def test_gen(tmp_path, small_config, capsys):
    out = tmp_path / "gen"
    assert main(["gen", "--config", str(small_config), "--out", str(out), "--seed", "5"]) == 0
    scen = read_scenarios(out / "scenarios_ncommon2.jsonl")
    assert len(scen) == 4 and all(validate_scenario(s) == [] for s in scen)


def test_run_and_plot(tmp_path, small_config):
    out = tmp_path / "run"
    assert main(["run", "--config", str(small_config), "--out", str(out)]) == 0
    recs = read_raw_csv(out / "raw.csv")
    assert len(recs) == 8
    for name in ("aggregate.csv", "ettd.svg", "mttd.svg", "config.json"):
        assert (out / name).exists()
    plots = tmp_path / "plots"
    assert main(["plot", str(out / "raw.csv"), "mttd", "--out", str(plots), "--batch-size", "2"]) == 0
    assert main(["plot", str(out / "aggregate.csv"), "ettd", "--out", str(plots)]) == 0
    assert (plots / "mttd.svg").exists() and (plots / "ettd.svg").exists()


def test_run_twice_is_byte_identical(tmp_path, small_config):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", str(small_config), "--out", str(a)]) == 0
    assert main(["run", "--config", str(small_config), "--out", str(b), "--workers", "2"]) == 0
    assert (a / "raw.csv").read_bytes() == (b / "raw.csv").read_bytes()


def test_bad_config_exits_nonzero(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n_scenarois": 3}))
    assert main(["run", "--config", str(path)]) == 2
    assert "unknown config keys" in capsys.readouterr().err


def test_verify_decomposition_report(capsys):
    assert main(["verify", "decomposition"]) == 0
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert lines[-1] == {"suite": "decomposition", "pass": True, "failed": []}


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "topodisc", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for sub in ("gen", "run", "verify", "plot"):
        assert sub in proc.stdout
