"""Exit criteria. Each test emits one PASS/FAIL line in the terminal summary."""
from dataclasses import replace

import numpy as np
import pytest

from topodisc import verify
from topodisc.cli import main
from topodisc.harness import (ExperimentConfig, bootstrap_mean_ci, config_to_dict, desk_config,
                              run_experiment)
from topodisc.hopping import DEFAULT_ALGORITHMS, AlgorithmSpec
from topodisc.scenario import ScenarioParams

pytestmark = pytest.mark.slow


def _summary(checks):
    return "; ".join(f"{c.name}={'ok' if c.passed else 'FAILED'} ({c.observed if not isinstance(c.observed, list) else '...'})"
                     for c in checks)


def test_1_markov_theorem(report):
    checks = verify.theorem_suite(n_points=20, n_chains=1_000_000, rel_tol=0.01)
    ok = all(c.passed for c in checks)
    report(1, ok, _summary(checks))
    assert ok


@pytest.mark.parametrize("kind, criterion, expected", [("pi", 2, 3.0), ("random", 3, 16.0)])
def test_2_3_pair_ettr_oracles(report, kind, criterion, expected):
    mean = verify.mean_pair_ttr(kind, n=64, n1=8, n2=8, n12=4, runs=100_000)
    err = abs(mean / expected - 1)
    report(criterion, err <= 0.03, f"{kind}: mean TTR {mean:.4f} vs {expected} (rel err {err:.4f}, tol 0.03)")
    assert err <= 0.03


BOUNDED = tuple(AlgorithmSpec.parse(a) for a in ("sweep", "sweep-random", "sweep-forward", "prs", "stick:5,6"))
DESK = ScenarioParams(n_channels=64, n_users=20, n_common=4)


@pytest.fixture(scope="module")
def bounded_runs():
    cfg = ExperimentConfig(scenario_params=DESK, n_scenarios=200, algorithms=BOUNDED, mttd_batch_size=10,
                           master_seed=0, n_common_grid=(4,))
    return run_experiment(cfg)


@pytest.fixture(scope="module")
def pi_runs():
    cfg = ExperimentConfig(scenario_params=DESK, n_scenarios=100, algorithms=(AlgorithmSpec.parse("pi"),),
                           mttd_batch_size=10, master_seed=0, n_common_grid=(4,))
    return run_experiment(cfg)


def test_4_mttd_bound(report, bounded_runs):
    recs = bounded_runs.records
    worst = max(r.ttd for r in recs)
    censored = sum(r.censored for r in recs)
    ok = len(recs) == 200 * len(BOUNDED) and not bounded_runs.failures and worst <= 64 and censored == 0
    report(4, ok, f"{len(recs)} runs, max TTD {worst} (bound 64), censored {censored}")
    assert ok


def test_5_ttd_not_after_ttr(report, bounded_runs, pi_runs):
    recs = [r for r in bounded_runs.records + pi_runs.records if not r.censored and r.ttr >= 0]
    bad = [r for r in recs if r.ttd > r.ttr]
    n_pi = sum(r.algorithm == "pi" for r in recs)
    ok = not bad and n_pi == 100
    report(5, ok, f"{len(recs)} uncensored runs ({n_pi} pi), violations {len(bad)}")
    assert ok


@pytest.fixture(scope="module")
def figure4():
    cfg = ExperimentConfig(scenario_params=ScenarioParams(), n_scenarios=100, algorithms=DEFAULT_ALGORITHMS,
                           mttd_batch_size=10, master_seed=0, n_common_grid=(2, 4, 8, 16, 32))
    res = run_experiment(cfg)
    ttd = {}
    for r in res.records:
        ttd.setdefault((r.n_common, r.algorithm), []).append(r.ttd)
    return cfg, res, ttd


def test_6a_prs_beats_sweeps(report, figure4):
    cfg, res, ttd = figure4
    problems = []
    for nc in cfg.n_common_grid:
        prs = np.mean(ttd[nc, "prs"])
        prs_ci = bootstrap_mean_ci(ttd[nc, "prs"], 0.95, seed=nc)
        for sweep in ("sweep", "sweep-random", "sweep-forward"):
            m = np.mean(ttd[nc, sweep])
            if not prs < m:
                problems.append(f"n_common={nc}: prs {prs:.2f} >= {sweep} {m:.2f}")
            if nc <= 8:
                ci = bootstrap_mean_ci(ttd[nc, sweep], 0.95, seed=nc)
                if prs_ci[1] >= ci[0]:
                    problems.append(f"n_common={nc}: prs CI {prs_ci[0]:.2f}-{prs_ci[1]:.2f} overlaps "
                                    f"{sweep} CI {ci[0]:.2f}-{ci[1]:.2f}")
    assert not res.failures
    report(6, not problems, "(a) prs < sweeps; " + ("ok" if not problems else " | ".join(problems)))
    assert not problems


def test_6b_prs_matches_pi(report, figure4):
    cfg, _, ttd = figure4
    gaps = {nc: abs(np.mean(ttd[nc, "prs"]) - np.mean(ttd[nc, "pi"])) / np.mean(ttd[nc, "pi"])
            for nc in cfg.n_common_grid}
    ok = all(g <= 0.10 for g in gaps.values())
    report(6, ok, "(b) |prs-pi|/pi <= 10%: " + ", ".join(f"{nc}:{g:.3f}" for nc, g in gaps.items()))
    assert ok


def test_6c_stick_not_worse_than_prs(report, figure4):
    cfg, _, ttd = figure4
    pairs = {nc: (np.mean(ttd[nc, "stick:5,30"]), np.mean(ttd[nc, "prs"])) for nc in cfg.n_common_grid}
    ok = all(s <= p for s, p in pairs.values())
    report(6, ok, "(c) stick:5,30 <= prs: " + ", ".join(f"{nc}:{s:.2f}/{p:.2f}" for nc, (s, p) in pairs.items()))
    assert ok


def test_7_ring_decomposition(report):
    checks = verify.decomposition_suite(8)
    ok = all(c.passed for c in checks)
    report(7, ok, _summary(checks))
    assert ok


def test_8_correlation_contrast(report):
    checks = verify.correlation_suite(draws=500, n=256, n1=16, n2=16, n12=4)
    ok = all(c.passed for c in checks)
    report(8, ok, _summary(checks))
    assert ok


def test_9_run_determinism(report, tmp_path):
    import json
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(config_to_dict(desk_config(master_seed=123))))
    outs = []
    for name, extra in (("a", []), ("b", []), ("c", ["--workers", "2"])):
        assert main(["run", "--config", str(path), "--out", str(tmp_path / name), *extra]) == 0
        outs.append((tmp_path / name / "raw.csv").read_bytes())
    ok = outs[0] == outs[1] == outs[2]
    report(9, ok, f"serial x2 and parallel raw CSVs identical ({len(outs[0])} bytes)")
    assert ok
