"""Batch experiments: scenarios x algorithms, ETTD/MTTD aggregation, CSV I/O."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import seeding
from .engine import EngineConfig, run_discovery
from .hopping import DEFAULT_ALGORITHMS, AlgorithmSpec
from .scenario import ScenarioGenerationError, ScenarioParams, generate_scenario, scenario_seeds

log = logging.getLogger(__name__)

RAW_HEADER = ["scenario_index", "n_common", "algorithm", "run_seed", "ttd", "ttr", "censored"]
AGG_HEADER = ["algorithm", "n_common", "ettd", "ettd_stderr", "mttd", "censored_count"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    scenario_params: ScenarioParams = field(default_factory=ScenarioParams)
    n_scenarios: int = 100
    algorithms: tuple[AlgorithmSpec, ...] = DEFAULT_ALGORITHMS
    mttd_batch_size: int = 10
    master_seed: int = 0
    t_max: Optional[int] = None
    n_common_grid: tuple[int, ...] = (2, 4, 8, 16, 32)
    output_dir: str = "results"

    def __post_init__(self):
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        object.__setattr__(self, "n_common_grid", tuple(int(x) for x in self.n_common_grid))
        if not self.algorithms or not self.n_common_grid:
            raise ConfigError("algorithms and n_common_grid must be non-empty")
        if self.n_scenarios < 1 or self.mttd_batch_size < 1:
            raise ConfigError("n_scenarios and mttd_batch_size must be >= 1")
        if self.n_scenarios % self.mttd_batch_size:
            raise ConfigError(f"n_scenarios={self.n_scenarios} is not a multiple of "
                              f"mttd_batch_size={self.mttd_batch_size}")
        if self.t_max is not None and self.t_max < 1:
            raise ConfigError("t_max must be >= 1")
        for nc in self.n_common_grid:
            if not 1 <= nc <= self.scenario_params.n_channels:
                raise ConfigError(f"n_common={nc} outside [1, {self.scenario_params.n_channels}]")

    def params_for(self, n_common: int) -> ScenarioParams:
        return replace(self.scenario_params, n_common=n_common)


def desk_config(**overrides) -> ExperimentConfig:
    """Small preset: N=64, K=20, 100 scenarios in batches of 10."""
    params = ScenarioParams(n_channels=64, n_users=20)
    cfg = ExperimentConfig(scenario_params=params, n_scenarios=100,
                           algorithms=tuple(AlgorithmSpec.parse(s) for s in
                                            ("sweep", "sweep-random", "sweep-forward", "pi", "prs",
                                             "stick:5,6")),
                           n_common_grid=(2, 4, 8, 16))
    return replace(cfg, **overrides) if overrides else cfg


def full_config(**overrides) -> ExperimentConfig:
    """N=256, K=100, 50 PUs, ranges 250/500 m, 1000 scenarios in batches of 10."""
    cfg = ExperimentConfig(scenario_params=ScenarioParams(), n_scenarios=1000, mttd_batch_size=10)
    return replace(cfg, **overrides) if overrides else cfg


_PARAM_KEYS = {f.name for f in fields(ScenarioParams)}
_TOP_KEYS = {f.name for f in fields(ExperimentConfig)} - {"scenario_params"}


def config_from_dict(d: dict) -> ExperimentConfig:
    """Build a config from a flat mapping of field names. Unknown keys raise."""
    unknown = set(d) - _PARAM_KEYS - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    base = ScenarioParams()
    params = ScenarioParams(**{k: d[k] for k in _PARAM_KEYS if k in d}) if _PARAM_KEYS & set(d) else base
    top = {k: d[k] for k in _TOP_KEYS if k in d}
    if "algorithms" in top:
        top["algorithms"] = tuple(AlgorithmSpec.parse(a) for a in top["algorithms"])
    try:
        return ExperimentConfig(scenario_params=params, **top)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def config_to_dict(cfg: ExperimentConfig) -> dict:
    d = {f.name: getattr(cfg.scenario_params, f.name) for f in fields(ScenarioParams)}
    d.update(n_scenarios=cfg.n_scenarios, algorithms=[str(a) for a in cfg.algorithms],
             mttd_batch_size=cfg.mttd_batch_size, master_seed=cfg.master_seed, t_max=cfg.t_max,
             n_common_grid=list(cfg.n_common_grid), output_dir=cfg.output_dir)
    return d


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    return config_from_dict(d)


@dataclass(frozen=True)
class RunRecord:
    scenario_index: int
    n_common: int
    algorithm: str
    run_seed: int
    ttd: int          # the horizon when censored
    ttr: int          # -1 when censored
    censored: bool

    def sort_key(self):
        return (self.n_common, self.algorithm, self.scenario_index)


@dataclass(frozen=True)
class AggregateRow:
    algorithm: str
    n_common: int
    ettd: float
    ettd_stderr: float
    mttd: float
    censored_count: int


@dataclass
class ExperimentResult:
    records: list[RunRecord]
    rows: list[AggregateRow]
    failures: list[tuple[int, int, str]]


def run_seed_for(master_seed: int, n_common: int, index: int) -> int:
    """Shared by every algorithm on the same scenario."""
    return seeding.derive_seed(master_seed, seeding.RUN, n_common, index)


def _scenario_task(args):
    cfg, n_common, index = args
    params = cfg.params_for(n_common)
    topo_seed, chan_seed = scenario_seeds(cfg.master_seed, index, n_common)
    try:
        scen = generate_scenario(params, topo_seed, chan_seed)
    except ScenarioGenerationError as exc:
        return [], (n_common, index, str(exc))
    seed = run_seed_for(cfg.master_seed, n_common, index)
    out = []
    for alg in cfg.algorithms:
        res = run_discovery(scen, EngineConfig(alg, seed, cfg.t_max))
        out.append(RunRecord(index, n_common, str(alg), seed,
                             res.t_max if res.censored else res.ttd,
                             -1 if res.ttr is None else res.ttr, res.censored))
    return out, None


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    tasks = [(cfg, nc, i) for nc in cfg.n_common_grid for i in range(cfg.n_scenarios)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scenario_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        results = []
        for j, task in enumerate(tasks):
            results.append(_scenario_task(task))
            if (j + 1) % 50 == 0:
                log.info("%d/%d scenarios done", j + 1, len(tasks))
    records, failures = [], []
    for recs, fail in results:
        records.extend(recs)
        if fail:
            log.warning("scenario %d (n_common=%d) failed: %s", fail[1], fail[0], fail[2])
            failures.append(fail)
    records.sort(key=RunRecord.sort_key)
    return ExperimentResult(records, aggregate(records, cfg.mttd_batch_size), failures)


def aggregate_ettd(ttds: Sequence[float]) -> tuple[float, float]:
    """Mean and standard error of the mean."""
    x = np.asarray(ttds, dtype=float)
    if len(x) == 0:
        raise ValueError("no uncensored runs to average")
    se = float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0
    return float(x.mean()), se


def aggregate_mttd(ttds: Sequence[float], batch_size: int) -> float:
    """Mean over consecutive batches of each batch's maximum."""
    x = np.asarray(ttds, dtype=float)
    if batch_size < 1 or len(x) == 0 or len(x) % batch_size:
        raise ConfigError(f"{len(x)} runs cannot be split into batches of {batch_size}")
    return float(x.reshape(-1, batch_size).max(axis=1).mean())


def aggregate(records: Sequence[RunRecord], batch_size: int) -> list[AggregateRow]:
    """Per (algorithm, n_common) summary. Censored runs are left out of the
    ETTD mean and enter the MTTD batches at their horizon."""
    groups: dict[tuple[int, str], list[RunRecord]] = {}
    for r in records:
        groups.setdefault((r.n_common, r.algorithm), []).append(r)
    rows = []
    for (nc, alg), rs in sorted(groups.items()):
        rs.sort(key=lambda r: r.scenario_index)
        done = [r.ttd for r in rs if not r.censored]
        ettd, se = aggregate_ettd(done) if done else (math.nan, math.nan)
        try:
            mttd = aggregate_mttd([r.ttd for r in rs], batch_size)
        except ConfigError:
            mttd = math.nan
        rows.append(AggregateRow(alg, nc, ettd, se, mttd, len(rs) - len(done)))
    return rows


def _fmt(x: float) -> str:
    return "" if math.isnan(x) else repr(float(x))


def raw_csv_text(records: Sequence[RunRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RAW_HEADER)
    for r in sorted(records, key=RunRecord.sort_key):
        w.writerow([r.scenario_index, r.n_common, r.algorithm, r.run_seed, r.ttd, r.ttr,
                    "true" if r.censored else "false"])
    return buf.getvalue()


def aggregate_csv_text(rows: Sequence[AggregateRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AGG_HEADER)
    for r in rows:
        w.writerow([r.algorithm, r.n_common, _fmt(r.ettd), _fmt(r.ettd_stderr), _fmt(r.mttd),
                    r.censored_count])
    return buf.getvalue()


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_raw_csv(path) -> list[RunRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RAW_HEADER:
            raise ValueError(f"unexpected raw CSV header {reader.fieldnames}")
        return [RunRecord(int(r["scenario_index"]), int(r["n_common"]), r["algorithm"],
                          int(r["run_seed"]), int(r["ttd"]), int(r["ttr"]), r["censored"] == "true")
                for r in reader]


def read_aggregate_csv(path) -> list[AggregateRow]:
    def num(s):
        return math.nan if s == "" else float(s)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != AGG_HEADER:
            raise ValueError(f"unexpected aggregate CSV header {reader.fieldnames}")
        return [AggregateRow(r["algorithm"], int(r["n_common"]), num(r["ettd"]),
                             num(r["ettd_stderr"]), num(r["mttd"]), int(r["censored_count"]))
                for r in reader]


def write_outputs(result: ExperimentResult, out_dir) -> dict[str, Path]:
    from .plotting import emit_plot

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"raw": out / "raw.csv", "aggregate": out / "aggregate.csv",
             "ettd": out / "ettd.svg", "mttd": out / "mttd.svg"}
    write_text(paths["raw"], raw_csv_text(result.records))
    write_text(paths["aggregate"], aggregate_csv_text(result.rows))
    if result.rows:
        emit_plot(result.rows, "ettd", paths["ettd"])
        emit_plot(result.rows, "mttd", paths["mttd"])
    if result.failures:
        paths["failures"] = out / "failures.txt"
        write_text(paths["failures"], "".join(f"n_common={nc} scenario={i}: {msg}\n"
                                              for nc, i, msg in result.failures))
    return paths


def bootstrap_mean_ci(values, level: float = 0.95, n_boot: int = 10_000,
                      seed: int = 0) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean."""
    x = np.asarray(values, dtype=float)
    rng = seeding.rng_from_seed(seed)
    idx = rng.integers(0, len(x), size=(n_boot, len(x)))
    means = x[idx].mean(axis=1)
    alpha = (1 - level) / 2
    lo, hi = np.quantile(means, [alpha, 1 - alpha])
    return float(lo), float(hi)
