"""Command line entry point: ``topodisc gen | run | verify | plot``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import harness, scenario, verify
from .plotting import emit_plot


def _config(args) -> harness.ExperimentConfig:
    if args.config:
        cfg = harness.load_config(args.config)
    elif args.full:
        cfg = harness.full_config()
    else:
        cfg = harness.desk_config()
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, output_dir=args.out)
    return cfg


def cmd_gen(args) -> int:
    cfg = _config(args)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    count = args.count or cfg.n_scenarios
    failed = 0
    for nc in cfg.n_common_grid:
        params = cfg.params_for(nc)
        batch = []
        for i in range(count):
            try:
                batch.append(scenario.generate_scenario(params, *scenario.scenario_seeds(cfg.master_seed, i, nc)))
            except scenario.ScenarioGenerationError as exc:
                print(f"scenario {i} (n_common={nc}): {exc}", file=sys.stderr)
                failed += 1
        path = out / f"scenarios_ncommon{nc}.jsonl"
        scenario.write_scenarios(path, batch)
        print(f"wrote {len(batch)} scenarios to {path}")
    return 1 if failed else 0


def cmd_run(args) -> int:
    cfg = _config(args)
    result = harness.run_experiment(cfg, workers=args.workers)
    paths = harness.write_outputs(result, cfg.output_dir)
    with open(Path(cfg.output_dir) / "config.json", "w", encoding="utf-8") as fh:
        json.dump(harness.config_to_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name, p in paths.items():
        print(f"{name}: {p}")
    return 1 if result.failures else 0


def cmd_verify(args) -> int:
    checks = verify.SUITES[args.suite]()
    for c in checks:
        print(c.line())
    ok = all(c.passed for c in checks)
    print(json.dumps({"suite": args.suite, "pass": ok, "failed": [c.name for c in checks if not c.passed]}))
    return 0 if ok else 1


def cmd_plot(args) -> int:
    path = Path(args.csv)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    if header == harness.RAW_HEADER:
        rows = harness.aggregate(harness.read_raw_csv(path), args.batch_size)
    else:
        rows = harness.read_aggregate_csv(path)
    out_dir = Path(args.out) if args.out else path.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / f"{args.metric}.svg"
    emit_plot(rows, args.metric, target)
    print(target)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="topodisc", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="flat JSON experiment config")
        sp.add_argument("--full", action="store_true", help="N=256, K=100, 1000 scenarios preset")
        sp.add_argument("--seed", type=int, help="master seed (u64)")
        sp.add_argument("--out", help="output directory")

    g = sub.add_parser("gen", help="write scenarios as JSON lines")
    common(g)
    g.add_argument("--count", type=int, help="scenarios per n_common (default: n_scenarios)")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run an experiment and write CSVs and plots")
    common(r)
    r.add_argument("--workers", type=int, default=1)
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="run a numerical verification suite")
    v.add_argument("suite", choices=sorted(verify.SUITES))
    v.set_defaults(func=cmd_verify)

    pl = sub.add_parser("plot", help="SVG plot from a raw or aggregate CSV")
    pl.add_argument("csv")
    pl.add_argument("metric", choices=["ettd", "mttd"])
    pl.add_argument("--out")
    pl.add_argument("--batch-size", type=int, default=10, help="MTTD batch size for raw CSVs")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (harness.ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
