"""
A desk-scale comparison
=======================

Runs the six rules on 100 scenarios (N=64, K=20) for several common-set
sizes, then writes the raw table, the ETTD/MTTD summary and two SVG plots.
Equivalent to ``topodisc run --out results/desk``.
"""
import sys

from topodisc.harness import desk_config, run_experiment, write_outputs

out = sys.argv[1] if len(sys.argv) > 1 else "results/desk"
cfg = desk_config(output_dir=out)
result = run_experiment(cfg)
paths = write_outputs(result, out)

print(f"{'algorithm':14s} {'n_common':>8s} {'ETTD':>7s} {'MTTD':>7s}")
for row in result.rows:
    print(f"{row.algorithm:14s} {row.n_common:8d} {row.ettd:7.2f} {row.mttd:7.2f}")
print("wrote", ", ".join(str(p) for p in paths.values()))
