"""End-to-end mini experiment: generate a dataset, evaluate, print the table.

This is a scaled-down version of the clique scenario (full desk scale is
n=2000 with 10 replications over 7 tau values; here we shrink it so the
demo finishes in seconds).  The same flow is available from the command
line:

    epitau generate --scenario clique_fixed_density --n 2000 --reps 10 \
        --seed 11 --out data/clique_desk
    epitau evaluate --dataset data/clique_desk
    epitau plotdata --results data/clique_desk/results.csv --out curves.csv
"""

import tempfile
from pathlib import Path

from epitau import (ExperimentConfig, emit_plot_series, evaluate_classical,
                    run_scenario)

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "mini"
    cfg = ExperimentConfig(scenario="clique_fixed_density", output_dir=str(out),
                           seed=4, n=500, tau_grid=[0.35, 0.45, 0.55],
                           replications=4, clique_sizes=[7, 9, 12])
    run_scenario(cfg)
    print(f"dataset: {sum(1 for _ in open(out / 'manifest.csv')) - 1} runs")

    results = evaluate_classical(out, times=[1.0, 2.0, 4.0, 6.0, 10.0])
    print("\n" + (out / "table.txt").read_text())

    curves = emit_plot_series(results, out / "curves.csv")
    print(f"plot-ready curves: {curves.read_text().splitlines()[0]} ... "
          f"({sum(1 for _ in open(curves)) - 1} rows)")
