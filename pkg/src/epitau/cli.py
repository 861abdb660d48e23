"""Command-line front end.

Subcommands: generate, evaluate, loo, plotdata, table.  Options may also be
given in a key=value config file via --config; explicit flags win.  Exit
codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import (ExperimentConfig, emit_plot_series, evaluate_classical,
                      leave_one_out_experiment, paper_tau_grid,
                      read_config, read_results, render_table, run_scenario)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _parse_floats(s: str) -> list[float]:
    return [float(tok) for tok in s.split(",") if tok]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epitau",
        description="Two-layer SIR experiments: generate datasets, estimate tau.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="simulate a scenario into a dataset dir")
    gen.add_argument("--config", help="key=value file; flags override")
    gen.add_argument("--scenario",
                     choices=["poly", "clique_fixed_density", "clique_leave_one_out"])
    gen.add_argument("--n", type=int)
    gen.add_argument("--reps", type=int)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out")
    gen.add_argument("--taus", help="comma-separated tau grid")
    gen.add_argument("--workers", type=int)
    gen.add_argument("--paper-scale", action="store_true",
                     help="paper replication counts (n=5000, 31 taus)")
    gen.add_argument("--keep-logs", action="store_true",
                     help="also write per-run event logs")

    ev = sub.add_parser("evaluate", help="run classical estimators on a dataset")
    ev.add_argument("--dataset", required=True)
    ev.add_argument("--methods", help="comma-separated subset of ml_* methods")
    ev.add_argument("--times", help="comma-separated report times")
    ev.add_argument("--out")

    loo = sub.add_parser("loo", help="leave-one-clique-size-out dataset pair")
    loo.add_argument("--dataset", required=True)
    loo.add_argument("--omit", type=int, required=True)
    loo.add_argument("--test-on", type=int, required=True)
    loo.add_argument("--out", required=True)

    plot = sub.add_parser("plotdata", help="flatten results.csv files to curves.csv")
    plot.add_argument("--results", nargs="+", required=True)
    plot.add_argument("--out", default="curves.csv")

    tab = sub.add_parser("table", help="render results.csv as a plain-text table")
    tab.add_argument("--results", required=True)
    tab.add_argument("--out")
    return parser


def _generate_config(args: argparse.Namespace) -> ExperimentConfig:
    raw: dict[str, str] = {}
    if args.config:
        raw = read_config(args.config)
    merged = {
        "scenario": args.scenario or raw.get("scenario"),
        "output_dir": args.out or raw.get("output_dir") or raw.get("out"),
        "seed": args.seed if args.seed is not None else int(raw.get("seed", 0)),
    }
    if merged["scenario"] is None:
        raise ValueError("--scenario (or scenario= in the config file) is required")
    if merged["output_dir"] is None:
        raise ValueError("--out (or output_dir= in the config file) is required")
    kw = dict(merged)
    if args.paper_scale:
        kw.setdefault("n", 5000)
        kw["tau_grid"] = paper_tau_grid()
        kw["replications"] = 50 if merged["scenario"] == "poly" else 250
    for key, conv in (("n", int), ("replications", int), ("N_hh", int), ("m", int),
                      ("n0", int), ("w", float), ("p_relaxed", float),
                      ("gamma", float), ("init_infected_fraction", float),
                      ("t_max", float), ("dt", float), ("train_fraction", float),
                      ("workers", int)):
        if key in raw:
            kw.setdefault(key, conv(raw[key]))
    if "tau_grid" in raw:
        kw.setdefault("tau_grid", _parse_floats(raw["tau_grid"]))
    if "report_times" in raw:
        kw.setdefault("report_times", _parse_floats(raw["report_times"]))
    if "clique_sizes" in raw:
        kw.setdefault("clique_sizes", [int(x) for x in raw["clique_sizes"].split(",")])
    if "poly_mixes" in raw:
        kw.setdefault("poly_mixes", [
            tuple(float(p) for p in mix.split(":"))
            for mix in raw["poly_mixes"].split(";") if mix
        ])
    if "keep_logs" in raw:
        kw.setdefault("keep_logs", raw["keep_logs"] == "True")
    if args.n is not None:
        kw["n"] = args.n
    if args.reps is not None:
        kw["replications"] = args.reps
    if args.taus:
        kw["tau_grid"] = _parse_floats(args.taus)
    if args.workers is not None:
        kw["workers"] = args.workers
    if args.keep_logs:
        kw["keep_logs"] = True
    return ExperimentConfig(**kw)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            cfg = _generate_config(args)
            out = run_scenario(cfg)
            print(f"dataset written to {out}")
        elif args.command == "evaluate":
            times = _parse_floats(args.times) if args.times else None
            methods = args.methods.split(",") if args.methods else None
            path = evaluate_classical(args.dataset, times=times, methods=methods,
                                      out_dir=args.out)
            print(f"results written to {path}")
            print(render_table_from(path))
        elif args.command == "loo":
            out = leave_one_out_experiment(args.dataset, args.omit, args.test_on,
                                           args.out)
            print(f"leave-one-out dataset written to {out}")
        elif args.command == "plotdata":
            out = emit_plot_series(args.results, args.out)
            print(f"curves written to {out}")
        elif args.command == "table":
            text = render_table_from(args.results)
            if args.out:
                Path(args.out).write_text(text, encoding="utf-8")
            else:
                print(text, end="")
    except (ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def render_table_from(results_path) -> str:
    return render_table(read_results(results_path))


if __name__ == "__main__":
    sys.exit(main())
