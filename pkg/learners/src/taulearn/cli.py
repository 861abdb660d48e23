"""taulearn command line: train-gbt, train-cnn, predict, evaluate.

Consumes a dataset directory (manifest.csv + series.csv) produced by the
simulation side; writes models into a model directory and predictions/
results in the shared CSV schemas.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .cnn import CnnModel, train_cnn
from .data import load_dataset
from .evaluate import evaluate_predictions, predict_to_file
from .gbt import GbtModel, train_gbt

DEFAULT_TIMES = (1.0, 2.0, 4.0, 6.0, 10.0)


def _times(arg: str | None):
    return [float(t) for t in arg.split(",")] if arg else list(DEFAULT_TIMES)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="taulearn",
                                     description="Learned tau estimators")
    sub = parser.add_subparsers(dest="command", required=True)

    tg = sub.add_parser("train-gbt", help="one boosted-tree model per horizon")
    tg.add_argument("--dataset", required=True)
    tg.add_argument("--subset", choices=["all", "sir"], required=True)
    tg.add_argument("--times", help="comma-separated horizons (default 1,2,4,6,10)")
    tg.add_argument("--models", help="model dir (default DATASET/models)")
    tg.add_argument("--seed", type=int, default=0)

    tc = sub.add_parser("train-cnn", help="one CNN over variable-length segments")
    tc.add_argument("--dataset", required=True)
    tc.add_argument("--subset", choices=["all", "sir"], required=True)
    tc.add_argument("--sampling", required=True,
                    choices=["full", "uniform", "beta", "beta-skew", "per-t"])
    tc.add_argument("--times", help="horizons for per-t training / validation")
    tc.add_argument("--models", help="model dir (default DATASET/models)")
    tc.add_argument("--epochs", type=int, default=500)
    tc.add_argument("--patience", type=int, default=20)
    tc.add_argument("--segments-per-run", type=int, default=4)
    tc.add_argument("--seed", type=int, default=0)
    tc.add_argument("--verbose", action="store_true")

    pr = sub.add_parser("predict", help="write test-split predictions")
    pr.add_argument("--dataset", required=True)
    pr.add_argument("--models", required=True)
    pr.add_argument("--times", help="horizons (default 1,2,4,6,10)")
    pr.add_argument("--out", help="predictions csv (default DATASET/predictions_learned.csv)")

    ev = sub.add_parser("evaluate", help="per-(method,T) RMSE rows")
    ev.add_argument("--dataset", required=True)
    ev.add_argument("--predictions", required=True)
    ev.add_argument("--results", required=True,
                    help="results csv to append to (created if missing)")
    return parser


def _cmd_train_gbt(args) -> None:
    dataset = load_dataset(args.dataset)
    model_dir = Path(args.models or Path(args.dataset) / "models")
    model_dir.mkdir(parents=True, exist_ok=True)
    for T in _times(args.times):
        model = train_gbt(dataset, args.subset, T, seed=args.seed)
        path = model_dir / f"gbt_{args.subset}_T{T:g}.pkl"
        model.save(path)
        print(f"trained {path.name} ({model.n_features} features)")


def _cmd_train_cnn(args) -> None:
    dataset = load_dataset(args.dataset)
    model_dir = Path(args.models or Path(args.dataset) / "models")
    model_dir.mkdir(parents=True, exist_ok=True)
    kwargs = dict(epochs=args.epochs, patience=args.patience,
                  segments_per_run=args.segments_per_run, seed=args.seed,
                  verbose=args.verbose)
    if args.sampling == "per-t":
        for T in _times(args.times):
            model = train_cnn(dataset, args.subset, "per-t", T=T, **kwargs)
            path = model_dir / f"cnn_{args.subset}_per-t_T{T:g}.pt"
            model.save(path)
            print(f"trained {path.name}")
    else:
        model = train_cnn(dataset, args.subset, args.sampling, **kwargs)
        path = model_dir / f"cnn_{args.subset}_{args.sampling}.pt"
        model.save(path)
        print(f"trained {path.name}")


def _cmd_predict(args) -> None:
    dataset = load_dataset(args.dataset)
    model_dir = Path(args.models)
    out = Path(args.out or Path(args.dataset) / "predictions_learned.csv")
    times = _times(args.times)
    total = 0
    for path in sorted(model_dir.glob("gbt_*.pkl")):
        model = GbtModel.load(path)
        if model.T in times:
            total += predict_to_file(model, dataset, model.T,
                                     f"gbt_{model.subset}", out)
    for path in sorted(model_dir.glob("cnn_*.pt")):
        model = CnnModel.load(path)
        method = f"cnn_{model.subset}"
        if model.T is not None:  # per-t checkpoint
            if model.T in times:
                total += predict_to_file(model, dataset, model.T, method, out)
        else:
            for T in times:
                total += predict_to_file(model, dataset, T, method, out)
    print(f"wrote {total} prediction rows to {out}")


def _cmd_evaluate(args) -> None:
    dataset = load_dataset(args.dataset)
    rows = evaluate_predictions(args.predictions, dataset, args.results)
    for method, T, rm, n_used, n_missing in rows:
        print(f"{method} T={T:g}: rmse {rm:.4f} over {n_used} runs"
              + (f" ({n_missing} missing)" if n_missing else ""))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train-gbt":
            _cmd_train_gbt(args)
        elif args.command == "train-cnn":
            _cmd_train_cnn(args)
        elif args.command == "predict":
            _cmd_predict(args)
        elif args.command == "evaluate":
            _cmd_evaluate(args)
    except (ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
