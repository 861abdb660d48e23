"""Shared-schema prediction and results files.

predictions.csv: run_id,T,method,tau_hat (tau_hat empty when undefined).
results.csv: method,T,rmse,n_used,n_missing.  Both match the simulation
side's formats, so learned and classical rows combine into one table.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .data import Dataset

PREDICTIONS_HEADER = "run_id,T,method,tau_hat"
RESULTS_HEADER = "method,T,rmse,n_used,n_missing"


def append_predictions(rows, path) -> None:
    """rows: iterable of (run_id, T, method, tau_hat-or-None)."""
    path = Path(path)
    fresh = not path.exists()
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        if fresh:
            fh.write(PREDICTIONS_HEADER + "\n")
        for run_id, T, method, tau_hat in rows:
            val = "" if tau_hat is None or not math.isfinite(tau_hat) else str(tau_hat)
            fh.write(f"{run_id},{T:g},{method},{val}\n")


def read_predictions(path) -> list[tuple[str, float, str, float | None]]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            val = None if row["tau_hat"] == "" else float(row["tau_hat"])
            out.append((row["run_id"], float(row["T"]), row["method"], val))
    return out


def predict_to_file(model, dataset: Dataset, T: float, method: str, out_path) -> int:
    """Run one model on the test split at horizon T; returns rows written."""
    test = dataset.runs("test")
    if not test:
        test = dataset.runs()
    tau_hat = model.predict(dataset, test, T)
    rows = [(m["run_id"], T, method, float(v)) for m, v in zip(test, tau_hat)]
    append_predictions(rows, out_path)
    return len(rows)


def evaluate_predictions(predictions_path, dataset: Dataset, results_path) -> list:
    """Per-(method, T) RMSE rows appended to results.csv in the shared schema."""
    truths = {m["run_id"]: float(m["tau"]) for m in dataset.manifests}
    groups: dict[tuple[str, float], list] = {}
    for run_id, T, method, tau_hat in read_predictions(predictions_path):
        if run_id not in truths:
            raise ValueError(f"prediction for unknown run {run_id}")
        groups.setdefault((method, T), []).append((run_id, tau_hat))
    results_path = Path(results_path)
    fresh = not results_path.exists()
    out_rows = []
    with open(results_path, "a", encoding="utf-8", newline="\n") as fh:
        if fresh:
            fh.write(RESULTS_HEADER + "\n")
        for (method, T), vals in sorted(groups.items()):
            errs = [tau_hat - truths[r] for r, tau_hat in vals if tau_hat is not None]
            n_missing = sum(tau_hat is None for _, tau_hat in vals)
            if not errs:
                raise ValueError(f"all estimates missing for {method} at T={T}")
            rm = float(np.sqrt(np.mean(np.square(errs))))
            fh.write(f"{method},{T:g},{rm!r},{len(errs)},{n_missing}\n")
            out_rows.append((method, T, rm, len(errs), n_missing))
    return out_rows
