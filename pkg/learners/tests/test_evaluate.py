import numpy as np
import pytest

from taulearn import (append_predictions, evaluate_predictions, load_dataset,
                      predict_to_file, read_predictions)


class StubModel:
    """Predicts a fixed constant; stands in for any trained model."""

    def __init__(self, value):
        self.value = value

    def predict(self, dataset, runs, T):
        return np.full(len(runs), self.value)


def test_predictions_roundtrip(tmp_path):
    p = tmp_path / "pred.csv"
    append_predictions([("r1", 1.0, "gbt_sir", 0.42),
                        ("r2", 1.0, "gbt_sir", None)], p)
    append_predictions([("r1", 4.0, "cnn_sir", 0.5)], p)  # appends, one header
    rows = read_predictions(p)
    assert rows == [("r1", 1.0, "gbt_sir", 0.42), ("r2", 1.0, "gbt_sir", None),
                    ("r1", 4.0, "cnn_sir", 0.5)]
    assert p.read_text().count("run_id,T,method,tau_hat") == 1


def test_predict_row_counts(synthetic_dataset, tmp_path):
    ds = load_dataset(synthetic_dataset)
    out = tmp_path / "pred.csv"
    n_test = len(ds.runs("test"))
    total = 0
    for T in (1.0, 2.0, 4.0, 6.0, 10.0):
        total += predict_to_file(StubModel(0.45), ds, T, "gbt_sir", out)
    assert total == 5 * n_test
    assert len(read_predictions(out)) == total


def test_evaluate_perfect_predictions(synthetic_dataset, tmp_path):
    ds = load_dataset(synthetic_dataset)
    rows = [(m["run_id"], 4.0, "gbt_all", float(m["tau"]))
            for m in ds.runs("test")]
    p = tmp_path / "pred.csv"
    append_predictions(rows, p)
    out = evaluate_predictions(p, ds, tmp_path / "results.csv")
    assert out == [("gbt_all", 4.0, 0.0, len(rows), 0)]


def test_constant_mean_predictor_rmse(tmp_path):
    """Constant 0.45 over the uniform tau grid: RMSE ~ grid std ~ 0.0866."""
    from conftest import write_synthetic_dataset

    taus = [0.3 + 0.01 * k for k in range(31)]
    path = write_synthetic_dataset(tmp_path / "grid", taus=taus, reps=2,
                                   n_grid=20)
    ds = load_dataset(path)
    p = tmp_path / "pred.csv"
    append_predictions([(m["run_id"], 1.0, "cnn_sir", 0.45)
                        for m in ds.runs()], p)
    rows = evaluate_predictions(p, ds, tmp_path / "results.csv")
    assert rows[0][2] == pytest.approx(0.0866, abs=0.005)


def test_evaluate_appends_to_shared_results(synthetic_dataset, tmp_path):
    ds = load_dataset(synthetic_dataset)
    results = tmp_path / "results.csv"
    results.write_text("method,T,rmse,n_used,n_missing\nml_exact,4,0.01,18,0\n")
    p = tmp_path / "pred.csv"
    append_predictions([(m["run_id"], 4.0, "gbt_sir", 0.4)
                        for m in ds.runs("test")], p)
    evaluate_predictions(p, ds, results)
    lines = results.read_text().splitlines()
    assert lines[1].startswith("ml_exact")
    assert lines[2].startswith("gbt_sir")
    assert len(lines) == 3


def test_evaluate_counts_missing(synthetic_dataset, tmp_path):
    ds = load_dataset(synthetic_dataset)
    test = ds.runs("test")
    rows = [(m["run_id"], 1.0, "gbt_sir",
             None if i == 0 else 0.44) for i, m in enumerate(test)]
    p = tmp_path / "pred.csv"
    append_predictions(rows, p)
    out = evaluate_predictions(p, ds, tmp_path / "results.csv")
    assert out[0][4] == 1
    assert out[0][3] == len(test) - 1


def test_evaluate_rejects_unknown_run(synthetic_dataset, tmp_path):
    ds = load_dataset(synthetic_dataset)
    p = tmp_path / "pred.csv"
    append_predictions([("ghost", 1.0, "gbt_sir", 0.4)], p)
    with pytest.raises(ValueError, match="ghost"):
        evaluate_predictions(p, ds, tmp_path / "results.csv")
