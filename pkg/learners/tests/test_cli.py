from taulearn.cli import main


def test_gbt_train_predict_evaluate_flow(synthetic_dataset, tmp_path):
    models = tmp_path / "models"
    pred = tmp_path / "pred.csv"
    results = tmp_path / "results.csv"
    assert main(["train-gbt", "--dataset", str(synthetic_dataset),
                 "--subset", "sir", "--times", "1,4", "--models", str(models)]) == 0
    assert sorted(p.name for p in models.glob("*.pkl")) == \
        ["gbt_sir_T1.pkl", "gbt_sir_T4.pkl"]
    assert main(["predict", "--dataset", str(synthetic_dataset),
                 "--models", str(models), "--times", "1,4",
                 "--out", str(pred)]) == 0
    lines = pred.read_text().splitlines()
    n_test = sum(1 for ln in open(synthetic_dataset / "manifest.csv")
                 if ln.rstrip().endswith(",test"))
    assert len(lines) == 1 + 2 * n_test
    assert main(["evaluate", "--dataset", str(synthetic_dataset),
                 "--predictions", str(pred), "--results", str(results)]) == 0
    rows = results.read_text().splitlines()
    assert rows[0] == "method,T,rmse,n_used,n_missing"
    assert len(rows) == 3


def test_cnn_cli_small(synthetic_dataset, tmp_path):
    models = tmp_path / "models"
    code = main(["train-cnn", "--dataset", str(synthetic_dataset),
                 "--subset", "sir", "--sampling", "uniform",
                 "--epochs", "2", "--models", str(models)])
    assert code == 0
    assert (models / "cnn_sir_uniform.pt").exists()
    pred = tmp_path / "pred.csv"
    assert main(["predict", "--dataset", str(synthetic_dataset),
                 "--models", str(models), "--times", "2,6",
                 "--out", str(pred)]) == 0
    assert sum(1 for _ in open(pred)) > 1


def test_missing_dataset_exits_3(tmp_path):
    assert main(["train-gbt", "--dataset", str(tmp_path / "nope"),
                 "--subset", "sir", "--times", "1"]) == 3


def test_bad_horizon_exits_2(synthetic_dataset, tmp_path):
    assert main(["train-gbt", "--dataset", str(synthetic_dataset),
                 "--subset", "sir", "--times", "3.14",
                 "--models", str(tmp_path / "m")]) == 2
