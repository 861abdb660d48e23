import numpy as np
import pytest

from epitau import (ExperimentConfig, RmseResult, emit_plot_series,
                    evaluate_classical, fixed_density_weight,
                    leave_one_out_experiment, parse_table, read_manifest,
                    render_table, run_scenario)
from epitau.classical import read_predictions, read_results
from epitau.harness import enumerate_runs, paper_tau_grid, realize_run


def tiny_clique_config(out, sizes=(9,), taus=(0.4, 0.5), reps=3, n=200, seed=7,
                       scenario="clique_fixed_density"):
    return ExperimentConfig(scenario=scenario, output_dir=str(out), seed=seed,
                            n=n, tau_grid=list(taus), replications=reps,
                            clique_sizes=list(sizes))


@pytest.fixture(scope="module")
def tiny_dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("ds")
    cfg = tiny_clique_config(out)
    run_scenario(cfg)
    return out


# ------------------------------------------------------------------ weights

def test_fixed_density_weights_exact():
    assert fixed_density_weight(9) == 0.4
    assert fixed_density_weight(11) == 3.2 / 10
    assert fixed_density_weight(7) == pytest.approx(0.5333333333333333)
    for size in range(2, 20):
        assert fixed_density_weight(size) == 3.2 / (size - 1)


# ------------------------------------------------------------- enumeration

def test_paper_scale_poly_run_count():
    cfg = ExperimentConfig.paper_scale("poly", "unused")
    runs = enumerate_runs(cfg)
    assert len(runs) == 10 * 31 * 50  # 15500
    assert len({m.run_id for m in runs}) == len(runs)


def test_desk_clique_31tau_run_count():
    cfg = ExperimentConfig(scenario="clique_fixed_density", output_dir="x",
                           tau_grid=paper_tau_grid(), replications=10)
    assert len(enumerate_runs(cfg)) == 6 * 31 * 10  # 1860


def test_single_cell_single_run():
    cfg = ExperimentConfig(scenario="poly", output_dir="x",
                           poly_mixes=[(0.0, 0.7, 0.3)], tau_grid=[0.45],
                           replications=1)
    runs = enumerate_runs(cfg)
    assert len(runs) == 1
    assert runs[0].p_u == 0.7


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(scenario="nope", output_dir="x")
    with pytest.raises(ValueError):
        ExperimentConfig(scenario="poly", output_dir="x", tau_grid=[])
    with pytest.raises(ValueError):
        ExperimentConfig(scenario="poly", output_dir="x", tau_grid=[0.4, 0.4])
    with pytest.raises(ValueError):
        ExperimentConfig(scenario="poly", output_dir="x", replications=0)


# --------------------------------------------------------------- generation

def test_tiny_dataset_files(tiny_dataset):
    manifests = read_manifest(tiny_dataset / "manifest.csv")
    assert len(manifests) == 1 * 2 * 3
    assert all(m.split in ("train", "test") for m in manifests)
    assert all(m.N_wp == 9 and m.w == 0.4 for m in manifests)
    assert (tiny_dataset / "config.txt").exists()
    series_lines = (tiny_dataset / "series.csv").read_text().count("\n")
    assert series_lines == 1 + 6 * 300


def test_generate_deterministic_manifest(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    run_scenario(tiny_clique_config(out1, taus=(0.45,), reps=2))
    run_scenario(tiny_clique_config(out2, taus=(0.45,), reps=2))
    assert (out1 / "manifest.csv").read_bytes() == (out2 / "manifest.csv").read_bytes()
    assert (out1 / "series.csv").read_bytes() == (out2 / "series.csv").read_bytes()


def test_workers_do_not_change_output(tmp_path):
    out1, out2 = tmp_path / "w1", tmp_path / "w2"
    cfg1 = tiny_clique_config(out1, taus=(0.45,), reps=4)
    cfg2 = tiny_clique_config(out2, taus=(0.45,), reps=4)
    cfg2.workers = 2
    run_scenario(cfg1)
    run_scenario(cfg2)
    assert (out1 / "manifest.csv").read_bytes() == (out2 / "manifest.csv").read_bytes()
    assert (out1 / "series.csv").read_bytes() == (out2 / "series.csv").read_bytes()


def test_realize_run_reproduces_generation(tiny_dataset):
    man = read_manifest(tiny_dataset / "manifest.csv")[0]
    g1, log1 = realize_run(man)
    g2, log2 = realize_run(man)
    assert np.array_equal(g1.second_edges, g2.second_edges)
    assert np.array_equal(log1.times, log2.times)
    assert np.array_equal(log1.vertices, log2.vertices)


def test_keep_logs_written(tmp_path):
    cfg = tiny_clique_config(tmp_path / "ds", taus=(0.45,), reps=1)
    cfg.keep_logs = True
    with pytest.warns(UserWarning):  # single-run stratum goes to train
        out = run_scenario(cfg)
    logs = list((out / "logs").glob("*.log"))
    assert len(logs) == 1


# --------------------------------------------------------------- evaluation

def test_evaluate_clique_methods_and_files(tiny_dataset, tmp_path):
    out = tmp_path / "eval"
    results = evaluate_classical(tiny_dataset, times=[1.0, 2.0], out_dir=out)
    rows = read_results(results)
    methods = {m for m, _, _ in rows}
    assert methods == {"ml_exact", "ml_static"}  # no ml_dynamic for cliques
    preds = read_predictions(out / "predictions.csv")
    n_test = sum(m.split == "test" for m in read_manifest(tiny_dataset / "manifest.csv"))
    assert len(preds) == n_test * 2 * 2
    assert (out / "table.txt").exists()


def test_evaluate_single_run_table(tmp_path):
    cfg = tiny_clique_config(tmp_path / "one", taus=(0.45,), reps=1, n=300)
    with pytest.warns(UserWarning):
        out = run_scenario(cfg)
    results = evaluate_classical(out, times=[4.0])
    rows = read_results(results)
    truths = {m.run_id: m.tau for m in read_manifest(out / "manifest.csv")}
    preds = read_predictions(out / "predictions.csv")
    exact = [p for p in preds if p.method == "ml_exact"][0]
    want = abs(exact.tau_hat - truths[exact.run_id])
    got = [r for r in rows if r[0] == "ml_exact"][0][2].rmse
    assert got == pytest.approx(want)


def test_evaluate_missing_series_aborts(tiny_dataset, tmp_path):
    broken = tmp_path / "broken"
    broken.mkdir()
    (broken / "manifest.csv").write_bytes((tiny_dataset / "manifest.csv").read_bytes())
    victim = next(m.run_id for m in read_manifest(tiny_dataset / "manifest.csv")
                  if m.split == "test")
    lines = (tiny_dataset / "series.csv").read_text().splitlines(keepends=True)
    keep = [lines[0]] + [ln for ln in lines[1:] if not ln.startswith(victim + ",")]
    (broken / "series.csv").write_text("".join(keep))
    with pytest.raises(ValueError, match=victim):
        evaluate_classical(broken, times=[1.0])


# ------------------------------------------------------------ leave-one-out

@pytest.fixture(scope="module")
def loo_family(tmp_path_factory):
    out = tmp_path_factory.mktemp("family")
    cfg = ExperimentConfig(scenario="clique_leave_one_out", output_dir=str(out),
                           seed=3, n=150, tau_grid=[0.4, 0.5], replications=3,
                           clique_sizes=[7, 8, 9, 10, 11])
    run_scenario(cfg)
    return out


def test_loo_set_algebra(loo_family, tmp_path):
    out = leave_one_out_experiment(loo_family, omitted=9, test_on=9,
                                   out_dir=tmp_path / "loo99")
    manifests = read_manifest(out / "manifest.csv")
    train = [m for m in manifests if m.split == "train"]
    test = [m for m in manifests if m.split == "test"]
    assert {m.N_wp for m in train} == {7, 8, 10, 11}
    assert {m.N_wp for m in test} == {9}
    assert not {m.run_id for m in train} & {m.run_id for m in test}
    assert (out / "results.csv").exists()


def test_loo_cross_size(loo_family, tmp_path):
    out = leave_one_out_experiment(loo_family, omitted=7, test_on=10,
                                   out_dir=tmp_path / "loo710")
    manifests = read_manifest(out / "manifest.csv")
    assert all(m.N_wp != 7 for m in manifests if m.split == "train")
    assert any(m.N_wp == 10 for m in manifests if m.split == "train")
    assert {m.N_wp for m in manifests if m.split == "test"} == {10}


def test_loo_rejects_unknown_size(loo_family, tmp_path):
    with pytest.raises(ValueError):
        leave_one_out_experiment(loo_family, omitted=99, test_on=9,
                                 out_dir=tmp_path / "bad")


# ---------------------------------------------------------------- plot data

def test_emit_plot_series_counts(tmp_path):
    from epitau.classical import write_results

    rows = [("ml_exact", T, RmseResult(0.01 * T, 5, 0)) for T in (1, 2, 4, 6, 10)]
    rp = tmp_path / "results.csv"
    write_results(rows, rp)
    curves = emit_plot_series(rp, tmp_path / "curves.csv")
    lines = curves.read_text().splitlines()
    assert len(lines) == 6
    assert lines[0] == "label,t,rmse"
    assert all(ln.startswith("ml_exact,") for ln in lines[1:])


def test_emit_plot_series_distinct_labels(tmp_path):
    from epitau.classical import write_results

    rows = [("ml_exact", 1.0, RmseResult(0.02, 5, 0))]
    p1 = tmp_path / "loo_a" / "results.csv"
    p2 = tmp_path / "loo_b" / "results.csv"
    p1.parent.mkdir()
    p2.parent.mkdir()
    write_results(rows, p1)
    write_results(rows, p2)
    curves = emit_plot_series([p1, p2], tmp_path / "curves.csv")
    labels = {ln.split(",")[0] for ln in curves.read_text().splitlines()[1:]}
    assert labels == {"loo_a:ml_exact", "loo_b:ml_exact"}
    # round-trip parse
    for ln in curves.read_text().splitlines()[1:]:
        label, t, r = ln.split(",")
        float(t), float(r)


# -------------------------------------------------------------------- table

def test_table_roundtrip():
    rows = [("ml_exact", 1.0, RmseResult(0.044, 15, 0)),
            ("ml_exact", 4.0, RmseResult(0.0085, 15, 0)),
            ("ml_static", 1.0, RmseResult(0.0654, 15, 0)),
            ("ml_static", 4.0, RmseResult(0.0142, 14, 1))]
    text = render_table(rows)
    parsed = parse_table(text)
    assert len(parsed) == 4
    for (method, T, rmse_val), (m2, t2, r2) in zip(
            [(m, t, r.rmse) for m, t, r in rows], sorted(parsed)):
        assert (method, T) == (m2, t2)
        assert abs(rmse_val - r2) < 5e-5  # cells carry 4 decimals
    # render(parse(render(x))) is stable
    rows2 = [(m, t, RmseResult(r, 0, 0)) for m, t, r in parsed]
    assert render_table(rows2) == text
