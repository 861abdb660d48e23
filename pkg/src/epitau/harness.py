"""Experiment orchestration: dataset generation, evaluation, results tables.

A scenario is a grid of (graph parameter cell) x (tau) x (replication).
Every run gets a fresh graph and its own 64-bit seed derived from the
experiment seed and the run index, stored in the manifest, so any run can
be regenerated exactly from its manifest row alone.  Datasets are
directories holding manifest.csv, series.csv and config.txt.
"""

from __future__ import annotations

import shutil
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .classical import (EstimateRecord, rmse, tau_hat_approx,
                        tau_hat_exact, write_predictions, write_results,
                        read_results)
from .epidemics import SimParams, gillespie_run, init_state, write_event_log
from .features import (RunManifest, export_dataset, import_dataset,
                       read_manifest, read_series, sample_grid,
                       split_train_test)
from .netgen import (CliqueParams, LayeredGraph, PolyParams,
                     build_clique_layer, build_household_layer,
                     build_polynomial_layer, graph_stats, relax_caveman)

__all__ = [
    "ExperimentConfig",
    "fixed_density_weight",
    "desk_tau_grid",
    "paper_tau_grid",
    "run_scenario",
    "realize_run",
    "evaluate_classical",
    "leave_one_out_experiment",
    "emit_plot_series",
    "render_table",
    "parse_table",
    "write_config",
    "read_config",
]

SCENARIOS = ("poly", "clique_fixed_density", "clique_leave_one_out")

# p_pa = 0 with rising triangle share, then p_tr = 0 with rising
# preferential-attachment share; p_u absorbs the rest.
POLY_MIXES = tuple(
    [(0.0, 1.0 - p_tr, p_tr) for p_tr in (0.1, 0.15, 0.2, 0.25, 0.3)]
    + [(p_pa, 1.0 - p_pa, 0.0) for p_pa in (0.1, 0.15, 0.2, 0.25, 0.3)]
)
FIXED_DENSITY_SIZES = (7, 8, 10, 11, 12, 15)
LOO_SIZES = (7, 8, 9, 10, 11)
REPORT_TIMES = (1.0, 2.0, 4.0, 6.0, 10.0)


def desk_tau_grid() -> list[float]:
    return [i / 100 for i in range(30, 61, 5)]


def paper_tau_grid() -> list[float]:
    return [i / 100 for i in range(30, 61)]


def fixed_density_weight(N_wp: int) -> float:
    """Second-layer weight keeping the out-of-household density at 3.2."""
    if N_wp < 2:
        raise ValueError("N_wp must be >= 2")
    return 3.2 / (N_wp - 1)


@dataclass
class ExperimentConfig:
    scenario: str
    output_dir: str
    seed: int = 0
    n: int = 2000
    N_hh: int = 5
    tau_grid: list[float] = field(default_factory=desk_tau_grid)
    replications: int = 10
    m: int = 4
    n0: int = 50
    w: float = 0.4
    p_relaxed: float = 0.0
    clique_sizes: list[int] | None = None
    poly_mixes: list[tuple[float, float, float]] | None = None
    gamma: float = 1.0
    init_infected_fraction: float = 0.01
    t_max: float = 30.0
    dt: float = 0.1
    train_fraction: float = 0.7
    report_times: list[float] = field(default_factory=lambda: list(REPORT_TIMES))
    workers: int = 1
    keep_logs: bool = False

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if not self.tau_grid:
            raise ValueError("tau grid must be nonempty")
        if any(b <= a for a, b in zip(self.tau_grid, self.tau_grid[1:])):
            raise ValueError("tau grid must be strictly increasing")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.clique_sizes is None:
            self.clique_sizes = list(
                LOO_SIZES if self.scenario == "clique_leave_one_out"
                else FIXED_DENSITY_SIZES
            )
        if self.poly_mixes is None:
            self.poly_mixes = [tuple(mix) for mix in POLY_MIXES]

    @classmethod
    def paper_scale(cls, scenario: str, output_dir: str, seed: int = 0, **kw):
        reps = 50 if scenario == "poly" else 250
        kw.setdefault("n", 5000)
        kw.setdefault("tau_grid", paper_tau_grid())
        kw.setdefault("replications", reps)
        return cls(scenario=scenario, output_dir=output_dir, seed=seed, **kw)


def _cells(cfg: ExperimentConfig) -> list[dict]:
    """Graph-parameter cells in deterministic order."""
    cells = []
    if cfg.scenario == "poly":
        for p_pa, p_u, p_tr in cfg.poly_mixes:
            cells.append(dict(graph_model="poly", p_pa=p_pa, p_u=p_u, p_tr=p_tr,
                              m=cfg.m, n0=cfg.n0, N_wp=None, p_relaxed=None,
                              w=cfg.w))
    else:
        for size in cfg.clique_sizes:
            cells.append(dict(graph_model="clique", p_pa=None, p_u=None,
                              p_tr=None, m=None, n0=None, N_wp=size,
                              p_relaxed=cfg.p_relaxed,
                              w=fixed_density_weight(size)))
    return cells


def _run_seed(experiment_seed: int, run_index: int) -> int:
    ss = np.random.SeedSequence([experiment_seed, run_index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def enumerate_runs(cfg: ExperimentConfig) -> list[RunManifest]:
    """Manifest prototypes (d unset, split unset) for every run of cfg."""
    protos = []
    idx = 0
    for cell in _cells(cfg):
        for tau in cfg.tau_grid:
            for _ in range(cfg.replications):
                protos.append(RunManifest(
                    run_id=f"r{idx:05d}",
                    n=cfg.n,
                    N_hh=cfg.N_hh,
                    tau=tau,
                    seed=_run_seed(cfg.seed, idx),
                    **cell,
                ))
                idx += 1
    return protos


def _build_graph(m: RunManifest, rng: np.random.Generator) -> LayeredGraph:
    g = build_household_layer(m.n, m.N_hh)
    if m.graph_model == "poly":
        params = PolyParams(m.p_pa, m.p_u, m.p_tr, m=m.m, n0=m.n0)
        return build_polynomial_layer(g, params, m.w, rng)
    if m.graph_model == "clique":
        g = build_clique_layer(g, CliqueParams(m.N_wp, m.p_relaxed or 0.0, m.w), rng)
        if m.p_relaxed:
            g = relax_caveman(g, m.p_relaxed, rng)
        return g
    raise ValueError(f"unknown graph model {m.graph_model!r}")


def realize_run(manifest: RunManifest, init_fraction: float = 0.01,
                t_max: float = 30.0, gamma: float = 1.0):
    """Deterministically rebuild (graph, log) from a manifest row."""
    rng = np.random.default_rng(manifest.seed)
    g = _build_graph(manifest, rng)
    init = init_state(g, init_fraction, rng)
    params = SimParams(tau=manifest.tau, gamma=gamma,
                       init_infected_fraction=init_fraction, t_max=t_max)
    log = gillespie_run(g, params, rng, initial_infected=init)
    return g, log


def _generate_one(args):
    manifest, init_fraction, t_max, gamma, dt, keep_log = args
    for attempt in (0, 1):
        try:
            g, log = realize_run(manifest, init_fraction, t_max, gamma)
            break
        except Exception as exc:  # re-seed once, then give up
            if attempt == 1:
                raise
            print(f"warning: run {manifest.run_id} failed ({exc}); re-seeding",
                  file=sys.stderr)
            manifest.seed = (manifest.seed + 0x9E3779B97F4A7C15) % 2**64
    manifest.d = graph_stats(g).d
    feats = sample_grid(log, g, dt=dt, t_max=t_max, run_id=manifest.run_id)
    return manifest, feats, (log if keep_log else None)


def run_scenario(cfg: ExperimentConfig) -> Path:
    """Generate, split and export the full dataset of cfg; returns its path."""
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    protos = enumerate_runs(cfg)
    jobs = [(m, cfg.init_infected_fraction, cfg.t_max, cfg.gamma, cfg.dt,
             cfg.keep_logs) for m in protos]
    results = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for i, res in enumerate(pool.map(_generate_one, jobs, chunksize=4)):
                results.append(res)
                _progress(i + 1, len(jobs))
    else:
        for i, job in enumerate(jobs):
            results.append(_generate_one(job))
            _progress(i + 1, len(jobs))
    manifests = [m for m, _, _ in results]
    split_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 2**32]))
    split_train_test(manifests, cfg.train_fraction, split_rng)
    export_dataset([(m, f) for m, f, _ in results], out_dir)
    if cfg.keep_logs:
        log_dir = out_dir / "logs"
        log_dir.mkdir(exist_ok=True)
        for m, _, log in results:
            write_event_log(log, log_dir / f"{m.run_id}.log")
    write_config(cfg, out_dir / "config.txt")
    return out_dir


def _progress(done: int, total: int) -> None:
    if total >= 20 and done % max(1, total // 20) == 0:
        print(f"  generated {done}/{total} runs", file=sys.stderr)


def write_config(cfg: ExperimentConfig, path) -> None:
    """key=value dump of the config; lists are comma-joined."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, val in asdict(cfg).items():
            if key == "poly_mixes":
                val = ";".join(":".join(str(p) for p in mix) for mix in val)
            elif isinstance(val, (list, tuple)):
                val = ",".join(str(x) for x in val)
            fh.write(f"{key}={val}\n")


def read_config(path) -> dict[str, str]:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line {line!r}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def _dataset_sim_settings(dataset: Path) -> tuple[float, float, float]:
    """(init_fraction, t_max, gamma) recorded at generation time."""
    cfg_path = dataset / "config.txt"
    if not cfg_path.exists():
        return 0.01, 30.0, 1.0
    raw = read_config(cfg_path)
    return (float(raw.get("init_infected_fraction", 0.01)),
            float(raw.get("t_max", 30.0)),
            float(raw.get("gamma", 1.0)))


def evaluate_classical(
    dataset,
    times: list[float] | None = None,
    methods: list[str] | None = None,
    out_dir=None,
) -> Path:
    """Run the classical estimators on the dataset's test runs.

    Writes predictions.csv, results.csv and table.txt; returns the results
    path.  If the dataset has no test-split runs, all runs are evaluated
    (with a warning) so tiny datasets still produce a table.
    """
    dataset = Path(dataset)
    out_dir = Path(out_dir) if out_dir is not None else dataset
    out_dir.mkdir(parents=True, exist_ok=True)
    manifests = read_manifest(dataset / "manifest.csv")
    series = read_series(dataset / "series.csv")
    init_fraction, t_max, gamma = _dataset_sim_settings(dataset)
    if times is None:
        times = list(REPORT_TIMES)
    if methods is None:
        methods = ["ml_exact", "ml_static"]
        if any(m.graph_model == "poly" for m in manifests):
            methods.append("ml_dynamic")
    test = [m for m in manifests if m.split == "test"]
    if not test:
        print("warning: no test-split runs; evaluating all runs", file=sys.stderr)
        test = manifests
    records: list[EstimateRecord] = []
    for man in test:
        if man.run_id not in series:
            raise ValueError(f"run {man.run_id}: series missing from dataset")
        feats = series[man.run_id]
        if "ml_exact" in methods:
            g, log = realize_run(man, init_fraction, t_max, gamma)
            d_check = graph_stats(g).d
            if abs(d_check - man.d) > 1e-4 * (1.0 + abs(man.d)):
                raise ValueError(
                    f"run {man.run_id}: regenerated graph disagrees with manifest "
                    f"(d={d_check:.6g} vs {man.d:.6g})")
            for T in times:
                records.append(EstimateRecord(
                    man.run_id, T, "ml_exact", tau_hat_exact(log, g, T)))
        for method, variant in (("ml_static", "static"), ("ml_dynamic", "dynamic")):
            if method in methods:
                for T in times:
                    records.append(EstimateRecord(
                        man.run_id, T, method, tau_hat_approx(feats, man, T, variant)))
    truths = {m.run_id: m.tau for m in manifests}
    write_predictions(records, out_dir / "predictions.csv")
    rows = []
    for method in methods:
        for T in times:
            sub = [r for r in records if r.method == method and r.T == T]
            rows.append((method, T, rmse(sub, truths)))
    write_results(rows, out_dir / "results.csv")
    with open(out_dir / "table.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_table(rows))
    return out_dir / "results.csv"


def leave_one_out_experiment(dataset, omitted: int, test_on: int, out_dir) -> Path:
    """Derive a train/test dataset pair from a clique-size family.

    Training keeps train-split runs of every clique size except `omitted`;
    the test set keeps only test-split runs of size `test_on`.  The filtered
    dataset (one manifest, split column encodes membership) is written to
    out_dir and the classical estimators are evaluated on its test part for
    reference.
    """
    dataset = Path(dataset)
    out_dir = Path(out_dir)
    pairs = import_dataset(dataset)
    sizes = {m.N_wp for m, _ in pairs}
    if omitted not in sizes or test_on not in sizes:
        raise ValueError(f"clique sizes {omitted}/{test_on} not in family {sorted(sizes)}")
    train = [(m, f) for m, f in pairs if m.split == "train" and m.N_wp != omitted]
    test = [(m, f) for m, f in pairs if m.split == "test" and m.N_wp == test_on]
    if not train:
        raise ValueError("leave-one-out training set is empty")
    if not test:
        raise ValueError("leave-one-out test set is empty")
    export_dataset(train + test, out_dir)
    if (dataset / "config.txt").exists():
        shutil.copy(dataset / "config.txt", out_dir / "config.txt")
    evaluate_classical(out_dir)
    return out_dir


def emit_plot_series(results, out_path) -> Path:
    """Flatten one or more results.csv files into curves.csv (label,t,rmse).

    With several inputs the label is prefixed by the results file's
    directory name, so curves from different experiments stay distinct.
    """
    paths = [Path(p) for p in ([results] if isinstance(results, (str, Path)) else results)]
    out_path = Path(out_path)
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("label,t,rmse\n")
        for p in paths:
            for method, T, res in read_results(p):
                label = method if len(paths) == 1 else f"{p.parent.name}:{method}"
                fh.write(f"{label},{T:g},{res.rmse!r}\n")
    return out_path


def render_table(rows) -> str:
    """Plain-text RMSE table: methods as rows, report times as columns."""
    times = sorted({T for _, T, _ in rows})
    methods = []
    for method, _, _ in rows:
        if method not in methods:
            methods.append(method)
    cells = {(method, T): res.rmse for method, T, res in rows}
    width = max(len("method"), max(len(m) for m in methods)) + 2
    header = "method".ljust(width) + "".join(f"t={T:g}".rjust(9) for T in times)
    lines = [header]
    for method in methods:
        line = method.ljust(width)
        for T in times:
            val = cells.get((method, T))
            line += ("   --    " if val is None else f"{val:9.4f}")
        lines.append(line)
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> list[tuple[str, float, float]]:
    """Inverse of render_table: (method, T, rmse) triples."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split()
    if header[0] != "method":
        raise ValueError("not a results table")
    times = [float(tok[2:]) for tok in header[1:]]
    out = []
    for line in lines[1:]:
        toks = line.split()
        method, vals = toks[0], toks[1:]
        for T, tok in zip(times, vals):
            if tok != "--":
                out.append((method, T, float(tok)))
    return out
