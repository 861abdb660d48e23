"""Equidistant "daily report" series and dataset files.

An event log is reduced to right-continuous samples on the grid
dt, 2*dt, ..., t_max (300 points at the defaults): compartment counts,
per-layer SI edge counts, and class-averaged degrees.  Datasets are a pair
of CSV files (manifest.csv, series.csv) with fixed schemas; degrees are
written with 6 significant digits, counts as integers.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .epidemics import EventLog, ReplayState
from .netgen import LayeredGraph

__all__ = [
    "TrajectoryFeatures",
    "RunManifest",
    "sample_grid",
    "export_dataset",
    "import_dataset",
    "read_manifest",
    "read_series",
    "split_train_test",
    "MANIFEST_HEADER",
    "SERIES_HEADER",
]

MANIFEST_HEADER = ("run_id,graph_model,p_pa,p_u,p_tr,m,n0,N_wp,p_relaxed,"
                   "w,n,N_hh,d,tau,seed,split")
SERIES_HEADER = "run_id,t,S,I,R,E_SI_hh,E_SI_o,d_S_w,d_I_w,d_I_out"


@dataclass
class TrajectoryFeatures:
    """Per-run observation series on the fixed grid.

    When a class is empty (I=0 after extinction, or S=0), its degree
    averages are recorded as 0.
    """

    run_id: str
    grid: np.ndarray        # times dt, 2dt, ..., t_max
    S: np.ndarray
    I: np.ndarray
    R: np.ndarray
    E_SI_hh: np.ndarray
    E_SI_o: np.ndarray
    d_S_w: np.ndarray
    d_I_w: np.ndarray
    d_I_out: np.ndarray


@dataclass
class RunManifest:
    """Per-run metadata; inapplicable graph fields stay None."""

    run_id: str
    graph_model: str                 # "poly" or "clique"
    n: int
    N_hh: int
    w: float
    tau: float
    seed: int
    d: float = 0.0
    p_pa: float | None = None
    p_u: float | None = None
    p_tr: float | None = None
    m: int | None = None
    n0: int | None = None
    N_wp: int | None = None
    p_relaxed: float | None = None
    split: str = ""


def sample_grid(
    log: EventLog,
    g: LayeredGraph,
    dt: float = 0.1,
    t_max: float = 30.0,
    run_id: str = "",
) -> TrajectoryFeatures:
    """Replay the log and sample all series right-continuously on the grid.

    The value at grid time t is the state after the last event with time <= t.
    """
    n_pts = int(round(t_max / dt))
    if not np.isclose(n_pts * dt, t_max):
        raise ValueError("t_max must be an integer multiple of dt")
    grid = np.arange(1, n_pts + 1) * dt
    state = ReplayState(g, log.initial_infected)
    out = {name: np.zeros(n_pts, dtype=np.int64)
           for name in ("S", "I", "R", "E_SI_hh", "E_SI_o")}
    deg = {name: np.zeros(n_pts) for name in ("d_S_w", "d_I_w", "d_I_out")}
    times = log.times
    kinds = log.kinds
    verts = log.vertices
    j = 0
    n_events = len(times)
    for k, t in enumerate(grid):
        while j < n_events and times[j] <= t:
            state.apply(int(kinds[j]), int(verts[j]))
            j += 1
        out["S"][k] = state.S
        out["I"][k] = state.I
        out["R"][k] = state.R
        out["E_SI_hh"][k] = state.E_SI_hh
        out["E_SI_o"][k] = state.E_SI_o
        deg["d_S_w"][k] = state.d_S_w
        deg["d_I_w"][k] = state.d_I_w
        deg["d_I_out"][k] = state.d_I_out
    return TrajectoryFeatures(run_id=run_id, grid=grid, **out, **deg)


def _fmt_opt(x) -> str:
    return "" if x is None else str(x)


def _manifest_row(m: RunManifest) -> str:
    return ",".join([
        m.run_id,
        m.graph_model,
        _fmt_opt(m.p_pa),
        _fmt_opt(m.p_u),
        _fmt_opt(m.p_tr),
        _fmt_opt(m.m),
        _fmt_opt(m.n0),
        _fmt_opt(m.N_wp),
        _fmt_opt(m.p_relaxed),
        str(m.w),
        str(m.n),
        str(m.N_hh),
        f"{m.d:.6g}",
        str(m.tau),
        str(m.seed),
        m.split,
    ])


def export_dataset(runs, out_dir) -> None:
    """Write manifest.csv and series.csv; overwrites existing files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    runs = sorted(runs, key=lambda r: r[0].run_id)
    ids = [m.run_id for m, _ in runs]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate run_id in dataset")
    with open(out_dir / "manifest.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(MANIFEST_HEADER + "\n")
        for m, _ in runs:
            fh.write(_manifest_row(m) + "\n")
    with open(out_dir / "series.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SERIES_HEADER + "\n")
        for m, f in runs:
            for k in range(len(f.grid)):
                fh.write(
                    f"{m.run_id},{f.grid[k]:.1f},{f.S[k]},{f.I[k]},{f.R[k]},"
                    f"{f.E_SI_hh[k]},{f.E_SI_o[k]},{f.d_S_w[k]:.6g},"
                    f"{f.d_I_w[k]:.6g},{f.d_I_out[k]:.6g}\n"
                )


def _parse_opt(s: str, typ):
    return None if s == "" else typ(s)


def read_manifest(path) -> list[RunManifest]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            out.append(RunManifest(
                run_id=row["run_id"],
                graph_model=row["graph_model"],
                p_pa=_parse_opt(row["p_pa"], float),
                p_u=_parse_opt(row["p_u"], float),
                p_tr=_parse_opt(row["p_tr"], float),
                m=_parse_opt(row["m"], int),
                n0=_parse_opt(row["n0"], int),
                N_wp=_parse_opt(row["N_wp"], int),
                p_relaxed=_parse_opt(row["p_relaxed"], float),
                w=float(row["w"]),
                n=int(row["n"]),
                N_hh=int(row["N_hh"]),
                d=float(row["d"]),
                tau=float(row["tau"]),
                seed=int(row["seed"]),
                split=row["split"],
            ))
    return out


def read_series(path) -> dict[str, TrajectoryFeatures]:
    """Parse series.csv into one TrajectoryFeatures per run_id."""
    cols: dict[str, list[list]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if ",".join(header) != SERIES_HEADER:
            raise ValueError(f"unexpected series header {header}")
        for row in reader:
            cols.setdefault(row[0], []).append(row[1:])
    out = {}
    for run_id, rows in cols.items():
        arr = np.array(rows, dtype=float)
        out[run_id] = TrajectoryFeatures(
            run_id=run_id,
            grid=arr[:, 0],
            S=arr[:, 1].astype(np.int64),
            I=arr[:, 2].astype(np.int64),
            R=arr[:, 3].astype(np.int64),
            E_SI_hh=arr[:, 4].astype(np.int64),
            E_SI_o=arr[:, 5].astype(np.int64),
            d_S_w=arr[:, 6],
            d_I_w=arr[:, 7],
            d_I_out=arr[:, 8],
        )
    return out


def import_dataset(dir_path):
    """Inverse of export_dataset: list of (RunManifest, TrajectoryFeatures)."""
    dir_path = Path(dir_path)
    manifests = read_manifest(dir_path / "manifest.csv")
    series = read_series(dir_path / "series.csv")
    out = []
    for m in manifests:
        if m.run_id not in series:
            raise ValueError(f"run {m.run_id} missing from series.csv")
        out.append((m, series[m.run_id]))
    return out


def _stratum_key(m: RunManifest):
    return (m.graph_model, m.p_pa, m.p_u, m.p_tr, m.m, m.n0, m.N_wp,
            m.p_relaxed, m.w, m.n, m.N_hh, m.tau)


def split_train_test(
    manifests: list[RunManifest],
    train_fraction: float = 0.7,
    rng: np.random.Generator | None = None,
) -> list[RunManifest]:
    """Assign train/test stratified by (graph parameter cell, tau), in place.

    Within each stratum, round(train_fraction * count) runs become train.
    Strata with fewer than 2 runs go entirely to train, with a warning.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    if rng is None:
        rng = np.random.default_rng()
    strata: dict[tuple, list[RunManifest]] = {}
    for m in manifests:
        strata.setdefault(_stratum_key(m), []).append(m)
    for key, members in strata.items():
        members.sort(key=lambda m: m.run_id)
        if len(members) < 2:
            warnings.warn(f"stratum {key} has {len(members)} run(s); assigned to train")
            for m in members:
                m.split = "train"
            continue
        k = int(round(train_fraction * len(members)))
        order = rng.permutation(len(members))
        for rank, idx in enumerate(order):
            members[idx].split = "train" if rank < k else "test"
    return manifests
