"""Dataset files in, feature arrays out.

Reads the manifest.csv / series.csv pair written by the simulation side.
Values are taken by string parse only, never recomputed, so the numbers a
model sees are exactly the numbers in the files.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SERIES_COLUMNS = ("S", "I", "R", "E_SI_hh", "E_SI_o", "d_S_w", "d_I_w", "d_I_out")
ALL_COLUMNS = ("S", "I", "R", "E_SI_hh", "E_SI_o", "d_S_w", "d_I_w")
SIR_COLUMNS = ("S", "I", "R")
COUNT_COLUMNS = frozenset({"S", "I", "R", "E_SI_hh", "E_SI_o"})


@dataclass
class Dataset:
    """Parsed dataset: manifest rows plus per-run series arrays."""

    manifests: list[dict]
    series: dict[str, dict[str, np.ndarray]]   # run_id -> column -> (n_grid,)
    grid: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.grid[0])

    def runs(self, split: str | None = None) -> list[dict]:
        if split is None:
            return list(self.manifests)
        return [m for m in self.manifests if m["split"] == split]

    def tau(self, run_id: str) -> float:
        return self._tau[run_id]

    def __post_init__(self) -> None:
        self._tau = {m["run_id"]: float(m["tau"]) for m in self.manifests}


def load_dataset(path) -> Dataset:
    path = Path(path)
    with open(path / "manifest.csv", newline="", encoding="utf-8") as fh:
        manifests = list(csv.DictReader(fh))
    series: dict[str, dict[str, list[float]]] = {}
    grid: list[float] = []
    first_run = None
    with open(path / "series.csv", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            run = row["run_id"]
            if first_run is None:
                first_run = run
            if run == first_run:
                grid.append(float(row["t"]))
            cols = series.setdefault(run, {c: [] for c in SERIES_COLUMNS})
            for c in SERIES_COLUMNS:
                cols[c].append(float(row[c]))
    packed = {run: {c: np.asarray(v) for c, v in cols.items()}
              for run, cols in series.items()}
    missing = [m["run_id"] for m in manifests if m["run_id"] not in packed]
    if missing:
        raise ValueError(f"runs missing from series.csv: {missing[:5]}")
    return Dataset(manifests=manifests, series=packed, grid=np.asarray(grid))


def feature_columns(dataset: Dataset, subset: str) -> tuple[str, ...]:
    """Columns for a feature subset.

    "sir" uses the compartment counts only.  "all" adds the SI edge counts
    and the weighted degree averages, except that the degree columns are
    dropped when every run is an unrelaxed clique graph (they are constant
    there and carry no information).
    """
    if subset == "sir":
        return SIR_COLUMNS
    if subset != "all":
        raise ValueError(f"unknown subset {subset!r}")
    constant_degrees = all(
        m["graph_model"] == "clique" and float(m["p_relaxed"] or 0.0) == 0.0
        for m in dataset.manifests
    )
    if constant_degrees:
        return tuple(c for c in ALL_COLUMNS if not c.startswith("d_"))
    return ALL_COLUMNS


def horizon_index(dataset: Dataset, T: float) -> int:
    """Number of grid points with t <= T; T must sit on the grid."""
    k = int(round(T / dataset.dt))
    if not (1 <= k <= len(dataset.grid)) or abs(k * dataset.dt - T) > 1e-9:
        raise ValueError(f"T={T} not on the 0.1 grid")
    return k


def gbt_matrix(dataset: Dataset, runs: list[dict], columns: tuple[str, ...],
               T: float) -> tuple[np.ndarray, np.ndarray]:
    """Flattened per-run feature vectors: each column's first T/dt values."""
    k = horizon_index(dataset, T)
    rows = []
    for m in runs:
        cols = dataset.series[m["run_id"]]
        rows.append(np.concatenate([cols[c][:k] for c in columns]))
    X = np.vstack(rows) if rows else np.zeros((0, k * len(columns)))
    y = np.array([float(m["tau"]) for m in runs])
    return X, y


def channel_stack(dataset: Dataset, runs: list[dict],
                  columns: tuple[str, ...]) -> tuple[np.ndarray, np.ndarray]:
    """Full-length (run, channel, grid) array plus targets, unnormalized."""
    n_grid = len(dataset.grid)
    X = np.zeros((len(runs), len(columns), n_grid), dtype=np.float32)
    for i, m in enumerate(runs):
        cols = dataset.series[m["run_id"]]
        for j, c in enumerate(columns):
            X[i, j] = cols[c]
    y = np.array([float(m["tau"]) for m in runs], dtype=np.float32)
    return X, y


@dataclass
class Normalizer:
    """Counts scale by population size; degree columns by their train max."""

    scale: np.ndarray   # (channels,)

    @classmethod
    def fit(cls, X: np.ndarray, columns: tuple[str, ...], n: float) -> "Normalizer":
        scale = np.ones(len(columns), dtype=np.float32)
        for j, c in enumerate(columns):
            if c in COUNT_COLUMNS:
                scale[j] = n
            else:
                peak = float(np.abs(X[:, j, :]).max()) if len(X) else 1.0
                scale[j] = peak if peak > 0 else 1.0
        return cls(scale=scale)

    def apply(self, X: np.ndarray) -> np.ndarray:
        return X / self.scale[None, :, None]


# ----------------------------------------------------------- segment lengths

STRATEGIES = ("full", "uniform", "beta", "beta-skew", "per-t")


def sample_fractions(strategy: str, size: int, rng: np.random.Generator) -> np.ndarray:
    """Continuous segment-length fractions in (0, 1] per sampling strategy."""
    if strategy == "full":
        return np.ones(size)
    if strategy == "uniform":
        return 1.0 - rng.random(size)          # uniform on (0, 1]
    if strategy == "beta":
        return rng.beta(0.5, 0.5, size=size)   # mass at both ends
    if strategy == "beta-skew":
        return rng.beta(2.0, 0.5, size=size)   # mass near full length
    raise ValueError(f"strategy {strategy!r} does not sample lengths")


def fractions_to_grid(fracs: np.ndarray, n_grid: int) -> np.ndarray:
    """Snap fractions up to grid cell counts in 1..n_grid."""
    return np.clip(np.ceil(fracs * n_grid).astype(np.int64), 1, n_grid)


def sample_length_indices(strategy: str, size: int, n_grid: int,
                          rng: np.random.Generator) -> np.ndarray:
    return fractions_to_grid(sample_fractions(strategy, size, rng), n_grid)
