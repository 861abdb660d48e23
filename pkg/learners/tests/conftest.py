import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

MANIFEST_HEADER = ("run_id,graph_model,p_pa,p_u,p_tr,m,n0,N_wp,p_relaxed,"
                   "w,n,N_hh,d,tau,seed,split")
SERIES_HEADER = "run_id,t,S,I,R,E_SI_hh,E_SI_o,d_S_w,d_I_w,d_I_out"


def write_synthetic_dataset(path: Path, taus, reps=4, n=1000, n_grid=300,
                            graph_model="clique", p_relaxed=0.0, seed=0):
    """Hand-made dataset files in the shared schema.

    The series are smooth deterministic functions of tau (logistic-ish
    epidemic shapes plus a pinch of noise), so learners have real signal."""
    rng = np.random.default_rng(seed)
    path.mkdir(parents=True, exist_ok=True)
    t = np.arange(1, n_grid + 1) * 0.1
    man_rows, series_rows = [], []
    idx = 0
    for tau in taus:
        for r in range(reps):
            run_id = f"s{idx:04d}"
            split = "train" if r < max(1, round(0.7 * reps)) else "test"
            growth = 4.0 * (tau - 0.2)
            mid = 3.0 / tau
            infected = 0.3 * n / (1 + np.exp(-growth * (t - mid)))
            infected *= np.exp(-0.08 * t)
            infected += rng.normal(0, 0.002 * n, n_grid)
            I = np.clip(infected, 0, None).astype(int)
            R = np.minimum((0.6 * n / (1 + np.exp(-growth * (t - mid - 1)))),
                           n - I).astype(int)
            S = n - I - R
            E_hh = (I * 3.5 * S / n).astype(int)
            E_o = (I * 7.0 * S / n).astype(int)
            d_S = 7.2 - 0.4 * (tau * t / t[-1])
            d_I = np.full(n_grid, 7.2)
            d_out = np.full(n_grid, 8.0)
            if graph_model == "clique":
                man_rows.append(f"{run_id},clique,,,,,,9,{p_relaxed},0.4,{n},5,"
                                f"8,{tau},{idx},{split}")
            else:
                man_rows.append(f"{run_id},poly,0.0,0.7,0.3,4,50,,,0.4,{n},5,"
                                f"8,{tau},{idx},{split}")
            for k in range(n_grid):
                series_rows.append(
                    f"{run_id},{t[k]:.1f},{S[k]},{I[k]},{R[k]},{E_hh[k]},"
                    f"{E_o[k]},{d_S[k]:.6g},{d_I[k]:.6g},{d_out[k]:.6g}")
            idx += 1
    (path / "manifest.csv").write_text(
        MANIFEST_HEADER + "\n" + "\n".join(man_rows) + "\n", encoding="utf-8")
    (path / "series.csv").write_text(
        SERIES_HEADER + "\n" + "\n".join(series_rows) + "\n", encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def synthetic_dataset(tmp_path_factory):
    return write_synthetic_dataset(
        tmp_path_factory.mktemp("synth") / "ds",
        taus=(0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6), reps=6)


@pytest.fixture(scope="session")
def constant_tau_dataset(tmp_path_factory):
    return write_synthetic_dataset(
        tmp_path_factory.mktemp("const") / "ds", taus=(0.45,), reps=10)


def epitau_cli(*args) -> None:
    """Drive the simulation package strictly through its CLI."""
    subprocess.run([sys.executable, "-m", "epitau.cli", *map(str, args)],
                   check=True, capture_output=True, text=True)
