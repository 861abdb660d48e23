"""Infection-rate estimators from aggregated epidemic observations.

Three estimators of tau at an observation horizon T:

* ``tau_hat_exact``: maximum-likelihood ratio of infection events to the
  exact time-integral of the SI edge weight, from the event log.
* ``tau_hat_approx`` variant "static": same ratio on the report grid, with
  the out-of-household SI edge count replaced by a mean-field estimate
  using the graph-wide average out-of-household degree d.
* ``tau_hat_approx`` variant "dynamic": as static, but with the
  time-varying average out-of-household degree of the infected.

Estimates with zero exposure in the window are reported as missing (None)
and excluded from RMSE with a counted flag.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .epidemics import INFECTION, EventLog, ReplayState
from .features import RunManifest, TrajectoryFeatures
from .netgen import LayeredGraph

__all__ = [
    "EstimateRecord",
    "RmseResult",
    "METHODS",
    "tau_hat_exact",
    "estimate_E_SI_o_static",
    "estimate_E_SI_o_dynamic",
    "tau_hat_approx",
    "rmse",
    "write_predictions",
    "read_predictions",
    "write_results",
    "read_results",
]

METHODS = ("ml_exact", "ml_static", "ml_dynamic",
           "gbt_all", "gbt_sir", "cnn_all", "cnn_sir")

PREDICTIONS_HEADER = "run_id,T,method,tau_hat"
RESULTS_HEADER = "method,T,rmse,n_used,n_missing"


@dataclass
class EstimateRecord:
    """One (run, horizon, method) estimate; tau_hat None when undefined."""

    run_id: str
    T: float
    method: str
    tau_hat: float | None


@dataclass
class RmseResult:
    rmse: float
    n_used: int
    n_missing: int


def tau_hat_exact(log: EventLog, g: LayeredGraph, T: float) -> float | None:
    """Infection events in (0, T] over the exact integral of W^SI on [0, T].

    Initial seeds are not events.  Returns None when the exposure integral
    is zero (no SI contact observed).
    """
    if T <= 0:
        raise ValueError("T must be > 0")
    state = ReplayState(g, log.initial_infected)
    integral = 0.0
    z = 0
    t_prev = 0.0
    for t, kind, v in log.events():
        if t > T:
            break
        integral += state.si_weight * (t - t_prev)
        state.apply(kind, v)
        t_prev = t
        if kind == INFECTION:
            z += 1
    integral += state.si_weight * (T - t_prev)
    if integral <= 0.0:
        return None
    return z / integral


def estimate_E_SI_o_static(I: float, S: float, n: int, d: float,
                           w: float, N_hh: int) -> float:
    """Mean-field estimate of the out-of-household SI edge count.

    I * (d - w*d/(w*d + N_hh - 1)) * S/n: each infected contributes its
    average d out-of-household contacts, discounted by the chance it was
    infected from within its own household, thinned by the susceptible
    fraction.
    """
    if n <= 0:
        raise ValueError("n must be > 0")
    denom = w * d + N_hh - 1
    if np.any(denom <= 0):
        raise ValueError("w*d + N_hh - 1 must be > 0")
    return I * (d - w * d / denom) * S / n


def estimate_E_SI_o_dynamic(I: float, S: float, n: int, d_I_out: float,
                            w: float, N_hh: int) -> float:
    """Static formula with d replaced by the current infected-average degree."""
    return estimate_E_SI_o_static(I, S, n, d_I_out, w, N_hh)


def tau_hat_approx(
    f: TrajectoryFeatures,
    manifest: RunManifest,
    T: float,
    variant: str = "static",
) -> float | None:
    """Grid-based estimate of tau over the window (t_1, T].

    Numerator: new infections between the first grid point and T, read off
    the cumulative I+R series.  Denominator: left-endpoint Riemann sum of
    W-hat = E_SI_hh + w * E-hat_SI_o over the grid cells in [t_1, T], with
    E_SI_hh exact from the series and the out-of-household part from the
    chosen variant ("static", "dynamic", or "exact" as a test hook using
    the true E_SI_o).
    """
    grid = f.grid
    dt = float(grid[0])
    k = int(round(T / dt))
    if not (1 <= k <= len(grid)) or abs(k * dt - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"T={T} is not on the sampling grid")
    w, n, N_hh, d = manifest.w, manifest.n, manifest.N_hh, manifest.d
    z = float((f.I[k - 1] + f.R[k - 1]) - (f.I[0] + f.R[0]))
    if variant == "static":
        e_o = estimate_E_SI_o_static(f.I[: k - 1], f.S[: k - 1], n, d, w, N_hh)
    elif variant == "dynamic":
        e_o = estimate_E_SI_o_dynamic(f.I[: k - 1], f.S[: k - 1], n,
                                      f.d_I_out[: k - 1], w, N_hh)
    elif variant == "exact":
        e_o = f.E_SI_o[: k - 1].astype(float)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    w_hat = f.E_SI_hh[: k - 1] + w * e_o
    denom = float(np.sum(w_hat) * dt)
    if denom <= 0.0:
        return None
    return z / denom


def rmse(records: list[EstimateRecord], truths: dict[str, float]) -> RmseResult:
    """Root mean square error over non-missing records; missing are counted."""
    errs = []
    n_missing = 0
    for r in records:
        if r.run_id not in truths:
            raise ValueError(f"no truth for run {r.run_id}")
        if r.tau_hat is None:
            n_missing += 1
        else:
            errs.append(r.tau_hat - truths[r.run_id])
    if not errs:
        raise ValueError("all estimates missing; RMSE undefined")
    return RmseResult(
        rmse=float(np.sqrt(np.mean(np.square(errs)))),
        n_used=len(errs),
        n_missing=n_missing,
    )


def write_predictions(records: list[EstimateRecord], path, append: bool = False) -> None:
    path = Path(path)
    new_file = not (append and path.exists())
    with open(path, "w" if new_file else "a", encoding="utf-8", newline="\n") as fh:
        if new_file:
            fh.write(PREDICTIONS_HEADER + "\n")
        for r in records:
            tau_s = "" if r.tau_hat is None else str(r.tau_hat)
            fh.write(f"{r.run_id},{r.T:g},{r.method},{tau_s}\n")


def read_predictions(path) -> list[EstimateRecord]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            tau_hat = None if row["tau_hat"] == "" else float(row["tau_hat"])
            out.append(EstimateRecord(row["run_id"], float(row["T"]),
                                      row["method"], tau_hat))
    return out


def write_results(rows, path) -> None:
    """rows: iterable of (method, T, RmseResult)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(RESULTS_HEADER + "\n")
        for method, T, res in rows:
            fh.write(f"{method},{T:g},{res.rmse!r},{res.n_used},{res.n_missing}\n")


def read_results(path) -> list[tuple[str, float, RmseResult]]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            out.append((row["method"], float(row["T"]),
                        RmseResult(float(row["rmse"]), int(row["n_used"]),
                                   int(row["n_missing"]))))
    return out
