"""Estimate tau on a single simulated epidemic at growing horizons.

Three estimators: the exact-likelihood ratio (needs the event log), and two
grid-only variants that replace the out-of-household SI edge count by a
mean-field formula (static d, or the time-varying infected-average degree).
"""

import numpy as np

from epitau import (PolyParams, RunManifest, SimParams, build_household_layer,
                    build_polynomial_layer, gillespie_run, graph_stats,
                    sample_grid, tau_hat_approx, tau_hat_exact)

tau_true = 0.45
rng = np.random.default_rng(2)
g = build_polynomial_layer(build_household_layer(5000, 5),
                           PolyParams(0.0, 0.7, 0.3, m=4, n0=50), 0.4, rng)
log = gillespie_run(g, SimParams(tau=tau_true), rng)
f = sample_grid(log, g, run_id="demo")
man = RunManifest(run_id="demo", graph_model="poly", n=g.n, N_hh=5, w=0.4,
                  tau=tau_true, seed=0, d=graph_stats(g).d)

print(f"true tau = {tau_true}, graph d = {man.d:.3f}\n")
print("T      exact    static   dynamic")
for T in (1.0, 2.0, 4.0, 6.0, 10.0):
    exact = tau_hat_exact(log, g, T)
    static = tau_hat_approx(f, man, T, variant="static")
    dynamic = tau_hat_approx(f, man, T, variant="dynamic")
    print(f"{T:4.0f}  {exact:8.4f} {static:8.4f}  {dynamic:8.4f}")

print("\nEarly on, the dynamic variant tracks the hub-heavy infected set "
      "better; after the peak the static variant wins.")
