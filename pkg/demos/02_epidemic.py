"""Simulate one SIR epidemic on each family and sketch the infected curve.

Recovery rate is gamma=1 (fixing the time unit); infection crosses each
household edge at rate tau and each second-layer edge at rate tau*w.
"""

import numpy as np

from epitau import (CliqueParams, PolyParams, SimParams, build_clique_layer,
                    build_household_layer, build_polynomial_layer,
                    gillespie_run, sample_grid)

rng = np.random.default_rng(1)
base = build_household_layer(5000, 5)
graphs = {
    "polynomial": build_polynomial_layer(
        base, PolyParams(0.0, 0.7, 0.3, m=4, n0=50), 0.4, rng),
    "9-cliques": build_clique_layer(base, CliqueParams(N_wp=9, w=0.4), rng),
}

params = SimParams(tau=0.45, gamma=1.0, init_infected_fraction=0.01, t_max=30.0)
for name, g in graphs.items():
    log = gillespie_run(g, params, rng)
    f = sample_grid(log, g)
    peak = f.I.argmax()
    print(f"\n{name}: {len(log)} events, "
          f"final size {f.R[-1]} ({100 * f.R[-1] / g.n:.1f}% of n), "
          f"peak I = {f.I[peak]} at t = {f.grid[peak]:.1f}")
    # coarse text plot of the infected fraction, one column per time unit
    for frac_line in (0.2, 0.1, 0.05):
        row = "".join("#" if f.I[k] / g.n >= frac_line else " "
                      for k in range(9, 300, 10))
        print(f"  I/n >= {frac_line:4.2f} |{row}|")
    print("                +" + "-" * 30 + "+  t = 1 .. 30")
