"""Two-layer contact networks, exact SIR simulation, infection-rate estimation."""

from .netgen import (LayeredGraph, PolyParams, CliqueParams, GraphStats,
                     build_household_layer, build_polynomial_layer,
                     build_clique_layer, relax_caveman, graph_stats,
                     write_graph, read_graph)
from .epidemics import (SimParams, EventLog, INFECTION, RECOVERY, init_state,
                        gillespie_run, si_edge_weight, ReplayState,
                        write_event_log, read_event_log)
from .features import (TrajectoryFeatures, RunManifest, sample_grid,
                       export_dataset, import_dataset, split_train_test,
                       read_manifest, read_series)
from .classical import (EstimateRecord, RmseResult, tau_hat_exact,
                        estimate_E_SI_o_static, estimate_E_SI_o_dynamic,
                        tau_hat_approx, rmse)
from .harness import (ExperimentConfig, fixed_density_weight, run_scenario,
                      realize_run, evaluate_classical, leave_one_out_experiment,
                      emit_plot_series, render_table, parse_table)

__version__ = "0.1.0"
