//! Shock series, sweeps over parameter grids and classification of outcomes.

mod classify;
mod equilibria;
mod presets;
mod shocks;
mod sweep;

pub use classify::{
    classify_averages, classify_equilibrium, per_capita_welfare, persistence_threshold,
    tail_averages, tax_reversals, two_group_gini, welfare_stats, Classification, TailAverages,
    WelfareStats, TAIL_WINDOW,
};
pub use equilibria::equilibrium_state;
pub use presets::{example_presets, find_preset, Preset};
pub use shocks::{sample_shock_series, series_seed, standard_regimes, MagnitudeDist, ShockRegime};
pub use sweep::{
    prepare_run, robustness, run_deterministic_sweep, run_one, run_specs, run_stochastic_sweep,
    simulate_spec, summarize_run, summarize_stochastic, CellSummary, DeterministicGrid, Marginal,
    RunRecord, RunSpec, StochasticPlan, StochasticSummary, Tally, STOCHASTIC_LABOR_CAP,
};
