use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classify::{
    classify_equilibrium, persistence_threshold, welfare_stats, Classification, TAIL_WINDOW,
};
use super::shocks::{sample_shock_series, series_seed, ShockRegime};
use crate::error::{Error, Result};
use crate::integrator::{
    apply_event, integrate, EventKind, EventSchedule, IntegrateOptions, SolverControls, Trajectory,
};
use crate::model::{InitialIncumbent, ModelParams, PoliticalVariant};
use crate::system::{standard_initial_state, FieldOptions};

/// Elite labor cap used in the stochastic analysis.
pub const STOCHASTIC_LABOR_CAP: f64 = 0.9;

/// Everything needed to reproduce one run from a base parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub variant: PoliticalVariant,
    pub election_period: f64,
    pub repulsion: f64,
    pub d_is: f64,
    pub d_mu: f64,
    pub incumbent: InitialIncumbent,
    pub horizon: f64,
    pub seed: u64,
    /// Stochastic shock regime; None for deterministic runs.
    pub regime: Option<ShockRegime>,
    pub labor_cap: Option<f64>,
}

impl RunSpec {
    pub fn deterministic(base: &ModelParams, d_is: f64, d_mu: f64) -> Self {
        RunSpec {
            variant: base.variant,
            election_period: base.election_period,
            repulsion: base.repulsion,
            d_is,
            d_mu,
            incumbent: InitialIncumbent::TaxFavoring,
            horizon: 400.0,
            seed: 0,
            regime: None,
            labor_cap: None,
        }
    }

    pub fn params(&self, base: &ModelParams) -> ModelParams {
        let mut p = base.clone().with_variant(self.variant);
        p.election_period = self.election_period;
        p.repulsion = self.repulsion;
        p
    }
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: usize,
    pub variant: PoliticalVariant,
    pub psi: f64,
    pub alpha: f64,
    pub election_period: f64,
    pub repulsion: f64,
    pub d_is: f64,
    pub d_mu: f64,
    pub shock_period: Option<f64>,
    pub shock_magnitude: Option<f64>,
    pub seed: u64,
    /// Initial incumbent after any random draw.
    pub incumbent: InitialIncumbent,
    pub shared_final: f64,
    pub class: Classification,
    pub persisted: bool,
    pub welfare: f64,
    pub gini: f64,
    pub failed: bool,
}

/// Initial state, parameters and schedule of a run, with shocks at 0+ applied.
pub fn prepare_run(
    base: &ModelParams,
    spec: &RunSpec,
) -> Result<(
    crate::model::SystemState,
    ModelParams,
    EventSchedule,
    InitialIncumbent,
)> {
    let mut p = spec.params(base);
    p.validate()?;
    let mut sched = EventSchedule::for_params(&p, spec.horizon);
    let mut incumbent = spec.incumbent;
    if let Some(regime) = &spec.regime {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        incumbent = if rng.random_bool(0.5) {
            InitialIncumbent::TaxFavoring
        } else {
            InitialIncumbent::TaxRepulsed
        };
        let regime = ShockRegime {
            horizon: spec.horizon,
            ..*regime
        };
        for (t, m) in sample_shock_series(&regime, &mut rng)? {
            sched.push(t, EventKind::CapacityShock(m));
        }
    }
    let mut x = standard_initial_state(&p, incumbent.candidate(&p))?;
    if spec.d_is != 0.0 {
        apply_event(&mut x, &mut p, EventKind::CapacityShock(spec.d_is))?;
    }
    if spec.d_mu != 0.0 {
        apply_event(&mut x, &mut p, EventKind::OpportunityShock(spec.d_mu))?;
    }
    Ok((x, p, sched, incumbent))
}

/// Integrate a run with full sample output.
pub fn simulate_spec(
    base: &ModelParams,
    spec: &RunSpec,
    controls: &SolverControls,
    record_from: f64,
) -> Result<(Trajectory, InitialIncumbent)> {
    let (x, p, sched, incumbent) = prepare_run(base, spec)?;
    let opts = IntegrateOptions {
        controls: *controls,
        field: FieldOptions {
            labor_cap: spec.labor_cap,
        },
        record_from,
    };
    Ok((integrate(&x, &p, &sched, &opts), incumbent))
}

pub fn run_one(
    run_id: usize,
    base: &ModelParams,
    spec: &RunSpec,
    controls: &SolverControls,
) -> RunRecord {
    let record_from = (spec.horizon - TAIL_WINDOW).max(0.0);
    let result = simulate_spec(base, spec, controls, record_from);
    summarize_run(run_id, base, spec, result.as_ref().map(|(t, i)| (t, *i)))
}

/// Record of a finished (or rejected) integration. Only the tail window of
/// the trajectory is used, so a fully sampled trajectory gives the same row.
pub fn summarize_run(
    run_id: usize,
    base: &ModelParams,
    spec: &RunSpec,
    result: std::result::Result<(&Trajectory, InitialIncumbent), &Error>,
) -> RunRecord {
    let p = spec.params(base);
    let mut rec = RunRecord {
        run_id,
        variant: spec.variant,
        psi: p.psi(),
        alpha: p.alpha(),
        election_period: spec.election_period,
        repulsion: spec.repulsion,
        d_is: spec.d_is,
        d_mu: spec.d_mu,
        shock_period: spec.regime.map(|r| r.mean_period),
        shock_magnitude: spec.regime.map(|r| r.mean_magnitude),
        seed: spec.seed,
        incumbent: spec.incumbent,
        shared_final: f64::NAN,
        class: Classification::Unclassified,
        persisted: false,
        welfare: f64::NAN,
        gini: f64::NAN,
        failed: true,
    };
    let (traj, incumbent) = match result {
        Ok(r) => r,
        Err(e) => {
            log::warn!("run {run_id} rejected: {e}");
            return rec;
        }
    };
    rec.incumbent = incumbent;
    rec.shared_final = traj.terminal.shared;
    if let Some(e) = &traj.failure {
        log::warn!("run {run_id} failed at t = {}: {e}", traj.terminal_time);
        return rec;
    }
    rec.failed = false;
    rec.class = classify_equilibrium(traj, &p);
    rec.persisted = rec.shared_final > persistence_threshold(&p)
        && !matches!(
            rec.class,
            Classification::Collapse | Classification::ElitesAbandon
        );
    if let Ok(w) = welfare_stats(traj, &p) {
        rec.welfare = w.per_capita;
        rec.gini = w.gini;
    }
    rec
}

/// Run specs on a pool of `workers` threads (0 = rayon default), ordered by index.
pub fn run_specs(
    base: &ModelParams,
    specs: &[RunSpec],
    controls: &SolverControls,
    workers: usize,
) -> Result<Vec<RunRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config {
            line: 0,
            message: format!("thread pool: {e}"),
        })?;
    Ok(pool.install(|| {
        specs
            .par_iter()
            .enumerate()
            .map(|(i, s)| run_one(i, base, s, controls))
            .collect()
    }))
}

/// Deterministic grid. Expansion order is variant, incumbent, T_e, sigma_R,
/// d_Is, d_mu with d_mu varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterministicGrid {
    pub d_is: Vec<f64>,
    pub d_mu: Vec<f64>,
    pub election_periods: Vec<f64>,
    pub repulsions: Vec<f64>,
    pub variants: Vec<PoliticalVariant>,
    pub incumbents: Vec<InitialIncumbent>,
    pub horizon: f64,
}

impl DeterministicGrid {
    /// Single-value axes taken from the base parameters.
    pub fn for_params(base: &ModelParams, d_is: Vec<f64>, d_mu: Vec<f64>) -> Self {
        DeterministicGrid {
            d_is,
            d_mu,
            election_periods: vec![base.election_period],
            repulsions: vec![base.repulsion],
            variants: vec![base.variant],
            incumbents: vec![InitialIncumbent::TaxFavoring],
            horizon: 400.0,
        }
    }

    pub fn specs(&self) -> Vec<RunSpec> {
        let mut out = Vec::new();
        for &variant in &self.variants {
            for &incumbent in &self.incumbents {
                for &election_period in &self.election_periods {
                    for &repulsion in &self.repulsions {
                        for &d_is in &self.d_is {
                            for &d_mu in &self.d_mu {
                                out.push(RunSpec {
                                    variant,
                                    election_period,
                                    repulsion,
                                    d_is,
                                    d_mu,
                                    incumbent,
                                    horizon: self.horizon,
                                    seed: 0,
                                    regime: None,
                                    labor_cap: None,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn run_deterministic_sweep(
    base: &ModelParams,
    grid: &DeterministicGrid,
    controls: &SolverControls,
    workers: usize,
) -> Result<Vec<RunRecord>> {
    run_specs(base, &grid.specs(), controls, workers)
}

/// Stochastic plan. Expansion order is regime, T_e, sigma_R, series. Series k
/// of a regime uses the same seed in every (T_e, sigma_R) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticPlan {
    pub regimes: Vec<ShockRegime>,
    pub n_series: usize,
    pub election_periods: Vec<f64>,
    pub repulsions: Vec<f64>,
    pub seed: u64,
    pub horizon: f64,
}

impl StochasticPlan {
    pub fn specs(&self, base: &ModelParams) -> Vec<RunSpec> {
        let mut out = Vec::new();
        for (r, regime) in self.regimes.iter().enumerate() {
            for &election_period in &self.election_periods {
                for &repulsion in &self.repulsions {
                    for k in 0..self.n_series {
                        out.push(RunSpec {
                            variant: base.variant,
                            election_period,
                            repulsion,
                            d_is: 0.0,
                            d_mu: 0.0,
                            incumbent: InitialIncumbent::TaxFavoring,
                            horizon: self.horizon,
                            seed: series_seed(self.seed, r, k),
                            regime: Some(*regime),
                            labor_cap: Some(STOCHASTIC_LABOR_CAP),
                        });
                    }
                }
            }
        }
        out
    }
}

pub fn run_stochastic_sweep(
    base: &ModelParams,
    plan: &StochasticPlan,
    controls: &SolverControls,
    workers: usize,
) -> Result<Vec<RunRecord>> {
    for r in &plan.regimes {
        r.validate()?;
    }
    run_specs(base, &plan.specs(base), controls, workers)
}

/// Associative persisted/failed counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tally {
    pub runs: usize,
    pub persisted: usize,
    pub failed: usize,
}

impl Tally {
    pub fn of(records: &[RunRecord]) -> Self {
        records
            .iter()
            .fold(Tally::default(), |t, r| t.merge(Tally::one(r)))
    }

    pub fn one(r: &RunRecord) -> Self {
        Tally {
            runs: 1,
            persisted: usize::from(r.persisted && !r.failed),
            failed: usize::from(r.failed),
        }
    }

    pub fn merge(self, o: Tally) -> Self {
        Tally {
            runs: self.runs + o.runs,
            persisted: self.persisted + o.persisted,
            failed: self.failed + o.failed,
        }
    }

    pub fn fraction(&self) -> Result<f64> {
        if self.runs == 0 {
            return Err(Error::EmptyRecords);
        }
        Ok(self.persisted as f64 / self.runs as f64)
    }
}

/// Share of records whose shared infrastructure persisted.
pub fn robustness(records: &[RunRecord]) -> Result<f64> {
    Tally::of(records).fraction()
}

/// Robustness of one (regime, T_e, sigma_R) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub shock_period: f64,
    pub shock_magnitude: f64,
    pub election_period: f64,
    pub repulsion: f64,
    pub tally: Tally,
    pub robustness: f64,
}

/// Mean cell robustness over one axis, per regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marginal {
    pub shock_period: f64,
    pub shock_magnitude: f64,
    pub value: f64,
    pub mean_robustness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticSummary {
    pub cells: Vec<CellSummary>,
    pub by_election_period: Vec<Marginal>,
    pub by_repulsion: Vec<Marginal>,
}

pub fn summarize_stochastic(plan: &StochasticPlan, records: &[RunRecord]) -> StochasticSummary {
    let per_cell = plan.n_series.max(1);
    let mut cells = Vec::new();
    for chunk in records.chunks(per_cell) {
        let first = &chunk[0];
        let tally = Tally::of(chunk);
        cells.push(CellSummary {
            shock_period: first.shock_period.unwrap_or(f64::NAN),
            shock_magnitude: first.shock_magnitude.unwrap_or(f64::NAN),
            election_period: first.election_period,
            repulsion: first.repulsion,
            tally,
            robustness: tally.fraction().unwrap_or(f64::NAN),
        });
    }
    let marginal = |key: fn(&CellSummary) -> f64, values: &[f64]| {
        let mut out = Vec::new();
        for regime in &plan.regimes {
            for &v in values {
                let sel: Vec<f64> = cells
                    .iter()
                    .filter(|c| {
                        c.shock_period == regime.mean_period
                            && c.shock_magnitude == regime.mean_magnitude
                            && key(c) == v
                    })
                    .map(|c| c.robustness)
                    .collect();
                if sel.is_empty() {
                    continue;
                }
                out.push(Marginal {
                    shock_period: regime.mean_period,
                    shock_magnitude: regime.mean_magnitude,
                    value: v,
                    mean_robustness: sel.iter().sum::<f64>() / sel.len() as f64,
                });
            }
        }
        out
    };
    StochasticSummary {
        by_election_period: marginal(|c| c.election_period, &plan.election_periods),
        by_repulsion: marginal(|c| c.repulsion, &plan.repulsions),
        cells,
    }
}
