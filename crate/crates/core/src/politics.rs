//! Tax preference learning, aggregation, platform competition and elections.

use serde::Serialize;

use crate::dynamics::{SingularGradient, SINGULAR_EPS};
use crate::model::{shared_ramp_weight, Candidate, Incomes, ModelParams, SystemState, NON_ELITE};

/// Upper limits on any tax variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaxBounds {
    /// Share of non-elite income above subsistence.
    pub subsistence: f64,
    /// Tax that lifts the shared stock to Ī(1 + f_s); +∞ with no revenue base.
    pub capacity: f64,
}

impl TaxBounds {
    pub fn upper(&self) -> f64 {
        self.subsistence.min(self.capacity)
    }
}

pub fn tax_bounds(x: &SystemState, inc: &Incomes, p: &ModelParams) -> TaxBounds {
    let y = inc.pre_tax(NON_ELITE);
    let floor = p.groups[NON_ELITE].subsistence;
    let subsistence = if y > floor { (y - floor) / y } else { 0.0 };
    let base = p.shared_effectiveness * inc.tax_base(p);
    let capacity = if base > 0.0 {
        let gap = p.max_capacity * (1.0 + p.safety_factor) - (1.0 - p.decay) * x.shared;
        (gap / base).max(0.0)
    } else {
        f64::INFINITY
    };
    TaxBounds {
        subsistence,
        capacity,
    }
}

/// Tax threshold function: limits a rate so that `current + rate` stays in
/// [0, upper bound].
pub fn clamp_tax(rate: f64, current: f64, bounds: &TaxBounds) -> f64 {
    let upper = bounds.upper();
    if rate < -current {
        -current
    } else if rate > upper - current {
        upper - current
    } else {
        rate
    }
}

/// The cold-cognition numerator term B^τ(l_g).
pub fn cold_benefit(
    x: &SystemState,
    inc: &Incomes,
    p: &ModelParams,
    g: usize,
) -> Result<f64, SingularGradient> {
    let denom = (p.max_capacity - p.min_capacity)
        - p.shared_effectiveness * x.tax * inc.weighted_labor * p.resource * p.max_harvest;
    if denom.abs() < SINGULAR_EPS {
        return Err(SingularGradient);
    }
    let gp = &p.groups[g];
    Ok(gp.earning_potential
        * p.resource
        * x.labor[g]
        * (1.0 - x.tax)
        * p.shared_effectiveness
        * p.max_harvest
        * inc.tax_base(p)
        / denom)
}

/// Perceived consumption gradient in τ scaled by β^τ₁.
pub fn cold_tax_gradient(x: &SystemState, inc: &Incomes, p: &ModelParams, g: usize) -> f64 {
    let exposure = inc.shared[g] + p.psi() * inc.private[g];
    let weight = shared_ramp_weight(x.shared, p);
    let benefit = if weight > 0.0 {
        weight * cold_benefit(x, inc, p, g).unwrap_or(0.0)
    } else {
        0.0
    };
    p.cold_sensitivity * (1.0 - x.savings[g]) * (benefit - exposure)
}

/// Motivated-reasoning update β^τ₂ θ_g e_g.
pub fn hot_tax_update(inc: &Incomes, p: &ModelParams, g: usize) -> f64 {
    p.hot_sensitivity * p.groups[g].bias * inc.error[g]
}

pub fn d_expected_consumption(x: &SystemState, inc: &Incomes, p: &ModelParams, g: usize) -> f64 {
    p.habituation * (inc.consumption[g] - x.expected[g])
}

/// α-blend of the two groups' preference rates.
pub fn blend_preferences(alpha: f64, rates: [f64; 2]) -> f64 {
    alpha * rates[0] + (1.0 - alpha) * rates[1]
}

/// Clamped policy rate under direct aggregation.
pub fn directagg_tax_rate(
    x: &SystemState,
    p: &ModelParams,
    preference_rates: [f64; 2],
    bounds: &TaxBounds,
) -> f64 {
    clamp_tax(
        blend_preferences(p.alpha(), preference_rates),
        x.tax,
        bounds,
    )
}

/// Political influence J_g; falls back to population shares when nobody
/// earns anything.
pub fn influence_weights(inc: &Incomes, p: &ModelParams) -> [f64; 2] {
    let alpha = p.alpha();
    let shares = [p.population_share(0), p.population_share(1)];
    if alpha == 0.0 {
        return shares;
    }
    let totals = [
        p.groups[0].population * inc.pre_tax(0),
        p.groups[1].population * inc.pre_tax(1),
    ];
    let sum = totals[0] + totals[1];
    if !(sum > 0.0) {
        log::debug!("zero total income; influence falls back to population shares");
        return shares;
    }
    let mut j = [0.0; 2];
    for g in 0..2 {
        j[g] = alpha * totals[g] / sum + (1.0 - alpha) * shares[g];
    }
    j
}

/// Influence-weighted total error E.
pub fn system_error(inc: &Incomes, weights: &[f64; 2]) -> f64 {
    weights[0] * inc.error[0] + weights[1] * inc.error[1]
}

/// Unclamped platform rate for candidate `q`.
pub fn platform_drift(x: &SystemState, p: &ModelParams, q: Candidate, error: f64) -> f64 {
    let i = q.index();
    p.attraction * (x.tax - x.platform[i]) + p.repulsion * p.candidate_biases[i] * error
}

/// Incumbent pull M^I(e_g) = exp(-ω e_g / π̄_g).
pub fn incumbent_pull(error: f64, p: &ModelParams, g: usize) -> f64 {
    (-p.pull_rate * error / p.max_income(g)).exp()
}

/// Preference drift toward the two platforms; floored at zero.
pub fn polcomp_voter_drift(x: &SystemState, inc: &Incomes, p: &ModelParams, g: usize) -> f64 {
    let m = incumbent_pull(inc.error[g], p, g);
    let inc_platform = x.platform[x.incumbent.index()];
    let challenger = x.platform[x.incumbent.other().index()];
    let own = x.preference[g];
    let rate = m * (inc_platform - own) + (1.0 - m) * (challenger - own);
    rate.max(-own)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElectionOutcome {
    /// Influence-weighted share voting for the first candidate.
    pub share_first: f64,
    pub winner: Candidate,
    /// Ballots v_g: true means a vote for the first candidate.
    pub ballots: [bool; 2],
}

/// Each group votes for the nearer platform; ties go to the first candidate.
pub fn vote(x: &SystemState, weights: &[f64; 2]) -> ElectionOutcome {
    let mut ballots = [false; 2];
    let mut share = 0.0;
    for g in 0..2 {
        let d1 = (x.preference[g] - x.platform[0]).powi(2);
        let d2 = (x.preference[g] - x.platform[1]).powi(2);
        ballots[g] = d1 <= d2;
        if ballots[g] {
            share += weights[g];
        }
    }
    ElectionOutcome {
        share_first: share,
        winner: if share >= 0.5 {
            Candidate::First
        } else {
            Candidate::Second
        },
        ballots,
    }
}

/// Runs an election and installs the winner. Continuous state is untouched.
pub fn hold_election(x: &mut SystemState, inc: &Incomes, p: &ModelParams) -> ElectionOutcome {
    let outcome = vote(x, &influence_weights(inc, p));
    x.incumbent = outcome.winner;
    outcome
}

/// Rates of all political components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PoliticalRates {
    pub tax: f64,
    pub preference: [f64; 2],
    pub expected: [f64; 2],
    pub platform: [f64; 2],
}

pub fn political_rates(x: &SystemState, inc: &Incomes, p: &ModelParams) -> PoliticalRates {
    use crate::model::{Cognition, PoliticalVariant};
    let mut out = PoliticalRates::default();
    for g in 0..2 {
        out.expected[g] = d_expected_consumption(x, inc, p, g);
    }
    match p.variant {
        PoliticalVariant::NoPolitics => {}
        PoliticalVariant::DirectAgg { cognition, .. } => {
            let bounds = tax_bounds(x, inc, p);
            let mut raw = [0.0; 2];
            for (g, r) in raw.iter_mut().enumerate() {
                *r = match cognition {
                    Cognition::Cold => cold_tax_gradient(x, inc, p, g),
                    Cognition::Hot => hot_tax_update(inc, p, g),
                };
                out.preference[g] = clamp_tax(*r, x.preference[g], &bounds);
            }
            out.tax = directagg_tax_rate(x, p, raw, &bounds);
        }
        PoliticalVariant::PolComp { .. } => {
            let bounds = tax_bounds(x, inc, p);
            let weights = influence_weights(inc, p);
            let error = system_error(inc, &weights);
            for q in [Candidate::First, Candidate::Second] {
                let i = q.index();
                out.platform[i] = clamp_tax(platform_drift(x, p, q, error), x.platform[i], &bounds);
            }
            let target = x.platform[x.incumbent.index()];
            out.tax = clamp_tax(target - x.tax, x.tax, &bounds);
            for g in 0..2 {
                out.preference[g] = polcomp_voter_drift(x, inc, p, g);
            }
        }
    }
    out
}
