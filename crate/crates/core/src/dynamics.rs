//! Right-hand side for infrastructure stocks, labor allocation and savings.

use serde::Serialize;

use crate::model::{
    harvest_private, harvest_shared, private_ramp_weight, Incomes, ModelParams, SystemState,
};

/// Rates for every continuous component of [`SystemState`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Derivative {
    pub shared: f64,
    pub private: [f64; 2],
    pub labor: [f64; 2],
    pub savings: [f64; 2],
    pub tax: f64,
    pub preference: [f64; 2],
    pub expected: [f64; 2],
    pub platform: [f64; 2],
}

impl Derivative {
    pub fn to_vector(&self) -> [f64; crate::model::VECTOR_DIM] {
        [
            self.shared,
            self.private[0],
            self.private[1],
            self.labor[0],
            self.labor[1],
            self.savings[0],
            self.savings[1],
            self.tax,
            self.preference[0],
            self.preference[1],
            self.expected[0],
            self.expected[1],
            self.platform[0],
            self.platform[1],
        ]
    }

    /// Largest magnitude over the stock, labor and savings components.
    pub fn max_non_political(&self) -> f64 {
        [
            self.shared,
            self.private[0],
            self.private[1],
            self.labor[0],
            self.labor[1],
            self.savings[0],
            self.savings[1],
        ]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Marker for a vanishing denominator in one of the gradient ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularGradient;

pub(crate) const SINGULAR_EPS: f64 = 1e-12;

/// Shared and private infrastructure rates.
pub fn d_infrastructure(x: &SystemState, inc: &Incomes, p: &ModelParams) -> (f64, [f64; 2]) {
    let shared = p.shared_effectiveness * x.tax * inc.tax_base(p) - p.decay * x.shared;
    let mut private = [0.0; 2];
    for (g, gp) in p.groups.iter().enumerate() {
        private[g] = gp.private_effectiveness * x.savings[g] * gp.population * inc.post_tax[g]
            - p.decay * x.private[g];
    }
    (shared, private)
}

/// Post-tax payoff of shared use minus private use, per unit labor.
pub fn labor_payoff_gap(x: &SystemState, g: usize, p: &ModelParams) -> f64 {
    let per_unit = p.groups[g].earning_potential * p.resource;
    let shared = (1.0 - x.tax) * per_unit * harvest_shared(x.shared, p);
    let private =
        (1.0 - p.psi() * x.tax) * (per_unit * harvest_private(x.private[g], g, p) + p.outside_wage);
    shared - private
}

/// Replicator rate for labor allocation.
pub fn d_labor(x: &SystemState, p: &ModelParams) -> [f64; 2] {
    let mut out = [0.0; 2];
    for (g, o) in out.iter_mut().enumerate() {
        let l = x.labor[g];
        *o = p.labor_sensitivity * (1.0 - x.savings[g]) * l * (1.0 - l) * labor_payoff_gap(x, g, p);
    }
    out
}

/// The savings gradient factor B(s_g, l_g).
pub fn savings_gradient(
    x: &SystemState,
    g: usize,
    p: &ModelParams,
) -> Result<f64, SingularGradient> {
    let gp = &p.groups[g];
    let marginal = gp.earning_potential
        * p.resource
        * (1.0 - p.psi() * x.tax)
        * (1.0 - x.labor[g])
        * p.private_max_harvest()
        * gp.private_effectiveness
        * p.total_population();
    let mut span = p.max_capacity - p.min_capacity;
    if p.savings_decay_factor {
        span *= 1.0 - p.decay;
    }
    let denom = span - x.savings[g] * marginal;
    if denom.abs() < SINGULAR_EPS {
        return Err(SingularGradient);
    }
    Ok((marginal - span) / denom)
}

/// Largest savings rate that leaves subsistence untouched, s^A(y').
pub fn savings_ceiling(post_tax: f64, subsistence: f64) -> f64 {
    if post_tax > subsistence {
        (post_tax - subsistence) / post_tax
    } else {
        0.0
    }
}

/// Unclamped savings rate.
pub fn raw_savings_rate(x: &SystemState, inc: &Incomes, g: usize, p: &ModelParams) -> f64 {
    let y = inc.post_tax[g];
    let decline = -p.savings_sensitivity * y;
    let weight = private_ramp_weight(x.private[g], g, p);
    if weight == 0.0 {
        return decline;
    }
    match savings_gradient(x, g, p) {
        Ok(b) => weight * p.savings_sensitivity * y * b + (1.0 - weight) * decline,
        Err(SingularGradient) => decline,
    }
}

/// Savings threshold function: bounds the rate so that s + ṡ stays within
/// [0, s^A].
pub fn clamp_savings(rate: f64, savings: f64, ceiling: f64) -> f64 {
    if rate > ceiling - savings {
        ceiling - savings
    } else if rate < -savings {
        -savings
    } else {
        rate
    }
}

pub fn d_savings(x: &SystemState, inc: &Incomes, p: &ModelParams) -> [f64; 2] {
    let mut out = [0.0; 2];
    for (g, o) in out.iter_mut().enumerate() {
        let raw = raw_savings_rate(x, inc, g, p);
        let ceiling = savings_ceiling(inc.post_tax[g], p.groups[g].subsistence);
        *o = clamp_savings(raw, x.savings[g], ceiling);
    }
    out
}
