//! Full right-hand side of the coupled system.

use crate::dynamics::{d_infrastructure, d_labor, d_savings, Derivative};
use crate::error::Result;
use crate::model::{compute_incomes, Incomes, ModelParams, SystemState, ELITE, VECTOR_DIM};
use crate::politics::political_rates;

/// Options that change the vector field outside the model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldOptions {
    /// Upper cap on elite shared labor, used in the stochastic analysis.
    pub labor_cap: Option<f64>,
}

pub fn rhs(x: &SystemState, p: &ModelParams, opts: &FieldOptions) -> Result<(Derivative, Incomes)> {
    let inc = compute_incomes(x, p)?;
    let (shared, private) = d_infrastructure(x, &inc, p);
    let mut labor = d_labor(x, p);
    if let Some(cap) = opts.labor_cap {
        labor[ELITE] = project_labor_cap(x.labor[ELITE], labor[ELITE], cap);
    }
    let savings = d_savings(x, &inc, p);
    let pol = political_rates(x, &inc, p);
    let d = Derivative {
        shared,
        private,
        labor,
        savings,
        tax: pol.tax,
        preference: pol.preference,
        expected: pol.expected,
        platform: pol.platform,
    };
    Ok((d, inc))
}

/// Vector form of [`rhs`] for the integrator.
pub fn rhs_vector(
    v: &[f64; VECTOR_DIM],
    x_template: &SystemState,
    p: &ModelParams,
    opts: &FieldOptions,
) -> Result<[f64; VECTOR_DIM]> {
    let x = SystemState::from_vector(v, x_template.incumbent);
    Ok(rhs(&x, p, opts)?.0.to_vector())
}

/// Zero an outward labor rate once the cap is reached.
pub fn project_labor_cap(labor: f64, rate: f64, cap: f64) -> f64 {
    if labor >= cap && rate > 0.0 {
        0.0
    } else {
        rate
    }
}

/// Clip elite labor to the cap.
pub fn enforce_labor_cap(x: &mut SystemState, cap: f64) {
    if x.labor[ELITE] > cap {
        x.labor[ELITE] = cap;
    }
}

/// Initial state used by every experiment: every tax variable at the
/// maintenance tax and expected consumption equal to current consumption.
pub fn standard_initial_state(
    p: &ModelParams,
    incumbent: crate::model::Candidate,
) -> Result<SystemState> {
    let tax = p.derived()?.maintenance_tax;
    let mut x = SystemState::initial(p, tax, incumbent);
    x.expected = compute_incomes(&x, p)?.consumption;
    Ok(x)
}
