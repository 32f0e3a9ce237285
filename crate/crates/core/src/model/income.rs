//! Harvest functions and the income/consumption algebra.

use serde::{Deserialize, Serialize};

use super::params::ModelParams;
use super::state::SystemState;
use crate::error::{Error, Result};

/// Step-wise ramp: 0 up to `lo`, linear to `top` at `hi`, flat after.
fn ramp(x: f64, lo: f64, hi: f64, top: f64) -> f64 {
    if x >= hi {
        top
    } else if x > lo {
        top * (x - lo) / (hi - lo)
    } else {
        0.0
    }
}

/// Shared harvesting rate H^s(I^s).
pub fn harvest_shared(capacity: f64, p: &ModelParams) -> f64 {
    ramp(capacity, p.min_capacity, p.max_capacity, p.max_harvest)
}

/// Private harvesting rate H^p(I^p_g), with thresholds scaled by the
/// group's population share.
pub fn harvest_private(capacity: f64, g: usize, p: &ModelParams) -> f64 {
    harvest_private_with(capacity, p.population_share(g), p.private_max_harvest(), p)
}

pub(crate) fn harvest_private_with(capacity: f64, share: f64, h_p: f64, p: &ModelParams) -> f64 {
    ramp(
        capacity,
        share * p.min_capacity,
        share * p.max_capacity,
        h_p,
    )
}

/// Weight of the ramp branch of a rule that switches at the ramp edges:
/// 1 inside, 0 outside, linear within `width · (hi - lo)` of either edge.
fn ramp_weight(x: f64, lo: f64, hi: f64, width: f64) -> f64 {
    if !(x > lo && x < hi) {
        return 0.0;
    }
    let band = width * (hi - lo);
    if band <= 0.0 {
        return 1.0;
    }
    ((x - lo).min(hi - x) / band).min(1.0)
}

pub fn shared_ramp_weight(capacity: f64, p: &ModelParams) -> f64 {
    ramp_weight(capacity, p.min_capacity, p.max_capacity, p.switch_width)
}

pub fn private_ramp_weight(capacity: f64, g: usize, p: &ModelParams) -> f64 {
    let share = p.population_share(g);
    ramp_weight(
        capacity,
        share * p.min_capacity,
        share * p.max_capacity,
        p.switch_width,
    )
}

/// True when the private stock of group `g` sits strictly inside its ramp.
pub fn private_on_ramp(capacity: f64, g: usize, p: &ModelParams) -> bool {
    let share = p.population_share(g);
    share * p.min_capacity < capacity && capacity < share * p.max_capacity
}

/// True when the shared stock sits strictly inside its ramp.
pub fn shared_on_ramp(capacity: f64, p: &ModelParams) -> bool {
    p.min_capacity < capacity && capacity < p.max_capacity
}

/// Per-user and aggregate incomes for one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Incomes {
    /// y^s_g
    pub shared: [f64; 2],
    /// y^p_g
    pub private: [f64; 2],
    /// y'_g
    pub post_tax: [f64; 2],
    /// π_g = (1 - s_g) y'_g
    pub consumption: [f64; 2],
    /// Ȳ^s
    pub shared_total: f64,
    /// Ȳ^p
    pub private_total: f64,
    /// L̃ = Σ φ_g l_g n_g
    pub weighted_labor: f64,
    /// e_g = max(π̂_g - π_g, 0)
    pub error: [f64; 2],
}

impl Incomes {
    /// Pre-tax income per user y^s_g + y^p_g.
    pub fn pre_tax(&self, g: usize) -> f64 {
        self.shared[g] + self.private[g]
    }

    /// Revenue base Ȳ^s + ψȲ^p.
    pub fn tax_base(&self, p: &ModelParams) -> f64 {
        self.shared_total + p.psi() * self.private_total
    }
}

pub fn compute_incomes(x: &SystemState, p: &ModelParams) -> Result<Incomes> {
    let hs = harvest_shared(x.shared, p);
    let h_p = p.private_max_harvest();
    let psi = p.psi();
    let mut inc = Incomes {
        shared: [0.0; 2],
        private: [0.0; 2],
        post_tax: [0.0; 2],
        consumption: [0.0; 2],
        shared_total: 0.0,
        private_total: 0.0,
        weighted_labor: 0.0,
        error: [0.0; 2],
    };
    for (g, gp) in p.groups.iter().enumerate() {
        let per_unit = gp.earning_potential * p.resource;
        let hp = harvest_private_with(x.private[g], p.population_share(g), h_p, p);
        let ys = x.labor[g] * per_unit * hs;
        let yp = (1.0 - x.labor[g]) * (per_unit * hp + p.outside_wage);
        let post = ys * (1.0 - x.tax) + yp * (1.0 - psi * x.tax);
        let pi = (1.0 - x.savings[g]) * post;
        inc.shared[g] = ys;
        inc.private[g] = yp;
        inc.post_tax[g] = post;
        inc.consumption[g] = pi;
        inc.shared_total += gp.population * ys;
        inc.private_total += gp.population * yp;
        inc.weighted_labor += gp.earning_potential * x.labor[g] * gp.population;
        inc.error[g] = if x.expected[g] > pi {
            x.expected[g] - pi
        } else {
            0.0
        };
    }
    let finite = inc
        .shared
        .iter()
        .chain(&inc.private)
        .chain(&inc.post_tax)
        .chain(&inc.error)
        .all(|v| v.is_finite());
    if !finite {
        return Err(Error::NonFinite("incomes"));
    }
    Ok(inc)
}

impl ModelParams {
    /// The same model with group labels exchanged.
    pub fn swap_groups(&self) -> Self {
        let mut q = self.clone();
        q.groups.swap(0, 1);
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Candidate;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn shared_harvest_corners() {
        let p = params();
        assert_eq!(harvest_shared(p.max_capacity, &p), p.max_harvest);
        assert_eq!(harvest_shared(p.min_capacity, &p), 0.0);
        let mid = 0.5 * (p.min_capacity + p.max_capacity);
        assert_relative_eq!(
            harvest_shared(mid, &p),
            p.max_harvest / 2.0,
            epsilon = 1e-18
        );
        assert_eq!(harvest_shared(0.0, &p), 0.0);
        assert_eq!(harvest_shared(10.0, &p), p.max_harvest);
    }

    #[test]
    fn private_harvest_uses_group_scaled_thresholds() {
        let p = params();
        let share = p.population_share(0);
        let h_p = p.private_max_harvest();
        assert_eq!(harvest_private(share * p.max_capacity, 0, &p), h_p);
        assert_eq!(harvest_private(share * p.min_capacity, 0, &p), 0.0);
        assert_relative_eq!(h_p, 0.0025 * (29.0 / 30.0), epsilon = 1e-16);
        assert_relative_eq!(h_p, 0.002_416_666_666_666_667, epsilon = 1e-15);
    }

    fn full_shared(p: &ModelParams, tax: f64) -> SystemState {
        let mut x = SystemState::initial(p, tax, Candidate::First);
        x.labor = [1.0, 1.0];
        x.private = [0.0, 0.0];
        x.savings = [0.0, 0.0];
        x
    }

    #[test]
    fn ramp_weight_blends_near_edges() {
        let mut p = params();
        p.switch_width = 0.1;
        assert_eq!(shared_ramp_weight(1.5, &p), 1.0);
        assert_eq!(shared_ramp_weight(3.0, &p), 0.0);
        assert_eq!(shared_ramp_weight(0.3, &p), 0.0);
        assert_relative_eq!(shared_ramp_weight(3.0 - 0.135, &p), 0.5, epsilon = 1e-12);
        assert_relative_eq!(private_ramp_weight(0.6 - 0.027, 0, &p), 0.5, epsilon = 1e-9);
        p.switch_width = 0.0;
        assert_eq!(shared_ramp_weight(3.0 - 1e-12, &p), 1.0);
        assert_eq!(shared_ramp_weight(4.0, &p), 0.0);
    }

    #[test]
    fn full_participation_incomes() {
        let p = params();
        let x = full_shared(&p, 0.0);
        let inc = compute_incomes(&x, &p).unwrap();
        assert_relative_eq!(inc.shared[0], 7.5, epsilon = 1e-12);
        assert_relative_eq!(inc.shared[1], 1.875, epsilon = 1e-12);
        assert_relative_eq!(inc.shared_total, 3000.0, epsilon = 1e-9);
        assert_relative_eq!(inc.weighted_labor, 12_000.0, epsilon = 1e-9);
    }

    #[test]
    fn subsistence_only_when_no_infrastructure() {
        let p = params();
        let mut x = full_shared(&p, 0.1);
        x.labor = [0.0, 0.0];
        x.shared = 0.0;
        let inc = compute_incomes(&x, &p).unwrap();
        assert_eq!(inc.shared, [0.0, 0.0]);
        assert_relative_eq!(inc.private[0], 0.1);
        assert_relative_eq!(inc.private[1], 0.1);
    }

    #[test]
    fn untaxed_post_tax_income_is_gross() {
        let p = params();
        let x = SystemState::initial(&p, 0.0, Candidate::First);
        let inc = compute_incomes(&x, &p).unwrap();
        for g in 0..2 {
            assert_eq!(inc.post_tax[g], inc.shared[g] + inc.private[g]);
        }
    }

    #[test]
    fn error_is_positive_part_of_shortfall() {
        let p = params();
        let mut x = full_shared(&p, 0.1);
        x.expected = [10.0, 0.0];
        let inc = compute_incomes(&x, &p).unwrap();
        assert_relative_eq!(inc.error[0], 10.0 - 6.75, epsilon = 1e-12);
        assert_eq!(inc.error[1], 0.0);
    }

    #[test]
    fn non_finite_input_is_reported() {
        let p = params();
        let mut x = full_shared(&p, 0.1);
        x.labor[0] = f64::NAN;
        assert_eq!(compute_incomes(&x, &p), Err(Error::NonFinite("incomes")));
    }

    fn arb_state() -> impl Strategy<Value = SystemState> {
        (
            0.0..4.0f64,
            prop::array::uniform2(0.0..1.0f64),
            prop::array::uniform2(0.0..=1.0f64),
            prop::array::uniform2(0.0..=1.0f64),
            0.0..0.99f64,
            prop::array::uniform2(0.0..10.0f64),
        )
            .prop_map(
                |(shared, private, labor, savings, tax, expected)| SystemState {
                    shared,
                    private,
                    labor,
                    savings,
                    tax,
                    preference: [tax; 2],
                    expected,
                    platform: [tax; 2],
                    incumbent: Candidate::First,
                },
            )
    }

    proptest! {
        #[test]
        fn harvest_is_monotone_and_continuous(a in 0.0..5.0f64, b in 0.0..5.0f64) {
            let p = params();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(harvest_shared(lo, &p) <= harvest_shared(hi, &p));
            prop_assert!(harvest_private(lo, 0, &p) <= harvest_private(hi, 0, &p));
            // Lipschitz with the ramp slope
            let slope = p.max_harvest / (p.max_capacity - p.min_capacity);
            prop_assert!(harvest_shared(hi, &p) - harvest_shared(lo, &p) <= slope * (hi - lo) + 1e-18);
            let pslope = p.private_max_harvest()
                / (p.population_share(0) * (p.max_capacity - p.min_capacity));
            prop_assert!(harvest_private(hi, 0, &p) - harvest_private(lo, 0, &p) <= pslope * (hi - lo) + 1e-15);
        }

        #[test]
        fn post_tax_income_bounded_by_gross(x in arb_state(), psi in any::<bool>()) {
            let p = ModelParams { taxes_private: psi, ..params() };
            let inc = compute_incomes(&x, &p).unwrap();
            for g in 0..2 {
                let gross = inc.shared[g] + inc.private[g];
                prop_assert!(inc.post_tax[g] >= 0.0);
                prop_assert!(inc.post_tax[g] <= gross + 1e-12);
                if x.tax == 0.0 {
                    prop_assert_eq!(inc.post_tax[g], gross);
                } else if inc.shared[g] + p.psi() * inc.private[g] > 0.0 {
                    prop_assert!(inc.post_tax[g] < gross);
                }
                if psi {
                    prop_assert!((inc.post_tax[g] - (1.0 - x.tax) * gross).abs() <= 1e-12 * gross.max(1.0));
                }
                prop_assert!(inc.error[g] >= 0.0);
            }
        }

        #[test]
        fn swapping_groups_permutes_outputs(x in arb_state()) {
            let p = params();
            let a = compute_incomes(&x, &p).unwrap();
            let b = compute_incomes(&x.swap_groups(), &p.swap_groups()).unwrap();
            for g in 0..2 {
                prop_assert_eq!(a.shared[g], b.shared[1 - g]);
                prop_assert_eq!(a.private[g], b.private[1 - g]);
                prop_assert_eq!(a.post_tax[g], b.post_tax[1 - g]);
                prop_assert_eq!(a.error[g], b.error[1 - g]);
            }
            let close = |u: f64, v: f64| (u - v).abs() <= 1e-12 * u.abs().max(1.0);
            prop_assert!(close(a.shared_total, b.shared_total));
            prop_assert!(close(a.private_total, b.private_total));
            prop_assert!(close(a.weighted_labor, b.weighted_labor));
        }
    }
}
