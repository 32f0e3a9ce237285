use super::classify::Classification;
use crate::dynamics::{d_infrastructure, d_savings};
use crate::error::{Error, Result};
use crate::model::{compute_incomes, Candidate, ModelParams, SystemState, ELITE};

/// Post-shock fixed point of the stock, labor and savings dynamics.
///
/// The elite private stock of Elites Abandon and Distinct Societies sits in
/// the blend band below the ramp top, where saving and decline balance; it is
/// found by Newton iteration. With a zero switch width those states are
/// sliding points and the nominal plateau state is returned instead. States
/// without shared capacity carry a zero tax, which keeps them at rest when
/// private income is taxed.
pub fn equilibrium_state(class: Classification, p: &ModelParams) -> Result<SystemState> {
    let tau0 = p.derived()?.maintenance_tax;
    let mut x = SystemState::initial(p, tau0, Candidate::First);
    x.private = [0.0, 0.0];
    x.savings = [0.0, 0.0];
    let elite_top = p.population_share(ELITE) * p.max_capacity;
    match class {
        Classification::FullShared => {
            x.labor = [1.0, 1.0];
        }
        Classification::Collapse => {
            x.shared = 0.0;
            x.labor = [0.0, 0.0];
            set_tax(&mut x, 0.0);
        }
        Classification::ElitesAbandon => {
            x.shared = 0.0;
            x.labor = [0.0, 0.0];
            set_tax(&mut x, 0.0);
            x.private[ELITE] = elite_top;
            refine_elite_private(&mut x, p)?;
        }
        Classification::DistinctSocieties => {
            x.labor = [0.0, 1.0];
            x.private[ELITE] = elite_top;
            let tax = p.maintenance_tax(x.labor, x.private);
            set_tax(&mut x, tax);
            refine_elite_private(&mut x, p)?;
            // the exited-elite tax does not depend on the elite private stock
            // under user fees; with private taxing it does, so re-solve once
            let tax = p.maintenance_tax(x.labor, x.private);
            set_tax(&mut x, tax);
            refine_elite_private(&mut x, p)?;
        }
        Classification::Unclassified => {
            return Err(Error::Config {
                line: 0,
                message: "no equilibrium for Unclassified".into(),
            })
        }
    }
    x.expected = compute_incomes(&x, p)?.consumption;
    Ok(x)
}

fn set_tax(x: &mut SystemState, tax: f64) {
    x.tax = tax;
    x.preference = [tax; 2];
    x.platform = [tax; 2];
}

fn elite_residual(x: &SystemState, p: &ModelParams) -> Result<[f64; 2]> {
    let inc = compute_incomes(x, p)?;
    let (_, private) = d_infrastructure(x, &inc, p);
    let savings = d_savings(x, &inc, p);
    Ok([private[ELITE], savings[ELITE]])
}

/// Newton solve of (dI_p1, ds_1) = 0 inside the blend band.
fn refine_elite_private(x: &mut SystemState, p: &ModelParams) -> Result<()> {
    let top = p.population_share(ELITE) * p.max_capacity;
    let lo = p.population_share(ELITE) * p.min_capacity;
    let band = p.switch_width * (top - lo);
    let gp = &p.groups[ELITE];
    let saving_for = |x: &SystemState| -> Result<f64> {
        let inc = compute_incomes(x, p)?;
        Ok(p.decay * x.private[ELITE]
            / (gp.private_effectiveness * gp.population * inc.post_tax[ELITE]))
    };
    if band <= 0.0 {
        x.private[ELITE] = top;
        x.savings[ELITE] = saving_for(x)?;
        return Ok(());
    }
    x.private[ELITE] = top - 0.5 * band;
    x.savings[ELITE] = saving_for(x)?;
    for _ in 0..60 {
        let f = elite_residual(x, p)?;
        if f[0].abs().max(f[1].abs()) < 1e-14 {
            return Ok(());
        }
        let hi = 1e-6 * band;
        let hs = 1e-6 * x.savings[ELITE].max(1e-6);
        let mut xi = *x;
        xi.private[ELITE] += hi;
        let fi = elite_residual(&xi, p)?;
        let mut xs = *x;
        xs.savings[ELITE] += hs;
        let fs = elite_residual(&xs, p)?;
        let j = [
            [(fi[0] - f[0]) / hi, (fs[0] - f[0]) / hs],
            [(fi[1] - f[1]) / hi, (fs[1] - f[1]) / hs],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let di = (f[0] * j[1][1] - f[1] * j[0][1]) / det;
        let ds = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
        x.private[ELITE] = (x.private[ELITE] - di).clamp(top - band, top);
        x.savings[ELITE] = (x.savings[ELITE] - ds).max(0.0);
    }
    let f = elite_residual(x, p)?;
    log::debug!("elite private refinement stopped with residual {f:?}");
    Ok(())
}
