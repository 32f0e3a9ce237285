use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{Sample, Trajectory};
use crate::model::{ModelParams, ELITE, NON_ELITE};

/// Length of the tail window used for classification and welfare.
pub const TAIL_WINDOW: f64 = 40.0;

/// Post-shock state of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    FullShared,
    Collapse,
    ElitesAbandon,
    DistinctSocieties,
    Unclassified,
}

impl Classification {
    pub const ALL: [Classification; 5] = [
        Classification::FullShared,
        Classification::Collapse,
        Classification::ElitesAbandon,
        Classification::DistinctSocieties,
        Classification::Unclassified,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Classification::FullShared => "FullShared",
            Classification::Collapse => "Collapse",
            Classification::ElitesAbandon => "ElitesAbandon",
            Classification::DistinctSocieties => "DistinctSocieties",
            Classification::Unclassified => "Unclassified",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Capacity below which a stock counts as gone.
pub fn persistence_threshold(p: &ModelParams) -> f64 {
    1e-3 * p.max_capacity
}

/// Time averages over the tail window.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TailAverages {
    pub shared: f64,
    pub private: [f64; 2],
    pub labor: [f64; 2],
    pub consumption: [f64; 2],
}

/// Trapezoidal time average of `f` over samples with t >= t_end - window.
/// A window holding a single sample returns that sample.
fn time_average<F: Fn(&Sample) -> f64>(samples: &[Sample], window: f64, f: F) -> Option<f64> {
    let last = samples.last()?;
    let start = last.t - window;
    let tail: Vec<&Sample> = samples.iter().filter(|s| s.t >= start - 1e-9).collect();
    if tail.len() == 1 || tail[tail.len() - 1].t <= tail[0].t {
        return Some(f(tail[tail.len() - 1]));
    }
    let mut acc = 0.0;
    for w in tail.windows(2) {
        acc += 0.5 * (f(w[0]) + f(w[1])) * (w[1].t - w[0].t);
    }
    Some(acc / (tail[tail.len() - 1].t - tail[0].t))
}

pub fn tail_averages(traj: &Trajectory, window: f64) -> Result<TailAverages> {
    let s = &traj.samples;
    let avg = |f: &dyn Fn(&Sample) -> f64| time_average(s, window, f).ok_or(Error::EmptyRecords);
    Ok(TailAverages {
        shared: avg(&|x| x.state.shared)?,
        private: [avg(&|x| x.state.private[0])?, avg(&|x| x.state.private[1])?],
        labor: [avg(&|x| x.state.labor[0])?, avg(&|x| x.state.labor[1])?],
        consumption: [
            avg(&|x| x.incomes.consumption[0])?,
            avg(&|x| x.incomes.consumption[1])?,
        ],
    })
}

pub fn classify_averages(avg: &TailAverages, p: &ModelParams) -> Classification {
    let eps = persistence_threshold(p);
    let elite_full = 0.9 * p.population_share(ELITE) * p.max_capacity;
    let is = avg.shared;
    let ip = avg.private[ELITE];
    let c = if is < eps && ip < eps {
        Classification::Collapse
    } else if is < eps && ip > elite_full {
        Classification::ElitesAbandon
    } else if is > 0.5 * p.max_capacity && ip > elite_full && avg.labor[ELITE] < 0.1 {
        Classification::DistinctSocieties
    } else if is > 0.5 * p.max_capacity && ip < eps && avg.labor[NON_ELITE] > 0.9 {
        Classification::FullShared
    } else {
        Classification::Unclassified
    };
    if c == Classification::Unclassified {
        log::debug!("unclassified tail: {avg:?}");
    }
    c
}

/// Tail-window classification. Failed or empty trajectories are Unclassified.
pub fn classify_equilibrium(traj: &Trajectory, p: &ModelParams) -> Classification {
    if traj.failed() {
        return Classification::Unclassified;
    }
    match tail_averages(traj, TAIL_WINDOW) {
        Ok(avg) => classify_averages(&avg, p),
        Err(_) => Classification::Unclassified,
    }
}

/// Number of direction reversals of the tax rate, ignoring swings smaller
/// than `min_swing`.
pub fn tax_reversals(traj: &Trajectory, min_swing: f64) -> usize {
    let mut it = traj.samples.iter().map(|s| s.state.tax);
    let Some(first) = it.next() else { return 0 };
    let mut extreme = first;
    let mut dir = 0.0f64;
    let mut count = 0;
    for v in it {
        let d = v - extreme;
        if dir == 0.0 {
            if d.abs() > min_swing {
                dir = d.signum();
                extreme = v;
            }
        } else if d * dir > 0.0 {
            extreme = v;
        } else if d.abs() > min_swing {
            count += 1;
            dir = -dir;
            extreme = v;
        }
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WelfareStats {
    pub per_capita: f64,
    pub gini: f64,
}

/// Two-point Gini over group consumption with population weights.
pub fn two_group_gini(consumption: [f64; 2], p: &ModelParams) -> f64 {
    let n = [p.groups[0].population, p.groups[1].population];
    let total = n[0] + n[1];
    let mean = (n[0] * consumption[0] + n[1] * consumption[1]) / total;
    if mean == 0.0 {
        log::debug!("zero mean consumption, gini set to 0");
        return 0.0;
    }
    n[0] * n[1] * (consumption[0] - consumption[1]).abs() / (total * total * mean)
}

pub fn per_capita_welfare(consumption: [f64; 2], p: &ModelParams) -> f64 {
    let n = [p.groups[0].population, p.groups[1].population];
    (n[0] * consumption[0] + n[1] * consumption[1]) / (n[0] + n[1])
}

/// Welfare over the tail window. Gini uses tail-averaged group consumption.
pub fn welfare_stats(traj: &Trajectory, p: &ModelParams) -> Result<WelfareStats> {
    let avg = tail_averages(traj, TAIL_WINDOW)?;
    Ok(WelfareStats {
        per_capita: per_capita_welfare(avg.consumption, p),
        gini: two_group_gini(avg.consumption, p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{integrate, EventSchedule, IntegrateOptions};
    use crate::model::{compute_incomes, Candidate, PoliticalVariant, SystemState};

    fn averages(is: f64, ip1: f64, l1: f64, l2: f64) -> TailAverages {
        TailAverages {
            shared: is,
            private: [ip1, 0.0],
            labor: [l1, l2],
            consumption: [0.0; 2],
        }
    }

    #[test]
    fn classifies_the_four_states() {
        let p = ModelParams::default();
        let c = |a| classify_averages(&a, &p);
        assert_eq!(c(averages(3.0, 0.0, 1.0, 1.0)), Classification::FullShared);
        assert_eq!(
            c(averages(0.0, 0.6, 0.0, 1.0)),
            Classification::ElitesAbandon
        );
        assert_eq!(c(averages(0.0, 0.0, 0.0, 0.0)), Classification::Collapse);
        assert_eq!(
            c(averages(2.9, 0.6, 0.0, 1.0)),
            Classification::DistinctSocieties
        );
        assert_eq!(
            c(averages(1.0, 0.3, 0.5, 0.5)),
            Classification::Unclassified
        );
        assert_eq!(
            c(averages(3.0, 0.0, 1.0, 0.5)),
            Classification::Unclassified
        );
    }

    #[test]
    fn names_round_trip() {
        for c in Classification::ALL {
            assert_eq!(Classification::from_name(c.name()), Some(c));
        }
    }

    #[test]
    fn gini_examples() {
        let p = ModelParams::default();
        assert_eq!(two_group_gini([2.0, 2.0], &p), 0.0);
        assert_eq!(two_group_gini([0.0, 0.0], &p), 0.0);
        let mut even = p.clone();
        even.groups[0].population = 500.0;
        even.groups[1].population = 500.0;
        assert!((two_group_gini([3.0, 0.0], &even) - 0.5).abs() < 1e-15);
        // mean absolute difference over twice the mean, two-point oracle
        let (n1, n2, a, b) = (200.0, 800.0, 6.75, 1.6875);
        let mean = (n1 * a + n2 * b) / 1000.0;
        let mad = 2.0 * n1 * n2 * (a - b) / (1000.0 * 1000.0);
        assert!((two_group_gini([a, b], &p) - mad / (2.0 * mean)).abs() < 1e-15);
    }

    #[test]
    fn full_shared_welfare() {
        let p = ModelParams::default().with_variant(PoliticalVariant::NoPolitics);
        let mut x = SystemState::initial(&p, 0.1, Candidate::First);
        x.labor = [1.0, 1.0];
        x.private = [0.0, 0.0];
        x.savings = [0.0, 0.0];
        let inc = compute_incomes(&x, &p).unwrap();
        assert!((inc.consumption[0] - 6.75).abs() < 1e-12);
        assert!((inc.consumption[1] - 1.6875).abs() < 1e-12);
        assert!((per_capita_welfare(inc.consumption, &p) - 2.7).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_run_classifies_full_shared() {
        let p = ModelParams::default().with_variant(PoliticalVariant::NoPolitics);
        let mut x = SystemState::initial(&p, 0.1, Candidate::First);
        x.labor = [1.0, 1.0];
        x.private = [0.0, 0.0];
        x.savings = [0.0, 0.0];
        x.expected = compute_incomes(&x, &p).unwrap().consumption;
        let traj = integrate(
            &x,
            &p,
            &EventSchedule::new(60.0),
            &IntegrateOptions::default(),
        );
        assert_eq!(classify_equilibrium(&traj, &p), Classification::FullShared);
        let w = welfare_stats(&traj, &p).unwrap();
        assert!((w.per_capita - 2.7).abs() < 1e-9);
    }

    #[test]
    fn zero_stocks_classify_collapse() {
        let p = ModelParams::default().with_variant(PoliticalVariant::NoPolitics);
        let mut x = SystemState::initial(&p, 0.1, Candidate::First);
        x.shared = 0.0;
        x.private = [0.0, 0.0];
        let traj = integrate(
            &x,
            &p,
            &EventSchedule::new(50.0),
            &IntegrateOptions::default(),
        );
        assert_eq!(classify_equilibrium(&traj, &p), Classification::Collapse);
    }

    #[test]
    fn reversal_counter() {
        let p = ModelParams::default();
        let x = SystemState::initial(&p, 0.1, Candidate::First);
        let inc = compute_incomes(&x, &p).unwrap();
        let traj_of = |taus: &[f64]| {
            let samples = taus
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let mut s = x;
                    s.tax = t;
                    Sample {
                        t: i as f64,
                        state: s,
                        incomes: inc,
                    }
                })
                .collect();
            let mut tr = integrate(
                &x,
                &p,
                &EventSchedule::new(0.1),
                &IntegrateOptions::default(),
            );
            tr.samples = samples;
            tr
        };
        assert_eq!(
            tax_reversals(&traj_of(&[0.1, 0.2, 0.3, 0.2, 0.1, 0.3]), 0.01),
            2
        );
        assert_eq!(tax_reversals(&traj_of(&[0.1, 0.2, 0.3, 0.4]), 0.01), 0);
        assert_eq!(tax_reversals(&traj_of(&[0.1, 0.105, 0.1, 0.105]), 0.01), 0);
    }

    #[test]
    fn trapezoid_average_is_exact_for_linear_series() {
        let p = ModelParams::default();
        let x = SystemState::initial(&p, 0.1, Candidate::First);
        let inc = compute_incomes(&x, &p).unwrap();
        let samples: Vec<Sample> = (0..=100)
            .map(|i| {
                let mut s = x;
                s.shared = i as f64;
                Sample {
                    t: i as f64,
                    state: s,
                    incomes: inc,
                }
            })
            .collect();
        let avg = time_average(&samples, 40.0, |s| s.state.shared).unwrap();
        assert!((avg - 80.0).abs() < 1e-12);
        assert!(time_average(&[], 40.0, |s| s.t).is_none());
    }
}
