//! Adaptive Tsitouras 5(4) stepping with exact-time discrete events.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    compute_incomes, Candidate, Incomes, ModelParams, OpportunityMode, SystemState, ELITE,
    VECTOR_DIM,
};
use crate::politics::hold_election;
use crate::system::{enforce_labor_cap, rhs, FieldOptions};

/// Smallest accepted step size.
pub const MIN_STEP: f64 = 1e-10;
/// Stop times closer than this are merged.
const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverControls {
    pub rtol: f64,
    pub atol: f64,
    pub dt_init: f64,
    pub dt_max: f64,
    pub output_dt: f64,
}

impl Default for SolverControls {
    fn default() -> Self {
        SolverControls {
            rtol: 1e-6,
            atol: 1e-9,
            dt_init: 0.01,
            dt_max: 0.1,
            output_dt: 0.1,
        }
    }
}

impl SolverControls {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("solver.rtol", self.rtol),
            ("solver.atol", self.atol),
            ("solver.dt_init", self.dt_init),
            ("solver.dt_max", self.dt_max),
            ("solver.output_dt", self.output_dt),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::range(name, v, "> 0"));
            }
        }
        Ok(())
    }
}

// Tsit5 tableau.
const C: [f64; 6] = [0.161, 0.327, 0.9, 0.980_025_540_904_509_7, 1.0, 1.0];
const A21: f64 = 0.161;
const A31: f64 = -0.008_480_655_492_356_989;
const A32: f64 = 0.335_480_655_492_357;
const A41: f64 = 2.897_153_057_105_493;
const A42: f64 = -6.359_448_489_975_075;
const A43: f64 = 4.362_295_432_869_581_5;
const A51: f64 = 5.325_864_828_439_257;
const A52: f64 = -11.748_883_564_062_828;
const A53: f64 = 7.495_539_342_889_836_5;
const A54: f64 = -0.092_495_066_361_755_25;
const A61: f64 = 5.861_455_442_946_42;
const A62: f64 = -12.920_969_317_847_11;
const A63: f64 = 8.159_367_898_576_159;
const A64: f64 = -0.071_584_973_281_401;
const A65: f64 = -0.028_269_050_394_068_383;
const B: [f64; 6] = [
    0.096_460_766_818_065_23,
    0.01,
    0.479_889_650_414_499_6,
    1.379_008_574_103_742,
    -3.290_069_515_436_081,
    2.324_710_524_099_774,
];
const BTILDE: [f64; 7] = [
    -0.001_780_011_052_225_777_14,
    -0.000_816_434_459_656_746_9,
    0.007_880_878_010_261_995,
    -0.144_711_007_173_262_9,
    0.582_357_165_452_555_2,
    -0.458_082_105_929_186_97,
    1.0 / 66.0,
];

fn axpy<const N: usize>(y: &[f64; N], dt: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += dt * acc;
    }
    out
}

/// Result of a single trial step.
pub struct TrialStep<const N: usize> {
    pub y: [f64; N],
    /// Derivative at the new point (first stage of the next step).
    pub k_end: [f64; N],
    /// Embedded error estimate.
    pub err: [f64; N],
}

/// One Tsit5 step from `(t, y)` with first-stage derivative `k1`.
pub fn tsit5_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    dt: f64,
) -> Result<TrialStep<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let k2 = f(t + C[0] * dt, &axpy(y, dt, &[(A21, k1)]))?;
    let k3 = f(t + C[1] * dt, &axpy(y, dt, &[(A31, k1), (A32, &k2)]))?;
    let k4 = f(
        t + C[2] * dt,
        &axpy(y, dt, &[(A41, k1), (A42, &k2), (A43, &k3)]),
    )?;
    let k5 = f(
        t + C[3] * dt,
        &axpy(y, dt, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    )?;
    let k6 = f(
        t + C[4] * dt,
        &axpy(
            y,
            dt,
            &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ),
    )?;
    let y_new = axpy(
        y,
        dt,
        &[
            (B[0], k1),
            (B[1], &k2),
            (B[2], &k3),
            (B[3], &k4),
            (B[4], &k5),
            (B[5], &k6),
        ],
    );
    let k7 = f(t + dt, &y_new)?;
    let zero = [0.0; N];
    let err = axpy(
        &zero,
        dt,
        &[
            (BTILDE[0], k1),
            (BTILDE[1], &k2),
            (BTILDE[2], &k3),
            (BTILDE[3], &k4),
            (BTILDE[4], &k5),
            (BTILDE[5], &k6),
            (BTILDE[6], &k7),
        ],
    );
    Ok(TrialStep {
        y: y_new,
        k_end: k7,
        err,
    })
}

/// Adaptive solver state for a fixed-size system.
#[derive(Debug, Clone)]
pub struct AdaptiveSolver<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    k: Option<[f64; N]>,
    dt: f64,
    ctrl: SolverControls,
    pub accepted: usize,
    pub rejected: usize,
}

impl<const N: usize> AdaptiveSolver<N> {
    pub fn new(t0: f64, y0: [f64; N], ctrl: SolverControls) -> Self {
        AdaptiveSolver {
            t: t0,
            y: y0,
            k: None,
            dt: ctrl.dt_init.min(ctrl.dt_max),
            ctrl,
            accepted: 0,
            rejected: 0,
        }
    }

    /// Replace the state after a discrete change; the next step starts fresh.
    pub fn reset_state(&mut self, y: [f64; N]) {
        self.y = y;
        self.k = None;
    }

    fn error_norm(&self, y_new: &[f64; N], err: &[f64; N]) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            let scale = self.ctrl.atol + self.ctrl.rtol * self.y[i].abs().max(y_new[i].abs());
            let r = err[i] / scale;
            acc += r * r;
        }
        (acc / N as f64).sqrt()
    }

    /// Integrate until `t_end`, landing on it exactly. `guard` may adjust
    /// each accepted state and fails the run on a real violation.
    pub fn advance_to<F, G>(&mut self, f: &mut F, guard: &mut G, t_end: f64) -> Result<()>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
        G: FnMut(f64, &mut [f64; N]) -> Result<bool>,
    {
        while t_end - self.t > MERGE_TOL * 1e-3 {
            let k1 = match self.k {
                Some(k) => k,
                None => f(self.t, &self.y)?,
            };
            let remaining = t_end - self.t;
            let proposal = self.dt.min(self.ctrl.dt_max);
            let (dt, lands) = if proposal >= remaining {
                (remaining, true)
            } else {
                (proposal, false)
            };
            let trial = tsit5_step(f, self.t, &self.y, &k1, dt)?;
            let norm = self.error_norm(&trial.y, &trial.err);
            if !norm.is_finite() {
                return Err(Error::NonFinite("state"));
            }
            let factor = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            if norm <= 1.0 {
                let mut y = trial.y;
                let t_new = if lands { t_end } else { self.t + dt };
                let changed = match guard(t_new, &mut y) {
                    Ok(c) => c,
                    // overshoot past a bound: retry with a shorter step
                    Err(e @ Error::BoundViolation { .. }) => {
                        self.rejected += 1;
                        self.k = Some(k1);
                        self.dt = 0.5 * dt;
                        if self.dt < MIN_STEP {
                            return Err(e);
                        }
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                self.t = t_new;
                self.y = y;
                self.k = if changed { None } else { Some(trial.k_end) };
                self.accepted += 1;
                // a step shortened to hit the target says little about the
                // natural step size
                if !lands || dt >= proposal {
                    self.dt = (dt * factor).min(self.ctrl.dt_max);
                }
            } else {
                self.rejected += 1;
                self.k = Some(k1);
                self.dt = dt * factor.min(1.0);
                if self.dt < MIN_STEP {
                    return Err(Error::StepUnderflow {
                        t: self.t,
                        dt: self.dt,
                    });
                }
            }
        }
        self.t = t_end;
        Ok(())
    }
}

/// Integrate an arbitrary system over `[t0, t1]` without guard.
pub fn solve<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    ctrl: SolverControls,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut s = AdaptiveSolver::new(t0, y0, ctrl);
    s.advance_to(&mut f, &mut |_, _| Ok(false), t1)?;
    Ok(s.y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EventKind {
    Election,
    CapacityShock(f64),
    OpportunityShock(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSchedule {
    pub horizon: f64,
    events: Vec<Event>,
}

impl EventSchedule {
    pub fn new(horizon: f64) -> Self {
        EventSchedule {
            horizon,
            events: Vec::new(),
        }
    }

    /// Elections at every multiple of `p.election_period` for PolComp.
    pub fn for_params(p: &ModelParams, horizon: f64) -> Self {
        let mut s = EventSchedule::new(horizon);
        if p.variant.is_polcomp() {
            s.add_elections(p.election_period);
        }
        s
    }

    pub fn add_elections(&mut self, period: f64) {
        let mut k = 1u64;
        loop {
            let t = k as f64 * period;
            if t > self.horizon + MERGE_TOL {
                break;
            }
            self.events.push(Event {
                time: t.min(self.horizon),
                kind: EventKind::Election,
            });
            k += 1;
        }
        self.sort();
    }

    pub fn push(&mut self, time: f64, kind: EventKind) {
        self.events.push(Event { time, kind });
        self.sort();
    }

    fn sort(&mut self) {
        // stable: shocks pushed before elections at the same time keep order
        self.events
            .sort_by(|a, b| a.time.partial_cmp(&b.time).expect("finite event times"));
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::range("horizon", self.horizon, "> 0"));
        }
        for e in &self.events {
            if !(e.time > 0.0 && e.time <= self.horizon) {
                return Err(Error::range("event time", e.time, "within (0, horizon]"));
            }
            if let EventKind::CapacityShock(m) = e.kind {
                if !(0.0..=1.0).contains(&m) {
                    return Err(Error::InvalidShock(m));
                }
            }
        }
        Ok(())
    }
}

/// Apply one discrete transition. Elections also need current incomes.
pub fn apply_event(
    x: &mut SystemState,
    p: &mut ModelParams,
    kind: EventKind,
) -> Result<Option<crate::politics::ElectionOutcome>> {
    match kind {
        EventKind::Election => {
            let inc = compute_incomes(x, p)?;
            Ok(Some(hold_election(x, &inc, p)))
        }
        EventKind::CapacityShock(m) => {
            if !(0.0..=1.0).contains(&m) {
                return Err(Error::InvalidShock(m));
            }
            x.shared *= 1.0 - m;
            Ok(None)
        }
        EventKind::OpportunityShock(d) => {
            let mu = p.shared_effectiveness;
            let g = &mut p.groups[ELITE];
            match p.opportunity_mode {
                OpportunityMode::Additive => g.private_effectiveness += d * mu,
                OpportunityMode::Multiplicative => g.private_effectiveness = d * mu,
            }
            Ok(None)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub state: SystemState,
    pub incomes: Incomes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EventRecord {
    pub time: f64,
    pub kind: EventKind,
    pub incumbent_before: Candidate,
    pub incumbent_after: Candidate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub terminal: SystemState,
    pub terminal_time: f64,
    pub events: Vec<EventRecord>,
    /// Parameters at the end of the run (opportunity shocks change them).
    pub params: ModelParams,
    pub failure: Option<Error>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub controls: SolverControls,
    pub field: FieldOptions,
    /// Samples before this time are not stored.
    pub record_from: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            controls: SolverControls::default(),
            field: FieldOptions::default(),
            record_from: 0.0,
        }
    }
}

const LOWER_BOUNDED: [(usize, &str); VECTOR_DIM] = [
    (0, "Is"),
    (1, "Ip1"),
    (2, "Ip2"),
    (3, "l1"),
    (4, "l2"),
    (5, "s1"),
    (6, "s2"),
    (7, "tau"),
    (8, "tau_hat1"),
    (9, "tau_hat2"),
    (10, "pi_hat1"),
    (11, "pi_hat2"),
    (12, "tau_check1"),
    (13, "tau_check2"),
];

/// Clip tiny bound excursions; anything beyond `atol` is an error.
pub fn guard_state(t: f64, v: &mut [f64; VECTOR_DIM], atol: f64) -> Result<bool> {
    let mut changed = false;
    for (i, name) in LOWER_BOUNDED {
        if !v[i].is_finite() {
            return Err(Error::NonFinite("state"));
        }
        if v[i] < 0.0 {
            if v[i] < -atol {
                return Err(Error::BoundViolation {
                    component: name,
                    value: v[i],
                    t,
                });
            }
            v[i] = 0.0;
            changed = true;
        }
    }
    for (i, name) in [(3, "l1"), (4, "l2")] {
        if v[i] > 1.0 {
            if v[i] > 1.0 + atol {
                return Err(Error::BoundViolation {
                    component: name,
                    value: v[i],
                    t,
                });
            }
            v[i] = 1.0;
            changed = true;
        }
    }
    Ok(changed)
}

/// Stop times: every output time plus every event time, ascending.
fn stop_times(sched: &EventSchedule, output_dt: f64) -> Vec<(f64, bool)> {
    let mut stops: Vec<(f64, bool)> = Vec::new();
    let n = (sched.horizon / output_dt + 1e-9).floor() as u64;
    for k in 1..=n {
        stops.push(((k as f64 * output_dt).min(sched.horizon), false));
    }
    if stops
        .last()
        .map_or(true, |s| sched.horizon - s.0 > MERGE_TOL)
    {
        stops.push((sched.horizon, false));
    }
    for e in sched.events() {
        stops.push((e.time, true));
    }
    stops.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut merged: Vec<(f64, bool)> = Vec::with_capacity(stops.len());
    for (t, ev) in stops {
        match merged.last_mut() {
            Some(last) if (t - last.0).abs() < MERGE_TOL => {
                if ev && !last.1 {
                    last.0 = t;
                }
                last.1 |= ev;
            }
            _ => merged.push((t, ev)),
        }
    }
    merged
}

/// Integrate the model from `x0` to the schedule horizon.
pub fn integrate(
    x0: &SystemState,
    p: &ModelParams,
    sched: &EventSchedule,
    opts: &IntegrateOptions,
) -> Trajectory {
    let mut traj = Trajectory {
        samples: Vec::new(),
        terminal: *x0,
        terminal_time: 0.0,
        events: Vec::new(),
        params: p.clone(),
        failure: None,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    if let Err(e) = run(x0, sched, opts, &mut traj) {
        log::debug!("integration failed at t = {}: {e}", traj.terminal_time);
        traj.failure = Some(e);
    }
    traj
}

fn run(
    x0: &SystemState,
    sched: &EventSchedule,
    opts: &IntegrateOptions,
    traj: &mut Trajectory,
) -> Result<()> {
    traj.params.validate()?;
    sched.validate()?;
    opts.controls.validate()?;
    let ctrl = opts.controls;
    let field = opts.field;
    let mut x = *x0;
    if let Some(cap) = field.labor_cap {
        enforce_labor_cap(&mut x, cap);
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("initial state"));
    }
    let record = |traj: &mut Trajectory, t: f64, x: &SystemState| -> Result<()> {
        if t >= opts.record_from - MERGE_TOL {
            let incomes = compute_incomes(x, &traj.params)?;
            traj.samples.push(Sample {
                t,
                state: *x,
                incomes,
            });
        }
        Ok(())
    };
    record(traj, 0.0, &x)?;

    let mut solver = AdaptiveSolver::new(0.0, x.to_vector(), ctrl);
    let mut next_event = 0;
    let events = sched.events();
    for (t_stop, has_event) in stop_times(sched, ctrl.output_dt) {
        {
            let p = &traj.params;
            let incumbent = x.incumbent;
            let mut f = |_t: f64, v: &[f64; VECTOR_DIM]| -> Result<[f64; VECTOR_DIM]> {
                let s = SystemState::from_vector(v, incumbent);
                Ok(rhs(&s, p, &field)?.0.to_vector())
            };
            let mut guard = |t: f64, v: &mut [f64; VECTOR_DIM]| -> Result<bool> {
                let mut changed = guard_state(t, v, ctrl.atol)?;
                if let Some(cap) = field.labor_cap {
                    if v[3] > cap {
                        v[3] = cap;
                        changed = true;
                    }
                }
                Ok(changed)
            };
            let res = solver.advance_to(&mut f, &mut guard, t_stop);
            traj.accepted_steps = solver.accepted;
            traj.rejected_steps = solver.rejected;
            traj.terminal_time = solver.t;
            x = SystemState::from_vector(&solver.y, incumbent);
            traj.terminal = x;
            res?;
        }
        if has_event {
            let mut changed = false;
            while next_event < events.len() && events[next_event].time <= t_stop + MERGE_TOL {
                let ev = events[next_event];
                let before = x.incumbent;
                apply_event(&mut x, &mut traj.params, ev.kind)?;
                traj.events.push(EventRecord {
                    time: t_stop,
                    kind: ev.kind,
                    incumbent_before: before,
                    incumbent_after: x.incumbent,
                });
                changed = true;
                next_event += 1;
            }
            if changed {
                solver.reset_state(x.to_vector());
            }
        }
        traj.terminal = x;
        record(traj, t_stop, &x)?;
    }
    Ok(())
}
