//! Browser bindings: single runs, named presets and a small deterministic grid.
//! Results cross the boundary as JSON strings.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use infrapol_core::experiments::{
    find_preset, run_one, simulate_spec, summarize_run, RunRecord, RunSpec,
};
use infrapol_core::integrator::SolverControls;
use infrapol_core::model::{ModelParams, PoliticalVariant};
use infrapol_core::Error;

#[derive(Serialize)]
struct Series {
    class: String,
    persisted: bool,
    welfare: f64,
    gini: f64,
    t: Vec<f64>,
    shared: Vec<f64>,
    private_elite: Vec<f64>,
    labor_elite: Vec<f64>,
    labor_non_elite: Vec<f64>,
    tax: Vec<f64>,
}

#[derive(Serialize)]
struct Grid {
    d_is: Vec<f64>,
    d_mu: Vec<f64>,
    /// Row-major, rows d_is.
    class: Vec<String>,
    persisted: Vec<bool>,
    robustness: f64,
}

fn js(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn params(variant: &str, psi: bool, election_period: f64) -> Result<ModelParams, JsError> {
    let v = PoliticalVariant::from_name(variant)
        .ok_or_else(|| js(format!("unknown variant `{variant}`")))?;
    let mut p = ModelParams {
        taxes_private: psi,
        ..Default::default()
    }
    .with_variant(v);
    p.election_period = election_period;
    p.validate().map_err(js)?;
    Ok(p)
}

fn series(base: &ModelParams, spec: &RunSpec) -> Result<String, JsError> {
    let controls = SolverControls {
        output_dt: 0.5,
        ..Default::default()
    };
    let result = simulate_spec(base, spec, &controls, 0.0);
    let rec: RunRecord = summarize_run(0, base, spec, result.as_ref().map(|(t, i)| (t, *i)));
    let (traj, _) = result.map_err(js)?;
    if let Some(e) = &traj.failure {
        return Err(js(e));
    }
    let col = |f: &dyn Fn(&infrapol_core::integrator::Sample) -> f64| {
        traj.samples.iter().map(f).collect::<Vec<f64>>()
    };
    let out = Series {
        class: rec.class.name().into(),
        persisted: rec.persisted,
        welfare: rec.welfare,
        gini: rec.gini,
        t: col(&|s| s.t),
        shared: col(&|s| s.state.shared),
        private_elite: col(&|s| s.state.private[0]),
        labor_elite: col(&|s| s.state.labor[0]),
        labor_non_elite: col(&|s| s.state.labor[1]),
        tax: col(&|s| s.state.tax),
    };
    serde_json::to_string(&out).map_err(js)
}

/// One trajectory after a capacity shock `d_is` and opportunity shock `d_mu`.
#[wasm_bindgen]
pub fn simulate(
    variant: &str,
    psi: bool,
    election_period: f64,
    d_is: f64,
    d_mu: f64,
    horizon: f64,
) -> Result<String, JsError> {
    let p = params(variant, psi, election_period)?;
    if !(0.0..=1.0).contains(&d_is) {
        return Err(js(Error::range("d_Is", d_is, "0 <= d_Is <= 1")));
    }
    let spec = RunSpec {
        horizon,
        ..RunSpec::deterministic(&p, d_is, d_mu)
    };
    series(&p, &spec)
}

/// One of the named post-shock examples.
#[wasm_bindgen]
pub fn simulate_preset(name: &str) -> Result<String, JsError> {
    let preset = find_preset(name).ok_or_else(|| js(format!("unknown preset `{name}`")))?;
    series(&preset.params, &preset.spec)
}

/// `n` by `n` grid over d_Is in [0, 1] and d_mu in [0, 2], run on one thread.
#[wasm_bindgen]
pub fn sweep(variant: &str, psi: bool, election_period: f64, n: usize) -> Result<String, JsError> {
    if !(2..=21).contains(&n) {
        return Err(js("grid size must be between 2 and 21"));
    }
    let p = params(variant, psi, election_period)?;
    let axis = |max: f64| {
        (0..n)
            .map(|i| max * i as f64 / (n - 1) as f64)
            .collect::<Vec<_>>()
    };
    let (d_is, d_mu) = (axis(1.0), axis(2.0));
    let controls = SolverControls::default();
    let mut recs = Vec::with_capacity(n * n);
    for &a in &d_is {
        for &b in &d_mu {
            let spec = RunSpec::deterministic(&p, a, b);
            recs.push(run_one(recs.len(), &p, &spec, &controls));
        }
    }
    let out = Grid {
        robustness: recs.iter().filter(|r| r.persisted).count() as f64 / recs.len() as f64,
        class: recs.iter().map(|r| r.class.name().to_string()).collect(),
        persisted: recs.iter().map(|r| r.persisted).collect(),
        d_is,
        d_mu,
    };
    serde_json::to_string(&out).map_err(js)
}
