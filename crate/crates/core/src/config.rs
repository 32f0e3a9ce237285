//! Flat `key = value` run configuration with section prefixes.
//!
//! Model keys may be written bare (`delta = 0.1`) or prefixed
//! (`model.delta = 0.1`). Lists are comma separated or `lin(start, stop, n)`.
//! Unknown keys are errors.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::{
    standard_regimes, DeterministicGrid, MagnitudeDist, RunSpec, ShockRegime, StochasticPlan,
};
use crate::integrator::SolverControls;
use crate::model::{InitialIncumbent, ModelParams, OpportunityMode, PoliticalVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Simulate,
    SweepDet,
    SweepStoch,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::SweepDet => "sweep-det",
            ExperimentKind::SweepStoch => "sweep-stoch",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "simulate" => Some(ExperimentKind::Simulate),
            "sweep-det" => Some(ExperimentKind::SweepDet),
            "sweep-stoch" => Some(ExperimentKind::SweepStoch),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub kind: ExperimentKind,
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub out: String,
    pub horizon: f64,
    pub controls: SolverControls,
    /// Single-run settings.
    pub incumbent: InitialIncumbent,
    pub d_is: f64,
    pub d_mu: f64,
    pub labor_cap: Option<f64>,
    /// Deterministic grid axes.
    pub grid_d_is: Vec<f64>,
    pub grid_d_mu: Vec<f64>,
    pub grid_te: Vec<f64>,
    pub grid_sigma_r: Vec<f64>,
    pub grid_variants: Vec<PoliticalVariant>,
    pub grid_incumbents: Vec<InitialIncumbent>,
    /// Stochastic regimes as (T_s, a).
    pub regimes: Vec<(f64, f64)>,
    pub n_series: usize,
    pub magnitudes: MagnitudeDist,
}

fn lin(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        let params = ModelParams::default();
        RunConfig {
            kind: ExperimentKind::Simulate,
            seed: 0,
            workers: 0,
            out: "out".into(),
            horizon: 400.0,
            controls: SolverControls::default(),
            incumbent: InitialIncumbent::TaxFavoring,
            d_is: 0.0,
            d_mu: 0.0,
            labor_cap: None,
            grid_d_is: lin(0.0, 1.0, 21),
            grid_d_mu: lin(0.0, 2.0, 21),
            grid_te: vec![params.election_period],
            grid_sigma_r: vec![params.repulsion],
            grid_variants: vec![params.variant],
            grid_incumbents: vec![InitialIncumbent::TaxFavoring],
            regimes: standard_regimes(400.0)
                .iter()
                .map(|r| (r.mean_period, r.mean_magnitude))
                .collect(),
            n_series: 50,
            magnitudes: MagnitudeDist::TruncatedExponential,
            params,
        }
    }
}

const MODEL_KEYS: &[&str] = &[
    "n1",
    "n2",
    "phi1",
    "phi2",
    "mu_p1",
    "mu_p2",
    "theta1",
    "theta2",
    "y0_1",
    "y0_2",
    "R",
    "mu",
    "delta",
    "h",
    "w",
    "psi",
    "xi",
    "beta_l",
    "beta_s",
    "beta_tau1",
    "beta_tau2",
    "sigma_A",
    "sigma_R",
    "T_e",
    "omega",
    "f_s",
    "I_bar",
    "I_0",
    "theta_check1",
    "theta_check2",
    "variant",
    "savings_decay_factor",
    "opportunity_mode",
    "switch_width",
];

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn list<T, F: Fn(&T) -> String>(xs: &[T], f: F) -> String {
    xs.iter().map(f).collect::<Vec<_>>().join(", ")
}

fn bool_str(b: bool) -> String {
    if b { "1" } else { "0" }.into()
}

struct Line<'a> {
    no: usize,
    key: &'a str,
}

impl Line<'_> {
    fn err(&self, msg: impl std::fmt::Display) -> Error {
        Error::Config {
            line: self.no,
            message: format!("`{}`: {msg}", self.key),
        }
    }

    fn f64(&self, v: &str) -> Result<f64> {
        v.trim()
            .parse::<f64>()
            .map_err(|_| self.err(format!("expected a number, got `{}`", v.trim())))
    }

    fn usize(&self, v: &str) -> Result<usize> {
        v.trim()
            .parse::<usize>()
            .map_err(|_| self.err(format!("expected a count, got `{}`", v.trim())))
    }

    fn bool(&self, v: &str) -> Result<bool> {
        match v.trim() {
            "1" | "true" => Ok(true),
            "0" | "false" => Ok(false),
            o => Err(self.err(format!("expected 0/1 or true/false, got `{o}`"))),
        }
    }

    fn f64_list(&self, v: &str) -> Result<Vec<f64>> {
        let v = v.trim();
        if let Some(inner) = v.strip_prefix("lin(").and_then(|s| s.strip_suffix(')')) {
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() != 3 {
                return Err(self.err("lin takes (start, stop, n)"));
            }
            return Ok(lin(
                self.f64(parts[0])?,
                self.f64(parts[1])?,
                self.usize(parts[2])?,
            ));
        }
        self.items(v).map(|s| self.f64(s)).collect()
    }

    fn items<'v>(&self, v: &'v str) -> impl Iterator<Item = &'v str> {
        v.split(',').map(str::trim).filter(|s| !s.is_empty())
    }

    fn variant(&self, v: &str) -> Result<PoliticalVariant> {
        PoliticalVariant::from_name(v.trim())
            .ok_or_else(|| self.err(format!("unknown variant `{}`", v.trim())))
    }

    fn incumbent(&self, v: &str) -> Result<InitialIncumbent> {
        InitialIncumbent::from_name(v.trim())
            .ok_or_else(|| self.err(format!("expected TR or TF, got `{}`", v.trim())))
    }
}

impl RunConfig {
    /// Parse a configuration document; absent keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        let mut te_set = false;
        let mut sigma_set = false;
        let mut variants_set = false;
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Config {
                    line: i + 1,
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            let key = key.trim();
            let line = Line { no: i + 1, key };
            let canonical = match key.strip_prefix("model.") {
                Some(k) => k,
                None if MODEL_KEYS.contains(&key) => key,
                None => key,
            };
            if !seen.insert(canonical.to_string()) {
                return Err(line.err("set twice"));
            }
            match canonical {
                "sweep.Te" => te_set = true,
                "sweep.sigma_R" => sigma_set = true,
                "sweep.variants" => variants_set = true,
                _ => {}
            }
            c.set(&line, canonical, value)?;
        }
        if !te_set {
            c.grid_te = vec![c.params.election_period];
        }
        if !sigma_set {
            c.grid_sigma_r = vec![c.params.repulsion];
        }
        if !variants_set {
            c.grid_variants = vec![c.params.variant];
        }
        c.validate()?;
        Ok(c)
    }

    fn set(&mut self, line: &Line, key: &str, v: &str) -> Result<()> {
        let p = &mut self.params;
        match key {
            "n1" => p.groups[0].population = line.f64(v)?,
            "n2" => p.groups[1].population = line.f64(v)?,
            "phi1" => p.groups[0].earning_potential = line.f64(v)?,
            "phi2" => p.groups[1].earning_potential = line.f64(v)?,
            "mu_p1" => p.groups[0].private_effectiveness = line.f64(v)?,
            "mu_p2" => p.groups[1].private_effectiveness = line.f64(v)?,
            "theta1" => p.groups[0].bias = line.f64(v)?,
            "theta2" => p.groups[1].bias = line.f64(v)?,
            "y0_1" => p.groups[0].subsistence = line.f64(v)?,
            "y0_2" => p.groups[1].subsistence = line.f64(v)?,
            "R" => p.resource = line.f64(v)?,
            "mu" => p.shared_effectiveness = line.f64(v)?,
            "delta" => p.decay = line.f64(v)?,
            "h" => p.max_harvest = line.f64(v)?,
            "w" => p.outside_wage = line.f64(v)?,
            "psi" => p.taxes_private = line.bool(v)?,
            "xi" => p.habituation = line.f64(v)?,
            "beta_l" => p.labor_sensitivity = line.f64(v)?,
            "beta_s" => p.savings_sensitivity = line.f64(v)?,
            "beta_tau1" => p.cold_sensitivity = line.f64(v)?,
            "beta_tau2" => p.hot_sensitivity = line.f64(v)?,
            "sigma_A" => p.attraction = line.f64(v)?,
            "sigma_R" => p.repulsion = line.f64(v)?,
            "T_e" => p.election_period = line.f64(v)?,
            "omega" => p.pull_rate = line.f64(v)?,
            "f_s" => p.safety_factor = line.f64(v)?,
            "I_bar" => p.max_capacity = line.f64(v)?,
            "I_0" => p.min_capacity = line.f64(v)?,
            "theta_check1" => p.candidate_biases[0] = line.f64(v)?,
            "theta_check2" => p.candidate_biases[1] = line.f64(v)?,
            "variant" => p.variant = line.variant(v)?,
            "savings_decay_factor" => p.savings_decay_factor = line.bool(v)?,
            "opportunity_mode" => {
                p.opportunity_mode = OpportunityMode::from_name(v.trim())
                    .ok_or_else(|| line.err("expected additive or multiplicative"))?
            }
            "switch_width" => p.switch_width = line.f64(v)?,
            "run.kind" => {
                self.kind = ExperimentKind::from_name(v.trim())
                    .ok_or_else(|| line.err("expected simulate, sweep-det or sweep-stoch"))?
            }
            "run.seed" => {
                self.seed = v
                    .trim()
                    .parse()
                    .map_err(|_| line.err("expected an unsigned integer"))?
            }
            "run.workers" => self.workers = line.usize(v)?,
            "run.out" => self.out = v.trim().to_string(),
            "run.horizon" => self.horizon = line.f64(v)?,
            "run.incumbent" => self.incumbent = line.incumbent(v)?,
            "run.d_Is" => self.d_is = line.f64(v)?,
            "run.d_mu" => self.d_mu = line.f64(v)?,
            "run.labor_cap" => {
                self.labor_cap = match v.trim() {
                    "none" | "" => None,
                    s => Some(line.f64(s)?),
                }
            }
            "solver.rtol" => self.controls.rtol = line.f64(v)?,
            "solver.atol" => self.controls.atol = line.f64(v)?,
            "solver.dt_init" => self.controls.dt_init = line.f64(v)?,
            "solver.dt_max" => self.controls.dt_max = line.f64(v)?,
            "solver.output_dt" => self.controls.output_dt = line.f64(v)?,
            "sweep.d_Is" => self.grid_d_is = line.f64_list(v)?,
            "sweep.d_mu" => self.grid_d_mu = line.f64_list(v)?,
            "sweep.Te" => self.grid_te = line.f64_list(v)?,
            "sweep.sigma_R" => self.grid_sigma_r = line.f64_list(v)?,
            "sweep.variants" => {
                self.grid_variants = line
                    .items(v)
                    .map(|s| line.variant(s))
                    .collect::<Result<_>>()?
            }
            "sweep.incumbents" => {
                self.grid_incumbents = line
                    .items(v)
                    .map(|s| line.incumbent(s))
                    .collect::<Result<_>>()?
            }
            "stoch.regimes" => {
                self.regimes = line
                    .items(v)
                    .map(|s| {
                        let (t, a) = s
                            .split_once(':')
                            .ok_or_else(|| line.err("regimes are written T_s:a"))?;
                        Ok((line.f64(t)?, line.f64(a)?))
                    })
                    .collect::<Result<_>>()?
            }
            "stoch.n_series" => self.n_series = line.usize(v)?,
            "stoch.magnitudes" => {
                self.magnitudes = MagnitudeDist::from_name(v.trim())
                    .ok_or_else(|| line.err("expected truncated-exponential or fixed"))?
            }
            "alpha" => {
                return Err(line.err("alpha follows from the variant; set `variant` instead"))
            }
            _ => return Err(line.err("unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.controls.validate()?;
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::range("run.horizon", self.horizon, "> 0"));
        }
        if !(0.0..=1.0).contains(&self.d_is) {
            return Err(Error::range("run.d_Is", self.d_is, "0 <= d_Is <= 1"));
        }
        if let Some(c) = self.labor_cap {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::range("run.labor_cap", c, "0 <= cap <= 1"));
            }
        }
        for &d in &self.grid_d_is {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::range("sweep.d_Is", d, "0 <= d_Is <= 1"));
            }
        }
        for &t in &self.grid_te {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::range("sweep.Te", t, "> 0"));
            }
        }
        for &s in &self.grid_sigma_r {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::range("sweep.sigma_R", s, ">= 0"));
            }
        }
        for r in self.shock_regimes() {
            r.validate()?;
        }
        Ok(())
    }

    /// Every key with its resolved value, in render order.
    pub fn entries(&self) -> Vec<(String, String)> {
        let p = &self.params;
        let model: Vec<(&str, String)> = vec![
            ("n1", num(p.groups[0].population)),
            ("n2", num(p.groups[1].population)),
            ("phi1", num(p.groups[0].earning_potential)),
            ("phi2", num(p.groups[1].earning_potential)),
            ("mu_p1", num(p.groups[0].private_effectiveness)),
            ("mu_p2", num(p.groups[1].private_effectiveness)),
            ("theta1", num(p.groups[0].bias)),
            ("theta2", num(p.groups[1].bias)),
            ("y0_1", num(p.groups[0].subsistence)),
            ("y0_2", num(p.groups[1].subsistence)),
            ("R", num(p.resource)),
            ("mu", num(p.shared_effectiveness)),
            ("delta", num(p.decay)),
            ("h", num(p.max_harvest)),
            ("w", num(p.outside_wage)),
            ("psi", bool_str(p.taxes_private)),
            ("xi", num(p.habituation)),
            ("beta_l", num(p.labor_sensitivity)),
            ("beta_s", num(p.savings_sensitivity)),
            ("beta_tau1", num(p.cold_sensitivity)),
            ("beta_tau2", num(p.hot_sensitivity)),
            ("sigma_A", num(p.attraction)),
            ("sigma_R", num(p.repulsion)),
            ("T_e", num(p.election_period)),
            ("omega", num(p.pull_rate)),
            ("f_s", num(p.safety_factor)),
            ("I_bar", num(p.max_capacity)),
            ("I_0", num(p.min_capacity)),
            ("theta_check1", num(p.candidate_biases[0])),
            ("theta_check2", num(p.candidate_biases[1])),
            ("variant", p.variant.name().into()),
            ("savings_decay_factor", bool_str(p.savings_decay_factor)),
            ("opportunity_mode", p.opportunity_mode.name().into()),
            ("switch_width", num(p.switch_width)),
        ];
        let mut out: Vec<(String, String)> = model
            .into_iter()
            .map(|(k, v)| (format!("model.{k}"), v))
            .collect();
        let c = &self.controls;
        let rest: Vec<(&str, String)> = vec![
            ("run.kind", self.kind.name().into()),
            ("run.seed", self.seed.to_string()),
            ("run.workers", self.workers.to_string()),
            ("run.out", self.out.clone()),
            ("run.horizon", num(self.horizon)),
            ("run.incumbent", self.incumbent.name().into()),
            ("run.d_Is", num(self.d_is)),
            ("run.d_mu", num(self.d_mu)),
            ("run.labor_cap", self.labor_cap.map_or("none".into(), num)),
            ("solver.rtol", num(c.rtol)),
            ("solver.atol", num(c.atol)),
            ("solver.dt_init", num(c.dt_init)),
            ("solver.dt_max", num(c.dt_max)),
            ("solver.output_dt", num(c.output_dt)),
            ("sweep.d_Is", list(&self.grid_d_is, |v| num(*v))),
            ("sweep.d_mu", list(&self.grid_d_mu, |v| num(*v))),
            ("sweep.Te", list(&self.grid_te, |v| num(*v))),
            ("sweep.sigma_R", list(&self.grid_sigma_r, |v| num(*v))),
            (
                "sweep.variants",
                list(&self.grid_variants, |v| v.name().into()),
            ),
            (
                "sweep.incumbents",
                list(&self.grid_incumbents, |v| v.name().into()),
            ),
            (
                "stoch.regimes",
                list(&self.regimes, |(t, a)| format!("{}:{}", num(*t), num(*a))),
            ),
            ("stoch.n_series", self.n_series.to_string()),
            ("stoch.magnitudes", self.magnitudes.name().into()),
        ];
        out.extend(rest.into_iter().map(|(k, v)| (k.to_string(), v)));
        out
    }

    /// Full document with every value explicit.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            s.push_str(&k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        }
        s
    }

    /// SHA-256 over the rendered keys that can change results; the output
    /// directory and worker count are left out.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.entries() {
            if k == "run.out" || k == "run.workers" {
                continue;
            }
            h.update(format!("{k} = {v}\n").as_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn shock_regimes(&self) -> Vec<ShockRegime> {
        self.regimes
            .iter()
            .map(|&(t, a)| ShockRegime {
                magnitudes: self.magnitudes,
                ..ShockRegime::new(t, a, self.horizon)
            })
            .collect()
    }

    pub fn single_run(&self) -> RunSpec {
        RunSpec {
            incumbent: self.incumbent,
            horizon: self.horizon,
            seed: self.seed,
            labor_cap: self.labor_cap,
            ..RunSpec::deterministic(&self.params, self.d_is, self.d_mu)
        }
    }

    pub fn deterministic_grid(&self) -> DeterministicGrid {
        DeterministicGrid {
            d_is: self.grid_d_is.clone(),
            d_mu: self.grid_d_mu.clone(),
            election_periods: self.grid_te.clone(),
            repulsions: self.grid_sigma_r.clone(),
            variants: self.grid_variants.clone(),
            incumbents: self.grid_incumbents.clone(),
            horizon: self.horizon,
        }
    }

    pub fn stochastic_plan(&self) -> StochasticPlan {
        StochasticPlan {
            regimes: self.shock_regimes(),
            n_series: self.n_series,
            election_periods: self.grid_te.clone(),
            repulsions: self.grid_sigma_r.clone(),
            seed: self.seed,
            horizon: self.horizon,
        }
    }
}
