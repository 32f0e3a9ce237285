use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of individual shock magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MagnitudeDist {
    /// Exponential with mean `a`, conditioned on (0, 1].
    TruncatedExponential,
    /// Every shock removes exactly the fraction `a`.
    Fixed,
}

impl MagnitudeDist {
    pub fn name(&self) -> &'static str {
        match self {
            MagnitudeDist::TruncatedExponential => "truncated-exponential",
            MagnitudeDist::Fixed => "fixed",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "truncated-exponential" => Some(MagnitudeDist::TruncatedExponential),
            "fixed" => Some(MagnitudeDist::Fixed),
            _ => None,
        }
    }
}

/// Poisson shock process to shared capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockRegime {
    /// Mean time between shocks (T_s).
    pub mean_period: f64,
    /// Mean magnitude as a fraction of capacity (a).
    pub mean_magnitude: f64,
    pub horizon: f64,
    pub magnitudes: MagnitudeDist,
}

impl ShockRegime {
    pub fn new(mean_period: f64, mean_magnitude: f64, horizon: f64) -> Self {
        ShockRegime {
            mean_period,
            mean_magnitude,
            horizon,
            magnitudes: MagnitudeDist::TruncatedExponential,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_period.is_finite() && self.mean_period > 0.0) {
            return Err(Error::range("T_s", self.mean_period, "> 0"));
        }
        if !(self.mean_magnitude > 0.0 && self.mean_magnitude <= 1.0) {
            return Err(Error::range("a", self.mean_magnitude, "0 < a <= 1"));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::range("horizon", self.horizon, "> 0"));
        }
        Ok(())
    }
}

/// The three regimes of the stochastic analysis, keyed by (T_s, a).
pub fn standard_regimes(horizon: f64) -> Vec<ShockRegime> {
    [(8.0, 0.1), (50.0, 0.25), (150.0, 0.5)]
        .into_iter()
        .map(|(t, a)| ShockRegime::new(t, a, horizon))
        .collect()
}

/// Seed of series `series` in regime `regime`, derived from a base seed.
pub fn series_seed(base: u64, regime: usize, series: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(((regime as u64) << 32) | series as u64);
    rng.next_u64()
}

/// Shock times and magnitudes over the regime horizon.
pub fn sample_shock_series<R: Rng>(regime: &ShockRegime, rng: &mut R) -> Result<Vec<(f64, f64)>> {
    regime.validate()?;
    let arrivals = Exp::new(1.0 / regime.mean_period)
        .map_err(|e| Error::Parse(format!("inter-arrival distribution: {e}")))?;
    let sizes = Exp::new(1.0 / regime.mean_magnitude)
        .map_err(|e| Error::Parse(format!("magnitude distribution: {e}")))?;
    let mut out = Vec::new();
    let mut t = 0.0;
    loop {
        t += arrivals.sample(rng);
        if t > regime.horizon {
            break;
        }
        let m = match regime.magnitudes {
            MagnitudeDist::Fixed => regime.mean_magnitude,
            MagnitudeDist::TruncatedExponential => loop {
                let m: f64 = sizes.sample(rng);
                if m > 0.0 && m <= 1.0 {
                    break m;
                }
            },
        };
        out.push((t, m));
    }
    Ok(out)
}
