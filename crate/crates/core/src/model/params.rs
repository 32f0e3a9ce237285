//! Model constants, political variant switchboard and derived quantities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of the elite group in every two-element group array.
pub const ELITE: usize = 0;
/// Index of the non-elite group.
pub const NON_ELITE: usize = 1;

/// Per-group constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupParams {
    /// Number of users in the group (n_g).
    pub population: f64,
    /// Earning potential per unit resource (φ_g).
    pub earning_potential: f64,
    /// Private infrastructure investment effectiveness (μ^p_g).
    pub private_effectiveness: f64,
    /// Ideological bias of the group under hot cognition, -1 or +1.
    pub bias: f64,
    /// Subsistence consumption floor per user (y⁰_g).
    pub subsistence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Aggregation {
    MedianVoter,
    EliteCapture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cognition {
    Cold,
    Hot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Influence {
    Equal,
    IncomeBased,
}

/// How tax policy is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PoliticalVariant {
    /// Tax frozen at its initial value.
    NoPolitics,
    /// Policy moves with an α-blend of the groups' preference rates.
    DirectAgg {
        influence: Aggregation,
        cognition: Cognition,
    },
    /// Two candidates compete; the elected incumbent's platform sets policy.
    PolComp { influence: Influence },
}

impl PoliticalVariant {
    pub const ALL: [PoliticalVariant; 7] = [
        PoliticalVariant::NoPolitics,
        PoliticalVariant::DirectAgg {
            influence: Aggregation::MedianVoter,
            cognition: Cognition::Cold,
        },
        PoliticalVariant::DirectAgg {
            influence: Aggregation::EliteCapture,
            cognition: Cognition::Cold,
        },
        PoliticalVariant::DirectAgg {
            influence: Aggregation::MedianVoter,
            cognition: Cognition::Hot,
        },
        PoliticalVariant::DirectAgg {
            influence: Aggregation::EliteCapture,
            cognition: Cognition::Hot,
        },
        PoliticalVariant::PolComp {
            influence: Influence::Equal,
        },
        PoliticalVariant::PolComp {
            influence: Influence::IncomeBased,
        },
    ];

    /// Elite influence weight α implied by the variant.
    pub fn alpha(&self) -> f64 {
        match self {
            PoliticalVariant::NoPolitics => 0.0,
            PoliticalVariant::DirectAgg { influence, .. } => match influence {
                Aggregation::MedianVoter => 0.0,
                Aggregation::EliteCapture => 1.0,
            },
            PoliticalVariant::PolComp { influence } => match influence {
                Influence::Equal => 0.0,
                Influence::IncomeBased => 1.0,
            },
        }
    }

    pub fn is_polcomp(&self) -> bool {
        matches!(self, PoliticalVariant::PolComp { .. })
    }

    /// Short stable name used in config files and CSV output.
    pub fn name(&self) -> &'static str {
        use Aggregation::*;
        use Cognition::*;
        match self {
            PoliticalVariant::NoPolitics => "nopolitics",
            PoliticalVariant::DirectAgg {
                influence: MedianVoter,
                cognition: Cold,
            } => "directagg-mv-cold",
            PoliticalVariant::DirectAgg {
                influence: EliteCapture,
                cognition: Cold,
            } => "directagg-ec-cold",
            PoliticalVariant::DirectAgg {
                influence: MedianVoter,
                cognition: Hot,
            } => "directagg-mv-hot",
            PoliticalVariant::DirectAgg {
                influence: EliteCapture,
                cognition: Hot,
            } => "directagg-ec-hot",
            PoliticalVariant::PolComp {
                influence: Influence::Equal,
            } => "polcomp-eq",
            PoliticalVariant::PolComp {
                influence: Influence::IncomeBased,
            } => "polcomp-inc",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }
}

impl std::fmt::Display for PoliticalVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How an opportunity shock Δ moves the elite private effectiveness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpportunityMode {
    /// μ^p₁ ← μ^p₁ + Δ·μ
    Additive,
    /// μ^p₁ ← Δ·μ
    Multiplicative,
}

impl OpportunityMode {
    pub fn name(&self) -> &'static str {
        match self {
            OpportunityMode::Additive => "additive",
            OpportunityMode::Multiplicative => "multiplicative",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "additive" => Some(OpportunityMode::Additive),
            "multiplicative" => Some(OpportunityMode::Multiplicative),
            _ => None,
        }
    }
}

/// Every constant of the model. `Default` gives the reference calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub groups: [GroupParams; 2],
    /// Static resource level (R).
    pub resource: f64,
    /// Shared infrastructure investment effectiveness (μ).
    pub shared_effectiveness: f64,
    /// Infrastructure decay rate (δ).
    pub decay: f64,
    /// Maximum shared harvesting rate (h).
    pub max_harvest: f64,
    /// Income without infrastructure (w).
    pub outside_wage: f64,
    /// Whether private infrastructure income is taxed (ψ = 1).
    pub taxes_private: bool,
    /// Habituation rate of expected consumption (ξ).
    pub habituation: f64,
    /// β^l
    pub labor_sensitivity: f64,
    /// β^s
    pub savings_sensitivity: f64,
    /// β^τ₁
    pub cold_sensitivity: f64,
    /// β^τ₂
    pub hot_sensitivity: f64,
    /// σ^A
    pub attraction: f64,
    /// σ^R
    pub repulsion: f64,
    /// Time between elections (T_e).
    pub election_period: f64,
    /// Incumbent-pull decay rate (ω).
    pub pull_rate: f64,
    /// Safety factor on the capacity tax bound (f_s).
    pub safety_factor: f64,
    /// Capacity at which harvest saturates (Ī).
    pub max_capacity: f64,
    /// Capacity below which harvest is zero (I₀).
    pub min_capacity: f64,
    /// Directional bias of each candidate, -1 (tax-repulsed) or +1.
    pub candidate_biases: [f64; 2],
    pub variant: PoliticalVariant,
    /// Keep the (1-δ) factors of the savings gradient.
    pub savings_decay_factor: bool,
    pub opportunity_mode: OpportunityMode,
    /// Width of the linear blend between the ramp and plateau branches of
    /// the savings and cold-tax rules, relative to the ramp span. Zero gives
    /// the sharp switch.
    pub switch_width: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        let wage = 0.1;
        ModelParams {
            groups: [
                GroupParams {
                    population: 200.0,
                    earning_potential: 30.0,
                    private_effectiveness: 0.0015,
                    bias: -1.0,
                    subsistence: wage,
                },
                GroupParams {
                    population: 800.0,
                    earning_potential: 7.5,
                    private_effectiveness: 0.0005,
                    bias: 1.0,
                    subsistence: wage,
                },
            ],
            resource: 100.0,
            shared_effectiveness: 0.001,
            decay: 0.1,
            max_harvest: 0.0025,
            outside_wage: wage,
            taxes_private: false,
            habituation: 0.1,
            labor_sensitivity: 0.15,
            savings_sensitivity: 0.015,
            cold_sensitivity: 0.06,
            hot_sensitivity: 0.06,
            attraction: 0.1,
            repulsion: 0.15,
            election_period: 4.0,
            pull_rate: 5.0,
            safety_factor: 0.2,
            max_capacity: 3.0,
            min_capacity: 0.3,
            candidate_biases: [-1.0, 1.0],
            variant: PoliticalVariant::NoPolitics,
            savings_decay_factor: true,
            opportunity_mode: OpportunityMode::Additive,
            switch_width: 1e-3,
        }
    }
}

/// Constants derived from [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    /// Maximum private harvesting rate h_p = h(1 - w̃).
    pub private_max_harvest: f64,
    /// w̃ = w / (φ̃ R h)
    pub normalized_wage: f64,
    /// Population-weighted mean earning potential φ̃.
    pub mean_earning_potential: f64,
    /// Tax that balances decay at full capacity and full participation.
    pub maintenance_tax: f64,
}

impl ModelParams {
    pub fn with_variant(mut self, variant: PoliticalVariant) -> Self {
        self.variant = variant;
        self
    }

    /// ψ as a number.
    pub fn psi(&self) -> f64 {
        if self.taxes_private {
            1.0
        } else {
            0.0
        }
    }

    pub fn alpha(&self) -> f64 {
        self.variant.alpha()
    }

    pub fn total_population(&self) -> f64 {
        self.groups.iter().map(|g| g.population).sum()
    }

    /// Population share ñ_g.
    pub fn population_share(&self, g: usize) -> f64 {
        self.groups[g].population / self.total_population()
    }

    pub fn mean_earning_potential(&self) -> f64 {
        let weighted: f64 = self
            .groups
            .iter()
            .map(|g| g.population * g.earning_potential)
            .sum();
        weighted / self.total_population()
    }

    pub fn normalized_wage(&self) -> f64 {
        self.outside_wage / (self.mean_earning_potential() * self.resource * self.max_harvest)
    }

    /// h_p; only meaningful for validated parameters (w̃ < 1).
    pub fn private_max_harvest(&self) -> f64 {
        self.max_harvest * (1.0 - self.normalized_wage())
    }

    /// Per-user income plateau φ_g R h, used to normalise errors.
    pub fn max_income(&self, g: usize) -> f64 {
        self.groups[g].earning_potential * self.resource * self.max_harvest
    }

    pub fn derived(&self) -> Result<DerivedConstants> {
        self.validate()?;
        Ok(DerivedConstants {
            private_max_harvest: self.private_max_harvest(),
            normalized_wage: self.normalized_wage(),
            mean_earning_potential: self.mean_earning_potential(),
            maintenance_tax: self.maintenance_tax([1.0, 1.0], [0.0, 0.0]),
        })
    }

    /// Tax at which shared investment offsets decay with the shared stock at
    /// full capacity, for the given labor shares and private stocks.
    pub fn maintenance_tax(&self, labor: [f64; 2], private: [f64; 2]) -> f64 {
        let decay = self.decay * self.max_capacity;
        if decay == 0.0 {
            return 0.0;
        }
        let h_p = self.private_max_harvest();
        let mut base = 0.0;
        for (g, gp) in self.groups.iter().enumerate() {
            let per_unit = gp.earning_potential * self.resource;
            let shared = labor[g] * per_unit * self.max_harvest;
            let hp = super::income::harvest_private_with(
                private[g],
                self.population_share(g),
                h_p,
                self,
            );
            let private = (1.0 - labor[g]) * (per_unit * hp + self.outside_wage);
            base += gp.population * (shared + self.psi() * private);
        }
        if base <= 0.0 {
            return f64::INFINITY;
        }
        decay / (self.shared_effectiveness * base)
    }

    /// Check every parameter invariant.
    pub fn validate(&self) -> Result<()> {
        fn positive(field: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::range(field, v, "> 0"))
            }
        }
        fn non_negative(field: &str, v: f64) -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::range(field, v, ">= 0"))
            }
        }
        fn unit_sign(field: &str, v: f64) -> Result<()> {
            if v == 1.0 || v == -1.0 {
                Ok(())
            } else {
                Err(Error::range(field, v, "a value in {-1, +1}"))
            }
        }

        for (g, gp) in self.groups.iter().enumerate() {
            let name = g + 1;
            positive(&format!("group{name}.n"), gp.population)?;
            positive(&format!("group{name}.phi"), gp.earning_potential)?;
            non_negative(&format!("group{name}.mu_p"), gp.private_effectiveness)?;
            unit_sign(&format!("group{name}.theta"), gp.bias)?;
            non_negative(&format!("group{name}.y0"), gp.subsistence)?;
        }
        positive("R", self.resource)?;
        non_negative("mu", self.shared_effectiveness)?;
        positive("delta", self.decay)?;
        non_negative("h", self.max_harvest)?;
        non_negative("w", self.outside_wage)?;
        non_negative("xi", self.habituation)?;
        non_negative("beta_l", self.labor_sensitivity)?;
        non_negative("beta_s", self.savings_sensitivity)?;
        non_negative("beta_tau1", self.cold_sensitivity)?;
        non_negative("beta_tau2", self.hot_sensitivity)?;
        non_negative("sigma_A", self.attraction)?;
        non_negative("sigma_R", self.repulsion)?;
        positive("T_e", self.election_period)?;
        non_negative("omega", self.pull_rate)?;
        non_negative("f_s", self.safety_factor)?;
        non_negative("I_0", self.min_capacity)?;
        if !(self.switch_width.is_finite() && (0.0..0.5).contains(&self.switch_width)) {
            return Err(Error::range(
                "switch_width",
                self.switch_width,
                "0 <= width < 0.5",
            ));
        }
        if !(self.max_capacity.is_finite() && self.max_capacity > self.min_capacity) {
            return Err(Error::range("I_bar", self.max_capacity, "I_bar > I_0"));
        }
        for (q, b) in self.candidate_biases.iter().enumerate() {
            unit_sign(&format!("candidate{}.theta", q + 1), *b)?;
        }
        positive("h", self.max_harvest)?;
        let w_tilde = self.normalized_wage();
        if !(w_tilde < 1.0) {
            return Err(Error::range(
                "w_tilde",
                w_tilde,
                "w / (phi_tilde R h) < 1 so that h_p > 0",
            ));
        }
        Ok(())
    }
}
