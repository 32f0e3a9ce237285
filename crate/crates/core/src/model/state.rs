use serde::{Deserialize, Serialize};

use super::params::{ModelParams, ELITE};

/// One of the two electoral candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Candidate {
    First,
    Second,
}

impl Candidate {
    pub fn index(self) -> usize {
        match self {
            Candidate::First => 0,
            Candidate::Second => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Candidate::First
        } else {
            Candidate::Second
        }
    }

    pub fn other(self) -> Self {
        match self {
            Candidate::First => Candidate::Second,
            Candidate::Second => Candidate::First,
        }
    }

    /// One-based label used in output files.
    pub fn label(self) -> usize {
        self.index() + 1
    }
}

/// Which candidate holds office at t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InitialIncumbent {
    /// The candidate with negative directional bias.
    TaxRepulsed,
    /// The candidate with positive directional bias.
    TaxFavoring,
}

impl InitialIncumbent {
    pub fn candidate(self, p: &ModelParams) -> Candidate {
        let want = match self {
            InitialIncumbent::TaxRepulsed => -1.0,
            InitialIncumbent::TaxFavoring => 1.0,
        };
        if p.candidate_biases[0] == want {
            Candidate::First
        } else {
            Candidate::Second
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InitialIncumbent::TaxRepulsed => "TR",
            InitialIncumbent::TaxFavoring => "TF",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "TR" | "tr" => Some(InitialIncumbent::TaxRepulsed),
            "TF" | "tf" => Some(InitialIncumbent::TaxFavoring),
            _ => None,
        }
    }
}

/// Full model state: continuous stocks and preferences plus the incumbent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    /// Shared capacity I^s.
    pub shared: f64,
    /// Private capacity I^p_g.
    pub private: [f64; 2],
    /// Labor share in the shared system l_g.
    pub labor: [f64; 2],
    /// Savings rate s_g.
    pub savings: [f64; 2],
    /// Tax rate τ.
    pub tax: f64,
    /// Tax preference τ̂_g.
    pub preference: [f64; 2],
    /// Expected consumption π̂_g.
    pub expected: [f64; 2],
    /// Candidate platforms τ̌_q.
    pub platform: [f64; 2],
    pub incumbent: Candidate,
}

/// Length of [`SystemState::to_vector`].
pub const VECTOR_DIM: usize = 14;

impl SystemState {
    /// Standard start: shared system at full capacity, nearly full
    /// participation, elites with half their private capacity and some
    /// saving, every tax variable at `tax`.
    pub fn initial(p: &ModelParams, tax: f64, incumbent: Candidate) -> Self {
        SystemState {
            shared: p.max_capacity,
            private: [0.5 * p.population_share(ELITE) * p.max_capacity, 0.0],
            labor: [0.9, 0.9],
            savings: [0.05, 0.0],
            tax,
            preference: [tax, tax],
            expected: [0.0, 0.0],
            platform: [tax, tax],
            incumbent,
        }
    }

    pub fn to_vector(&self) -> [f64; VECTOR_DIM] {
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

    pub fn from_vector(v: &[f64; VECTOR_DIM], incumbent: Candidate) -> Self {
        SystemState {
            shared: v[0],
            private: [v[1], v[2]],
            labor: [v[3], v[4]],
            savings: [v[5], v[6]],
            tax: v[7],
            preference: [v[8], v[9]],
            expected: [v[10], v[11]],
            platform: [v[12], v[13]],
            incumbent,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|x| x.is_finite())
    }

    /// Swap the labels of the two groups.
    pub fn swap_groups(&self) -> Self {
        let mut s = *self;
        s.private.swap(0, 1);
        s.labor.swap(0, 1);
        s.savings.swap(0, 1);
        s.preference.swap(0, 1);
        s.expected.swap(0, 1);
        s
    }
}

/// Column names of the continuous state vector, used for series output.
pub const VECTOR_NAMES: [&str; VECTOR_DIM] = [
    "Is",
    "Ip1",
    "Ip2",
    "l1",
    "l2",
    "s1",
    "s2",
    "tau",
    "tau_hat1",
    "tau_hat2",
    "pi_hat1",
    "pi_hat2",
    "tau_check1",
    "tau_check2",
];
