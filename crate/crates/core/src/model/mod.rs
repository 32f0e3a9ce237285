//! Parameters, state vector and the income algebra shared by every module.

mod income;
mod params;
mod state;

pub use income::{
    compute_incomes, harvest_private, harvest_shared, private_on_ramp, private_ramp_weight,
    shared_on_ramp, shared_ramp_weight, Incomes,
};
pub use params::{
    Aggregation, Cognition, DerivedConstants, GroupParams, Influence, ModelParams, OpportunityMode,
    PoliticalVariant, ELITE, NON_ELITE,
};
pub use state::{Candidate, InitialIncumbent, SystemState, VECTOR_DIM, VECTOR_NAMES};
