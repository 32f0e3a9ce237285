//! Coupled shared/private infrastructure model with tax politics, an
//! adaptive integrator with discrete events, and shock-robustness sweeps.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod integrator;
pub mod model;
pub mod output;
pub mod politics;
pub mod system;

pub use error::{Error, Result};
