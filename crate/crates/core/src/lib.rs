//! Spatial negative-feedback gene regulatory network: steady states, linear stability,
//! Hopf bifurcation coefficients and direct simulation.

pub mod error;
pub mod export;
pub mod greens;
pub mod hopf;
pub mod grid;
pub mod kinetics;
pub mod params;
pub mod quadrature;
pub mod simulator;
pub mod spectral;
pub mod steady;

pub use error::{Error, Result};
pub use params::{DiffusionRange, ModelParams};
