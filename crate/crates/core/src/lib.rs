//! Exact evolution, simulation and Hamilton–Jacobi scaling limits of
//! cooperative-motion random walks on the integer lattice.

pub mod dist;
pub mod error;
pub mod evolution;
pub mod harness;
pub mod hj;
pub mod montecarlo;

pub use dist::{sup_distance, CdfSeq, LatticeDist, ModelParams, Site};
pub use error::{Error, Result};
pub use evolution::StepLaw;
pub use harness::{Experiment, RunReport};
