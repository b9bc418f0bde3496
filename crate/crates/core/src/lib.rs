//! Simulation and asymptotic analysis of the MMSE-receiver SIR in networks
//! whose active transmitters are spatially correlated: hard-core (two
//! variants), hexagonal cellular uplink with frequency reuse, and a Boolean
//! cluster model.

pub mod asymptotics;
pub mod error;
pub mod mmse;
pub mod montecarlo;
pub mod pointproc;

pub use error::{Error, Result};
pub use mmse::SirSample;
pub use montecarlo::{run_experiment, ExperimentReport, ExperimentSpec, PointReport, StatSummary};
pub use pointproc::{ActivationModel, NetworkConfig, Point, Realization};
