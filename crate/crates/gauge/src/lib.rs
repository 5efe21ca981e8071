//! Finite-N Monte Carlo for SU(N) and SO(N) lattice gauge theory on a box, used to check
//! the loop equations and large-N statements of the string expansion.

pub mod chain;
pub mod config;
pub mod error;
pub mod field;
pub mod group;
pub mod metropolis;
pub mod observables;
pub mod region;
pub mod stats;

pub use config::{Provenance, RunConfig, Start};
pub use error::GaugeError;
pub use field::GaugeField;
pub use group::{haar_sample, Group, Mat, Rotation, C64};
pub use metropolis::Metropolis;
pub use observables::{correspondence, estimate_phi, factorization_point, master_residual_mc};
pub use region::{Boundary, Region};
pub use stats::{batch_means, pool, Estimate};
