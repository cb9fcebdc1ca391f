//! Simulator of single-photon-level stimulated emission in one-dimensional
//! atoms: two-level Bloch dynamics with incoherent pump and pure dephasing,
//! the radiated power channels and emission ratios, and the three-level
//! exciton/biexciton cascade whose ancillary transition monitors the
//! stimulation.

pub mod bloch;
pub mod cascade;
pub mod channels;
pub mod config;
pub mod experiments;
pub mod model;
pub mod output;

pub use bloch::{BlochState, BlochTrajectory};
pub use cascade::{DensityMatrix3, LiouvillianMatrix, ThreeLevelObservables};
pub use channels::{EmissionRatios, PowerChannels};
pub use model::{PowerGrid, ThreeLevelParams, TimeGrid, TwoLevelParams};
