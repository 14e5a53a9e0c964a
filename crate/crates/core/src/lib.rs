//! Decoherence of an accelerated qubit-qutrit state.
//!
//! Alice holds a qubit and an accelerated observer, Rob, holds a qutrit. The
//! shared state depends on Rob's acceleration parameter `r`. This crate
//! evolves that state through Kraus noise channels under multilocal and
//! global couplings, measures entanglement by the negativity of the partial
//! transpose over the qubit, and locates entanglement sudden death.
//!
//! Module map:
//! - [`linalg`]: dense complex matrices and a Jacobi Hermitian eigensolver
//! - [`state`]: the accelerated state and density-matrix validation
//! - [`channels`]: Kraus sets, lifting, multilocal and global evolution
//! - [`entanglement`]: partial transpose and negativity
//! - [`analytic`]: closed forms and their numeric verification
//! - [`sweep`]: parameter sweeps, thresholds, CSV and plot data
//! - [`cli`]: the `rindler-noise` command-line front end

pub mod analytic;
pub mod channels;
pub mod cli;
pub mod entanglement;
pub mod error;
pub mod format;
pub mod linalg;
pub mod state;
pub mod sweep;

pub use error::{Error, Result};
