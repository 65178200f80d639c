//! Coherent spin state squeezing and the close Hadamard oracle-decision problem.
//!
//! The crate is organized bottom-up:
//!
//! - [`spin_core`]: spin systems, Dicke-basis operators, coherent states.
//! - [`squeezing`]: two-axis counter-twisting and the optimal squeezing parameter.
//! - [`qfunction`]: spherical Q-function grids.
//! - [`codewords`]: Hadamard and Fourier codewords, error syndromes, instance sampling.
//! - [`oracle_circuit`]: the transform–oracle–transform pipeline and decision rules.
//! - [`classical`]: bit-query baselines and the exhaustive decision-tree bound.

pub mod classical;
pub mod codewords;
pub mod error;
pub mod format;
pub mod linalg;
pub mod minimize;
pub mod oracle_circuit;
pub mod qfunction;
pub mod spin_core;
pub mod squeezing;
pub mod transforms;

pub use error::{Error, Result};
