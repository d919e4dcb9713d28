//! Logical qubit channels of square-lattice GKP codes under damping and
//! pure or heralded photon loss.
//!
//! The closed forms live in [`channel`] and are built on the Siegel Θ
//! evaluator in [`theta`]. [`fock`] recomputes the same quantities by brute
//! force in a truncated Fock basis and serves as the reference in tests.

pub mod channel;
pub mod error;
pub mod fock;
pub mod gkp;
pub mod loss;
pub mod quadrature;
pub mod theta;
pub mod validate;

pub use error::{Error, Result};
