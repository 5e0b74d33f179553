//! Single-probe versus ancilla-assisted optical phase estimation under
//! amplitude-damping noise.
//!
//! The crate is layered bottom-up:
//! - [`linalg`]: dense complex matrices and a Jacobi Hermitian eigensolver
//! - [`qstate`]: states, gates, Kraus channels and POVMs for the polarisation
//!   probe and the path ancilla
//! - [`estimation`]: quantum and classical Fisher information, Cramér-Rao bounds
//! - [`strategies`]: the two estimation schemes as circuits and as closed forms
//! - [`montecarlo`]: seeded counting experiments, estimators and sweeps
//! - [`cli`] and [`table`]: the `qmetro` command-line front end

pub mod cli;
pub mod error;
pub mod estimation;
pub mod linalg;
pub mod montecarlo;
pub mod qstate;
pub mod strategies;
pub mod table;

pub use error::{Error, Result};
