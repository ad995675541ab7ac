//! Majorization-optimal completions of finite vector sequences with
//! prescribed norms.
//!
//! Given an initial sequence `F0` in `C^d` (summarised by the ascending
//! spectrum `lambda` of its frame operator) and prescribed squared norms
//! `a`, [`solver::optimal_spectrum`] computes the spectrum of the completed
//! frame operator that is minimal for majorization among every completion
//! `(F0, G)` with `‖g_i‖² = a_i`. The same spectrum minimizes `tr f(S)` for
//! every strictly convex `f`. [`synthesis::complete`] builds concrete
//! vectors realizing it and [`oracle`] checks the result independently.

pub mod cli;
pub mod error;
pub mod majorization;
pub mod oracle;
pub mod potentials;
pub mod solver;
pub mod spectral;
pub mod synthesis;

pub use error::{Error, Result};
pub use majorization::RealVec;
pub use potentials::PotentialSpec;
pub use solver::{BlockSpectrum, FeasibleSpectrum, ProblemData};
pub use spectral::{ComplexMatrix, EigenSystem, VectorSequence};
pub use synthesis::Completion;

/// Default comparison tolerance for order predicates.
pub const DEFAULT_TOL: f64 = 1e-9;
