//! Elastic Born scattering of twisted electron wave-packets.
//!
//! The crate computes angular distributions, event counts, and averaged
//! cross sections for electron packets carrying orbital angular momentum
//! scattering off screened-Coulomb and hydrogen-1s targets. Targets come in
//! three flavors: a single potential at a fixed impact parameter, a
//! Gaussian-distributed mesoscopic ensemble, and an infinitely wide
//! macroscopic ensemble.
//!
//! Everything is deterministic: quadrature budgets are explicit, results
//! carry node counts and convergence flags, and identical inputs produce
//! identical bits.
//!
//! Internal units are Hartree atomic units throughout; [`units`] converts
//! from laboratory units at the boundary.

pub mod beams;
pub mod error;
pub mod potentials;
pub mod quadrature;
pub mod scattering;
pub mod special;
pub mod units;

pub use error::Error;

use num_complex::Complex64;

/// A real observable plus the quadrature diagnostics behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eval {
    pub value: f64,
    /// Total integrand evaluations across all nested quadratures.
    pub nodes_used: u64,
    /// False when any underlying quadrature hit its node cap before its
    /// refinements agreed; the value is still the best one found.
    pub converged: bool,
}

/// A complex amplitude plus the same diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalComplex {
    pub value: Complex64,
    pub nodes_used: u64,
    pub converged: bool,
}
