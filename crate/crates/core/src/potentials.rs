//! Target potentials and their plane-wave Born amplitudes.
//!
//! Two models: a screened Coulomb (Yukawa) well -V0 e^{-mu r}/(mu r) and the
//! electrostatic potential of a hydrogen atom in its 1s state. Amplitudes
//! are first Born order and therefore real; all units are Hartree atomic
//! units with the electron mass equal to one.

use crate::error::{domain, Error};
use crate::quadrature::{integrate_sphere, QuadratureBudget};
use crate::Eval;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialSpec {
    /// Screened Coulomb well, attractive for v0 > 0.
    Yukawa { v0: f64, mu: f64 },
    /// Static potential of atomic hydrogen in the ground state.
    Hydrogen1s { a0: f64 },
}

impl PotentialSpec {
    pub fn yukawa(v0: f64, mu: f64) -> Result<Self, Error> {
        let pot = PotentialSpec::Yukawa { v0, mu };
        pot.validate()?;
        Ok(pot)
    }

    pub fn hydrogen(a0: f64) -> Result<Self, Error> {
        let pot = PotentialSpec::Hydrogen1s { a0 };
        pot.validate()?;
        Ok(pot)
    }

    pub fn validate(&self) -> Result<(), Error> {
        match *self {
            PotentialSpec::Yukawa { v0, mu } => {
                if !v0.is_finite() {
                    return Err(domain("Yukawa strength must be finite"));
                }
                if !mu.is_finite() || mu <= 0.0 {
                    return Err(domain(format!("Yukawa screening mu must be > 0, got {mu}")));
                }
            }
            PotentialSpec::Hydrogen1s { a0 } => {
                if !a0.is_finite() || a0 <= 0.0 {
                    return Err(domain(format!("Bohr radius must be > 0, got {a0}")));
                }
            }
        }
        Ok(())
    }

    /// Typical radius of action: the screening length for Yukawa, half the
    /// Bohr radius for hydrogen.
    pub fn typical_radius(&self) -> f64 {
        match *self {
            PotentialSpec::Yukawa { mu, .. } => 1.0 / mu,
            PotentialSpec::Hydrogen1s { a0 } => 0.5 * a0,
        }
    }

    /// Plane-wave Born amplitude as a function of the squared momentum
    /// transfer. Real, finite, strictly decreasing in q^2.
    pub fn born_amplitude(&self, q2: f64) -> Result<f64, Error> {
        if !q2.is_finite() || q2 < 0.0 {
            return Err(domain(format!("q^2 must be >= 0, got {q2}")));
        }
        Ok(self.born_amplitude_unchecked(q2))
    }

    pub(crate) fn born_amplitude_unchecked(&self, q2: f64) -> f64 {
        match *self {
            PotentialSpec::Yukawa { v0, mu } => -2.0 * v0 / (q2 + mu * mu),
            PotentialSpec::Hydrogen1s { a0 } => {
                let w = 1.0 + 0.25 * q2 * a0 * a0;
                0.5 * a0 * (1.0 / w + 1.0 / (w * w))
            }
        }
    }

    /// Plane-wave differential cross section at momentum `p` and polar
    /// angle `theta`, elastic kinematics q = 2 p sin(theta/2).
    pub fn plane_wave_dcs(&self, p: f64, theta: f64) -> Result<f64, Error> {
        if !p.is_finite() || p <= 0.0 {
            return Err(domain(format!("momentum must be > 0, got {p}")));
        }
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(domain(format!("theta must lie in [0, pi], got {theta}")));
        }
        let q = 2.0 * p * (0.5 * theta).sin();
        let f = self.born_amplitude_unchecked(q * q);
        Ok(f * f)
    }

    /// Plane-wave total cross section by spherical quadrature.
    pub fn plane_wave_total(&self, p: f64, budget: &QuadratureBudget) -> Result<Eval, Error> {
        if !p.is_finite() || p <= 0.0 {
            return Err(domain(format!("momentum must be > 0, got {p}")));
        }
        self.validate()?;
        let r = integrate_sphere(
            |theta, _| {
                let q = 2.0 * p * (0.5 * theta).sin();
                let f = self.born_amplitude_unchecked(q * q);
                f * f
            },
            budget,
        )?;
        Ok(Eval {
            value: r.value.re,
            nodes_used: r.nodes_used,
            converged: r.converged,
        })
    }

    /// Analytic total cross section where one exists (Yukawa only); serves
    /// as a cross-check channel for the quadrature path.
    pub fn plane_wave_total_analytic(&self, p: f64) -> Option<f64> {
        match *self {
            PotentialSpec::Yukawa { v0, mu } => {
                Some(16.0 * PI * v0 * v0 / (mu * mu * (mu * mu + 4.0 * p * p)))
            }
            PotentialSpec::Hydrogen1s { .. } => None,
        }
    }
}
