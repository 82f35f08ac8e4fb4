//! The physics engine: twisted-packet amplitudes and the event counts and
//! cross sections built from them, for single potentials, Gaussian
//! mesoscopic ensembles, and macroscopic targets.

mod kinematics;
mod macroscopic;
mod mesoscopic;
mod single;
mod superposition;
mod table;

pub use kinematics::{q_squared, q_squared_axial};
pub use macroscopic::{
    dcs_macroscopic, dcs_macroscopic_closed, dcs_macroscopic_general, dcs_macroscopic_wide,
    total_macroscopic,
};
pub use mesoscopic::{events_large_target, events_mesoscopic, ratio_r};
pub use single::{
    amplitude_f_twisted, cross_section_single, cross_section_single_factorized, events_single,
    events_single_wide,
};
pub use superposition::{asymmetry_a, dcs_superposition};
pub use table::{AngularTable, Coord, TablePoint, ValueKind};

use crate::error::{domain, Error};
use std::f64::consts::{PI, TAU};

/// A single potential sitting at transverse offset `b` with azimuth
/// `phi_b` from the beam axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleTarget {
    b: f64,
    phi_b: f64,
}

impl SingleTarget {
    pub fn new(b: f64, phi_b: f64) -> Result<Self, Error> {
        if !b.is_finite() || b < 0.0 {
            return Err(domain(format!("impact parameter must be >= 0, got {b}")));
        }
        if !phi_b.is_finite() {
            return Err(domain("impact azimuth must be finite"));
        }
        Ok(SingleTarget { b, phi_b })
    }

    /// Potential on the beam axis.
    pub fn centered() -> Self {
        SingleTarget { b: 0.0, phi_b: 0.0 }
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn phi_b(&self) -> f64 {
        self.phi_b
    }
}

/// An incoherent ensemble of scatterers with Gaussian density of width
/// `sigma_b`, centered at transverse offset (`b0`, `phi_b0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MesoTarget {
    b0: f64,
    phi_b0: f64,
    sigma_b: f64,
}

impl MesoTarget {
    pub fn new(b0: f64, phi_b0: f64, sigma_b: f64) -> Result<Self, Error> {
        if !b0.is_finite() || b0 < 0.0 {
            return Err(domain(format!("target offset must be >= 0, got {b0}")));
        }
        if !phi_b0.is_finite() {
            return Err(domain("target azimuth must be finite"));
        }
        if !sigma_b.is_finite() || sigma_b <= 0.0 {
            return Err(domain(format!("target size must be > 0, got {sigma_b}")));
        }
        Ok(MesoTarget { b0, phi_b0, sigma_b })
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    pub fn phi_b0(&self) -> f64 {
        self.phi_b0
    }

    pub fn sigma_b(&self) -> f64 {
        self.sigma_b
    }
}

/// Target model selector, mirroring the three observable families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetSpec {
    SinglePotential(SingleTarget),
    MesoscopicGaussian(MesoTarget),
    Macroscopic,
}

/// Outgoing direction in beam-frame spherical angles.
///
/// `theta` must lie in [0, pi]; `phi` is wrapped into [0, 2 pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Result<Self, Error> {
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(domain(format!("theta must lie in [0, pi], got {theta}")));
        }
        if !phi.is_finite() {
            return Err(domain("phi must be finite"));
        }
        Ok(Direction {
            theta,
            phi: phi.rem_euclid(TAU),
        })
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Result<Self, Error> {
        Direction::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    /// Forward direction along the beam axis.
    pub fn forward() -> Self {
        Direction { theta: 0.0, phi: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_validation_and_wrapping() {
        assert!(Direction::new(-0.1, 0.0).is_err());
        assert!(Direction::new(PI + 0.1, 0.0).is_err());
        assert!(Direction::new(f64::NAN, 0.0).is_err());
        let d = Direction::new(1.0, -0.5).unwrap();
        assert!((d.phi() - (TAU - 0.5)).abs() < 1e-15);
        let d = Direction::from_degrees(90.0, 360.0).unwrap();
        assert!((d.theta() - PI / 2.0).abs() < 1e-15);
        assert!(d.phi().abs() < 1e-12);
    }

    #[test]
    fn target_validation() {
        assert!(SingleTarget::new(-1.0, 0.0).is_err());
        assert!(SingleTarget::new(1.0, f64::INFINITY).is_err());
        assert_eq!(SingleTarget::centered().b(), 0.0);
        assert!(MesoTarget::new(1.0, 0.0, 0.0).is_err());
        assert!(MesoTarget::new(-1.0, 0.0, 1.0).is_err());
        assert!(MesoTarget::new(0.0, 0.0, 1.0).is_ok());
    }
}
