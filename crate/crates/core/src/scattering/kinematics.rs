//! Momentum-transfer kinematics.
//!
//! Elastic scattering with the outgoing momentum magnitude fixed by the
//! beam: p_f = sqrt(p_i^2 + kappa0^2) for every plane-wave component. The
//! incoming component has longitudinal momentum p_i and transverse momentum
//! k_perp at azimuth phi_k.

use crate::beams::BeamSpec;
use crate::scattering::Direction;

/// Squared momentum transfer between the plane-wave component
/// (k_perp, phi_k, p_i) and the outgoing direction.
pub fn q_squared(beam: &BeamSpec, dir: Direction, k_perp: f64, phi_k: f64) -> f64 {
    debug_assert!(k_perp >= 0.0);
    q_squared_axial(beam, dir.theta()) + k_perp * k_perp
        - 2.0 * beam.p_f() * k_perp * dir.theta().sin() * (phi_k - dir.phi()).cos()
}

/// The azimuth- and k_perp-independent part of the momentum transfer:
/// p_f^2 + p_i^2 - 2 p_f p_i cos(theta).
pub fn q_squared_axial(beam: &BeamSpec, theta: f64) -> f64 {
    let p_f = beam.p_f();
    let p_i = beam.p_i();
    p_f * p_f + p_i * p_i - 2.0 * p_f * p_i * theta.cos()
}
