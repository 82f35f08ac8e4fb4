//! Cross sections averaged over target positions, the macroscopic limit.
//!
//! Averaging wipes out the impact-parameter phase, leaving an incoherent
//! mix over the transverse momenta of the packet. Three evaluation paths
//! are provided: a closed form exact in the wide-packet limit, the same
//! wide-limit average done by quadrature (used to cross-check the closed
//! form), and the general double integral that also resolves a broad
//! momentum weight.

use crate::beams::BeamSpec;
use crate::error::Error;
use crate::potentials::PotentialSpec;
use crate::quadrature::{integrate_halfline, integrate_periodic, integrate_sphere, QuadratureBudget};
use crate::scattering::kinematics::q_squared_axial;
use crate::scattering::Direction;
use crate::Eval;
use num_complex::Complex64;
use std::cell::Cell;

/// Relative width of the momentum weight below which the closed form is
/// used by the dispatching entry point.
const WIDE_DISPATCH_RATIO: f64 = 0.1;

/// The azimuthal average of the squared hydrogen amplitude over the
/// scattering cone, as a function of the denominator parameters. Kept
/// separate so tests can probe it directly against derivatives of the
/// generating integral.
pub(crate) fn hydrogen_bracket(u: f64, v: f64) -> f64 {
    let s = u * u - v * v;
    let s3 = s.powf(-1.5);
    let s5 = s.powf(-2.5);
    let s7 = s.powf(-3.5);
    (u - 1.0) * s3 + (3.0 * u * u - 1.5 * u) * s5 + 2.5 * u * u * u * s7
}

fn closed_value(beam: &BeamSpec, pot: &PotentialSpec, theta: f64) -> f64 {
    let pf = beam.p_f();
    let (sin_t, cos_t) = theta.sin_cos();
    match *pot {
        PotentialSpec::Yukawa { v0, mu } => {
            let u = q_squared_axial(beam, theta) + beam.kappa0() * beam.kappa0() + mu * mu;
            let v = 2.0 * beam.kappa0() * pf * sin_t;
            let s = u * u - v * v;
            4.0 * v0 * v0 * u / (s * s.sqrt()) / beam.cos_theta_k()
        }
        PotentialSpec::Hydrogen1s { a0 } => {
            let scale = 0.5 * a0 * a0 * pf * pf;
            let u = 1.0 + scale * (1.0 - cos_t * beam.cos_theta_k());
            let v = scale * sin_t * beam.sin_theta_k();
            0.25 * a0 * a0 * hydrogen_bracket(u, v) / beam.cos_theta_k()
        }
    }
}

/// Closed-form macroscopic cross section, exact in the wide-packet limit.
pub fn dcs_macroscopic_closed(
    beam: &BeamSpec,
    pot: &PotentialSpec,
    dir: Direction,
) -> Result<Eval, Error> {
    pot.validate()?;
    Ok(Eval {
        value: closed_value(beam, pot, dir.theta()),
        nodes_used: 0,
        converged: true,
    })
}

/// Wide-packet macroscopic cross section by azimuthal quadrature at
/// k_perp = kappa0. Exists to validate the closed form; the closed path
/// is cheaper and exact.
pub fn dcs_macroscopic_wide(
    beam: &BeamSpec,
    pot: &PotentialSpec,
    dir: Direction,
    budget: &QuadratureBudget,
) -> Result<Eval, Error> {
    budget.validate()?;
    pot.validate()?;
    let q2_0 = q_squared_axial(beam, dir.theta()) + beam.kappa0() * beam.kappa0();
    let qv = 2.0 * beam.p_f() * beam.kappa0() * dir.theta().sin();
    let r = integrate_periodic(
        |psi| {
            let f = pot.born_amplitude_unchecked(q2_0 - qv * psi.cos());
            Complex64::new(f * f, 0.0)
        },
        0,
        budget,
    )?;
    Ok(Eval {
        value: r.value.re / beam.cos_theta_k(),
        nodes_used: r.nodes_used,
        converged: r.converged,
    })
}

/// Macroscopic cross section with the momentum weight resolved: an
/// incoherent average of the azimuthal mean over the radial profile of
/// the packet.
pub fn dcs_macroscopic_general(
    beam: &BeamSpec,
    pot: &PotentialSpec,
    dir: Direction,
    budget: &QuadratureBudget,
) -> Result<Eval, Error> {
    budget.validate()?;
    pot.validate()?;
    let q2_axial = q_squared_axial(beam, dir.theta());
    let two_pf_sin = 2.0 * beam.p_f() * dir.theta().sin();
    let inner_nodes = Cell::new(0u64);
    let inner_converged = Cell::new(true);
    let outer = integrate_halfline(
        |k| {
            let q2_k = q2_axial + k * k;
            let qv = two_pf_sin * k;
            let mean = integrate_periodic(
                |psi| {
                    let f = pot.born_amplitude_unchecked(q2_k - qv * psi.cos());
                    Complex64::new(f * f, 0.0)
                },
                0,
                budget,
            )
            .expect("budget already validated");
            inner_nodes.set(inner_nodes.get() + mean.nodes_used);
            if !mean.converged {
                inner_converged.set(false);
            }
            let g = beam.weight_unchecked(k);
            Complex64::new(g * g * mean.value.re, 0.0)
        },
        beam.kappa0(),
        beam.sigma_kappa(),
        budget,
    )?;
    Ok(Eval {
        value: outer.value.re / beam.cos_theta_k(),
        nodes_used: outer.nodes_used + inner_nodes.get(),
        converged: outer.converged && inner_converged.get(),
    })
}

/// Macroscopic cross section with automatic path selection: the closed
/// form when the momentum weight is narrow, the general double integral
/// otherwise.
pub fn dcs_macroscopic(
    beam: &BeamSpec,
    pot: &PotentialSpec,
    dir: Direction,
    budget: &QuadratureBudget,
) -> Result<Eval, Error> {
    if beam.sigma_kappa() <= WIDE_DISPATCH_RATIO * beam.kappa0() {
        dcs_macroscopic_closed(beam, pot, dir)
    } else {
        dcs_macroscopic_general(beam, pot, dir, budget)
    }
}

/// Solid-angle integral of the closed-form macroscopic cross section.
/// Equals the plane-wave total at the final momentum divided by
/// cos theta_k.
pub fn total_macroscopic(
    beam: &BeamSpec,
    pot: &PotentialSpec,
    budget: &QuadratureBudget,
) -> Result<Eval, Error> {
    budget.validate()?;
    pot.validate()?;
    let r = integrate_sphere(|theta, _phi| closed_value(beam, pot, theta), budget)?;
    Ok(Eval {
        value: r.value.re,
        nodes_used: r.nodes_used,
        converged: r.converged,
    })
}
