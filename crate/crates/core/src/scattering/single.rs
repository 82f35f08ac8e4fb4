//! Scattering on one potential at a fixed impact parameter: the twisted
//! amplitude and the event counts and cross sections built from it.
//!
//! The amplitude is a half-line integral over the transverse momentum of
//! the packet; at each transverse momentum the azimuthal structure is an
//! instance of the kernel in [`crate::special`], with the impact parameter
//! entering through the phase argument kb = k_perp * b and
//! chi = phi - phi_b.

use crate::beams::BeamSpec;
use crate::error::Error;
use crate::potentials::PotentialSpec;
use crate::quadrature::{integrate_halfline, integrate_periodic, QuadratureBudget, QuadratureResult};
use crate::scattering::kinematics::q_squared_axial;
use crate::scattering::{Direction, SingleTarget};
use crate::special::{bessel_j, kernel_im, kernel_im_closed, KernelArgs};
use crate::{Eval, EvalComplex};
use num_complex::Complex64;
use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, TAU};

/// Azimuthal transform of the plane-wave amplitude at fixed transverse
/// momentum, including the impact-parameter phase. This is the quantity
/// whose squared modulus at k_perp = kappa0 gives the wide-packet event
/// rate directly.
#[allow(clippy::too_many_arguments)]
fn potential_kernel(
    pot: &PotentialSpec,
    m: i32,
    q2_axial: f64,
    pf_sin_theta: f64,
    k_perp: f64,
    kb: f64,
    chi: f64,
    budget: &QuadratureBudget,
) -> Result<QuadratureResult, Error> {
    match *pot {
        PotentialSpec::Yukawa { v0, mu } => {
            let alpha = q2_axial + k_perp * k_perp + mu * mu;
            let beta = 2.0 * pf_sin_theta * k_perp;
            let args = KernelArgs::new(1, m, alpha, beta, kb, chi)?;
            let r = kernel_im(&args, budget)?;
            Ok(QuadratureResult {
                value: -2.0 * v0 * r.value,
                ..r
            })
        }
        PotentialSpec::Hydrogen1s { a0 } => {
            let alpha = 1.0 + 0.25 * a0 * a0 * (q2_axial + k_perp * k_perp);
            let beta = 0.5 * a0 * a0 * pf_sin_theta * k_perp;
            let args = KernelArgs::new(1, m, alpha, beta, kb, chi)?;
            let args2 = KernelArgs { power: 2, ..args };
            if let (Some(k1), Some(k2)) = (kernel_im_closed(&args), kernel_im_closed(&args2)) {
                return Ok(QuadratureResult {
                    value: 0.5 * a0 * (k1 + k2),
                    est_error: 0.0,
                    nodes_used: 0,
                    converged: true,
                });
            }
            // One pass for both denominator powers; same integrand family as
            // the kernel, just with the two powers summed.
            let hint = m.unsigned_abs() + kb.ceil() as u32;
            let mf = m as f64;
            let r = integrate_periodic(
                move |psi| {
                    let w = alpha - beta * psi.cos();
                    let phase = Complex64::from_polar(1.0, mf * psi + kb * (psi + chi).cos());
                    phase * (1.0 / w + 1.0 / (w * w))
                },
                hint,
                budget,
            )?;
            Ok(QuadratureResult {
                value: 0.5 * a0 * r.value,
                ..r
            })
        }
    }
}

/// Scattering amplitude of a twisted packet on a single potential at
/// impact parameter b. Complex; observables use its squared modulus, the
/// phase matters only when amplitudes are superposed.
pub fn amplitude_f_twisted(
    beam: &BeamSpec,
    pot: &PotentialSpec,
    target: &SingleTarget,
    dir: Direction,
    budget: &QuadratureBudget,
) -> Result<EvalComplex, Error> {
    budget.validate()?;
    pot.validate()?;
    let q2_axial = q_squared_axial(beam, dir.theta());
    let pf_sin_theta = beam.p_f() * dir.theta().sin();
    let chi = dir.phi() - target.phi_b();
    let m = beam.m();
    let b = target.b();

    let inner_nodes = Cell::new(0u64);
    let inner_converged = Cell::new(true);
    let outer = integrate_halfline(
        |k| {
            // alpha > beta holds for every k >= 0 (the minimum of q^2 over
            // the azimuth is itself non-negative), so this cannot fail.
            let kern = potential_kernel(pot, m, q2_axial, pf_sin_theta, k, k * b, chi, budget)
                .expect("kernel arguments are valid for all transverse momenta");
            inner_nodes.set(inner_nodes.get() + kern.nodes_used);
            if !kern.converged {
                inner_converged.set(false);
            }
            beam.weight_unchecked(k) * k.sqrt() * kern.value
        },
        beam.kappa0(),
        beam.sigma_kappa(),
        budget,
    )?;

    let prefactor = Complex64::from_polar(1.0 / TAU.sqrt(), m as f64 * (dir.phi() - FRAC_PI_2));
    Ok(EvalComplex {
        value: prefactor * outer.value,
        nodes_used: outer.nodes_used + inner_nodes.get(),
        converged: outer.converged && inner_converged.get(),
    })
}

/// Number of scattering events per steradian for one potential at impact
/// parameter b: (N_e / cos theta_k) |F|^2.
pub fn events_single(
    beam: &BeamSpec,
    pot: &PotentialSpec,
    target: &SingleTarget,
    dir: Direction,
    budget: &QuadratureBudget,
) -> Result<Eval, Error> {
    let f = amplitude_f_twisted(beam, pot, target, dir, budget)?;
    Ok(Eval {
        value: beam.n_electrons() / beam.cos_theta_k() * f.value.norm_sqr(),
        nodes_used: f.nodes_used,
        converged: f.converged,
    })
}

/// Wide-packet event rate: luminosity times the squared kernel at
/// k_perp = kappa0, skipping the half-line integral entirely. Meaningful
/// when sigma_kappa is well below kappa0 (a factor of ten or more).
pub fn events_single_wide(
    beam: &BeamSpec,
    pot: &PotentialSpec,
    target: &SingleTarget,
    dir: Direction,
) -> Result<Eval, Error> {
    pot.validate()?;
    let budget = QuadratureBudget::default();
    let lum = beam.luminosity(&budget)?;
    let kern = potential_kernel(
        pot,
        beam.m(),
        q_squared_axial(beam, dir.theta()),
        beam.p_f() * dir.theta().sin(),
        beam.kappa0(),
        beam.kappa0() * target.b(),
        dir.phi() - target.phi_b(),
        &budget,
    )?;
    Ok(Eval {
        value: lum.value * kern.value.norm_sqr(),
        nodes_used: lum.nodes_used + kern.nodes_used,
        converged: lum.converged && kern.converged,
    })
}

/// Cross section for a single potential: the event rate divided by the
/// beam luminosity.
pub fn cross_section_single(
    beam: &BeamSpec,
    pot: &PotentialSpec,
    target: &SingleTarget,
    dir: Direction,
    budget: &QuadratureBudget,
) -> Result<Eval, Error> {
    let ev = events_single(beam, pot, target, dir, budget)?;
    let lum = beam.luminosity(budget)?;
    Ok(Eval {
        value: ev.value / lum.value,
        nodes_used: ev.nodes_used + lum.nodes_used,
        converged: ev.converged && lum.converged,
    })
}

/// Factorized approximation to the single-potential cross section, valid
/// when kappa0 is small against the momentum transfer: the plane-wave
/// cross section times J_m(kappa0 b)^2.
pub fn cross_section_single_factorized(
    beam: &BeamSpec,
    pot: &PotentialSpec,
    target: &SingleTarget,
    dir: Direction,
) -> Result<f64, Error> {
    pot.validate()?;
    let f = pot.born_amplitude(q_squared_axial(beam, dir.theta()))?;
    let j = bessel_j(beam.m(), beam.kappa0() * target.b())?;
    Ok(f * f * j * j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beam_opening(theta_k_deg: f64, sigma_frac: f64, m: i32) -> BeamSpec {
        let p_i = 10.0;
        let kappa0 = p_i * theta_k_deg.to_radians().tan();
        BeamSpec::new(kappa0, kappa0 * sigma_frac, p_i, m).unwrap()
    }

    #[test]
    fn amplitude_scales_linearly_with_yukawa_strength() {
        let budget = QuadratureBudget::default();
        let beam = beam_opening(10.0, 0.2, 1);
        let dir = Direction::from_degrees(20.0, 40.0).unwrap();
        let target = SingleTarget::new(1.0, 0.3).unwrap();
        let one = amplitude_f_twisted(
            &beam,
            &PotentialSpec::yukawa(1.0, 2.0).unwrap(),
            &target,
            dir,
            &budget,
        )
        .unwrap();
        let three = amplitude_f_twisted(
            &beam,
            &PotentialSpec::yukawa(3.0, 2.0).unwrap(),
            &target,
            dir,
            &budget,
        )
        .unwrap();
        assert!((three.value - 3.0 * one.value).norm() < 1e-12 * three.value.norm());
    }

    #[test]
    fn forward_amplitude_vanishes_exactly_for_centered_nonzero_m() {
        // theta = 0 and b = 0 put every kernel on its closed form with
        // J_m(0) = 0, so the whole half-line integrand is identically zero.
        let budget = QuadratureBudget::default();
        let pot = PotentialSpec::hydrogen(1.0).unwrap();
        for m in [1, 2, -1] {
            let beam = beam_opening(10.0, 0.2, m);
            let f = amplitude_f_twisted(
                &beam,
                &pot,
                &SingleTarget::centered(),
                Direction::forward(),
                &budget,
            )
            .unwrap();
            assert_eq!(f.value, Complex64::new(0.0, 0.0), "m={m}");
            assert!(f.converged);
        }
    }

    #[test]
    fn forward_events_positive_for_m_zero_and_restored_by_offset() {
        let budget = QuadratureBudget::default();
        let pot = PotentialSpec::hydrogen(1.0).unwrap();
        let forward = Direction::forward();

        let beam0 = beam_opening(10.0, 0.2, 0);
        let on_axis = events_single(&beam0, &pot, &SingleTarget::centered(), forward, &budget)
            .unwrap();
        assert!(on_axis.value > 0.0);

        for m in [1, 2] {
            let beam = beam_opening(10.0, 0.2, m);
            let offset = SingleTarget::new(1.0, 0.0).unwrap();
            let ev = events_single(&beam, &pot, &offset, forward, &budget).unwrap();
            assert!(ev.value > 0.0, "m={m} with offset target");
        }
    }

    #[test]
    fn events_scale_linearly_with_electron_count() {
        let budget = QuadratureBudget::default();
        let pot = PotentialSpec::yukawa(1.0, 1.0).unwrap();
        let dir = Direction::from_degrees(15.0, 0.0).unwrap();
        let target = SingleTarget::new(0.5, 0.0).unwrap();
        let beam = beam_opening(10.0, 0.2, 1);
        let doubled = beam.with_electrons(2.0).unwrap();
        let e1 = events_single(&beam, &pot, &target, dir, &budget).unwrap().value;
        let e2 = events_single(&doubled, &pot, &target, dir, &budget).unwrap().value;
        assert!(((e2 - 2.0 * e1) / e2).abs() < 1e-13);
    }

    #[test]
    fn small_angle_amplitude_grows_as_sin_theta_to_the_m() {
        let budget = QuadratureBudget::default();
        let pot = PotentialSpec::yukawa(1.0, 1.0).unwrap();
        for m in [1, 2] {
            let beam = beam_opening(10.0, 0.2, m);
            let value = |theta_deg: f64| {
                amplitude_f_twisted(
                    &beam,
                    &pot,
                    &SingleTarget::centered(),
                    Direction::from_degrees(theta_deg, 0.0).unwrap(),
                    &budget,
                )
                .unwrap()
                .value
                .norm()
            };
            let ratio = value(0.4) / value(0.2);
            let expect = 2.0_f64.powi(m);
            assert!(
                (ratio - expect).abs() < 0.05 * expect,
                "m={m}: ratio {ratio}, expect {expect}"
            );
        }
    }

    #[test]
    fn plane_wave_limit_of_the_cross_section() {
        // kappa0 at 1e-3 of p_i and a narrow weight: the twisted cross
        // section must collapse onto the plane-wave one.
        let budget = QuadratureBudget::default();
        let pot = PotentialSpec::hydrogen(1.0).unwrap();
        let beam = BeamSpec::new(0.01, 0.003, 10.0, 0).unwrap();
        let dir = Direction::from_degrees(30.0, 0.0).unwrap();
        let twisted = cross_section_single(&beam, &pot, &SingleTarget::centered(), dir, &budget)
            .unwrap()
            .value;
        let plane = pot.plane_wave_dcs(beam.p_f(), dir.theta()).unwrap();
        assert!(
            ((twisted - plane) / plane).abs() < 0.01,
            "twisted {twisted} vs plane {plane}"
        );
    }

    #[test]
    fn wide_shortcut_tracks_the_full_integral_for_narrow_weights() {
        let pot = PotentialSpec::hydrogen(1.0).unwrap();
        let budget = QuadratureBudget::default();
        let beam = beam_opening(10.0, 1.0 / 50.0, 1);
        let target = SingleTarget::new(1.0, 0.0).unwrap();
        for theta_deg in [0.0, 5.0, 15.0, 30.0, 60.0] {
            let dir = Direction::from_degrees(theta_deg, 0.0).unwrap();
            let full = events_single(&beam, &pot, &target, dir, &budget).unwrap().value;
            let wide = events_single_wide(&beam, &pot, &target, dir).unwrap().value;
            let scale = full.abs().max(wide.abs());
            if scale == 0.0 {
                continue;
            }
            assert!(
                (full - wide).abs() / scale <= 0.02,
                "theta={theta_deg}: full {full} vs wide {wide}"
            );
        }
    }

    #[test]
    fn wide_rate_is_exactly_zero_for_plane_kinematics_with_oam() {
        // kappa0 = 0 pins the kernel at its closed form with J_m(0) = 0.
        let pot = PotentialSpec::yukawa(1.0, 1.0).unwrap();
        let beam = BeamSpec::new(0.0, 0.1, 10.0, 2).unwrap();
        let dir = Direction::from_degrees(25.0, 10.0).unwrap();
        let ev = events_single_wide(&beam, &pot, &SingleTarget::new(1.5, 0.4).unwrap(), dir)
            .unwrap();
        assert_eq!(ev.value, 0.0);
        assert!(ev.converged);
    }

    #[test]
    fn mirror_symmetry_of_single_potential_events() {
        let budget = QuadratureBudget::default();
        let pot = PotentialSpec::hydrogen(1.0).unwrap();
        for (m, phi_deg, phi_b) in [(1, 70.0, 0.9), (2, 160.0, -0.4), (3, 295.0, 2.2)] {
            let straight = events_single(
                &beam_opening(10.0, 0.2, m),
                &pot,
                &SingleTarget::new(1.2, phi_b).unwrap(),
                Direction::from_degrees(12.0, phi_deg).unwrap(),
                &budget,
            )
            .unwrap()
            .value;
            let mirrored = events_single(
                &beam_opening(10.0, 0.2, -m),
                &pot,
                &SingleTarget::new(1.2, -phi_b).unwrap(),
                Direction::from_degrees(12.0, -phi_deg).unwrap(),
                &budget,
            )
            .unwrap()
            .value;
            assert!(
                ((straight - mirrored) / straight).abs() < 1e-8,
                "m={m}: {straight} vs {mirrored}"
            );
        }
    }

    #[test]
    fn factorized_form_reduces_to_plane_wave_on_axis() {
        let beam = beam_opening(10.0, 0.2, 0);
        let pot = PotentialSpec::hydrogen(1.0).unwrap();
        let dir = Direction::from_degrees(30.0, 0.0).unwrap();
        let fac =
            cross_section_single_factorized(&beam, &pot, &SingleTarget::centered(), dir).unwrap();
        let f = pot.born_amplitude(q_squared_axial(&beam, dir.theta())).unwrap();
        assert_eq!(fac, f * f);
    }

    #[test]
    fn factorized_form_matches_exact_at_small_kappa0() {
        // kappa0 a factor 50 below the momentum transfer: the factorized
        // and exact cross sections agree pointwise within a percent. The
        // neglected piece is the azimuthal gradient of the plane-wave
        // amplitude, down by (2 f' p_f sin(theta) / (f b))^2, so the
        // offsets have to sit well above that length (about 0.4 here).
        let budget = QuadratureBudget::default();
        let pot = PotentialSpec::hydrogen(1.0).unwrap();
        let dir = Direction::from_degrees(30.0, 0.0).unwrap();
        let p_i = 10.0;
        let q = 2.0 * p_i * (0.5 * dir.theta()).sin();
        let kappa0 = q / 50.0;
        let beam = BeamSpec::new(kappa0, kappa0 / 50.0, p_i, 1).unwrap();
        for b in [4.5, 5.5, 6.5, 8.0, 10.0] {
            let target = SingleTarget::new(b, 0.0).unwrap();
            let exact = cross_section_single(&beam, &pot, &target, dir, &budget)
                .unwrap()
                .value;
            let fac = cross_section_single_factorized(&beam, &pot, &target, dir).unwrap();
            assert!(
                ((exact - fac) / exact).abs() < 0.01,
                "b={b}: exact {exact} vs factorized {fac}"
            );
        }
    }

    #[test]
    fn factorized_form_vanishes_at_bessel_zeros_while_exact_does_not() {
        let budget = QuadratureBudget::default();
        let pot = PotentialSpec::hydrogen(1.0).unwrap();
        let dir = Direction::from_degrees(30.0, 0.0).unwrap();
        let beam = BeamSpec::new(0.5, 0.05, 10.0, 0).unwrap();
        // First zero of J_0 at kappa0 b = 2.404825557695773.
        let b = 2.404825557695773 / beam.kappa0();
        let target = SingleTarget::new(b, 0.0).unwrap();
        let fac = cross_section_single_factorized(&beam, &pot, &target, dir).unwrap();
        assert!(fac.abs() < 1e-25);
        let exact = cross_section_single(&beam, &pot, &target, dir, &budget)
            .unwrap()
            .value;
        assert!(exact > 0.0);
        let on_axis = cross_section_single(&beam, &pot, &SingleTarget::centered(), dir, &budget)
            .unwrap()
            .value;
        assert!(exact < 0.05 * on_axis, "suppressed but finite: {exact}");
    }
}
