//! Twisted wave-packet beams: Gaussian transverse-momentum weights, the
//! transverse profile and density they produce, luminosity, and the packet
//! validity check.
//!
//! A beam is a cone of plane waves with mean transverse momentum `kappa0`,
//! Gaussian spread `sigma_kappa`, mean longitudinal momentum `p_i`, and
//! orbital angular momentum projection `m`. The opening angle and final
//! momentum follow from those three numbers and are fixed per beam.

use crate::error::{domain, Error};
use crate::quadrature::{integrate_halfline, QuadratureBudget};
use crate::special::bessel_j;
use crate::Eval;
use std::f64::consts::TAU;

/// Both packet-validity inequalities use this as the meaning of "much
/// smaller than".
const VALIDITY_FACTOR: f64 = 10.0;

/// An immutable beam description. The weight normalization constant is
/// computed once at construction, so values are cheap to copy and share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSpec {
    kappa0: f64,
    sigma_kappa: f64,
    p_i: f64,
    m: i32,
    n_electrons: f64,
    sigma_z: f64,
    a_field: f64,
    norm: f64,
}

impl BeamSpec {
    /// Beam with one electron and default packet scales (`sigma_z` = 1e3,
    /// `a_field` = 1, both in Bohr radii).
    pub fn new(kappa0: f64, sigma_kappa: f64, p_i: f64, m: i32) -> Result<Self, Error> {
        if !kappa0.is_finite() || kappa0 < 0.0 {
            return Err(domain(format!("kappa0 must be >= 0, got {kappa0}")));
        }
        if !sigma_kappa.is_finite() || sigma_kappa <= 0.0 {
            return Err(domain(format!("sigma_kappa must be > 0, got {sigma_kappa}")));
        }
        if !p_i.is_finite() || p_i <= 0.0 {
            return Err(domain(format!("p_i must be > 0, got {p_i}")));
        }
        if m.unsigned_abs() > 512 {
            return Err(domain(format!("OAM projection {m} exceeds +-512")));
        }
        let norm = weight_norm(kappa0, sigma_kappa)?;
        Ok(BeamSpec {
            kappa0,
            sigma_kappa,
            p_i,
            m,
            n_electrons: 1.0,
            sigma_z: 1e3,
            a_field: 1.0,
            norm,
        })
    }

    pub fn with_electrons(mut self, n_electrons: f64) -> Result<Self, Error> {
        if !n_electrons.is_finite() || n_electrons <= 0.0 {
            return Err(domain(format!("n_electrons must be > 0, got {n_electrons}")));
        }
        self.n_electrons = n_electrons;
        Ok(self)
    }

    /// Longitudinal packet size and potential radius, used only by
    /// `check_validity`.
    pub fn with_packet_scales(mut self, sigma_z: f64, a_field: f64) -> Result<Self, Error> {
        if !sigma_z.is_finite() || sigma_z <= 0.0 {
            return Err(domain(format!("sigma_z must be > 0, got {sigma_z}")));
        }
        if !a_field.is_finite() || a_field <= 0.0 {
            return Err(domain(format!("a_field must be > 0, got {a_field}")));
        }
        self.sigma_z = sigma_z;
        self.a_field = a_field;
        Ok(self)
    }

    /// Same beam with a different OAM projection; the weight normalization
    /// carries over unchanged.
    pub fn with_m(mut self, m: i32) -> Result<Self, Error> {
        if m.unsigned_abs() > 512 {
            return Err(domain(format!("OAM projection {m} exceeds +-512")));
        }
        self.m = m;
        Ok(self)
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    pub fn sigma_kappa(&self) -> f64 {
        self.sigma_kappa
    }

    pub fn p_i(&self) -> f64 {
        self.p_i
    }

    pub fn m(&self) -> i32 {
        self.m
    }

    pub fn n_electrons(&self) -> f64 {
        self.n_electrons
    }

    pub fn sigma_z(&self) -> f64 {
        self.sigma_z
    }

    pub fn a_field(&self) -> f64 {
        self.a_field
    }

    /// Cone opening angle, atan(kappa0 / p_i).
    pub fn theta_k(&self) -> f64 {
        (self.kappa0 / self.p_i).atan()
    }

    pub fn cos_theta_k(&self) -> f64 {
        self.p_i / self.p_f()
    }

    pub fn sin_theta_k(&self) -> f64 {
        self.kappa0 / self.p_f()
    }

    /// Magnitude of the outgoing momentum, sqrt(p_i^2 + kappa0^2), fixed by
    /// elastic kinematics at the mean transverse momentum.
    pub fn p_f(&self) -> f64 {
        self.p_i.hypot(self.kappa0)
    }

    /// Normalization constant of the momentum weight.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Momentum amplitude density g(kappa), normalized so the integral of
    /// g^2 over the half-line is one.
    pub fn weight(&self, kappa: f64) -> Result<f64, Error> {
        if !kappa.is_finite() || kappa < 0.0 {
            return Err(domain(format!("weight argument must be >= 0, got {kappa}")));
        }
        Ok(self.weight_unchecked(kappa))
    }

    /// Same as `weight` for arguments already known to be valid; quadrature
    /// inner loops use this to skip the per-node check.
    pub(crate) fn weight_unchecked(&self, kappa: f64) -> f64 {
        let d = kappa - self.kappa0;
        self.norm * (-d * d / (2.0 * self.sigma_kappa * self.sigma_kappa)).exp()
    }

    /// Transverse radial profile of the packet,
    /// integral of sqrt(kappa) J_m(kappa r) g(kappa) over kappa.
    pub fn radial_profile(&self, r_perp: f64, budget: &QuadratureBudget) -> Result<Eval, Error> {
        if !r_perp.is_finite() || r_perp < 0.0 {
            return Err(domain(format!("r_perp must be >= 0, got {r_perp}")));
        }
        let m = self.m;
        let r = integrate_halfline(
            |kappa| {
                let j = bessel_j(m, kappa * r_perp).expect("validated order and finite argument");
                (kappa.sqrt() * j * self.weight_unchecked(kappa)).into()
            },
            self.kappa0,
            self.sigma_kappa,
            budget,
        )?;
        Ok(Eval {
            value: r.value.re,
            nodes_used: r.nodes_used,
            converged: r.converged,
        })
    }

    /// Transverse probability density of the beam at radius `r_perp`,
    /// the squared radial profile over 2 pi.
    pub fn density(&self, r_perp: f64, budget: &QuadratureBudget) -> Result<Eval, Error> {
        let r = self.radial_profile(r_perp, budget)?;
        Ok(Eval {
            value: r.value * r.value / TAU,
            ..r
        })
    }

    /// Luminosity factor converting a squared amplitude into an event count:
    /// (N_e / cos theta_k) times the axial density of the m = 0 profile.
    pub fn luminosity(&self, budget: &QuadratureBudget) -> Result<Eval, Error> {
        let r = integrate_halfline(
            |kappa| (kappa.sqrt() * self.weight_unchecked(kappa)).into(),
            self.kappa0,
            self.sigma_kappa,
            budget,
        )?;
        let moment = r.value.re;
        Ok(Eval {
            value: self.n_electrons / self.cos_theta_k() * moment * moment / TAU,
            nodes_used: r.nodes_used,
            converged: r.converged,
        })
    }

    /// Checks the packet-model inequalities
    /// a_field << sigma_z << p_i / (kappa0 sigma_kappa), with "<<" meaning a
    /// factor of ten. Advisory only; nothing downstream refuses to run on a
    /// warn.
    pub fn check_validity(&self) -> ValidityReport {
        let transverse_scale = if self.kappa0 == 0.0 {
            f64::INFINITY
        } else {
            self.p_i / (self.kappa0 * self.sigma_kappa)
        };
        let potential_ratio = self.sigma_z / self.a_field;
        let diffraction_ratio = transverse_scale / self.sigma_z;
        ValidityReport {
            potential_ratio,
            diffraction_ratio,
            packet_exceeds_potential: potential_ratio >= VALIDITY_FACTOR,
            packet_below_diffraction: diffraction_ratio >= VALIDITY_FACTOR,
        }
    }
}

/// Outcome of `BeamSpec::check_validity`. Each flag passes when its ratio
/// is at least ten.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    /// sigma_z / a_field.
    pub potential_ratio: f64,
    /// [p_i / (kappa0 sigma_kappa)] / sigma_z.
    pub diffraction_ratio: f64,
    pub packet_exceeds_potential: bool,
    pub packet_below_diffraction: bool,
}

impl ValidityReport {
    pub fn all_pass(&self) -> bool {
        self.packet_exceeds_potential && self.packet_below_diffraction
    }
}

/// Coherent superposition of two OAM components on one set of beam
/// kinematics: c1 e^{i alpha1} |m1> + c2 e^{i alpha2} |m2>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionSpec {
    base: BeamSpec,
    m1: i32,
    m2: i32,
    c1_abs: f64,
    c2_abs: f64,
    alpha1: f64,
    alpha2: f64,
}

impl SuperpositionSpec {
    pub fn new(
        base: BeamSpec,
        m1: i32,
        m2: i32,
        c1_abs: f64,
        c2_abs: f64,
        alpha1: f64,
        alpha2: f64,
    ) -> Result<Self, Error> {
        if m1.unsigned_abs() > 512 || m2.unsigned_abs() > 512 {
            return Err(domain("superposition OAM projections exceed +-512"));
        }
        if !c1_abs.is_finite() || c1_abs < 0.0 || !c2_abs.is_finite() || c2_abs < 0.0 {
            return Err(domain("superposition coefficients must be non-negative"));
        }
        let sum = c1_abs * c1_abs + c2_abs * c2_abs;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(domain(format!(
                "superposition coefficients must satisfy c1^2 + c2^2 = 1, got {sum}"
            )));
        }
        if !alpha1.is_finite() || !alpha2.is_finite() {
            return Err(domain("superposition phases must be finite"));
        }
        Ok(SuperpositionSpec {
            base,
            m1,
            m2,
            c1_abs,
            c2_abs,
            alpha1,
            alpha2,
        })
    }

    pub fn base(&self) -> &BeamSpec {
        &self.base
    }

    pub fn m1(&self) -> i32 {
        self.m1
    }

    pub fn m2(&self) -> i32 {
        self.m2
    }

    pub fn c1_abs(&self) -> f64 {
        self.c1_abs
    }

    pub fn c2_abs(&self) -> f64 {
        self.c2_abs
    }

    pub fn delta_m(&self) -> i32 {
        self.m2 - self.m1
    }

    pub fn delta_alpha(&self) -> f64 {
        self.alpha2 - self.alpha1
    }
}

/// Normalization constant for the Gaussian momentum weight on the
/// half-line. Tight tolerance: every downstream observable inherits this
/// number squared.
fn weight_norm(kappa0: f64, sigma_kappa: f64) -> Result<f64, Error> {
    let budget = QuadratureBudget::with_rel_tol(1e-12);
    let r = integrate_halfline(
        |kappa| {
            let d = kappa - kappa0;
            (-d * d / (sigma_kappa * sigma_kappa)).exp().into()
        },
        kappa0,
        sigma_kappa,
        &budget,
    )?;
    if !r.converged || r.value.re <= 0.0 {
        return Err(domain("weight normalization integral failed to converge"));
    }
    Ok(1.0 / r.value.re.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn beam(kappa0: f64, sigma: f64, p_i: f64, m: i32) -> BeamSpec {
        BeamSpec::new(kappa0, sigma, p_i, m).unwrap()
    }

    /// Dense midpoint Riemann sum, independent of the production quadrature.
    fn riemann(f: impl Fn(f64) -> f64, a: f64, b: f64, n: u64) -> f64 {
        let h = (b - a) / n as f64;
        (0..n).map(|j| f(a + (j as f64 + 0.5) * h)).sum::<f64>() * h
    }

    #[test]
    fn weight_squared_integrates_to_one() {
        let b = beam(10.0, 1.0, 20.0, 0);
        let total = riemann(|k| b.weight(k).unwrap().powi(2), 0.0, 25.0, 2_000_000);
        assert!((total - 1.0).abs() < 1e-9, "normalization {total}");
    }

    #[test]
    fn weight_peaks_at_kappa0() {
        let b = beam(7.0, 0.5, 20.0, 0);
        let mut best = (0.0, 0.0);
        for i in 0..=10_000 {
            let k = 14.0 * i as f64 / 10_000.0;
            let w = b.weight(k).unwrap();
            if w > best.1 {
                best = (k, w);
            }
        }
        assert!((best.0 - 7.0).abs() < 2e-3, "argmax {}", best.0);
    }

    #[test]
    fn norm_approaches_whole_line_gaussian_value() {
        // For kappa0 >> sigma the half-line constraint stops mattering and
        // C tends to (pi sigma^2)^(-1/4) = 0.7511255444649425 at sigma = 1.
        let b = beam(50.0, 1.0, 100.0, 0);
        assert!((b.norm() - 0.7511255444649425).abs() < 1e-7, "C = {}", b.norm());
        // At kappa0 = 0 exactly half the Gaussian survives, so C^2 doubles.
        let half = beam(0.0, 1.0, 100.0, 0);
        assert!((half.norm() - 2.0_f64.sqrt() * 0.7511255444649425).abs() < 1e-7);
    }

    #[test]
    fn weight_rejects_negative_argument() {
        let b = beam(10.0, 1.0, 20.0, 0);
        assert!(b.weight(-0.1).is_err());
        assert!(b.weight(f64::NAN).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(BeamSpec::new(-1.0, 1.0, 10.0, 0).is_err());
        assert!(BeamSpec::new(1.0, 0.0, 10.0, 0).is_err());
        assert!(BeamSpec::new(1.0, 1.0, 0.0, 0).is_err());
        assert!(BeamSpec::new(1.0, 1.0, 10.0, 600).is_err());
        assert!(beam(1.0, 1.0, 10.0, 0).with_electrons(0.0).is_err());
        assert!(beam(1.0, 1.0, 10.0, 0).with_packet_scales(0.0, 1.0).is_err());
    }

    #[test]
    fn kinematics_derived_quantities() {
        let b = beam(10.0 * (0.3_f64).tan(), 0.1, 10.0, 1);
        assert!((b.theta_k() - 0.3).abs() < 1e-14);
        let pf = (b.p_i().powi(2) + b.kappa0().powi(2)).sqrt();
        assert!((b.p_f() - pf).abs() < 1e-12);
        assert!((b.cos_theta_k() - 0.3_f64.cos()).abs() < 1e-14);
        assert!((b.sin_theta_k() - 0.3_f64.sin()).abs() < 1e-14);
        assert_eq!(beam(0.0, 1.0, 5.0, 0).theta_k(), 0.0);
    }

    #[test]
    fn radial_profile_vanishes_on_axis_for_nonzero_m() {
        let budget = QuadratureBudget::default();
        for m in [1, 2, 5, -3] {
            let b = beam(10.0, 2.0, 20.0, m);
            let r = b.radial_profile(0.0, &budget).unwrap();
            assert!(r.converged);
            assert_eq!(r.value, 0.0, "m={m}");
        }
    }

    #[test]
    fn axial_profile_tracks_sqrt_kappa0_for_narrow_weights() {
        // For sigma << kappa0 the sqrt(kappa) factor is effectively
        // sqrt(kappa0), so R(0) / integral of g approaches sqrt(10).
        let budget = QuadratureBudget::default();
        let b = beam(10.0, 0.1, 20.0, 0);
        let r0 = b.radial_profile(0.0, &budget).unwrap().value;
        let g_total = riemann(|k| b.weight(k).unwrap(), 9.0, 11.0, 1_000_000);
        let ratio = r0 / g_total;
        assert!((ratio - 10.0_f64.sqrt()).abs() < 0.01 * 10.0_f64.sqrt(), "ratio {ratio}");
    }

    #[test]
    fn first_profile_maximum_sits_at_the_bessel_maximum() {
        // J_1 peaks at x = 1.8412; with kappa0 = 10 the profile peak sits
        // near r = 0.184 once sigma is modest.
        let budget = QuadratureBudget::with_rel_tol(1e-8);
        let b = beam(10.0, 2.0, 20.0, 1);
        let mut best = (0.0, f64::MIN);
        for i in 1..=400 {
            let r = 0.4 * i as f64 / 400.0;
            let v = b.radial_profile(r, &budget).unwrap().value;
            if v > best.1 {
                best = (r, v);
            }
        }
        assert!(
            (best.0 - 0.184).abs() < 0.1 * 0.184,
            "first maximum at {}",
            best.0
        );
    }

    #[test]
    fn density_is_profile_squared_over_two_pi() {
        let budget = QuadratureBudget::default();
        let b = beam(10.0, 2.0, 20.0, 0);
        let r = b.radial_profile(0.0, &budget).unwrap().value;
        let d = b.density(0.0, &budget).unwrap().value;
        assert_eq!(d, r * r / TAU);
        for m in [1, 2] {
            let bm = b.with_m(m).unwrap();
            assert_eq!(bm.density(0.0, &budget).unwrap().value, 0.0);
        }
    }

    #[test]
    fn density_ring_radius_grows_with_m() {
        let budget = QuadratureBudget::with_rel_tol(1e-8);
        let base = beam(1.0, 0.2, 10.0, 0);
        let argmax = |m: i32| {
            let b = base.with_m(m).unwrap();
            let mut best = (0.0, f64::MIN);
            for i in 1..=300 {
                let r = 12.0 * i as f64 / 300.0;
                let v = b.density(r, &budget).unwrap().value;
                if v > best.1 {
                    best = (r, v);
                }
            }
            best.0
        };
        let (r1, r3, r5) = (argmax(1), argmax(3), argmax(5));
        assert!(r1 < r3 && r3 < r5, "ring radii {r1}, {r3}, {r5}");
    }

    #[test]
    fn narrow_weight_density_converges_to_bessel_ring_shape() {
        // As sigma -> 0 the density becomes proportional to J_m(kappa0 r)^2;
        // compare shapes through a ratio at two radii away from zeros.
        let budget = QuadratureBudget::default();
        let kappa0 = 10.0;
        let b = beam(kappa0, kappa0 / 100.0, 20.0, 1);
        let (r1, r2) = (1.8412 / kappa0, 1.0 / kappa0);
        let got = b.density(r1, &budget).unwrap().value / b.density(r2, &budget).unwrap().value;
        let want = (bessel_j(1, kappa0 * r1).unwrap() / bessel_j(1, kappa0 * r2).unwrap()).powi(2);
        assert!((got / want - 1.0).abs() < 0.01, "shape ratio {got} vs {want}");
    }

    #[test]
    fn luminosity_equals_axial_density_over_cos() {
        let budget = QuadratureBudget::default();
        let b = beam(5.0, 0.5, 10.0, 3).with_electrons(7.0).unwrap();
        let lum = b.luminosity(&budget).unwrap().value;
        let axial = b.with_m(0).unwrap().density(0.0, &budget).unwrap().value;
        let want = 7.0 / b.cos_theta_k() * axial;
        assert!(
            ((lum - want) / want).abs() < 1e-8,
            "luminosity {lum} vs axial form {want}"
        );
    }

    #[test]
    fn luminosity_scales_linearly_in_electron_count() {
        let budget = QuadratureBudget::default();
        let b1 = beam(5.0, 0.5, 10.0, 0);
        let b2 = b1.with_electrons(2.0).unwrap();
        let l1 = b1.luminosity(&budget).unwrap().value;
        let l2 = b2.luminosity(&budget).unwrap().value;
        assert!(((l2 - 2.0 * l1) / l2).abs() < 1e-14);
    }

    #[test]
    fn luminosity_times_cos_ignores_longitudinal_momentum() {
        let budget = QuadratureBudget::default();
        let a = beam(5.0, 0.5, 10.0, 0);
        let c = beam(5.0, 0.5, 40.0, 0);
        let la = a.luminosity(&budget).unwrap().value * a.cos_theta_k();
        let lc = c.luminosity(&budget).unwrap().value * c.cos_theta_k();
        assert!(((la - lc) / la).abs() < 1e-12);
    }

    #[test]
    fn validity_report_cases() {
        // p_i / (kappa0 sigma) = 10^4 with sigma_z = 100: both pass.
        let b = beam(0.01, 0.1, 10.0, 0).with_packet_scales(100.0, 1.0).unwrap();
        let rep = b.check_validity();
        assert!(rep.packet_exceeds_potential && rep.packet_below_diffraction);
        assert!(rep.all_pass());

        // Packet only five times the potential radius: warn on the first.
        let b = beam(0.01, 0.1, 10.0, 0).with_packet_scales(5.0, 1.0).unwrap();
        let rep = b.check_validity();
        assert!(!rep.packet_exceeds_potential && rep.packet_below_diffraction);

        // sigma_z at half the transverse diffraction scale: warn on the second.
        let scale = 10.0 / (0.01 * 0.1);
        let b = beam(0.01, 0.1, 10.0, 0)
            .with_packet_scales(0.5 * scale, 1.0)
            .unwrap();
        let rep = b.check_validity();
        assert!(rep.packet_exceeds_potential && !rep.packet_below_diffraction);

        // kappa0 = 0 has no transverse diffraction scale at all.
        let b = beam(0.0, 0.1, 10.0, 0).with_packet_scales(1e6, 1.0).unwrap();
        assert!(b.check_validity().packet_below_diffraction);
    }

    #[test]
    fn superposition_coefficient_normalization() {
        let base = beam(1.0, 0.1, 10.0, 0);
        let s = SuperpositionSpec::new(base, 0, 2, 0.6, 0.8, 0.0, 0.5).unwrap();
        assert_eq!(s.delta_m(), 2);
        assert!((s.delta_alpha() - 0.5).abs() < 1e-15);
        assert!(SuperpositionSpec::new(base, 0, 2, 0.8, 0.8, 0.0, 0.0).is_err());
        assert!(SuperpositionSpec::new(base, 0, 2, -0.6, 0.8, 0.0, 0.0).is_err());
        let frac = 1.0 / 2.0_f64.sqrt();
        assert!(SuperpositionSpec::new(base, 1, 3, frac, frac, 0.0, 0.0).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// The density depends on m only through J_m^2, so flipping the sign
        /// of m changes nothing.
        #[test]
        fn density_is_even_in_m(m in 0i32..6, r in 0.0f64..3.0) {
            let budget = QuadratureBudget::with_rel_tol(1e-8);
            let plus = beam(4.0, 0.8, 10.0, m).density(r, &budget).unwrap().value;
            let minus = beam(4.0, 0.8, 10.0, -m).density(r, &budget).unwrap().value;
            prop_assert!((plus - minus).abs() <= 1e-12 * plus.abs().max(1e-300));
        }

        /// The weight never exceeds its value at the mean momentum.
        #[test]
        fn weight_maximum_at_mean(kappa in 0.0f64..30.0) {
            let b = beam(9.0, 1.3, 20.0, 0);
            prop_assert!(b.weight(kappa).unwrap() <= b.weight(9.0).unwrap() + 1e-15);
        }
    }
}
