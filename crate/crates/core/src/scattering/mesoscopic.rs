//! Targets localized to a finite Gaussian spot: between one potential at
//! a known impact parameter and the fully averaged macroscopic limit.
//!
//! The position average keeps partial coherence between transverse
//! momenta, which makes the event rate a double radial integral whose
//! azimuthal structure couples the two momenta through the Gaussian
//! characteristic function. On a uniform azimuthal grid that coupling
//! only depends on the angle difference, so each momentum pair costs one
//! circulant contraction instead of a full double sum re-evaluation.

use crate::beams::BeamSpec;
use crate::error::Error;
use crate::potentials::PotentialSpec;
use crate::quadrature::{gauss_rule, integrate_halfline, integrate_periodic, QuadratureBudget};
use crate::scattering::kinematics::{q_squared, q_squared_axial};
use crate::scattering::{Direction, MesoTarget};
use crate::special::{bessel_i0_scaled, bessel_j};
use crate::Eval;
use num_complex::Complex64;
use std::cell::Cell;
use std::f64::consts::TAU;

/// Hard ceiling on the notional evaluation count of one refinement level
/// of the double-momentum integral, (radial nodes x azimuthal nodes)
/// squared. Levels that would exceed it are not attempted and the result
/// is reported unconverged instead.
const PAIR_EVAL_CAP: u64 = 1 << 24;

/// Smallest radial order tried; also anchors how large the azimuthal
/// grid may grow under the cap.
const RADIAL_START: u32 = 16;

/// Event rate per steradian for a target cloud of Gaussian width sigma_b
/// centered at impact parameter b0.
pub fn events_mesoscopic(
    beam: &BeamSpec,
    pot: &PotentialSpec,
    target: &MesoTarget,
    dir: Direction,
    budget: &QuadratureBudget,
) -> Result<Eval, Error> {
    let (value, nodes_used, converged) = events_mesoscopic_complex(beam, pot, target, dir, budget)?;
    Ok(Eval {
        value: value.re,
        nodes_used,
        converged,
    })
}

/// Full complex event rate before the real part is taken. The imaginary
/// part is a pure roundoff residue; tests watch it as a health check on
/// the contraction.
pub(crate) fn events_mesoscopic_complex(
    beam: &BeamSpec,
    pot: &PotentialSpec,
    target: &MesoTarget,
    dir: Direction,
    budget: &QuadratureBudget,
) -> Result<(Complex64, u64, bool), Error> {
    budget.validate()?;
    pot.validate()?;

    let grid = PairGrid {
        beam,
        pot,
        q2_axial: q_squared_axial(beam, dir.theta()),
        two_pf_sin: 2.0 * beam.p_f() * dir.theta().sin(),
        phi: dir.phi(),
        b0: target.b0(),
        phi_b0: target.phi_b0(),
        sigma_b2: target.sigma_b() * target.sigma_b(),
    };
    let lo = (beam.kappa0() - 6.0 * beam.sigma_kappa()).max(0.0);
    let hi = beam.kappa0() + 6.0 * beam.sigma_kappa();
    let k_cal = if beam.kappa0() > 0.0 {
        beam.kappa0()
    } else {
        0.5 * (lo + hi)
    };

    let mut nodes_used = 0u64;

    // Settle the azimuthal grid on the dominant momentum pair first. The
    // cap is checked against the cheapest radial level that will follow.
    let hint = beam.m().unsigned_abs() + (beam.kappa0() * grid.b0).ceil() as u32;
    let mut n_az = 64u32.max(8 * hint);
    let mut az_converged = false;
    let mut t_prev = grid.pair(k_cal, k_cal, n_az as usize);
    nodes_used += (n_az as u64).pow(2);
    loop {
        let next = 2 * n_az;
        if level_cost(RADIAL_START, next) > PAIR_EVAL_CAP || u64::from(next) > budget.max_nodes {
            break;
        }
        let t_next = grid.pair(k_cal, k_cal, next as usize);
        nodes_used += (next as u64).pow(2);
        let done = (t_next - t_prev).norm() <= budget.tolerance_at(t_next);
        n_az = next;
        t_prev = t_next;
        if done {
            az_converged = true;
            break;
        }
    }

    // Radial refinement by order doubling, one shared Gauss-Legendre
    // panel per momentum axis.
    let mut n_rad = RADIAL_START;
    let mut s_prev = grid.level(lo, hi, n_rad, n_az as usize);
    nodes_used += level_cost(n_rad, n_az);
    let mut rad_converged = false;
    loop {
        let next = 2 * n_rad;
        if level_cost(next, n_az) > PAIR_EVAL_CAP || u64::from(next) > budget.max_nodes {
            break;
        }
        let s_next = grid.level(lo, hi, next, n_az as usize);
        nodes_used += level_cost(next, n_az);
        let done = (s_next - s_prev).norm() <= budget.tolerance_at(s_next);
        n_rad = next;
        s_prev = s_next;
        if done {
            rad_converged = true;
            break;
        }
    }

    let prefactor = beam.n_electrons() / (TAU * beam.cos_theta_k());
    Ok((
        prefactor * s_prev,
        nodes_used,
        az_converged && rad_converged,
    ))
}

fn level_cost(n_rad: u32, n_az: u32) -> u64 {
    (u64::from(n_rad) * u64::from(n_az)).pow(2)
}

/// Everything fixed across the double-momentum grid.
struct PairGrid<'a> {
    beam: &'a BeamSpec,
    pot: &'a PotentialSpec,
    q2_axial: f64,
    two_pf_sin: f64,
    phi: f64,
    b0: f64,
    phi_b0: f64,
    sigma_b2: f64,
}

impl PairGrid<'_> {
    /// Azimuthal samples of the amplitude-with-offset-phase at one
    /// transverse momentum.
    fn samples(&self, k: f64, n: usize) -> Vec<Complex64> {
        let m = self.beam.m() as f64;
        (0..n)
            .map(|j| {
                let psi = TAU * j as f64 / n as f64;
                let q2 = self.q2_axial + k * k - self.two_pf_sin * k * (psi - self.phi).cos();
                let f = self.pot.born_amplitude_unchecked(q2);
                f * Complex64::from_polar(1.0, m * psi + k * self.b0 * (psi - self.phi_b0).cos())
            })
            .collect()
    }

    /// Position-averaged kernel product for one momentum pair, contracted
    /// over the circulant Gaussian coupling.
    fn pair(&self, k: f64, k2: f64, n: usize) -> Complex64 {
        let a = self.samples(k, n);
        let b = if k2 == k { None } else { Some(self.samples(k2, n)) };
        let b = b.as_ref().unwrap_or(&a);
        self.contract(&a, b, k, k2, n)
    }

    fn contract(&self, a: &[Complex64], b: &[Complex64], k: f64, k2: f64, n: usize) -> Complex64 {
        // The exponent regroups as -(sigma^2/2)[(k-k2)^2 + 2 k k2 (1-cos)]
        // which never goes positive, so no overflow for any spot size.
        let base = -0.5 * self.sigma_b2 * (k - k2) * (k - k2);
        let kk = self.sigma_b2 * k * k2;
        let mut sum = Complex64::new(0.0, 0.0);
        for d in 0..n {
            let c = (base - kk * (1.0 - (TAU * d as f64 / n as f64).cos())).exp();
            let mut corr = Complex64::new(0.0, 0.0);
            for (j, &aj) in a.iter().enumerate() {
                let l = (j + n - d) % n;
                corr += aj * b[l].conj();
            }
            sum += c * corr;
        }
        sum / (n as f64 * n as f64)
    }

    /// One refinement level of the double radial integral, exploiting
    /// conjugate symmetry between (k, k2) and (k2, k).
    fn level(&self, lo: f64, hi: f64, n_rad: u32, n_az: usize) -> Complex64 {
        let rule = gauss_rule(n_rad);
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let pts: Vec<(f64, f64)> = rule
            .iter()
            .map(|&(x, w)| {
                let k = mid + half * x;
                (k, half * w * k.sqrt() * self.beam.weight_unchecked(k))
            })
            .collect();
        let samples: Vec<Vec<Complex64>> =
            pts.iter().map(|&(k, _)| self.samples(k, n_az)).collect();
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..pts.len() {
            let (ki, wi) = pts[i];
            s += wi * wi * self.contract(&samples[i], &samples[i], ki, ki, n_az);
            for j in 0..i {
                let (kj, wj) = pts[j];
                let t = self.contract(&samples[i], &samples[j], ki, kj, n_az);
                s += wi * wj * (t + t.conj());
            }
        }
        s
    }
}

/// Fraction of the target cloud overlapping the bright rings of the
/// packet: the Gaussian radial average of J_m(kappa0 b)^2 around b0.
pub fn ratio_r(
    beam: &BeamSpec,
    target: &MesoTarget,
    budget: &QuadratureBudget,
) -> Result<Eval, Error> {
    budget.validate()?;
    let m = beam.m();
    let kappa0 = beam.kappa0();
    let b0 = target.b0();
    let s2 = target.sigma_b() * target.sigma_b();
    let r = integrate_halfline(
        |b| {
            let j = bessel_j(m, kappa0 * b).expect("order already bounded by the beam");
            let i0 = bessel_i0_scaled(b * b0 / s2).expect("argument is finite");
            let radial = (b / s2) * i0 * (-(b - b0) * (b - b0) / (2.0 * s2)).exp();
            Complex64::new(j * j * radial, 0.0)
        },
        b0,
        target.sigma_b(),
        budget,
    )?;
    Ok(Eval {
        value: r.value.re,
        nodes_used: r.nodes_used,
        converged: r.converged,
    })
}

/// Event rate for a target much larger than the packet, where each
/// transverse momentum scatters from its own stationary impact point and
/// only the local target density at that point matters. The returned
/// rate carries the density normalization of the cloud, so absolute
/// values are only meaningful relative to each other.
pub fn events_large_target(
    beam: &BeamSpec,
    pot: &PotentialSpec,
    target: &MesoTarget,
    dir: Direction,
    budget: &QuadratureBudget,
) -> Result<Eval, Error> {
    budget.validate()?;
    pot.validate()?;
    let m = beam.m() as f64;
    let b0 = target.b0();
    let phi_b0 = target.phi_b0();
    let s2 = target.sigma_b() * target.sigma_b();
    let density_norm = 1.0 / (TAU * s2);
    let inner_nodes = Cell::new(0u64);
    let inner_converged = Cell::new(true);
    let outer = integrate_halfline(
        |k| {
            // The stationary impact point sits at distance |m|/k, swinging
            // around the cloud center as phi_k turns; the oscillation hint
            // tracks how fast the Gaussian samples that swing.
            let swing = (m.abs() * b0 / (k * s2)).ceil();
            let hint = if swing.is_finite() {
                (swing as u32).min(4096)
            } else {
                4096
            };
            let mean = integrate_periodic(
                |phi_k| {
                    let f = pot.born_amplitude_unchecked(q_squared(beam, dir, k, phi_k));
                    let dist2 = m * m / (k * k) + b0 * b0
                        - 2.0 * (m / k) * b0 * (phi_k - phi_b0).sin();
                    Complex64::new(f * f * (-dist2 / (2.0 * s2)).exp(), 0.0)
                },
                hint,
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
        value: beam.n_electrons() / beam.cos_theta_k() * density_norm * outer.value.re,
        nodes_used: outer.nodes_used + inner_nodes.get(),
        converged: outer.converged && inner_converged.get(),
    })
}
