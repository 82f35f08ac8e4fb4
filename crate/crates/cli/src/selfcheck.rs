//! Built-in oracle battery: cross-module identities cheap enough to run
//! before trusting any scenario output. Prints one line per check and
//! reports failure through the exit code.

use std::time::Instant;

use vortex_born::beams::BeamSpec;
use vortex_born::potentials::PotentialSpec;
use vortex_born::quadrature::QuadratureBudget;
use vortex_born::scattering::{
    dcs_macroscopic_closed, dcs_macroscopic_general, dcs_macroscopic_wide, events_single,
    total_macroscopic, Direction, SingleTarget,
};

fn opening_beam(theta_k_deg: f64, sigma_div: f64, m: i32) -> Result<BeamSpec, String> {
    let p_i = 10.0;
    let kappa0 = p_i * theta_k_deg.to_radians().tan();
    BeamSpec::new(kappa0, kappa0 / sigma_div, p_i, m).map_err(|e| e.to_string())
}

fn both_potentials() -> Result<[PotentialSpec; 2], String> {
    Ok([
        PotentialSpec::yukawa(1.0, 1.0).map_err(|e| e.to_string())?,
        PotentialSpec::hydrogen(1.0).map_err(|e| e.to_string())?,
    ])
}

/// Closed macroscopic form against the azimuthal quadrature at the mean
/// transverse momentum, across a polar sweep for three opening angles.
fn closed_vs_quadrature() -> Result<(), String> {
    let budget = QuadratureBudget::with_rel_tol(1e-10);
    for pot in both_potentials()? {
        for theta_k in [10.0, 20.0, 30.0] {
            let beam = opening_beam(theta_k, 100.0, 0)?;
            for i in 0..10 {
                let theta = (5.0 + 5.0 * i as f64).to_radians();
                let dir = Direction::new(theta, 0.0).map_err(|e| e.to_string())?;
                let closed = dcs_macroscopic_closed(&beam, &pot, dir)
                    .map_err(|e| e.to_string())?
                    .value;
                let quad = dcs_macroscopic_wide(&beam, &pot, dir, &budget)
                    .map_err(|e| e.to_string())?
                    .value;
                let rel = (closed - quad).abs() / closed.abs().max(f64::MIN_POSITIVE);
                if rel > 1e-8 {
                    return Err(format!(
                        "deviation {rel:.3e} at theta_k {theta_k} theta {} deg",
                        theta.to_degrees()
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Beam luminosity equals the axial density of the windingless profile
/// scaled by N_e / cos theta_k.
fn luminosity_axial_density() -> Result<(), String> {
    let budget = QuadratureBudget::default();
    for (theta_k, sigma_div) in [(10.0, 10.0), (30.0, 3.0)] {
        let beam = opening_beam(theta_k, sigma_div, 0)?;
        let lum = beam.luminosity(&budget).map_err(|e| e.to_string())?.value;
        let axial = beam.density(0.0, &budget).map_err(|e| e.to_string())?.value;
        let expect = beam.n_electrons() / beam.cos_theta_k() * axial;
        let rel = (lum - expect).abs() / expect;
        if rel > 1e-9 {
            return Err(format!(
                "deviation {rel:.3e} at theta_k {theta_k}, sigma kappa0/{sigma_div}"
            ));
        }
    }
    Ok(())
}

/// Angle-integrated macroscopic cross section times cos theta_k equals
/// the plane-wave total at the final momentum.
fn total_vs_plane_wave() -> Result<(), String> {
    let budget = QuadratureBudget::with_rel_tol(1e-8);
    let pot = PotentialSpec::hydrogen(1.0).map_err(|e| e.to_string())?;
    for theta_k in [15.0, 30.0] {
        let beam = opening_beam(theta_k, 100.0, 0)?;
        let total = total_macroscopic(&beam, &pot, &budget)
            .map_err(|e| e.to_string())?
            .value;
        let plane = pot
            .plane_wave_total(beam.p_f(), &budget)
            .map_err(|e| e.to_string())?
            .value;
        let rel = (total * beam.cos_theta_k() - plane).abs() / plane;
        if rel > 1e-3 {
            return Err(format!("deviation {rel:.3e} at theta_k {theta_k}"));
        }
    }
    Ok(())
}

fn fitted_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// On-axis rate vanishes as sin(theta)^(2|m|) toward the forward
/// direction.
fn forward_dip_slopes() -> Result<(), String> {
    let budget = QuadratureBudget::with_rel_tol(1e-10);
    let pot = PotentialSpec::yukawa(1.0, 1.0).map_err(|e| e.to_string())?;
    let target = SingleTarget::centered();
    for m in [1, 2] {
        let beam = opening_beam(10.0, 10.0, m)?;
        let mut pts = Vec::new();
        for i in 0..4 {
            let theta_deg = 0.1 * 10f64.powf(i as f64 / 3.0);
            let dir = Direction::from_degrees(theta_deg, 0.0).map_err(|e| e.to_string())?;
            let ev = events_single(&beam, &pot, &target, dir, &budget)
                .map_err(|e| e.to_string())?;
            pts.push((dir.theta().sin().ln(), ev.value.ln()));
        }
        let slope = fitted_slope(&pts);
        let expect = 2.0 * m as f64;
        if (slope - expect).abs() > 0.03 * expect {
            return Err(format!("slope {slope:.4} for m {m}, expected {expect}"));
        }
    }
    Ok(())
}

/// Forward rate grows as b^(2|m|) for small impact parameters.
fn small_offset_slopes() -> Result<(), String> {
    let budget = QuadratureBudget::with_rel_tol(1e-10);
    let pot = PotentialSpec::yukawa(1.0, 1.0).map_err(|e| e.to_string())?;
    for m in [1, 2] {
        let beam = opening_beam(10.0, 10.0, m)?;
        let mut pts = Vec::new();
        for i in 0..4 {
            let b = 1e-3 * 10f64.powf(i as f64 / 3.0);
            let target = SingleTarget::new(b, 0.0).map_err(|e| e.to_string())?;
            let ev = events_single(&beam, &pot, &target, Direction::forward(), &budget)
                .map_err(|e| e.to_string())?;
            pts.push((b.ln(), ev.value.ln()));
        }
        let slope = fitted_slope(&pts);
        let expect = 2.0 * m as f64;
        if (slope - expect).abs() > 0.03 * expect {
            return Err(format!("slope {slope:.4} for m {m}, expected {expect}"));
        }
    }
    Ok(())
}

/// The same evaluation twice gives the same bits and the same node count.
fn determinism() -> Result<(), String> {
    let budget = QuadratureBudget::with_rel_tol(1e-8);
    let pot = PotentialSpec::hydrogen(1.0).map_err(|e| e.to_string())?;
    let beam = opening_beam(20.0, 4.0, 2)?;
    let target = SingleTarget::new(1.5, 0.7).map_err(|e| e.to_string())?;
    let dir = Direction::from_degrees(17.0, 123.0).map_err(|e| e.to_string())?;

    let a = events_single(&beam, &pot, &target, dir, &budget).map_err(|e| e.to_string())?;
    let b = events_single(&beam, &pot, &target, dir, &budget).map_err(|e| e.to_string())?;
    if a.value.to_bits() != b.value.to_bits() || a.nodes_used != b.nodes_used {
        return Err("repeated single-atom evaluation differed".into());
    }

    let c = dcs_macroscopic_general(&beam, &pot, dir, &budget).map_err(|e| e.to_string())?;
    let d = dcs_macroscopic_general(&beam, &pot, dir, &budget).map_err(|e| e.to_string())?;
    if c.value.to_bits() != d.value.to_bits() || c.nodes_used != d.nodes_used {
        return Err("repeated ensemble evaluation differed".into());
    }
    Ok(())
}

type Check = fn() -> Result<(), String>;

/// Run the battery; returns the process exit code.
pub fn run() -> i32 {
    let start = Instant::now();
    let checks: [(&str, Check); 6] = [
        ("closed form vs azimuthal quadrature", closed_vs_quadrature),
        ("luminosity equals scaled axial density", luminosity_axial_density),
        ("total cross section vs plane wave", total_vs_plane_wave),
        ("forward dip power law", forward_dip_slopes),
        ("small offset power law", small_offset_slopes),
        ("deterministic evaluation", determinism),
    ];
    let mut failures = 0;
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("ok {name}"),
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                failures += 1;
            }
        }
    }
    println!(
        "{} checks, {failures} failed, {:.2} s",
        checks.len(),
        start.elapsed().as_secs_f64()
    );
    if failures == 0 {
        crate::EXIT_OK
    } else {
        1
    }
}
