//! Bundled figure scenarios, one config per curve. Each preset family
//! shares a beam energy of p_i = 10/a0 on a hydrogen target unless the
//! scenario is potential-free (beam densities, ring overlap ratios).

use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::path::{Path, PathBuf};

use vortex_born::beams::{BeamSpec, SuperpositionSpec};
use vortex_born::potentials::PotentialSpec;
use vortex_born::quadrature::QuadratureBudget;
use vortex_born::units::{inverse_nm_to_inverse_a0, nm_to_a0};

use crate::config::{
    GridConfig, Method, Observable, OutputFormat, ScenarioConfig, TargetConfig,
};
use crate::CliError;

const P_I: f64 = 10.0;

fn opening_beam(theta_k_deg: f64, sigma_div: f64, m: i32) -> BeamSpec {
    let kappa0 = P_I * theta_k_deg.to_radians().tan();
    BeamSpec::new(kappa0, kappa0 / sigma_div, P_I, m).expect("preset beam parameters are valid")
}

fn hydrogen() -> PotentialSpec {
    PotentialSpec::hydrogen(1.0).expect("unit Bohr radius is valid")
}

fn scenario(
    name: String,
    observable: Observable,
    method: Method,
    beam: BeamSpec,
    potential: Option<PotentialSpec>,
    target: TargetConfig,
    grid: GridConfig,
) -> ScenarioConfig {
    let output_path = PathBuf::from(format!("{name}.csv"));
    ScenarioConfig {
        scenario: name,
        beam,
        potential,
        target,
        superposition: None,
        grid,
        direction_deg: (0.0, 0.0),
        observable,
        method,
        budget: QuadratureBudget::with_rel_tol(1e-6),
        output_path,
        format: OutputFormat::Csv,
    }
}

fn polar_sweep(theta_max_deg: f64, theta_steps: usize) -> GridConfig {
    GridConfig::Angular {
        theta_min_deg: 0.0,
        theta_max_deg,
        theta_steps,
        phi_min_deg: 0.0,
        phi_max_deg: 0.0,
        phi_steps: 1,
    }
}

/// Macroscopic angular distributions for two packet widths against the
/// plane-wave baseline, at two opening angles. The baseline carries the
/// full final momentum of the twisted beams it is compared with.
fn fig1() -> Vec<ScenarioConfig> {
    let mut out = Vec::new();
    for theta_k in [15.0, 30.0] {
        let tag = theta_k as i32;
        let grid = || polar_sweep(60.0, 121);
        out.push(scenario(
            format!("fig1_thetak{tag}_narrow"),
            Observable::Dcs,
            Method::Closed,
            opening_beam(theta_k, 100.0, 0),
            Some(hydrogen()),
            TargetConfig::Macro,
            grid(),
        ));
        out.push(scenario(
            format!("fig1_thetak{tag}_sigma3"),
            Observable::Dcs,
            Method::General,
            opening_beam(theta_k, 3.0, 0),
            Some(hydrogen()),
            TargetConfig::Macro,
            grid(),
        ));
        let p_f = P_I / theta_k.to_radians().cos();
        out.push(scenario(
            format!("fig1_thetak{tag}_plane"),
            Observable::Dcs,
            Method::Closed,
            BeamSpec::new(0.0, 1e-3, p_f, 0).expect("plane baseline beam is valid"),
            Some(hydrogen()),
            TargetConfig::Macro,
            grid(),
        ));
    }
    out
}

/// Azimuthal asymmetry of an equal two-component superposition with
/// winding difference two, versus polar angle, for three opening angles.
fn fig2() -> Vec<ScenarioConfig> {
    [10.0, 20.0, 30.0]
        .into_iter()
        .map(|theta_k| {
            let beam = opening_beam(theta_k, 100.0, 0);
            let sup = SuperpositionSpec::new(
                beam,
                1,
                3,
                FRAC_1_SQRT_2,
                FRAC_1_SQRT_2,
                0.0,
                0.0,
            )
            .expect("equal mix is valid");
            let mut cfg = scenario(
                format!("fig2_thetak{}", theta_k as i32),
                Observable::Asymmetry,
                Method::Auto,
                beam,
                Some(hydrogen()),
                TargetConfig::Macro,
                polar_sweep(60.0, 241),
            );
            cfg.superposition = Some(sup);
            cfg
        })
        .collect()
}

/// Polar event distributions from a single atom, on and off the beam
/// axis, for the first three windings.
fn fig3() -> Vec<ScenarioConfig> {
    let mut out = Vec::new();
    for m in [0, 1, 2] {
        for b in [0.0, 1.0] {
            out.push(scenario(
                format!("fig3_m{m}_b{b}", b = b as i32),
                Observable::Events,
                Method::Auto,
                opening_beam(10.0, 5.0, m),
                Some(hydrogen()),
                TargetConfig::Single { b, phi_b_deg: 0.0 },
                polar_sweep(30.0, 61),
            ));
        }
    }
    out
}

/// Azimuthal event distributions around an off-axis atom at two polar
/// angles, for windings -2 through 2.
fn fig4() -> Vec<ScenarioConfig> {
    let mut out = Vec::new();
    for theta in [1.0, 20.0] {
        for m in [-2i32, -1, 0, 1, 2] {
            let sign = if m < 0 { "m" } else { "p" };
            let name = if m == 0 {
                format!("fig4_theta{}_m0", theta as i32)
            } else {
                format!("fig4_theta{}_m{sign}{}", theta as i32, m.abs())
            };
            out.push(scenario(
                name,
                Observable::Events,
                Method::Auto,
                opening_beam(10.0, 5.0, m),
                Some(hydrogen()),
                TargetConfig::Single { b: 2.0, phi_b_deg: 0.0 },
                GridConfig::Angular {
                    theta_min_deg: theta,
                    theta_max_deg: theta,
                    theta_steps: 1,
                    phi_min_deg: 0.0,
                    phi_max_deg: 360.0,
                    phi_steps: 181,
                },
            ));
        }
    }
    out
}

/// Nanometer-scale packets: the fraction of a 10 nm target cloud covered
/// by the bright rings versus cloud offset, and the transverse density
/// profiles behind it, for four windings.
fn fig5() -> Vec<ScenarioConfig> {
    let kappa0 = inverse_nm_to_inverse_a0(0.1);
    let sigma_kappa = inverse_nm_to_inverse_a0(0.02);
    let sigma_b = nm_to_a0(10.0);
    let x_max = nm_to_a0(60.0);
    let mut out = Vec::new();
    for m in [0, 1, 3, 5] {
        let beam =
            BeamSpec::new(kappa0, sigma_kappa, P_I, m).expect("preset beam parameters are valid");
        out.push(scenario(
            format!("fig5_ratio_m{m}"),
            Observable::RatioR,
            Method::Auto,
            beam,
            None,
            TargetConfig::Meso {
                b0: 0.0,
                phi_b0_deg: 0.0,
                sigma_b,
            },
            GridConfig::Scan {
                x_min: 0.0,
                x_max,
                x_steps: 121,
            },
        ));
        out.push(scenario(
            format!("fig5_density_m{m}"),
            Observable::Density,
            Method::Auto,
            beam,
            None,
            TargetConfig::Macro,
            GridConfig::Scan {
                x_min: 0.0,
                x_max,
                x_steps: 121,
            },
        ));
    }
    out
}

/// Event rate from a wide target cloud versus cloud offset for high
/// windings, detector fixed just off the forward direction.
fn fig6() -> Vec<ScenarioConfig> {
    let kappa0 = P_I * 1.0f64.to_radians().tan();
    let sigma_kappa = inverse_nm_to_inverse_a0(0.5);
    let sigma_b = nm_to_a0(10.0);
    [0, 50, 100]
        .into_iter()
        .map(|m| {
            let beam = BeamSpec::new(kappa0, sigma_kappa, P_I, m)
                .expect("preset beam parameters are valid");
            let mut cfg = scenario(
                format!("fig6_m{m}"),
                Observable::Events,
                Method::Wide,
                beam,
                Some(hydrogen()),
                TargetConfig::Meso {
                    b0: 0.0,
                    phi_b0_deg: 0.0,
                    sigma_b,
                },
                GridConfig::Scan {
                    x_min: 0.0,
                    x_max: 1200.0,
                    x_steps: 121,
                },
            );
            cfg.direction_deg = (1.0, 0.0);
            cfg
        })
        .collect()
}

pub const NAMES: [&str; 6] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"];

/// All configs of one preset family, one per curve.
pub fn configs(name: &str) -> Result<Vec<ScenarioConfig>, CliError> {
    match name {
        "fig1" => Ok(fig1()),
        "fig2" => Ok(fig2()),
        "fig3" => Ok(fig3()),
        "fig4" => Ok(fig4()),
        "fig5" => Ok(fig5()),
        "fig6" => Ok(fig6()),
        other => Err(CliError::config(format!(
            "unknown preset '{other}' (expected one of {})",
            NAMES.join(", ")
        ))),
    }
}

/// Write one `<scenario>.cfg` per config into `out_dir`.
pub fn write_configs(out_dir: &Path, cfgs: &[ScenarioConfig]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::io(format!("creating {}: {e}", out_dir.display())))?;
    let mut paths = Vec::with_capacity(cfgs.len());
    for cfg in cfgs {
        let path = out_dir.join(format!("{}.cfg", cfg.scenario));
        fs::write(&path, cfg.to_text())
            .map_err(|e| CliError::io(format!("writing {}: {e}", path.display())))?;
        paths.push(path);
    }
    Ok(paths)
}
