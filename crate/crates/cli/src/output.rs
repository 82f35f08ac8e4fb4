//! Table rendering. The CSV and JSON emitters are pure functions of the
//! scenario and its results, so identical runs produce identical bytes.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use vortex_born::scattering::{AngularTable, Coord};

use crate::config::{GridPoint, ScenarioConfig};
use crate::CliError;

/// FNV-1a, 64 bit. Stable across platforms and good enough to spot a table
/// that was produced by a different scenario than the header claims.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Hash of the canonical config text, so re-parsing a config and hashing it
/// again yields the same tag regardless of comment or unit cosmetics.
pub fn scenario_hash(cfg: &ScenarioConfig) -> String {
    format!("fnv1a:{:016x}", fnv1a64(cfg.to_text().as_bytes()))
}

fn version_line() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

/// Column name for the scan abscissa, taken from what the table actually
/// recorded rather than from the observable.
fn x_column(table: &AngularTable) -> &'static str {
    match table.points.first().map(|p| p.coord) {
        Some(Coord::Impact(_)) => "b0_a0",
        Some(Coord::Radius(_)) => "r_perp_a0",
        _ => "x",
    }
}

pub fn render_csv(cfg: &ScenarioConfig, table: &AngularTable) -> String {
    let mut out = String::new();
    out.push_str(&format!("# scenario: {}\n", cfg.scenario));
    out.push_str(&format!("# hash: {}\n", scenario_hash(cfg)));
    out.push_str(&format!(
        "# units: angles deg, lengths a0, value {}\n",
        table.value_kind.label()
    ));
    out.push_str(&format!("# rel_tol: {:e}\n", cfg.budget.rel_tol));
    out.push_str(&format!("# version: {}\n", version_line()));

    let grid = cfg.grid.points();
    debug_assert_eq!(grid.len(), table.points.len());
    match grid.first() {
        Some(GridPoint::Angles { .. }) => {
            out.push_str("theta_deg,phi_deg,value,converged,nodes\n");
            for (gp, tp) in grid.iter().zip(&table.points) {
                let GridPoint::Angles { theta_deg, phi_deg } = *gp else {
                    unreachable!("mixed grid");
                };
                out.push_str(&format!(
                    "{},{},{:.12e},{},{}\n",
                    theta_deg, phi_deg, tp.value, tp.converged, tp.nodes_used
                ));
            }
        }
        Some(GridPoint::X(_)) => {
            out.push_str(&format!("{},value,converged,nodes\n", x_column(table)));
            for (gp, tp) in grid.iter().zip(&table.points) {
                let GridPoint::X(x) = *gp else {
                    unreachable!("mixed grid");
                };
                out.push_str(&format!(
                    "{},{:.12e},{},{}\n",
                    x, tp.value, tp.converged, tp.nodes_used
                ));
            }
        }
        Some(GridPoint::Single) | None => {
            out.push_str("value,converged,nodes\n");
            for tp in &table.points {
                out.push_str(&format!(
                    "{:.12e},{},{}\n",
                    tp.value, tp.converged, tp.nodes_used
                ));
            }
        }
    }
    out
}

#[derive(Serialize)]
struct JsonMetadata {
    scenario: String,
    hash: String,
    units: JsonUnits,
    rel_tol: f64,
    version: String,
}

#[derive(Serialize)]
struct JsonUnits {
    angles: &'static str,
    lengths: &'static str,
    value: &'static str,
}

#[derive(Serialize)]
struct JsonPoint {
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b0_a0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_perp_a0: Option<f64>,
    value: f64,
    converged: bool,
    nodes: u64,
}

#[derive(Serialize)]
struct JsonTable {
    metadata: JsonMetadata,
    points: Vec<JsonPoint>,
}

pub fn render_json(cfg: &ScenarioConfig, table: &AngularTable) -> String {
    let grid = cfg.grid.points();
    debug_assert_eq!(grid.len(), table.points.len());
    let x_name = x_column(table);
    let points = grid
        .iter()
        .zip(&table.points)
        .map(|(gp, tp)| {
            let mut p = JsonPoint {
                theta_deg: None,
                phi_deg: None,
                b0_a0: None,
                r_perp_a0: None,
                value: tp.value,
                converged: tp.converged,
                nodes: tp.nodes_used,
            };
            match *gp {
                GridPoint::Angles { theta_deg, phi_deg } => {
                    p.theta_deg = Some(theta_deg);
                    p.phi_deg = Some(phi_deg);
                }
                GridPoint::X(x) => {
                    if x_name == "r_perp_a0" {
                        p.r_perp_a0 = Some(x);
                    } else {
                        p.b0_a0 = Some(x);
                    }
                }
                GridPoint::Single => {}
            }
            p
        })
        .collect();
    let doc = JsonTable {
        metadata: JsonMetadata {
            scenario: cfg.scenario.clone(),
            hash: scenario_hash(cfg),
            units: JsonUnits {
                angles: "deg",
                lengths: "a0",
                value: table.value_kind.label(),
            },
            rel_tol: cfg.budget.rel_tol,
            version: version_line(),
        },
        points,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
    text.push('\n');
    text
}

pub fn render(cfg: &ScenarioConfig, table: &AngularTable) -> String {
    match cfg.format {
        crate::config::OutputFormat::Csv => render_csv(cfg, table),
        crate::config::OutputFormat::Json => render_json(cfg, table),
    }
}

/// Render and write the table, creating parent directories as needed.
pub fn write_table(cfg: &ScenarioConfig, table: &AngularTable) -> Result<PathBuf, CliError> {
    let path = cfg.output_path.clone();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::io(format!("creating {}: {e}", parent.display())))?;
        }
    }
    fs::write(&path, render(cfg, table))
        .map_err(|e| CliError::io(format!("writing {}: {e}", path.display())))?;
    Ok(path)
}
