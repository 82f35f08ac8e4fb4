//! Scenario evaluation: each grid point is dispatched to the physics path
//! the config lattice promised exists, in parallel, in grid order.

use std::path::PathBuf;

use rayon::prelude::*;

use vortex_born::scattering::{
    asymmetry_a, cross_section_single, dcs_macroscopic, dcs_macroscopic_closed,
    dcs_macroscopic_general, dcs_macroscopic_wide, dcs_superposition, events_large_target,
    events_mesoscopic, events_single, events_single_wide, ratio_r, total_macroscopic,
    AngularTable, Coord, Direction, MesoTarget, SingleTarget,
};
use vortex_born::{Error, Eval};

use crate::config::{GridPoint, Method, Observable, ScenarioConfig, TargetConfig};
use crate::{output, CliError};

/// What a finished scenario leaves behind.
pub struct RunReport {
    pub table: AngularTable,
    pub path: PathBuf,
    pub all_converged: bool,
}

/// Targets built once so construction errors surface before any point is
/// evaluated.
struct Resolved {
    single: Option<SingleTarget>,
    meso: Option<MesoTarget>,
    /// Detector direction for 1-D scans.
    fixed_dir: Direction,
}

impl Resolved {
    fn build(cfg: &ScenarioConfig) -> Result<Self, CliError> {
        let ctx = |e: Error| CliError::config(format!("{}: {e}", cfg.scenario));
        let (single, meso) = match cfg.target {
            TargetConfig::Single { b, phi_b_deg } => (
                Some(SingleTarget::new(b, phi_b_deg.to_radians()).map_err(ctx)?),
                None,
            ),
            TargetConfig::Meso {
                b0,
                phi_b0_deg,
                sigma_b,
            } => (
                None,
                Some(MesoTarget::new(b0, phi_b0_deg.to_radians(), sigma_b).map_err(ctx)?),
            ),
            TargetConfig::Macro => (None, None),
        };
        let fixed_dir =
            Direction::from_degrees(cfg.direction_deg.0, cfg.direction_deg.1).map_err(ctx)?;
        Ok(Resolved {
            single,
            meso,
            fixed_dir,
        })
    }
}

/// Mesoscopic event paths. The quadrature path resolves the interference
/// of individual packet rings with the cloud and its cost grows with
/// sigma_b; once the cloud is wide against the packet coherence scale
/// (sigma_b * sigma_kappa of order one) that interference is washed out
/// and the local-density path is both accurate and far cheaper.
fn meso_events(
    cfg: &ScenarioConfig,
    target: &MesoTarget,
    dir: Direction,
) -> Result<Eval, Error> {
    let beam = &cfg.beam;
    let pot = cfg.potential.as_ref().expect("lattice requires a potential");
    let quadrature = match cfg.method {
        Method::General => true,
        Method::Wide => false,
        _ => target.sigma_b() * beam.sigma_kappa() < 1.0,
    };
    if quadrature {
        events_mesoscopic(beam, pot, target, dir, &cfg.budget)
    } else {
        events_large_target(beam, pot, target, dir, &cfg.budget)
    }
}

fn eval_point(cfg: &ScenarioConfig, res: &Resolved, gp: GridPoint) -> Result<(Coord, Eval), Error> {
    let beam = &cfg.beam;
    let budget = &cfg.budget;
    let pot = cfg.potential.as_ref();

    let (coord, dir) = match gp {
        GridPoint::Angles { theta_deg, phi_deg } => {
            let dir = Direction::from_degrees(theta_deg, phi_deg)?;
            (
                Coord::Angles {
                    theta: dir.theta(),
                    phi: dir.phi(),
                },
                dir,
            )
        }
        GridPoint::X(x) => {
            let coord = if cfg.observable == Observable::Density {
                Coord::Radius(x)
            } else {
                Coord::Impact(x)
            };
            (coord, res.fixed_dir)
        }
        GridPoint::Single => (
            Coord::Angles { theta: 0.0, phi: 0.0 },
            Direction::forward(),
        ),
    };

    let eval = match cfg.observable {
        Observable::Events => {
            if let Some(single) = &res.single {
                let pot = pot.expect("lattice requires a potential");
                match cfg.method {
                    Method::Wide => events_single_wide(beam, pot, single, dir)?,
                    _ => events_single(beam, pot, single, dir, budget)?,
                }
            } else {
                let base = res.meso.expect("lattice requires a meso target");
                let target = match gp {
                    GridPoint::X(x) => MesoTarget::new(x, base.phi_b0(), base.sigma_b())?,
                    _ => base,
                };
                meso_events(cfg, &target, dir)?
            }
        }
        Observable::Dcs => {
            if let Some(sup) = &cfg.superposition {
                dcs_superposition(sup, pot.expect("lattice requires a potential"), dir, budget)?
            } else if let Some(single) = &res.single {
                let pot = pot.expect("lattice requires a potential");
                match cfg.method {
                    Method::Wide => {
                        let ev = events_single_wide(beam, pot, single, dir)?;
                        let lum = beam.luminosity(budget)?;
                        Eval {
                            value: ev.value / lum.value,
                            nodes_used: ev.nodes_used + lum.nodes_used,
                            converged: ev.converged && lum.converged,
                        }
                    }
                    _ => cross_section_single(beam, pot, single, dir, budget)?,
                }
            } else {
                let pot = pot.expect("lattice requires a potential");
                match cfg.method {
                    Method::Auto => dcs_macroscopic(beam, pot, dir, budget)?,
                    Method::General => dcs_macroscopic_general(beam, pot, dir, budget)?,
                    Method::Wide => dcs_macroscopic_wide(beam, pot, dir, budget)?,
                    Method::Closed => dcs_macroscopic_closed(beam, pot, dir)?,
                }
            }
        }
        Observable::RatioR => {
            let base = res.meso.expect("lattice requires a meso target");
            let GridPoint::X(x) = gp else {
                unreachable!("lattice requires a scan grid");
            };
            let target = MesoTarget::new(x, base.phi_b0(), base.sigma_b())?;
            ratio_r(beam, &target, budget)?
        }
        Observable::Asymmetry => {
            let sup = cfg
                .superposition
                .as_ref()
                .expect("lattice requires a superposition");
            asymmetry_a(
                sup,
                pot.expect("lattice requires a potential"),
                dir.theta(),
                budget,
            )?
        }
        Observable::Density => {
            let GridPoint::X(x) = gp else {
                unreachable!("lattice requires a scan grid");
            };
            beam.density(x, budget)?
        }
        Observable::Total => {
            total_macroscopic(beam, pot.expect("lattice requires a potential"), budget)?
        }
    };
    Ok((coord, eval))
}

/// Run a closure on the global pool, or on a dedicated pool of the given
/// width when a job count was requested.
fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::config(format!("jobs: {e}"))),
    }
}

/// Evaluate the whole grid and write the table. The point order in the
/// output is the grid order regardless of how many threads ran.
pub fn run_scenario(cfg: &ScenarioConfig, jobs: Option<usize>) -> Result<RunReport, CliError> {
    let resolved = Resolved::build(cfg)?;
    let grid = cfg.grid.points();
    let evals: Result<Vec<(Coord, Eval)>, Error> = with_pool(jobs, || {
        grid.par_iter()
            .map(|gp| eval_point(cfg, &resolved, *gp))
            .collect()
    })?;
    let evals = evals.map_err(|e| CliError::config(format!("{}: {e}", cfg.scenario)))?;

    let mut table = AngularTable::new(cfg.scenario.clone(), cfg.observable.value_kind());
    for (coord, ev) in evals {
        table.push(coord, ev.value, ev.nodes_used, ev.converged);
    }
    table
        .validate()
        .map_err(|e| CliError::config(format!("{}: produced an invalid table: {e}", cfg.scenario)))?;

    let path = output::write_table(cfg, &table)?;
    let all_converged = table.all_converged();
    Ok(RunReport {
        table,
        path,
        all_converged,
    })
}
