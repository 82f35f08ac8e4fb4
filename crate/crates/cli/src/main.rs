use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vortex_born_cli::config::{OutputFormat, ScenarioConfig};
use vortex_born_cli::{preset, runner, selfcheck, CliError, EXIT_OK, EXIT_UNCONVERGED};

#[derive(Parser)]
#[command(
    name = "vortex-born",
    version,
    about = "Born scattering of twisted electron packets: angular tables, event counts, averaged cross sections"
)]
struct Cli {
    /// Worker threads for grid evaluation (default: all cores)
    #[arg(long, global = true, env = "VORTEX_BORN_JOBS")]
    jobs: Option<usize>,

    /// Override budget.rel_tol of every scenario
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Override output format (csv or json)
    #[arg(long, global = true)]
    format: Option<String>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate scenario configs and write their tables
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
    /// Write the bundled figure configs (fig1..fig6) into a directory
    Preset {
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the built-in oracle battery; exits 0 only if every check passes
    Selfcheck,
}

fn parse_format(s: &str) -> Result<OutputFormat, CliError> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(CliError::config(format!(
            "--format: unknown format '{other}' (csv, json)"
        ))),
    }
}

fn apply_overrides(
    cfg: &mut ScenarioConfig,
    tol: Option<f64>,
    format: Option<OutputFormat>,
) -> Result<(), CliError> {
    if let Some(t) = tol {
        cfg.budget.rel_tol = t;
        cfg.budget
            .validate()
            .map_err(|e| CliError::config(format!("--tol: {e}")))?;
    }
    if let Some(f) = format {
        cfg.format = f;
        cfg.output_path.set_extension(f.extension());
    }
    Ok(())
}

fn run_one(
    path: &Path,
    jobs: Option<usize>,
    tol: Option<f64>,
    format: Option<OutputFormat>,
) -> Result<i32, CliError> {
    let mut cfg = ScenarioConfig::from_file(path)?;
    apply_overrides(&mut cfg, tol, format)?;
    let report = runner::run_scenario(&cfg, jobs)?;
    let points = report.table.points.len();
    if report.all_converged {
        println!("wrote {} ({points} points)", report.path.display());
        Ok(EXIT_OK)
    } else {
        let stale = report
            .table
            .points
            .iter()
            .filter(|p| !p.converged)
            .count();
        println!(
            "wrote {} ({points} points, {stale} unconverged)",
            report.path.display()
        );
        Ok(EXIT_UNCONVERGED)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format.as_deref().map(parse_format).transpose() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };

    let code = match cli.cmd {
        Cmd::Run { configs } => {
            let mut worst = EXIT_OK;
            for path in &configs {
                match run_one(path, cli.jobs, cli.tol, format) {
                    Ok(code) => worst = worst.max(code),
                    Err(e) => {
                        eprintln!("error: {e}");
                        worst = worst.max(e.exit_code());
                    }
                }
            }
            worst
        }
        Cmd::Preset { name, out } => {
            let staged = preset::configs(&name).and_then(|mut cfgs| {
                for cfg in cfgs.iter_mut() {
                    apply_overrides(cfg, cli.tol, format)?;
                }
                preset::write_configs(&out, &cfgs)
            });
            match staged {
                Ok(paths) => {
                    for p in &paths {
                        println!("wrote {}", p.display());
                    }
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Cmd::Selfcheck => selfcheck::run(),
    };
    ExitCode::from(code as u8)
}
