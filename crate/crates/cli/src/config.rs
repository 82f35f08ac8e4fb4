//! Scenario configs: a flat key = value text format with dotted section
//! keys and unit suffixes, e.g. `beam.kappa0 = 0.1746 /a0`. The parser
//! resolves everything to atomic units and validates the combination of
//! observable, target, and method up front, so a config that loads will
//! also run.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use vortex_born::beams::{BeamSpec, SuperpositionSpec};
use vortex_born::potentials::PotentialSpec;
use vortex_born::quadrature::QuadratureBudget;
use vortex_born::scattering::ValueKind;
use vortex_born::units;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Events,
    Dcs,
    RatioR,
    Asymmetry,
    Density,
    Total,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::Events => "events",
            Observable::Dcs => "dcs",
            Observable::RatioR => "ratio_r",
            Observable::Asymmetry => "asymmetry",
            Observable::Density => "density",
            Observable::Total => "total",
        }
    }

    pub fn value_kind(self) -> ValueKind {
        match self {
            Observable::Events => ValueKind::EventsPerSr,
            Observable::Dcs => ValueKind::DcsPerSr,
            Observable::RatioR => ValueKind::Ratio,
            Observable::Asymmetry => ValueKind::Asymmetry,
            Observable::Density => ValueKind::Density,
            Observable::Total => ValueKind::TotalCrossSection,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    General,
    Wide,
    Closed,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::General => "general",
            Method::Wide => "wide",
            Method::Closed => "closed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetConfig {
    Single { b: f64, phi_b_deg: f64 },
    Meso { b0: f64, phi_b0_deg: f64, sigma_b: f64 },
    Macro,
}

/// Evaluation grid, in interface units (degrees, Bohr radii).
#[derive(Debug, Clone, PartialEq)]
pub enum GridConfig {
    Angular {
        theta_min_deg: f64,
        theta_max_deg: f64,
        theta_steps: usize,
        phi_min_deg: f64,
        phi_max_deg: f64,
        phi_steps: usize,
    },
    /// One-dimensional scan over the observable's natural length
    /// coordinate: cloud offset b0 or transverse radius r_perp.
    Scan { x_min: f64, x_max: f64, x_steps: usize },
    /// Single evaluation with no coordinate (totals).
    Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }

    pub fn extension(self) -> &'static str {
        self.name()
    }
}

/// A fully resolved scenario: every quantity in atomic units (angles kept
/// in degrees, converted at the evaluation boundary), every spec already
/// constructed and validated.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub beam: BeamSpec,
    pub potential: Option<PotentialSpec>,
    pub target: TargetConfig,
    pub superposition: Option<SuperpositionSpec>,
    pub grid: GridConfig,
    /// Detector direction for 1-D scans, (theta, phi) in degrees.
    pub direction_deg: (f64, f64),
    pub observable: Observable,
    pub method: Method,
    pub budget: QuadratureBudget,
    pub output_path: PathBuf,
    pub format: OutputFormat,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::config(msg)
}

struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
    source: String,
}

impl RawConfig {
    fn parse(text: &str, source: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(config_err(format!(
                    "{source}:{line_no}: expected 'key = value', got '{line}'"
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if value.is_empty() {
                return Err(config_err(format!("{source}:{line_no}: {key}: empty value")));
            }
            if let Some((_, first)) = entries.insert(key.clone(), (value, line_no)) {
                return Err(config_err(format!(
                    "{source}:{line_no}: {key}: duplicate key (first set on line {first})"
                )));
            }
        }
        Ok(RawConfig {
            entries,
            source: source.to_string(),
        })
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn fail(&self, key: &str, line: usize, msg: &str) -> CliError {
        config_err(format!("{}:{line}: {key}: {msg}", self.source))
    }

    fn missing(&self, key: &str) -> CliError {
        config_err(format!(
            "{}: missing required field '{key}'",
            self.source
        ))
    }
}

/// One number plus an optional unit token.
fn split_quantity(value: &str) -> (&str, Option<&str>) {
    match value.split_once(char::is_whitespace) {
        Some((num, unit)) => (num.trim(), Some(unit.trim())),
        None => (value, None),
    }
}

enum Dimension {
    /// 1/a0 native; accepts /a0, /nm, and keV (kinetic energy of an electron).
    Momentum,
    /// a0 native; accepts a0 and nm.
    Length,
    /// degrees native; accepts deg and rad.
    Angle,
    Bare,
}

fn convert(num: f64, unit: Option<&str>, dim: &Dimension) -> Result<f64, String> {
    match dim {
        Dimension::Momentum => match unit {
            None | Some("/a0") => Ok(num),
            Some("/nm") => Ok(units::inverse_nm_to_inverse_a0(num)),
            Some("keV") => Ok(units::momentum_from_kinetic_kev(num)),
            Some(u) => Err(format!("unknown momentum unit '{u}' (use /a0, /nm, or keV)")),
        },
        Dimension::Length => match unit {
            None | Some("a0") => Ok(num),
            Some("nm") => Ok(units::nm_to_a0(num)),
            Some(u) => Err(format!("unknown length unit '{u}' (use a0 or nm)")),
        },
        Dimension::Angle => match unit {
            None | Some("deg") => Ok(num),
            Some("rad") => Ok(num.to_degrees()),
            Some(u) => Err(format!("unknown angle unit '{u}' (use deg or rad)")),
        },
        Dimension::Bare => match unit {
            None => Ok(num),
            Some(u) => Err(format!("unexpected unit '{u}' on a dimensionless value")),
        },
    }
}

impl ScenarioConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".to_string());
        let mut cfg = Self::from_text(&text, &path.display().to_string(), &stem)?;
        // Relative output paths land next to the config file, so a preset
        // directory stays self-contained wherever it is run from.
        if cfg.output_path.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.output_path = dir.join(&cfg.output_path);
            }
        }
        Ok(cfg)
    }

    pub fn from_text(text: &str, source: &str, default_name: &str) -> Result<Self, CliError> {
        let mut raw = RawConfig::parse(text, source)?;

        let quantity = |raw: &mut RawConfig, key: &str, dim: Dimension| -> Result<Option<f64>, CliError> {
            let Some((value, line)) = raw.take(key) else {
                return Ok(None);
            };
            let (num, unit) = split_quantity(&value);
            let parsed: f64 = num
                .parse()
                .map_err(|_| raw.fail(key, line, &format!("not a number: '{num}'")))?;
            convert(parsed, unit, &dim)
                .map(Some)
                .map_err(|msg| raw.fail(key, line, &msg))
        };
        let require = |v: Option<f64>, raw: &RawConfig, key: &str| -> Result<f64, CliError> {
            v.ok_or_else(|| raw.missing(key))
        };

        let scenario = match raw.take("scenario") {
            Some((name, _)) => name,
            None => default_name.to_string(),
        };

        let observable = match raw.take("observable") {
            Some((v, line)) => match v.as_str() {
                "events" => Observable::Events,
                "dcs" => Observable::Dcs,
                "ratio_r" => Observable::RatioR,
                "asymmetry" => Observable::Asymmetry,
                "density" => Observable::Density,
                "total" => Observable::Total,
                other => {
                    return Err(raw.fail(
                        "observable",
                        line,
                        &format!("unknown observable '{other}' (events, dcs, ratio_r, asymmetry, density, total)"),
                    ))
                }
            },
            None => return Err(raw.missing("observable")),
        };

        let method = match raw.take("method") {
            Some((v, line)) => match v.as_str() {
                "auto" => Method::Auto,
                "general" => Method::General,
                "wide" => Method::Wide,
                "closed" => Method::Closed,
                other => {
                    return Err(raw.fail(
                        "method",
                        line,
                        &format!("unknown method '{other}' (auto, general, wide, closed)"),
                    ))
                }
            },
            None => Method::Auto,
        };

        // Beam.
        let kappa0 = require(quantity(&mut raw, "beam.kappa0", Dimension::Momentum)?, &raw, "beam.kappa0")?;
        let sigma_kappa = require(
            quantity(&mut raw, "beam.sigma_kappa", Dimension::Momentum)?,
            &raw,
            "beam.sigma_kappa",
        )?;
        let p_i = require(quantity(&mut raw, "beam.p_i", Dimension::Momentum)?, &raw, "beam.p_i")?;
        let m = match quantity(&mut raw, "beam.m", Dimension::Bare)? {
            Some(v) => {
                if v.fract() != 0.0 || v.abs() > i32::MAX as f64 {
                    return Err(config_err(format!("{source}: beam.m: must be an integer, got {v}")));
                }
                v as i32
            }
            None => 0,
        };
        let n_electrons = quantity(&mut raw, "beam.n_electrons", Dimension::Bare)?.unwrap_or(1.0);
        let beam = BeamSpec::new(kappa0, sigma_kappa, p_i, m)
            .and_then(|b| b.with_electrons(n_electrons))
            .map_err(|e| config_err(format!("{source}: beam: {e}")))?;

        // Potential.
        let potential = match raw.take("potential.kind") {
            Some((kind, line)) => match kind.as_str() {
                "yukawa" => {
                    let v0 = require(quantity(&mut raw, "potential.v0", Dimension::Bare)?, &raw, "potential.v0")?;
                    let mu = require(
                        quantity(&mut raw, "potential.mu", Dimension::Momentum)?,
                        &raw,
                        "potential.mu",
                    )?;
                    Some(
                        PotentialSpec::yukawa(v0, mu)
                            .map_err(|e| config_err(format!("{source}: potential: {e}")))?,
                    )
                }
                "hydrogen" => {
                    let a0 = quantity(&mut raw, "potential.a0", Dimension::Length)?.unwrap_or(1.0);
                    Some(
                        PotentialSpec::hydrogen(a0)
                            .map_err(|e| config_err(format!("{source}: potential: {e}")))?,
                    )
                }
                other => {
                    return Err(raw.fail(
                        "potential.kind",
                        line,
                        &format!("unknown potential '{other}' (yukawa, hydrogen)"),
                    ))
                }
            },
            None => None,
        };

        // Target.
        let target = match raw.take("target.kind") {
            Some((kind, line)) => match kind.as_str() {
                "single" => {
                    let b = require(quantity(&mut raw, "target.b", Dimension::Length)?, &raw, "target.b")?;
                    let phi_b_deg = quantity(&mut raw, "target.phi_b", Dimension::Angle)?.unwrap_or(0.0);
                    TargetConfig::Single { b, phi_b_deg }
                }
                "meso" => {
                    let b0 = quantity(&mut raw, "target.b0", Dimension::Length)?.unwrap_or(0.0);
                    let phi_b0_deg = quantity(&mut raw, "target.phi_b0", Dimension::Angle)?.unwrap_or(0.0);
                    let sigma_b = require(
                        quantity(&mut raw, "target.sigma_b", Dimension::Length)?,
                        &raw,
                        "target.sigma_b",
                    )?;
                    TargetConfig::Meso { b0, phi_b0_deg, sigma_b }
                }
                "macro" => TargetConfig::Macro,
                other => {
                    return Err(raw.fail(
                        "target.kind",
                        line,
                        &format!("unknown target '{other}' (single, meso, macro)"),
                    ))
                }
            },
            None => TargetConfig::Macro,
        };

        // Superposition.
        let superposition = if raw.entries.keys().any(|k| k.starts_with("superposition.")) {
            let m1 = require(quantity(&mut raw, "superposition.m1", Dimension::Bare)?, &raw, "superposition.m1")?;
            let m2 = require(quantity(&mut raw, "superposition.m2", Dimension::Bare)?, &raw, "superposition.m2")?;
            let c1 = require(quantity(&mut raw, "superposition.c1", Dimension::Bare)?, &raw, "superposition.c1")?;
            let c2 = require(quantity(&mut raw, "superposition.c2", Dimension::Bare)?, &raw, "superposition.c2")?;
            let alpha1 = quantity(&mut raw, "superposition.alpha1", Dimension::Angle)?.unwrap_or(0.0);
            let alpha2 = quantity(&mut raw, "superposition.alpha2", Dimension::Angle)?.unwrap_or(0.0);
            if m1.fract() != 0.0 || m2.fract() != 0.0 {
                return Err(config_err(format!(
                    "{source}: superposition.m1/m2: windings must be integers"
                )));
            }
            Some(
                SuperpositionSpec::new(
                    beam,
                    m1 as i32,
                    m2 as i32,
                    c1,
                    c2,
                    alpha1.to_radians(),
                    alpha2.to_radians(),
                )
                .map_err(|e| config_err(format!("{source}: superposition: {e}")))?,
            )
        } else {
            None
        };

        // Grid.
        let theta_steps = quantity(&mut raw, "grid.theta_steps", Dimension::Bare)?;
        let x_steps = quantity(&mut raw, "grid.x_steps", Dimension::Bare)?;
        let grid = if let Some(xs) = x_steps {
            if theta_steps.is_some() {
                return Err(config_err(format!(
                    "{source}: grid: give either an angular grid (grid.theta_*) or a scan (grid.x_*), not both"
                )));
            }
            let x_min = quantity(&mut raw, "grid.x_min", Dimension::Length)?.unwrap_or(0.0);
            let x_max = require(quantity(&mut raw, "grid.x_max", Dimension::Length)?, &raw, "grid.x_max")?;
            let x_steps = check_steps(xs, source, "grid.x_steps")?;
            GridConfig::Scan { x_min, x_max, x_steps }
        } else if let Some(ts) = theta_steps {
            let theta_min_deg = quantity(&mut raw, "grid.theta_min", Dimension::Angle)?.unwrap_or(0.0);
            let theta_max_deg =
                quantity(&mut raw, "grid.theta_max", Dimension::Angle)?.unwrap_or(theta_min_deg);
            let theta_steps = check_steps(ts, source, "grid.theta_steps")?;
            let phi_min_deg = quantity(&mut raw, "grid.phi_min", Dimension::Angle)?.unwrap_or(0.0);
            let phi_max_deg = quantity(&mut raw, "grid.phi_max", Dimension::Angle)?.unwrap_or(phi_min_deg);
            let phi_steps = match quantity(&mut raw, "grid.phi_steps", Dimension::Bare)? {
                Some(ps) => check_steps(ps, source, "grid.phi_steps")?,
                None => 1,
            };
            GridConfig::Angular {
                theta_min_deg,
                theta_max_deg,
                theta_steps,
                phi_min_deg,
                phi_max_deg,
                phi_steps,
            }
        } else if observable == Observable::Total {
            GridConfig::Point
        } else {
            return Err(raw.missing(match observable {
                Observable::RatioR | Observable::Density => "grid.x_steps",
                _ => "grid.theta_steps",
            }));
        };

        // Fixed detector direction, used by scans that have no angular grid.
        let dir_theta = quantity(&mut raw, "direction.theta", Dimension::Angle)?;
        let dir_phi = quantity(&mut raw, "direction.phi", Dimension::Angle)?;
        if (dir_theta.is_some() || dir_phi.is_some()) && !matches!(grid, GridConfig::Scan { .. }) {
            return Err(config_err(format!(
                "{source}: direction.*: fixes the detector for grid.x_* scans; angular grids set it per point"
            )));
        }
        let direction_deg = (dir_theta.unwrap_or(0.0), dir_phi.unwrap_or(0.0));
        if !(0.0..=180.0).contains(&direction_deg.0) {
            return Err(config_err(format!(
                "{source}: direction.theta: must lie in [0, 180] degrees, got {}",
                direction_deg.0
            )));
        }

        // Budget.
        let rel_tol = quantity(&mut raw, "budget.rel_tol", Dimension::Bare)?.unwrap_or(1e-6);
        let abs_tol = quantity(&mut raw, "budget.abs_tol", Dimension::Bare)?;
        let max_nodes = quantity(&mut raw, "budget.max_nodes", Dimension::Bare)?;
        let mut budget = QuadratureBudget::with_rel_tol(rel_tol);
        if let Some(a) = abs_tol {
            budget.abs_tol = a;
        }
        if let Some(n) = max_nodes {
            if n.fract() != 0.0 || n < 1.0 {
                return Err(config_err(format!(
                    "{source}: budget.max_nodes: must be a positive integer, got {n}"
                )));
            }
            budget.max_nodes = n as u64;
        }
        budget
            .validate()
            .map_err(|e| config_err(format!("{source}: budget: {e}")))?;

        // Output.
        let format = match raw.take("output.format") {
            Some((v, line)) => match v.as_str() {
                "csv" => OutputFormat::Csv,
                "json" => OutputFormat::Json,
                other => {
                    return Err(raw.fail(
                        "output.format",
                        line,
                        &format!("unknown format '{other}' (csv, json)"),
                    ))
                }
            },
            None => OutputFormat::Csv,
        };
        let output_path = match raw.take("output.path") {
            Some((p, _)) => PathBuf::from(p),
            None => PathBuf::from(format!("{scenario}.{}", format.extension())),
        };

        if let Some((key, (_, line))) = raw.entries.iter().next() {
            return Err(config_err(format!("{source}:{line}: unknown key '{key}'")));
        }

        let cfg = ScenarioConfig {
            scenario,
            beam,
            potential,
            target,
            superposition,
            grid,
            direction_deg,
            observable,
            method,
            budget,
            output_path,
            format,
        };
        cfg.validate_combination(source)?;
        Ok(cfg)
    }

    /// The observable/target/method lattice. Anything that passes here has
    /// an evaluation path in the runner.
    fn validate_combination(&self, source: &str) -> Result<(), CliError> {
        let fail = |msg: String| Err(config_err(format!("{source}: {msg}")));
        let need_potential = !matches!(self.observable, Observable::RatioR | Observable::Density);
        if need_potential && self.potential.is_none() {
            return fail(format!(
                "missing required field 'potential.kind' (observable={} scatters off a potential)",
                self.observable.name()
            ));
        }
        if self.superposition.is_some()
            && !matches!(self.observable, Observable::Asymmetry | Observable::Dcs)
        {
            return fail(format!(
                "superposition section is only used by observable=asymmetry or observable=dcs, not {}",
                self.observable.name()
            ));
        }
        match self.observable {
            Observable::Events => {
                if matches!(self.target, TargetConfig::Macro) {
                    return fail("observable=events needs target.kind single or meso (use dcs for macroscopic targets)".into());
                }
                if !matches!(self.method, Method::Auto | Method::General | Method::Wide) {
                    return fail(format!(
                        "method={} has no closed form for events; use auto, general, or wide",
                        self.method.name()
                    ));
                }
            }
            Observable::Dcs => match self.target {
                TargetConfig::Single { .. } => {
                    if self.superposition.is_some() {
                        return fail("superposition dcs is macroscopic; set target.kind = macro".into());
                    }
                    if !matches!(self.method, Method::Auto | Method::General | Method::Wide) {
                        return fail("dcs for a single potential supports method auto, general, or wide".into());
                    }
                }
                TargetConfig::Meso { .. } => {
                    return fail("dcs is not defined for mesoscopic targets; use observable=events".into());
                }
                TargetConfig::Macro => {
                    if self.superposition.is_some() && !matches!(self.method, Method::Auto | Method::Closed) {
                        return fail("superposition dcs exists in the wide-packet closed form only (method auto or closed)".into());
                    }
                }
            },
            Observable::RatioR => {
                if !matches!(self.target, TargetConfig::Meso { .. }) {
                    return fail("ratio_r needs target.kind = meso".into());
                }
                if self.method != Method::Auto {
                    return fail("ratio_r has a single evaluation path; use method = auto".into());
                }
                if !matches!(self.grid, GridConfig::Scan { .. }) {
                    return fail("ratio_r scans the cloud offset; give grid.x_* keys".into());
                }
            }
            Observable::Asymmetry => {
                if self.superposition.is_none() {
                    return fail("missing required field 'superposition.m1' (asymmetry needs a superposition section)".into());
                }
                if !matches!(self.method, Method::Auto | Method::Closed) {
                    return fail("asymmetry exists in the wide-packet closed form only (method auto or closed)".into());
                }
                if !matches!(self.grid, GridConfig::Angular { .. }) {
                    return fail("asymmetry scans the polar angle; give grid.theta_* keys".into());
                }
            }
            Observable::Density => {
                if self.method != Method::Auto {
                    return fail("density has a single evaluation path; use method = auto".into());
                }
                if !matches!(self.grid, GridConfig::Scan { .. }) {
                    return fail("density scans the transverse radius; give grid.x_* keys".into());
                }
            }
            Observable::Total => {
                if !matches!(self.target, TargetConfig::Macro) {
                    return fail("total is the macroscopic angle-integrated cross section; set target.kind = macro".into());
                }
                if !matches!(self.method, Method::Auto | Method::Closed) {
                    return fail("total integrates the closed form; use method auto or closed".into());
                }
            }
        }
        if matches!(self.grid, GridConfig::Scan { .. })
            && !matches!(
                self.observable,
                Observable::RatioR | Observable::Density | Observable::Events
            )
        {
            return fail(format!(
                "grid.x_* scans apply to ratio_r, density, or mesoscopic events, not {}",
                self.observable.name()
            ));
        }
        if matches!(self.grid, GridConfig::Scan { .. })
            && self.observable == Observable::Events
            && !matches!(self.target, TargetConfig::Meso { .. })
        {
            return fail("an events scan over offset needs target.kind = meso".into());
        }
        if let GridConfig::Angular {
            theta_min_deg,
            theta_max_deg,
            ..
        } = self.grid
        {
            if !(0.0..=180.0).contains(&theta_min_deg) || !(0.0..=180.0).contains(&theta_max_deg) {
                return fail("grid.theta_min/theta_max must lie in [0, 180] degrees".into());
            }
        }
        if let GridConfig::Scan { x_min, x_max, .. } = self.grid {
            if x_min < 0.0 || x_max < x_min {
                return fail("grid.x_min/x_max must satisfy 0 <= x_min <= x_max".into());
            }
        }
        Ok(())
    }

    /// Canonical text rendering in atomic units. Parsing it back yields an
    /// equivalent scenario; the output hash is computed over these bytes.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario = {}", self.scenario);
        let _ = writeln!(s, "observable = {}", self.observable.name());
        let _ = writeln!(s, "method = {}", self.method.name());
        let _ = writeln!(s, "beam.kappa0 = {} /a0", self.beam.kappa0());
        let _ = writeln!(s, "beam.sigma_kappa = {} /a0", self.beam.sigma_kappa());
        let _ = writeln!(s, "beam.p_i = {} /a0", self.beam.p_i());
        let _ = writeln!(s, "beam.m = {}", self.beam.m());
        if self.beam.n_electrons() != 1.0 {
            let _ = writeln!(s, "beam.n_electrons = {}", self.beam.n_electrons());
        }
        if let Some(pot) = &self.potential {
            match pot {
                PotentialSpec::Yukawa { v0, mu } => {
                    let _ = writeln!(s, "potential.kind = yukawa");
                    let _ = writeln!(s, "potential.v0 = {v0}");
                    let _ = writeln!(s, "potential.mu = {mu} /a0");
                }
                PotentialSpec::Hydrogen1s { a0 } => {
                    let _ = writeln!(s, "potential.kind = hydrogen");
                    let _ = writeln!(s, "potential.a0 = {a0} a0");
                }
            }
        }
        match self.target {
            TargetConfig::Single { b, phi_b_deg } => {
                let _ = writeln!(s, "target.kind = single");
                let _ = writeln!(s, "target.b = {b} a0");
                if phi_b_deg != 0.0 {
                    let _ = writeln!(s, "target.phi_b = {phi_b_deg} deg");
                }
            }
            TargetConfig::Meso { b0, phi_b0_deg, sigma_b } => {
                let _ = writeln!(s, "target.kind = meso");
                let _ = writeln!(s, "target.b0 = {b0} a0");
                if phi_b0_deg != 0.0 {
                    let _ = writeln!(s, "target.phi_b0 = {phi_b0_deg} deg");
                }
                let _ = writeln!(s, "target.sigma_b = {sigma_b} a0");
            }
            TargetConfig::Macro => {
                let _ = writeln!(s, "target.kind = macro");
            }
        }
        if let Some(sup) = &self.superposition {
            let _ = writeln!(s, "superposition.m1 = {}", sup.m1());
            let _ = writeln!(s, "superposition.m2 = {}", sup.m2());
            let _ = writeln!(s, "superposition.c1 = {}", sup.c1_abs());
            let _ = writeln!(s, "superposition.c2 = {}", sup.c2_abs());
            // Only the phase difference is physical; canonical form puts
            // it all on the second component.
            let _ = writeln!(s, "superposition.alpha2 = {} deg", sup.delta_alpha().to_degrees());
        }
        match self.grid {
            GridConfig::Angular {
                theta_min_deg,
                theta_max_deg,
                theta_steps,
                phi_min_deg,
                phi_max_deg,
                phi_steps,
            } => {
                let _ = writeln!(s, "grid.theta_min = {theta_min_deg} deg");
                let _ = writeln!(s, "grid.theta_max = {theta_max_deg} deg");
                let _ = writeln!(s, "grid.theta_steps = {theta_steps}");
                if phi_steps > 1 || phi_min_deg != 0.0 {
                    let _ = writeln!(s, "grid.phi_min = {phi_min_deg} deg");
                    let _ = writeln!(s, "grid.phi_max = {phi_max_deg} deg");
                    let _ = writeln!(s, "grid.phi_steps = {phi_steps}");
                }
            }
            GridConfig::Scan { x_min, x_max, x_steps } => {
                let _ = writeln!(s, "grid.x_min = {x_min} a0");
                let _ = writeln!(s, "grid.x_max = {x_max} a0");
                let _ = writeln!(s, "grid.x_steps = {x_steps}");
                if self.direction_deg != (0.0, 0.0) {
                    let _ = writeln!(s, "direction.theta = {} deg", self.direction_deg.0);
                    let _ = writeln!(s, "direction.phi = {} deg", self.direction_deg.1);
                }
            }
            GridConfig::Point => {}
        }
        let _ = writeln!(s, "budget.rel_tol = {}", self.budget.rel_tol);
        let _ = writeln!(s, "budget.abs_tol = {}", self.budget.abs_tol);
        let _ = writeln!(s, "budget.max_nodes = {}", self.budget.max_nodes);
        let _ = writeln!(
            s,
            "output.path = {}",
            self.output_path.file_name().map_or_else(
                || self.output_path.display().to_string(),
                |f| f.to_string_lossy().into_owned()
            )
        );
        let _ = writeln!(s, "output.format = {}", self.format.name());
        s
    }
}

/// One abscissa of the evaluation loop, in interface units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridPoint {
    Angles { theta_deg: f64, phi_deg: f64 },
    X(f64),
    Single,
}

fn linspace(min: f64, max: f64, steps: usize, j: usize) -> f64 {
    if steps <= 1 {
        min
    } else {
        min + (max - min) * j as f64 / (steps - 1) as f64
    }
}

impl GridConfig {
    pub fn len(&self) -> usize {
        match *self {
            GridConfig::Angular {
                theta_steps,
                phi_steps,
                ..
            } => theta_steps * phi_steps,
            GridConfig::Scan { x_steps, .. } => x_steps,
            GridConfig::Point => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Evaluation order: theta outer, phi inner for angular grids.
    pub fn points(&self) -> Vec<GridPoint> {
        match *self {
            GridConfig::Angular {
                theta_min_deg,
                theta_max_deg,
                theta_steps,
                phi_min_deg,
                phi_max_deg,
                phi_steps,
            } => {
                let mut pts = Vec::with_capacity(theta_steps * phi_steps);
                for i in 0..theta_steps {
                    let theta_deg = linspace(theta_min_deg, theta_max_deg, theta_steps, i);
                    for j in 0..phi_steps {
                        let phi_deg = linspace(phi_min_deg, phi_max_deg, phi_steps, j);
                        pts.push(GridPoint::Angles { theta_deg, phi_deg });
                    }
                }
                pts
            }
            GridConfig::Scan { x_min, x_max, x_steps } => (0..x_steps)
                .map(|j| GridPoint::X(linspace(x_min, x_max, x_steps, j)))
                .collect(),
            GridConfig::Point => vec![GridPoint::Single],
        }
    }
}

fn check_steps(v: f64, source: &str, key: &str) -> Result<usize, CliError> {
    if v.fract() != 0.0 || !(1.0..=1e6).contains(&v) {
        return Err(config_err(format!(
            "{source}: {key}: must be an integer in [1, 1000000], got {v}"
        )));
    }
    Ok(v as usize)
}
