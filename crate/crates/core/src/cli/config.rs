use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use super::CliError;
use crate::correlators::ScenarioKind;
use crate::optimizer::OptimizerConfig;
use crate::protocols::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Sweep,
    Optimize,
    Fidelity,
    Crossing,
    Verify,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.to_possible_value().expect("no skipped variants");
        f.write_str(s.get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Svg,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn svg(self) -> bool {
        matches!(self, OutputFormat::Svg | OutputFormat::Both)
    }
}

/// Test hook: deliberately wrong protocol pieces for mutation checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Bob applies σx instead of σz after a `−1` outcome.
    FlipCorrection,
}

#[derive(Debug, Parser)]
#[command(
    name = "belltide",
    version,
    allow_negative_numbers = true,
    about = "Nonlocality of teleportation and remote state preparation"
)]
pub struct Args {
    pub command: Command,
    /// Scenario kind(s), e.g. rsp-vn-chsh; repeat or comma-separate.
    #[arg(long, value_delimiter = ',')]
    pub scenario: Vec<String>,
    /// Single entanglement angle (radians).
    #[arg(long, conflicts_with_all = ["theta_min", "theta_max", "steps"])]
    pub theta: Option<f64>,
    #[arg(long)]
    pub theta_min: Option<f64>,
    #[arg(long)]
    pub theta_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seeding grid points per dimension.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Crossing level.
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Reduced grids and sample counts.
    #[arg(long)]
    pub quick: bool,
    /// Show angles in degrees in printed reports.
    #[arg(long)]
    pub degrees: bool,
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

/// Fully resolved and validated run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub scenarios: Vec<ScenarioKind>,
    pub theta: Option<f64>,
    pub theta_min: f64,
    pub theta_max: f64,
    pub steps: usize,
    pub optimizer: OptimizerConfig,
    pub quadrature: QuadratureSpec,
    pub level: f64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub quick: bool,
    pub degrees: bool,
    pub fault: Option<Fault>,
}

const KEYS: &[&str] = &[
    "scenario",
    "theta",
    "theta-min",
    "theta-max",
    "steps",
    "restarts",
    "seed",
    "grid",
    "tolerance",
    "max-iterations",
    "level",
    "out",
    "format",
    "quick",
    "degrees",
];

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("line {}: expected key = value", lineno + 1))
        })?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "line {}: unknown key '{key}'",
                lineno + 1
            )));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_file(&text)
}

fn file_value<T: std::str::FromStr>(
    file: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    match file.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("bad value '{v}' for '{key}'"))),
    }
}

fn file_flag(file: &BTreeMap<String, String>, key: &str) -> Result<bool, CliError> {
    match file.get(key).map(|s| s.to_ascii_lowercase()) {
        None => Ok(false),
        Some(v) if v == "true" || v == "1" || v == "yes" => Ok(true),
        Some(v) if v == "false" || v == "0" || v == "no" => Ok(false),
        Some(v) => Err(CliError::Config(format!("bad value '{v}' for '{key}'"))),
    }
}

fn default_scenarios(command: Command) -> Vec<ScenarioKind> {
    match command {
        Command::Sweep => ScenarioKind::CHSH.to_vec(),
        _ => vec![ScenarioKind::RspVnChsh],
    }
}

impl RunConfig {
    /// Flags over config file over defaults.
    pub fn resolve(args: &Args) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };

        let quick = args.quick || file_flag(&file, "quick")?;
        let degrees = args.degrees || file_flag(&file, "degrees")?;

        let names: Vec<String> = if !args.scenario.is_empty() {
            args.scenario.clone()
        } else if let Some(v) = file.get("scenario") {
            v.split(',').map(str::to_string).collect()
        } else {
            Vec::new()
        };
        let mut scenarios = Vec::new();
        for name in names.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
            let kind: ScenarioKind = name
                .parse()
                .map_err(|e: crate::Error| CliError::Config(e.to_string()))?;
            if !scenarios.contains(&kind) {
                scenarios.push(kind);
            }
        }
        if scenarios.is_empty() {
            scenarios = default_scenarios(args.command);
        }

        let mut optimizer = if quick {
            OptimizerConfig::quick()
        } else {
            OptimizerConfig::default()
        };
        if let Some(v) = args.restarts.or(file_value(&file, "restarts")?) {
            optimizer.restarts = v;
        }
        if let Some(v) = args.seed.or(file_value(&file, "seed")?) {
            optimizer.rng_seed = v;
        }
        if let Some(v) = args.grid.or(file_value(&file, "grid")?) {
            optimizer.grid_points_per_dim = v;
        }
        if let Some(v) = args.tolerance.or(file_value(&file, "tolerance")?) {
            optimizer.simplex_tolerance = v;
        }
        if let Some(v) = args.max_iterations.or(file_value(&file, "max-iterations")?) {
            optimizer.max_iterations = v;
        }
        optimizer
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;

        // a range flag on the command line outranks a single theta from the file
        let range_flag =
            args.theta_min.is_some() || args.theta_max.is_some() || args.steps.is_some();
        let theta = match args.theta {
            Some(t) => Some(t),
            None if range_flag => None,
            None => file_value(&file, "theta")?,
        };
        let theta_min = args
            .theta_min
            .or(file_value(&file, "theta-min")?)
            .unwrap_or(0.0);
        let theta_max = args
            .theta_max
            .or(file_value(&file, "theta-max")?)
            .unwrap_or(FRAC_PI_4);
        let default_steps = if quick { 9 } else { 65 };
        let steps = args
            .steps
            .or(file_value(&file, "steps")?)
            .unwrap_or(default_steps);

        let level = args.level.or(file_value(&file, "level")?).unwrap_or(2.0);
        let out = args.out.clone().or(file_value(&file, "out")?);
        let format = match args.format {
            Some(f) => f,
            None => match file.get("format") {
                Some(v) => OutputFormat::from_str(v, true)
                    .map_err(|_| CliError::Config(format!("bad value '{v}' for 'format'")))?,
                None => OutputFormat::default(),
            },
        };

        let quadrature = if quick {
            QuadratureSpec {
                bands: 1000,
                azimuths: 8,
            }
        } else {
            QuadratureSpec::default()
        };

        let cfg = Self {
            command: args.command,
            scenarios,
            theta,
            theta_min,
            theta_max,
            steps,
            optimizer,
            quadrature,
            level,
            out,
            format,
            quick,
            degrees,
            fault: args.inject_fault,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if let Some(t) = self.theta {
            if !(t.is_finite() && (0.0..=FRAC_PI_4 + 1e-12).contains(&t)) {
                return bad(format!("theta {t} outside [0, pi/4]"));
            }
        } else {
            if !(self.theta_min.is_finite() && self.theta_max.is_finite()) {
                return bad("theta range must be finite".into());
            }
            if self.theta_min < 0.0
                || self.theta_max > FRAC_PI_4 + 1e-12
                || self.theta_min >= self.theta_max
            {
                return bad(format!(
                    "need 0 <= theta-min < theta-max <= pi/4, got [{}, {}]",
                    self.theta_min, self.theta_max
                ));
            }
            if self.steps < 2 {
                return bad("steps must be at least 2".into());
            }
        }
        if !self.level.is_finite() {
            return bad("level must be finite".into());
        }
        if self.format.svg() && self.out.is_none() && self.command == Command::Sweep {
            return bad("svg output needs --out".into());
        }
        Ok(())
    }

    /// Angles this run covers: the single `theta` or the inclusive grid.
    pub fn thetas(&self) -> Vec<f64> {
        match self.theta {
            Some(t) => vec![t.min(FRAC_PI_4)],
            None => crate::optimizer::theta_grid(self.theta_min, self.theta_max, self.steps)
                .expect("range validated"),
        }
    }

    /// One-line record of every setting, for file headers.
    pub fn summary(&self) -> String {
        let names: Vec<&str> = self.scenarios.iter().map(|k| k.name()).collect();
        let range = match self.theta {
            Some(t) => format!("theta={t}"),
            None => format!(
                "theta_min={} theta_max={} steps={}",
                self.theta_min, self.theta_max, self.steps
            ),
        };
        let o = &self.optimizer;
        format!(
            "command={} scenario={} {range} grid={} restarts={} tolerance={:e} max_iterations={} \
             grid_seed_cap={} grid_refinements={} level={} quick={}",
            self.command,
            names.join(","),
            o.grid_points_per_dim,
            o.restarts,
            o.simplex_tolerance,
            o.max_iterations,
            o.grid_seed_cap,
            o.grid_refinements,
            self.level,
            self.quick,
        )
    }
}
