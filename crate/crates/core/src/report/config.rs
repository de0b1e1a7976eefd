//! Command line and config file resolution into a [`ScenarioConfig`].

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser, ValueEnum};

use super::ReportError;
use crate::numerics::{FixedPointSpec, QuadratureSpec};
use crate::spectral::BathSpectrum;

pub const DEFAULT_ALPHA: f64 = 0.02;
pub const DEFAULT_GAMMA_WIDTH: f64 = 0.4;
pub const DEFAULT_ETA_OMEGA0: [f64; 4] = [0.2, 0.5, 1.0, 1.5];
pub const DEFAULT_ALPHA_GRID: GridSpec = GridSpec::linear(0.0, 0.1, 101);
pub const DEFAULT_ZENO_OMEGA0_GRID: GridSpec = GridSpec::linear(0.1, 2.0, 191);
/// In units of `γ₀τ`; converted to `τ` once `γ₀` is known.
pub const DEFAULT_GAMMA0_TAU_GRID: GridSpec = GridSpec::log(1e-3, 1e2, 200);
pub const DEFAULT_OMEGA_GRID: GridSpec = GridSpec::linear(0.0, 3.0, 301);
pub const DEFAULT_T_MAX: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    Eta,
    ZenoTime,
    Rate,
    Spectrum,
    Survival,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Eta => "eta",
            Scenario::ZenoTime => "zeno-time",
            Scenario::Rate => "rate",
            Scenario::Spectrum => "spectrum",
            Scenario::Survival => "survival",
        }
    }

    fn file_stem(self) -> &'static str {
        match self {
            Scenario::ZenoTime => "zeno_time",
            other => other.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeSelection {
    Rwa,
    Full,
    Both,
}

impl ModeSelection {
    pub fn rwa(self) -> bool {
        matches!(self, ModeSelection::Rwa | ModeSelection::Both)
    }

    pub fn full(self) -> bool {
        matches!(self, ModeSelection::Full | ModeSelection::Both)
    }

    fn name(self) -> &'static str {
        match self {
            ModeSelection::Rwa => "rwa",
            ModeSelection::Full => "full",
            ModeSelection::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// `count` points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub spacing: Spacing,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub const fn linear(min: f64, max: f64, count: usize) -> Self {
        GridSpec {
            spacing: Spacing::Linear,
            min,
            max,
            count,
        }
    }

    pub const fn log(min: f64, max: f64, count: usize) -> Self {
        GridSpec {
            spacing: Spacing::Log,
            min,
            max,
            count,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if !(self.min < self.max) {
            return Err(format!(
                "grid needs min < max, got {}:{}",
                self.min, self.max
            ));
        }
        if self.count < 2 {
            return Err(format!("grid needs count >= 2, got {}", self.count));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err("log grid needs min > 0".into());
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Log => crate::decay::log_grid(self.min, self.max, self.count),
            Spacing::Linear => {
                let last = self.count - 1;
                (0..self.count)
                    .map(|i| {
                        if i == last {
                            self.max
                        } else {
                            self.min + (self.max - self.min) * i as f64 / last as f64
                        }
                    })
                    .collect()
            }
        }
    }

    /// Same grid with both bounds multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> GridSpec {
        GridSpec {
            min: self.min * factor,
            max: self.max * factor,
            ..*self
        }
    }

    fn parse(text: &str, with_spacing: bool) -> Result<Self, String> {
        let parts: Vec<&str> = text.split(':').collect();
        let (spacing, rest) = if with_spacing {
            match parts.split_first() {
                Some((&"lin", rest)) => (Spacing::Linear, rest),
                Some((&"log", rest)) => (Spacing::Log, rest),
                _ => return Err(format!("expected lin|log:min:max:count, got '{text}'")),
            }
        } else {
            (Spacing::Linear, &parts[..])
        };
        let [min, max, count] = rest else {
            return Err(format!("expected min:max:count, got '{text}'"));
        };
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("'{s}': {e}"));
        let grid = GridSpec {
            spacing,
            min: num(min)?,
            max: num(max)?,
            count: count
                .trim()
                .parse()
                .map_err(|e| format!("'{count}': {e}"))?,
        };
        grid.validate()?;
        Ok(grid)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{:?}:{}", self.min, self.max, self.count)
    }
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    GridSpec::parse(s, false)
}

fn parse_spaced_grid(s: &str) -> Result<GridSpec, String> {
    GridSpec::parse(s, true)
}

#[derive(Debug, Parser)]
#[command(
    name = "zeno",
    version,
    about = "Zeno and anti-Zeno regimes of a two-level system in a peaked bosonic bath",
    args_override_self = true
)]
struct Cli {
    /// What to compute
    #[arg(value_enum)]
    scenario: Scenario,
    /// Coupling strength
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Coupling grid for the eta scenario (min:max:count)
    #[arg(long, value_parser = parse_grid)]
    alpha_grid: Option<GridSpec>,
    /// Bare transition frequency
    #[arg(long, allow_negative_numbers = true)]
    omega0: Option<f64>,
    /// Transition frequency grid (min:max:count)
    #[arg(long, value_parser = parse_grid)]
    omega0_grid: Option<GridSpec>,
    /// Bath spectral width
    #[arg(long, allow_negative_numbers = true)]
    gamma_width: Option<f64>,
    /// Measurement intervals in units of 1/Ω (lin|log:min:max:count)
    #[arg(long, value_parser = parse_spaced_grid)]
    tau_grid: Option<GridSpec>,
    /// Frequency grid for the spectrum scenario (min:max:count)
    #[arg(long, value_parser = parse_grid)]
    omega_grid: Option<GridSpec>,
    /// Which coupling to keep
    #[arg(long, value_enum)]
    mode: Option<ModeSelection>,
    /// Final time of the survival scenario
    #[arg(long)]
    t_max: Option<f64>,
    /// Time step of the survival scenario
    #[arg(long)]
    grid_step: Option<f64>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config file with `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// Absolute quadrature tolerance
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Relative quadrature tolerance
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Fixed-point residual tolerance
    #[arg(long)]
    fp_tol: Option<f64>,
}

/// Coupling values of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSelection {
    Single(f64),
    Grid(GridSpec),
}

/// Transition frequencies of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum Omega0Selection {
    Single(f64),
    Grid(GridSpec),
    Set(Vec<f64>),
}

impl Omega0Selection {
    pub fn points(&self) -> Vec<f64> {
        match self {
            Omega0Selection::Single(w) => vec![*w],
            Omega0Selection::Grid(g) => g.points(),
            Omega0Selection::Set(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauGrid {
    /// Explicit `τ` values.
    Tau(GridSpec),
    /// Grid over `γ₀τ`.
    Gamma0Tau(GridSpec),
}

/// Fully resolved run description.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub alpha: AlphaSelection,
    pub omega0: Omega0Selection,
    pub gamma_width: f64,
    pub tau_grid: TauGrid,
    pub omega_grid: GridSpec,
    pub mode: ModeSelection,
    pub t_max: f64,
    pub grid_step: Option<f64>,
    pub out: PathBuf,
    pub quad: QuadratureSpec,
    pub fixed_point: FixedPointSpec,
}

impl ScenarioConfig {
    /// Equivalent command line, output path excluded.
    pub fn command_line(&self) -> String {
        let mut s = format!("zeno {}", self.scenario.name());
        match self.alpha {
            AlphaSelection::Single(a) => s += &format!(" --alpha {a:?}"),
            AlphaSelection::Grid(g) => s += &format!(" --alpha-grid {g}"),
        }
        match &self.omega0 {
            Omega0Selection::Single(w) => s += &format!(" --omega0 {w:?}"),
            Omega0Selection::Grid(g) => s += &format!(" --omega0-grid {g}"),
            Omega0Selection::Set(_) => {}
        }
        s += &format!(" --gamma-width {:?}", self.gamma_width);
        match (self.scenario, self.tau_grid) {
            (Scenario::Rate, TauGrid::Tau(g)) => {
                let kind = if g.spacing == Spacing::Log {
                    "log"
                } else {
                    "lin"
                };
                s += &format!(" --tau-grid {kind}:{g}");
            }
            (Scenario::Spectrum, _) => s += &format!(" --omega-grid {}", self.omega_grid),
            (Scenario::Survival, _) => {
                s += &format!(" --t-max {:?}", self.t_max);
                if let Some(h) = self.grid_step {
                    s += &format!(" --grid-step {h:?}");
                }
            }
            _ => {}
        }
        s += &format!(" --mode {}", self.mode.name());
        s += &format!(
            " --abs-tol {:?} --rel-tol {:?} --fp-tol {:?}",
            self.quad.abs_tol, self.quad.rel_tol, self.fixed_point.tol
        );
        s
    }
}

/// Resolves `args` (program name first) and, if `--config` names one, a
/// config file. Flags override file values.
pub fn parse_config<I, T>(args: I) -> Result<ScenarioConfig, ReportError>
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = parse_tokens(&args)?;
    let cli = match &cli.config {
        None => cli,
        Some(path) => {
            let file_tokens = read_config_file(path)?;
            let mut merged = Vec::with_capacity(args.len() + file_tokens.len());
            merged.extend(args.first().cloned());
            merged.extend(file_tokens);
            merged.extend(args.iter().skip(1).cloned());
            parse_tokens(&merged)?
        }
    };
    resolve(cli)
}

fn parse_tokens(args: &[String]) -> Result<Cli, ReportError> {
    Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            ReportError::Help(e.to_string())
        }
        _ => ReportError::Usage(e.to_string().trim_end().to_string()),
    })
}

/// `key = value` lines as `--key=value` tokens.
fn read_config_file(path: &Path) -> Result<Vec<String>, ReportError> {
    let text = std::fs::read_to_string(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let known: BTreeSet<String> = Cli::command()
        .get_arguments()
        .filter_map(|a| a.get_long())
        .filter(|l| *l != "config" && *l != "help" && *l != "version")
        .map(|l| l.replace('-', "_"))
        .collect();

    let mut tokens = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ReportError::Config(format!(
                "{}:{}: expected `key = value`",
                path.display(),
                n + 1
            )));
        };
        let key = key.trim();
        if !known.contains(key) {
            return Err(ReportError::Config(format!(
                "{}:{}: unknown key `{key}`",
                path.display(),
                n + 1
            )));
        }
        tokens.push(format!("--{}={}", key.replace('_', "-"), value.trim()));
    }
    Ok(tokens)
}

fn positive(flag: &str, v: f64) -> Result<f64, ReportError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ReportError::Usage(format!(
            "--{flag} must be a positive number, got {v}"
        )))
    }
}

fn resolve(cli: Cli) -> Result<ScenarioConfig, ReportError> {
    let scenario = cli.scenario;

    let alpha = match (cli.alpha, cli.alpha_grid) {
        (Some(_), Some(_)) => {
            return Err(ReportError::Config(
                "--alpha and --alpha-grid are mutually exclusive".into(),
            ))
        }
        (None, Some(_)) if scenario != Scenario::Eta => {
            return Err(ReportError::Config(format!(
                "--alpha-grid applies to the eta scenario only, not {}",
                scenario.name()
            )))
        }
        (None, Some(g)) => AlphaSelection::Grid(g),
        (Some(a), None) => AlphaSelection::Single(a),
        (None, None) if scenario == Scenario::Eta => AlphaSelection::Grid(DEFAULT_ALPHA_GRID),
        (None, None) => AlphaSelection::Single(DEFAULT_ALPHA),
    };

    let omega0 = match (cli.omega0, cli.omega0_grid) {
        (Some(_), Some(_)) => {
            return Err(ReportError::Config(
                "--omega0 and --omega0-grid are mutually exclusive".into(),
            ))
        }
        (Some(w), None) => Omega0Selection::Single(positive("omega0", w)?),
        (None, Some(g)) => match scenario {
            Scenario::Eta | Scenario::ZenoTime => {
                if g.min <= 0.0 {
                    return Err(ReportError::Config(
                        "--omega0-grid must stay above 0".into(),
                    ));
                }
                Omega0Selection::Grid(g)
            }
            _ => {
                return Err(ReportError::Config(format!(
                    "the {} scenario takes a single --omega0, not a grid",
                    scenario.name()
                )))
            }
        },
        (None, None) => match scenario {
            Scenario::Eta => Omega0Selection::Set(DEFAULT_ETA_OMEGA0.to_vec()),
            Scenario::ZenoTime => Omega0Selection::Grid(DEFAULT_ZENO_OMEGA0_GRID),
            _ => {
                return Err(ReportError::Usage(format!(
                    "the {} scenario requires --omega0",
                    scenario.name()
                )))
            }
        },
    };

    let gamma_width = cli.gamma_width.unwrap_or(DEFAULT_GAMMA_WIDTH);
    let alphas = match alpha {
        AlphaSelection::Single(a) => vec![a],
        AlphaSelection::Grid(g) => vec![g.min, g.max],
    };
    for a in alphas {
        BathSpectrum::with_unit_center(a, gamma_width)
            .map_err(|e| ReportError::Config(e.to_string()))?;
    }

    let tau_grid = match cli.tau_grid {
        Some(g) => {
            if scenario == Scenario::Survival {
                return Err(ReportError::Config(
                    "the survival scenario uses a uniform grid set by --t-max and --grid-step"
                        .into(),
                ));
            }
            if g.min <= 0.0 {
                return Err(ReportError::Config("--tau-grid must stay above 0".into()));
            }
            TauGrid::Tau(g)
        }
        None => TauGrid::Gamma0Tau(DEFAULT_GAMMA0_TAU_GRID),
    };

    let t_max = positive("t-max", cli.t_max.unwrap_or(DEFAULT_T_MAX))?;
    let grid_step = cli
        .grid_step
        .map(|h| positive("grid-step", h))
        .transpose()?;
    if let Some(h) = grid_step {
        if h > t_max {
            return Err(ReportError::Config(format!(
                "--grid-step {h} exceeds --t-max {t_max}"
            )));
        }
    }

    let mut quad = QuadratureSpec::default();
    if let Some(v) = cli.abs_tol {
        quad.abs_tol = positive("abs-tol", v)?;
    }
    if let Some(v) = cli.rel_tol {
        quad.rel_tol = positive("rel-tol", v)?;
    }
    quad.validate()
        .map_err(|e| ReportError::Config(e.to_string()))?;
    let mut fixed_point = FixedPointSpec::default();
    if let Some(v) = cli.fp_tol {
        fixed_point.tol = positive("fp-tol", v)?;
    }

    let omega_grid = cli.omega_grid.unwrap_or(DEFAULT_OMEGA_GRID);
    if omega_grid.min < 0.0 {
        return Err(ReportError::Config(
            "--omega-grid must start at or above 0".into(),
        ));
    }

    Ok(ScenarioConfig {
        scenario,
        alpha,
        omega0,
        gamma_width,
        tau_grid,
        omega_grid,
        mode: cli.mode.unwrap_or(ModeSelection::Both),
        t_max,
        grid_step,
        out: cli
            .out
            .unwrap_or_else(|| PathBuf::from(format!("zeno_{}.csv", scenario.file_stem()))),
        quad,
        fixed_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<ScenarioConfig, ReportError> {
        parse_config(std::iter::once("zeno").chain(args.iter().copied()))
    }

    #[test]
    fn rate_scenario_with_figure_parameters() {
        let c = parse(&[
            "rate",
            "--omega0",
            "0.2",
            "--alpha",
            "0.02",
            "--gamma-width",
            "0.4",
        ])
        .unwrap();
        assert_eq!(c.scenario, Scenario::Rate);
        assert_eq!(c.omega0, Omega0Selection::Single(0.2));
        assert_eq!(c.alpha, AlphaSelection::Single(0.02));
        assert_eq!(c.mode, ModeSelection::Both);
        assert_eq!(c.tau_grid, TauGrid::Gamma0Tau(DEFAULT_GAMMA0_TAU_GRID));
        assert_eq!(c.out, PathBuf::from("zeno_rate.csv"));
    }

    #[test]
    fn missing_omega0_is_usage_error() {
        for s in ["rate", "spectrum", "survival"] {
            assert!(matches!(parse(&[s]), Err(ReportError::Usage(_))), "{s}");
        }
    }

    #[test]
    fn contradictory_grids_are_config_errors() {
        let e = parse(&["eta", "--omega0", "0.2", "--omega0-grid", "0.1:1:5"]);
        assert!(matches!(e, Err(ReportError::Config(_))));
        let e = parse(&["rate", "--omega0-grid", "0.1:1:5"]);
        assert!(matches!(e, Err(ReportError::Config(_))));
        let e = parse(&["eta", "--alpha", "0.1", "--alpha-grid", "0:0.1:3"]);
        assert!(matches!(e, Err(ReportError::Config(_))));
    }

    #[test]
    fn malformed_grids_are_usage_errors() {
        for g in ["1:0:5", "0:1:1", "0:1", "a:1:3"] {
            let e = parse(&["zeno-time", "--omega0-grid", g]);
            assert!(matches!(e, Err(ReportError::Usage(_))), "{g}");
        }
        let e = parse(&["rate", "--omega0", "0.2", "--tau-grid", "cubic:1:2:3"]);
        assert!(matches!(e, Err(ReportError::Usage(_))));
    }

    #[test]
    fn bad_bath_parameters_rejected() {
        let e = parse(&["rate", "--omega0", "0.2", "--gamma-width", "2.5"]);
        assert!(matches!(e, Err(ReportError::Config(_))));
        let e = parse(&["rate", "--omega0", "0.2", "--alpha", "-0.1"]);
        assert!(matches!(e, Err(ReportError::Config(_))));
        let e = parse(&["rate", "--omega0", "-0.2"]);
        assert!(matches!(e, Err(ReportError::Usage(_))));
    }

    #[test]
    fn linear_grid_has_exact_endpoints() {
        let p = DEFAULT_ALPHA_GRID.points();
        assert_eq!(p.len(), 101);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[100], 0.1);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn command_line_round_trips() {
        let c = parse(&[
            "rate",
            "--omega0",
            "0.5",
            "--tau-grid",
            "log:0.01:100:37",
            "--mode",
            "full",
            "--rel-tol",
            "1e-9",
        ])
        .unwrap();
        let again = parse_config(c.command_line().split(' ')).unwrap();
        assert_eq!(
            again,
            ScenarioConfig {
                out: again.out.clone(),
                ..c.clone()
            }
        );
        let s = parse(&[
            "survival",
            "--omega0",
            "0.2",
            "--t-max",
            "40",
            "--grid-step",
            "0.01",
        ])
        .unwrap();
        let again = parse_config(s.command_line().split(' ')).unwrap();
        assert_eq!(again, s);
    }
}
