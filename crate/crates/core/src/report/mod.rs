//! The `zeno` command line front end: configuration, scenario runs and CSV
//! output.
//!
//! Grammar: `zeno <eta|zeno-time|rate|spectrum|survival> [flags]`. Every CSV
//! starts with a `#` line holding the equivalent command line, followed by a
//! header row. Numbers carry 12 significant digits; columns of a mode that
//! was not requested are left empty.

mod config;
mod scenario;

use std::path::PathBuf;

pub use config::{
    parse_config, AlphaSelection, GridSpec, ModeSelection, Omega0Selection, Scenario,
    ScenarioConfig, Spacing, TauGrid, DEFAULT_ALPHA, DEFAULT_ALPHA_GRID, DEFAULT_ETA_OMEGA0,
    DEFAULT_GAMMA0_TAU_GRID, DEFAULT_GAMMA_WIDTH, DEFAULT_OMEGA_GRID, DEFAULT_T_MAX,
    DEFAULT_ZENO_OMEGA0_GRID,
};
pub use scenario::{render_csv, run_scenario, write_atomic, RunOutput, Table};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    /// `--help` or `--version` output; not a failure.
    #[error("{0}")]
    Help(String),
    #[error("{0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Numerical(#[from] crate::Error),
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ReportError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ReportError::Help(_) => 0,
            ReportError::Usage(_) | ReportError::Config(_) => 2,
            ReportError::Numerical(_) => 3,
            ReportError::Io { .. } => 4,
        }
    }
}

/// Parses `args`, runs the scenario, prints the summary and returns the
/// process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let outcome = parse_config(args).and_then(|cfg| run_scenario(&cfg));
    match outcome {
        Ok(out) => {
            println!("{}", out.summary);
            0
        }
        Err(ReportError::Help(text)) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("zeno: {e}");
            e.exit_code()
        }
    }
}
