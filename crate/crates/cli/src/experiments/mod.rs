//! The verification experiments behind the CLI subcommands. Each experiment
//! is a pure function of its effective configuration; the driver handles
//! files and exit codes.

use crate::config::EffectiveConfig;
use crate::report::RunOutput;

mod billiard;
mod embed;
mod isospectral;
mod limits;
mod roundtrip;
mod volume;

/// How a run can fail, mapped onto exit codes by the driver: usage errors
/// exit 1, verdict failures exit 2 (signalled through `Report::pass`), and
/// numerical aborts exit 3.
#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Numerical(String),
}

impl From<toda_toric_core::Error> for RunError {
    fn from(e: toda_toric_core::Error) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "usage error: {m}"),
            RunError::Numerical(m) => write!(f, "numerical abort: {m}"),
        }
    }
}

pub type RunResult = Result<RunOutput, RunError>;

/// Runs the named experiment and stamps the wall clock into the report.
pub fn run(cfg: &EffectiveConfig) -> RunResult {
    let started = std::time::Instant::now();
    let mut out = match cfg.experiment.as_str() {
        "isospectral" => isospectral::run(cfg)?,
        "roundtrip" => roundtrip::run(cfg)?,
        "limits" => limits::run(cfg)?,
        "embed" => embed::run(cfg)?,
        "billiard" => billiard::run(cfg)?,
        "volume" => volume::run(cfg)?,
        other => return Err(RunError::Usage(format!("unknown experiment '{other}'"))),
    };
    out.report.wall_clock_s = started.elapsed().as_secs_f64();
    Ok(out)
}
