//! Sweeps and report output for the `transduce-lab` binary.

pub mod config;
pub mod report;
pub mod sweep;

use transduce_core::Error;

pub use config::Config;
pub use report::{Cell, Format, Report};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    /// Unreadable or invalid configuration.
    #[error("config error: {0}")]
    Config(String),
    /// A simulation broke one of its guarantees.
    #[error("{0}")]
    Contract(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            _ => 1,
        }
    }
}

impl From<Error> for LabError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) => LabError::Config(e.to_string()),
            _ => LabError::Contract(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Simple purifier per p.
    /// Columns: p, L, W, tau_error, bound_2sqrtWK, measured_action_error.
    Purify,
    /// QSP error reduction per (eps, p) at the configured delta.
    /// Columns: delta, eps, p, promise, degree, final_error, target_eps.
    Qsp,
    /// Majority voting per (ell, p).
    /// Columns: ell, p, delta, queries, imprecision_exact,
    /// imprecision_simulated, hoeffding_bound, qubits_used.
    Majority,
    /// Two-oracle lower bound against the purifier, per delta.
    /// Columns: delta, lower_bound, purifier_objective, max_residual, gap.
    Adversary,
    /// Query counts of all three methods per (delta, eps).
    /// Columns: delta, eps, purifier_L, purifier_W, qsp_queries,
    /// majority_ell, majority_queries.
    Compare,
}

pub fn run(cmd: Command, cfg: &Config) -> Result<Report, LabError> {
    match cmd {
        Command::Purify => sweep::purify(cfg),
        Command::Qsp => sweep::qsp(cfg),
        Command::Majority => sweep::majority(cfg),
        Command::Adversary => sweep::adversary(cfg),
        Command::Compare => sweep::compare(cfg),
    }
}
