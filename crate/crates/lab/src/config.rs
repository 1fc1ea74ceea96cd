use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::LabError;

/// Sweep parameters. Every field is optional in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Oracle probabilities for `purify`, `qsp` and `majority`.
    pub p_grid: Vec<f64>,
    /// Target imprecisions for `qsp` and `compare`.
    pub eps_grid: Vec<f64>,
    /// Copy counts for `majority`.
    pub ell_grid: Vec<usize>,
    /// Gaps for `adversary` and `compare`.
    pub delta_grid: Vec<f64>,
    /// Gap the QSP polynomial is built for.
    pub delta: f64,
    /// Purifier depth.
    pub depth: usize,
    /// Copies in the transduction-action implementation.
    pub k: usize,
    /// Workspace dimension of random oracles.
    pub d_w: usize,
    /// Random states per QSP cell.
    pub samples: usize,
    pub seed: u64,
    /// Solver tolerance for fixed points and feasibility.
    pub tol: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            p_grid: vec![0.1, 0.25, 0.4, 0.6, 0.75, 0.9],
            eps_grid: vec![0.3, 0.1, 0.01],
            ell_grid: vec![1, 3, 5, 7],
            delta_grid: vec![0.1, 0.25, 0.4],
            delta: 0.3,
            depth: 64,
            k: 200,
            d_w: 2,
            samples: 10,
            seed: 0,
            tol: 1e-8,
        }
    }
}

fn bad(msg: String) -> LabError {
    LabError::Config(msg)
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
    }

    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Range checks that do not depend on the subcommand.
    pub fn validate(&self) -> Result<(), LabError> {
        if let Some(p) = self.p_grid.iter().find(|p| !(0.0..=1.0).contains(*p) || **p == 0.5) {
            return Err(bad(format!("p = {p} must lie in [0, 1] and differ from 1/2")));
        }
        if let Some(e) = self.eps_grid.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(bad(format!("eps = {e} must be positive")));
        }
        if self.ell_grid.contains(&0) {
            return Err(bad("ell must be at least 1".into()));
        }
        let gap_ok = |d: f64| d > 0.0 && d <= 0.5;
        if let Some(d) = self.delta_grid.iter().find(|d| !gap_ok(**d)) {
            return Err(bad(format!("delta = {d} must lie in (0, 1/2]")));
        }
        if !gap_ok(self.delta) {
            return Err(bad(format!("delta = {} must lie in (0, 1/2]", self.delta)));
        }
        transduce_core::purifier::check_depth(self.depth).map_err(|e| bad(e.to_string()))?;
        if self.k == 0 || self.d_w == 0 || self.samples == 0 {
            return Err(bad("k, d_w and samples must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(bad(format!("tol = {} must be positive", self.tol)));
        }
        Ok(())
    }
}
