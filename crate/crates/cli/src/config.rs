use std::path::{Path, PathBuf};

use mcts_sr::{MdpConfig, SearchConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Settings shared by every subcommand. Each field is optional so that a
/// config file and command-line flags can be layered; unset fields fall back
/// to the search defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub benchmark: Option<String>,
    pub data: Option<PathBuf>,
    pub budget: Option<u64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub c: Option<f64>,
    pub gamma: Option<f64>,
    pub queue_size: Option<usize>,
    pub gs: Option<f64>,
    pub gm: Option<f64>,
    pub eps: Option<f64>,
    pub max_depth: Option<usize>,
    pub max_constants: Option<usize>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `top` win over those in `self`.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        overlay!(
            self, top, benchmark, data, budget, trials, seed, out, c, gamma, queue_size, gs, gm, eps,
            max_depth, max_constants
        )
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn trials(&self) -> u64 {
        self.trials.unwrap_or(1)
    }

    /// Search settings with this config's overrides applied.
    pub fn search_config(&self) -> SearchConfig {
        let d = SearchConfig::default();
        SearchConfig {
            c: self.c.unwrap_or(d.c),
            gamma: self.gamma.unwrap_or(d.gamma),
            queue_size: self.queue_size.unwrap_or(d.queue_size),
            g_s: self.gs.unwrap_or(d.g_s),
            g_m: self.gm.unwrap_or(d.g_m),
            epsilon: self.eps.unwrap_or(d.epsilon),
            budget: self.budget.unwrap_or(d.budget),
            seed: self.seed(),
            ..d
        }
    }

    pub fn mdp_config(&self, n_vars: usize, with_constants: bool) -> MdpConfig {
        let mut m = MdpConfig::new(n_vars, with_constants);
        if let Some(d) = self.max_depth {
            m.max_depth = d;
        }
        if let Some(k) = self.max_constants {
            m.max_constants = k;
        }
        m
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let prob = |name: &str, v: Option<f64>| match v {
            Some(p) if !(0.0..=1.0).contains(&p) => Err(CliError::Config(format!("{name} must lie in [0, 1], got {p}"))),
            _ => Ok(()),
        };
        prob("gs", self.gs)?;
        prob("gm", self.gm)?;
        prob("eps", self.eps)?;
        if self.budget == Some(0) {
            return Err(CliError::Config("budget must be positive".into()));
        }
        if self.benchmark.is_some() && self.data.is_some() {
            return Err(CliError::Config("give either a benchmark or a data file, not both".into()));
        }
        Ok(())
    }
}
