use std::io::Write;

use serde::Serialize;

use crate::CliError;

/// Outcome of one benchmark trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: u64,
    pub seed: u64,
    pub recovered: bool,
    pub symbolic: bool,
    pub numeric: bool,
    pub fresh_nrmse: f64,
    pub evaluations: u64,
    pub wall_seconds: f64,
    pub best_reward: f64,
    pub expression: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub benchmark: String,
    pub trials: Vec<TrialResult>,
}

impl RecoveryReport {
    pub fn recovered(&self) -> usize {
        self.trials.iter().filter(|t| t.recovered).count()
    }

    /// Fraction of recovered trials; `None` for an empty report.
    pub fn rate(&self) -> Option<f64> {
        (!self.trials.is_empty()).then(|| self.recovered() as f64 / self.trials.len() as f64)
    }

    /// Per-trial rows followed by one aggregate row (`trial = "all"`).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "benchmark",
            "trial",
            "seed",
            "recovered",
            "symbolic",
            "numeric",
            "fresh_nrmse",
            "evaluations",
            "wall_seconds",
            "best_reward",
            "expression",
        ])?;
        for t in &self.trials {
            w.write_record([
                self.benchmark.clone(),
                t.trial.to_string(),
                t.seed.to_string(),
                t.recovered.to_string(),
                t.symbolic.to_string(),
                t.numeric.to_string(),
                t.fresh_nrmse.to_string(),
                t.evaluations.to_string(),
                format!("{:.3}", t.wall_seconds),
                t.best_reward.to_string(),
                t.expression.clone(),
            ])?;
        }
        let rate = self.rate().map_or_else(|| "undefined".to_string(), |r| r.to_string());
        let blank = String::new;
        w.write_record([
            self.benchmark.clone(),
            "all".into(),
            blank(),
            rate,
            blank(),
            blank(),
            blank(),
            self.trials.iter().map(|t| t.evaluations).sum::<u64>().to_string(),
            format!("{:.3}", self.trials.iter().map(|t| t.wall_seconds).sum::<f64>()),
            blank(),
            blank(),
        ])?;
        w.flush()?;
        Ok(())
    }
}
