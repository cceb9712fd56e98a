//! Ensemble summaries: terminal and discounted-profit statistics with the
//! exponential-weight diagnostics every Monte Carlo experiment reports.

use pathint_core::foc::ProblemSpec;
use pathint_core::path_integral::{exp_weights, CostSense, WeightedEnsemble};
use pathint_core::sde::{Ensemble, Path};
use serde_json::{json, Value};

use crate::summary::stats_block;
use crate::CliError;

/// Importance-weight scale ε_w used for the profit reweighting diagnostics.
pub const PROFIT_WEIGHT_SCALE: f64 = 1.0;

/// Left-endpoint Riemann sum of the discounted profit along a path.
pub fn discounted_profit(path: &Path, spec: &ProblemSpec) -> f64 {
    let dt = path.grid.dt();
    let mut total = 0.0;
    for (step, control) in path.controls.iter().enumerate() {
        let s = path.grid.time_at(step);
        total += (spec.profit)(s, path.states[step][0], control[0]) * dt;
    }
    total
}

/// Statistics of one ensemble under a profit evaluator.
pub struct McSummary {
    pub terminals: Vec<f64>,
    pub profits: Vec<f64>,
    pub weights: WeightedEnsemble,
    pub diverged: usize,
    pub rule_fallbacks: u64,
    pub control_clamps: u64,
    pub state_clamps: u64,
}

impl McSummary {
    /// Terminal-state and profit statistics of the non-diverged paths, with
    /// exponential importance weights on the profits at ε_w = 1.
    pub fn compute(ensemble: &Ensemble, profit: impl Fn(&Path) -> f64) -> Result<Self, CliError> {
        let mut terminals = Vec::with_capacity(ensemble.paths.len());
        let mut profits = Vec::with_capacity(ensemble.paths.len());
        let mut rule_fallbacks = 0;
        let mut control_clamps = 0;
        let mut state_clamps = 0;
        for path in &ensemble.paths {
            if path.diverged_at.is_none() {
                terminals.push(path.terminal()[0]);
                profits.push(profit(path));
            }
            rule_fallbacks += path.stats.rule_fallbacks;
            control_clamps += path.stats.control_clamps;
            state_clamps += path.stats.state_clamps;
        }
        if terminals.is_empty() {
            return Err(CliError::Numerical("every path diverged".into()));
        }
        let weights = exp_weights(&profits, PROFIT_WEIGHT_SCALE, CostSense::Maximize)?;
        Ok(McSummary {
            terminals,
            profits,
            weights,
            diverged: ensemble.diverged,
            rule_fallbacks,
            control_clamps,
            state_clamps,
        })
    }

    pub fn ess_ratio(&self) -> f64 {
        self.weights.ess / self.profits.len() as f64
    }

    /// The JSON block shared by the Monte Carlo experiments.
    pub fn to_json(&self) -> Value {
        json!({
            "terminal": stats_block(&self.terminals),
            "profit": stats_block(&self.profits),
            "ess": self.weights.ess,
            "ess_ratio": self.ess_ratio(),
            "diverged": self.diverged,
        })
    }
}
