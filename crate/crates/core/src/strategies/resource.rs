//! Two-player resource-extraction rules: the quantum 2/3-power forms.

use alloc::vec::Vec;

use super::{noise_factor, trace_of_row, StrategyError};

/// Which extractor's rule to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    One,
    Two,
}

/// Parameters of the two-player extraction problem.
#[derive(Debug, Clone)]
pub struct ResourceParams {
    /// Regeneration coefficient on √X in the stock drift.
    pub a: f64,
    /// Linear decay coefficient in the stock drift.
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
    pub k1: f64,
    pub k2: f64,
    /// Cooperative weight on player 2, ≥ 0.
    pub alpha10: f64,
    pub zeta: f64,
    pub lambda_star: f64,
    /// Constant diffusion row; tr(σ'σ) = Σ σ_j².
    pub sigma_row: Vec<f64>,
}

impl ResourceParams {
    pub fn validate(&self) -> Result<(), StrategyError> {
        if !(self.a > 0.0
            && self.b > 0.0
            && self.c1 > 0.0
            && self.c2 > 0.0
            && self.k1 > 0.0
            && self.k2 > 0.0)
        {
            return Err(StrategyError::BadParams {
                detail: alloc::string::String::from("a, b, c1, c2, k1, k2 must be positive"),
            });
        }
        if self.alpha10 < 0.0 {
            return Err(StrategyError::BadParams {
                detail: alloc::string::String::from("alpha10 must be nonnegative"),
            });
        }
        Ok(())
    }
}

/// Quantum extraction rule:
/// player 1: [k₁e^{−ζs} / (2[λ*E(s) + e^{−ζs}c₁√X])]^{2/3},
/// player 2: the α₁⁰k₂ analogue with c₂.
pub fn resource_quantum(
    s: f64,
    x_norm: f64,
    player: Player,
    params: &ResourceParams,
    b_path_value: f64,
) -> Result<f64, StrategyError> {
    if !(x_norm > 0.0) {
        return Err(StrategyError::BadInput {
            detail: "stock must be positive",
        });
    }
    let e = crate::math::exp(-params.zeta * s);
    let factor = noise_factor(trace_of_row(&params.sigma_row), s, b_path_value);
    let (gain, cost) = match player {
        Player::One => (params.k1, params.c1),
        Player::Two => (params.alpha10 * params.k2, params.c2),
    };
    let denominator = 2.0 * (params.lambda_star * factor + e * cost * crate::math::sqrt(x_norm));
    if denominator == 0.0 {
        return Err(StrategyError::ZeroDenominator {
            what: "resource quantum rule",
            s,
        });
    }
    Ok(crate::math::powf(gain * e / denominator, 2.0 / 3.0))
}
