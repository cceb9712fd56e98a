//! Cooperative k-firm rules: the quantum rule from the stationarity of the
//! α-weighted f, and the Pontryagin benchmark with its max{0, ·} clamp.

use alloc::vec::Vec;

use super::{noise_factor, StrategyError};

/// Parameters of the cooperative k-firm market.
#[derive(Debug, Clone)]
pub struct ParetoParams {
    /// Firm count, ≥ 2 for the interacting case (k = 1 degenerates cleanly).
    pub k: usize,
    /// Pareto weights, summing to 1.
    pub alpha: Vec<f64>,
    pub p: f64,
    pub c: f64,
    /// Cross-firm revenue coupling.
    pub omega1: f64,
    /// Cross-firm cost coupling.
    pub omega2: f64,
    pub zeta: f64,
    pub lambda_star: f64,
    /// Symmetric k×k interaction matrix, row-major.
    pub a_matrix: Vec<f64>,
    /// One-factor diffusion intensity: Σ(X) = σ₀·X.
    pub sigma0: f64,
}

impl ParetoParams {
    pub fn validate(&self) -> Result<(), StrategyError> {
        if self.alpha.len() != self.k {
            return Err(StrategyError::BadParams {
                detail: alloc::format!("alpha must have {} entries", self.k),
            });
        }
        super::validate_weights(&self.alpha)?;
        super::validate_symmetric(&self.a_matrix, self.k)
    }

    /// tr(σ'σ) for the one-factor channel σ = σ₀·1_k.
    pub fn trace_sigma(&self) -> f64 {
        self.k as f64 * self.sigma0 * self.sigma0
    }

    /// Revenue bracket X_ρ + ω₁·Σ_{ρ̃≠ρ} X_ρ̃.
    pub fn revenue_bracket(&self, x: &[f64], rho: usize) -> f64 {
        let others: f64 = x
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != rho)
            .map(|(_, v)| *v)
            .sum();
        x[rho] + self.omega1 * others
    }
}

/// Quantum rule for firm ρ:
/// [e^{−ζs}·Σ_ρ̂ p α_ρ̂ (X_ρ̂ + ω₁Σ_{ρ̃≠ρ̂}X_ρ̃) − λ*E(s)] / [2 c α_ρ X_ρ e^{−ζs}]
/// with E(s) = exp{½tr(σ'σ)s − σB(s)}.
///
/// The numerator sums over every firm while the denominator carries only
/// firm ρ; the formula is implemented exactly in that asymmetric form.
pub fn pareto_quantum(
    s: f64,
    x: &[f64],
    rho: usize,
    params: &ParetoParams,
    b_path_value: f64,
) -> Result<f64, StrategyError> {
    let e = crate::math::exp(-params.zeta * s);
    let denominator = 2.0 * params.c * params.alpha[rho] * x[rho] * e;
    if denominator == 0.0 {
        return Err(StrategyError::ZeroDenominator {
            what: "pareto quantum rule",
            s,
        });
    }
    let mut revenue = 0.0;
    for rho_hat in 0..params.k {
        revenue += params.p * params.alpha[rho_hat] * params.revenue_bracket(x, rho_hat);
    }
    let numerator =
        e * revenue - params.lambda_star * noise_factor(params.trace_sigma(), s, b_path_value);
    Ok(numerator / denominator)
}

/// Pontryagin benchmark for firm ρ:
/// [(pα_ρ − 1)(X_ρ + ω₁Σ_{ρ̃≠ρ}X_ρ̃) + 2cX_ρ·X'aX] / (2cX_ρ),
/// clamped to max{0, ·} and to `u_max` when bounds are supplied.
pub fn pareto_pontryagin(
    s: f64,
    x: &[f64],
    rho: usize,
    params: &ParetoParams,
    u_max: Option<f64>,
) -> Result<f64, StrategyError> {
    let denominator = 2.0 * params.c * x[rho];
    if denominator == 0.0 {
        return Err(StrategyError::ZeroDenominator {
            what: "pareto pontryagin rule",
            s,
        });
    }
    let bracket = params.revenue_bracket(x, rho);
    let quad = super::quadratic_form(&params.a_matrix, x);
    let raw = ((params.p * params.alpha[rho] - 1.0) * bracket + 2.0 * params.c * x[rho] * quad)
        / denominator;
    let mut u = if raw > 0.0 { raw } else { 0.0 };
    if let Some(cap) = u_max {
        if u > cap {
            u = cap;
        }
    }
    Ok(u)
}
