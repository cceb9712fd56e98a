//! Closed-form feedback rules: the quantum (path-integral) branch and the
//! Pontryagin benchmark branch of each worked example, plus the coupled
//! A(s), B(s) ODE systems the Pontryagin rules need.

use alloc::string::String;

pub mod cubic;
pub mod nash;
pub mod ode;
pub mod pareto;
pub mod resource;
pub mod walrasian;

pub use cubic::{
    cardano_real_roots, ex3_cubic_coeffs, ex3_pontryagin, preferred_root, CubicCoefficients,
    Ex3Params,
};
pub use nash::{nash_pontryagin, nash_quantum, nash_symmetric_fixed_point, NashParams};
pub use ode::{solve_ab_odes, AbSystem, OdeSolution};
pub use pareto::{pareto_pontryagin, pareto_quantum, ParetoParams};
pub use resource::{resource_quantum, Player, ResourceParams};
pub use walrasian::{walrasian_quantum, Branch, QuantumRoot, WalrasianQuantumParams};

/// Which derivation a feedback rule comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Quantum,
    Pontryagin,
}

impl Provenance {
    pub fn label(&self) -> &'static str {
        match self {
            Provenance::Quantum => "quantum",
            Provenance::Pontryagin => "pontryagin",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StrategyError {
    /// A denominator the formula divides by is zero (or crossed zero at `s`).
    ZeroDenominator { what: &'static str, s: f64 },
    /// Parameter record violates its invariants.
    BadParams { detail: String },
    /// The cubic's leading coefficient vanished.
    NotCubic,
    /// Input outside the rule's admissible domain.
    BadInput { detail: &'static str },
    /// Fixed-point iteration failed to converge.
    NoConvergence { iterations: usize, last: f64 },
}

impl core::fmt::Display for StrategyError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            StrategyError::ZeroDenominator { what, s } => {
                write!(f, "zero denominator in {what} at s = {s}")
            }
            StrategyError::BadParams { detail } => write!(f, "bad parameters: {detail}"),
            StrategyError::NotCubic => write!(f, "not cubic: leading coefficient is zero"),
            StrategyError::BadInput { detail } => write!(f, "bad input: {detail}"),
            StrategyError::NoConvergence { iterations, last } => {
                write!(
                    f,
                    "fixed point did not converge after {iterations} iterations (last = {last})"
                )
            }
        }
    }
}

impl core::error::Error for StrategyError {}

/// exp{½·tr(σ'σ)·s − σB(s)} with `sigma_b` the realized scalar σB(s).
pub(crate) fn noise_factor(trace_sigma: f64, s: f64, sigma_b: f64) -> f64 {
    crate::math::exp(0.5 * trace_sigma * s - sigma_b)
}

pub(crate) fn trace_of_row(sigma_row: &[f64]) -> f64 {
    sigma_row.iter().map(|v| v * v).sum()
}

pub(crate) fn validate_weights(alpha: &[f64]) -> Result<(), StrategyError> {
    let total: f64 = alpha.iter().sum();
    if crate::math::abs(total - 1.0) > 1e-12 {
        return Err(StrategyError::BadParams {
            detail: alloc::format!("alpha must sum to 1, got {total}"),
        });
    }
    if alpha.iter().any(|a| *a < 0.0 || *a > 1.0) {
        return Err(StrategyError::BadParams {
            detail: String::from("alpha entries must lie in [0, 1]"),
        });
    }
    Ok(())
}

pub(crate) fn validate_symmetric(matrix: &[f64], k: usize) -> Result<(), StrategyError> {
    if matrix.len() != k * k {
        return Err(StrategyError::BadParams {
            detail: alloc::format!("interaction matrix must be {k}x{k}"),
        });
    }
    for i in 0..k {
        for j in 0..i {
            if crate::math::abs(matrix[i * k + j] - matrix[j * k + i]) > 1e-12 {
                return Err(StrategyError::BadParams {
                    detail: String::from("interaction matrix must be symmetric"),
                });
            }
        }
    }
    Ok(())
}

/// Quadratic form X'·M·X for a row-major k×k matrix.
pub fn quadratic_form(matrix: &[f64], x: &[f64]) -> f64 {
    let k = x.len();
    let mut total = 0.0;
    for i in 0..k {
        let mut row = 0.0;
        for j in 0..k {
            row += matrix[i * k + j] * x[j];
        }
        total += x[i] * row;
    }
    total
}

/// Smallest nonnegative entry, or the entry of smallest magnitude when all
/// are negative. Callers use this to pick an expenditure among cubic roots.
pub fn smallest_admissible(values: &[f64]) -> Option<f64> {
    let mut best_nonneg: Option<f64> = None;
    let mut best_abs: Option<f64> = None;
    for &v in values {
        if v >= 0.0 && best_nonneg.map_or(true, |b| v < b) {
            best_nonneg = Some(v);
        }
        if best_abs.map_or(true, |b: f64| crate::math::abs(v) < crate::math::abs(b)) {
            best_abs = Some(v);
        }
    }
    best_nonneg.or(best_abs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_form_sums_all_entries_at_ones() {
        let m = [0.15, 0.05, 0.02, 0.05, 0.12, 0.04, 0.02, 0.04, 0.10];
        let x = [1.0, 1.0, 1.0];
        assert!((quadratic_form(&m, &x) - 0.59).abs() < 1e-15);
    }

    #[test]
    fn weight_validation_rejects_bad_sums() {
        assert!(validate_weights(&[0.5, 0.4]).is_err());
        assert!(validate_weights(&[0.5, 0.5]).is_ok());
    }

    #[test]
    fn admissible_root_prefers_smallest_nonnegative() {
        assert_eq!(smallest_admissible(&[3.0, -0.1, 0.5]), Some(0.5));
        assert_eq!(smallest_admissible(&[-3.0, -0.1, -0.5]), Some(-0.1));
        assert_eq!(smallest_admissible(&[]), None);
    }
}
