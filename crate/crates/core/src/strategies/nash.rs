//! Noncooperative k-firm extraction: the quantum feedback rule, its
//! symmetric fixed-point closure, and the Pontryagin benchmark built on the
//! A(s), B(s) value-function coefficients.

use alloc::vec::Vec;

use super::ode::OdeSolution;
use super::{noise_factor, trace_of_row, StrategyError};

/// Parameters of the k-firm renewable-resource game.
#[derive(Debug, Clone)]
pub struct NashParams {
    /// Firm count, ≥ 2 for the game proper.
    pub k: usize,
    /// Regeneration coefficient on √X.
    pub a: f64,
    /// Linear decay coefficient.
    pub b: f64,
    /// Extraction cost coefficient.
    pub c: f64,
    pub zeta: f64,
    pub lambda_star: f64,
    pub sigma_row: Vec<f64>,
}

impl NashParams {
    pub fn trace_sigma(&self) -> f64 {
        trace_of_row(&self.sigma_row)
    }
}

/// Quantum feedback rule given the opponents' total extraction Σu*:
/// φ = 2e^{ζs}(Σu*)^{3/2}·[e^{−ζs}((Σu*)^{−1/2} − c/√X) − λ*E(s)].
pub fn nash_quantum(
    s: f64,
    x_norm: f64,
    u_others_sum: f64,
    params: &NashParams,
    b_path_value: f64,
) -> Result<f64, StrategyError> {
    if !(u_others_sum > 0.0) {
        return Err(StrategyError::BadInput {
            detail: "opponents' extraction must be positive",
        });
    }
    if !(x_norm > 0.0) {
        return Err(StrategyError::BadInput {
            detail: "stock must be positive",
        });
    }
    let e = crate::math::exp(-params.zeta * s);
    let factor = noise_factor(params.trace_sigma(), s, b_path_value);
    let bracket = e
        * (1.0 / crate::math::sqrt(u_others_sum) - params.c / crate::math::sqrt(x_norm))
        - params.lambda_star * factor;
    Ok(2.0 / e * crate::math::powf(u_others_sum, 1.5) * bracket)
}

const FIXED_POINT_DAMPING: f64 = 0.5;
const FIXED_POINT_TOL: f64 = 1e-10;
const FIXED_POINT_MAX_ITERATIONS: usize = 500;

/// Symmetric closure of the quantum rule: every firm plays u, so the
/// opponents' total is (k−1)u. Damped iteration u ← (1−ω)u + ω·φ((k−1)u).
pub fn nash_symmetric_fixed_point(
    s: f64,
    x_norm: f64,
    params: &NashParams,
    b_path_value: f64,
    u_start: f64,
) -> Result<f64, StrategyError> {
    if params.k < 2 {
        return Err(StrategyError::BadInput {
            detail: "fixed point needs at least two firms",
        });
    }
    let mut u = u_start;
    for _ in 0..FIXED_POINT_MAX_ITERATIONS {
        let others = (params.k - 1) as f64 * u;
        let phi = nash_quantum(s, x_norm, others, params, b_path_value)?;
        let next = (1.0 - FIXED_POINT_DAMPING) * u + FIXED_POINT_DAMPING * phi;
        if crate::math::abs(next - u) <= FIXED_POINT_TOL * (1.0 + crate::math::abs(next)) {
            return Ok(next);
        }
        u = next;
    }
    Err(StrategyError::NoConvergence {
        iterations: FIXED_POINT_MAX_ITERATIONS,
        last: u,
    })
}

/// Pontryagin benchmark under firm symmetry. With every value function
/// identical, V = e^{−ζs}[A(s)√X + B(s)] has gradient term
/// e^{ζs}·V_X·√X = A(s)/2, the firm sum collapses to k·(c + A/2), and
///
/// ```text
/// φ = X(2k−1)² / (2k[c + A/2]) · { k(c + A/2) − (k − 3/2)(c + A/2) }.
/// ```
pub fn nash_pontryagin(
    s: f64,
    x_norm: f64,
    params: &NashParams,
    ode: &OdeSolution,
) -> Result<f64, StrategyError> {
    if !(x_norm > 0.0) {
        return Err(StrategyError::BadInput {
            detail: "stock must be positive",
        });
    }
    let (a_s, _b_s) = ode.sample(s)?;
    let k = params.k as f64;
    let gradient_term = 0.5 * a_s;
    let per_firm = params.c + gradient_term;
    let denominator = 2.0 * k * per_firm;
    if denominator == 0.0 {
        return Err(StrategyError::ZeroDenominator {
            what: "nash pontryagin rule",
            s,
        });
    }
    let braces = k * per_firm - (k - 1.5) * per_firm;
    Ok(x_norm * (2.0 * k - 1.0) * (2.0 * k - 1.0) / denominator * braces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sde::TimeGrid;
    use alloc::vec;

    fn params(k: usize) -> NashParams {
        NashParams {
            k,
            a: 0.3,
            b: 0.4,
            c: 0.3,
            zeta: 0.2,
            lambda_star: 0.1,
            sigma_row: vec![0.25],
        }
    }

    #[test]
    fn balanced_bracket_gives_zero_extraction() {
        // λ* = 0, s = 0, Σu* = 1 and c/√X = 1 zero the bracket.
        let p = NashParams {
            c: 1.0,
            lambda_star: 0.0,
            ..params(3)
        };
        let u = nash_quantum(0.0, 1.0, 1.0, &p, 0.0).unwrap();
        assert_eq!(u, 0.0);
    }

    #[test]
    fn large_stock_limit_is_twice_the_power_term() {
        let p = NashParams {
            c: 1.0,
            lambda_star: 0.0,
            ..params(3)
        };
        let u = nash_quantum(0.0, 1e14, 1.0, &p, 0.0).unwrap();
        assert!((u - 2.0).abs() < 1e-6, "u = {u}");
    }

    #[test]
    fn symmetric_fixed_point_satisfies_the_rule() {
        let p = params(3);
        let u = nash_symmetric_fixed_point(0.1, 4.0, &p, 0.0, 0.5).unwrap();
        let phi = nash_quantum(0.1, 4.0, 2.0 * u, &p, 0.0).unwrap();
        assert!((u - phi).abs() < 1e-9 * (1.0 + u.abs()), "u {u} phi {phi}");
        // Frozen from an independent damped iteration in high precision.
        assert!((u - 4.4169475487679242).abs() < 1e-9, "u = {u}");
    }

    #[test]
    fn nonpositive_opponent_extraction_is_rejected() {
        assert!(matches!(
            nash_quantum(0.0, 1.0, 0.0, &params(2), 0.0),
            Err(StrategyError::BadInput { .. })
        ));
    }

    fn flat_ode(a0: f64, b0: f64) -> OdeSolution {
        let grid = TimeGrid::new(0.1, 10).unwrap();
        OdeSolution {
            grid,
            a_values: vec![a0; 11],
            b_values: vec![b0; 11],
        }
    }

    #[test]
    fn single_firm_pontryagin_collapses_to_three_quarters_x() {
        // k = 1: braces = (3/2)(c + g), prefactor X/(2(c + g)) ⇒ φ = 3X/4.
        let p = params(1);
        let ode = flat_ode(0.8, 0.1);
        for x in [0.5, 1.0, 2.5] {
            let u = nash_pontryagin(0.3, x, &p, &ode).unwrap();
            assert!((u - 0.75 * x).abs() < 1e-14, "u = {u}");
        }
    }

    #[test]
    fn zero_gradient_depends_only_on_structure() {
        let p = params(3);
        let ode = flat_ode(0.0, 0.7);
        let x = 1.3;
        let u = nash_pontryagin(0.0, x, &p, &ode).unwrap();
        // With A ≡ 0 the bracket is c on both sides: φ = 3X(2k−1)²/(4k).
        let k = 3.0;
        assert!((u - 3.0 * x * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (4.0 * k)).abs() < 1e-12);
    }

    #[test]
    fn pontryagin_rule_is_deterministic() {
        let p = params(4);
        let ode = flat_ode(-0.2, 0.0);
        let a = nash_pontryagin(0.5, 2.0, &p, &ode).unwrap();
        let b = nash_pontryagin(0.5, 2.0, &p, &ode).unwrap();
        assert_eq!(a, b);
    }
}
