//! The advertising firm's closed-form feedback rule and its control problem.
//!
//! Dynamics dX = (aX − u) ds + √(σ₀ u) dB with profit e^{−ζs}(pX² − cX²u) and
//! integrating factor g = λ* e^{−as} X. The closed-form rule is
//!
//! ```text
//! φ(s, X) = −1/(c e^{−ζs}) · [ e^{−ζs}(p − X/A) ± √D ]
//! D = e^{−2ζs}(p − X/A)² − e^{−ζs}(2pX e^{−ζs}/A + B)
//! A = cX e^{−ζs} + λ* e^{−as},  B = λ* e^{−as}/A
//! ```
//!
//! D is negative over sizeable parameter regions (all of the table1.cfg
//! regime), so the no-real-root outcome is a typed result, not an error;
//! feedback simulations fall back to u = 0 and count the event.

use alloc::boxed::Box;

use super::StrategyError;
use crate::foc::{FValue, GFunction, ProblemSpec};
use crate::sde::{Guards, ScalarSde};

/// Parameters of the advertising market model.
#[derive(Debug, Clone, Copy)]
pub struct WalrasianQuantumParams {
    /// Price, > 0.
    pub p: f64,
    /// Marginal cost, > 0.
    pub c: f64,
    /// Discount rate, in (0, 1].
    pub zeta: f64,
    /// Growth rate, > 0.
    pub a: f64,
    /// Penalization weight, ≥ 0.
    pub lambda_star: f64,
}

impl WalrasianQuantumParams {
    pub fn validate(&self) -> Result<(), StrategyError> {
        if !(self.p > 0.0 && self.c > 0.0 && self.a > 0.0) {
            return Err(StrategyError::BadParams {
                detail: alloc::string::String::from("p, c, a must be positive"),
            });
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return Err(StrategyError::BadParams {
                detail: alloc::string::String::from("zeta must lie in (0, 1]"),
            });
        }
        if self.lambda_star < 0.0 {
            return Err(StrategyError::BadParams {
                detail: alloc::string::String::from("lambda_star must be nonnegative"),
            });
        }
        Ok(())
    }
}

/// Sign choice in the closed-form rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    /// Default branch: the smaller-magnitude control in the table1.cfg regime.
    Minus,
}

/// Outcome of evaluating the closed-form rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuantumRoot {
    Real(f64),
    NoRealRoot { discriminant: f64 },
}

impl QuantumRoot {
    pub fn real(self) -> Option<f64> {
        match self {
            QuantumRoot::Real(u) => Some(u),
            QuantumRoot::NoRealRoot { .. } => None,
        }
    }
}

/// Intermediate quantities of the rule; shared with the identity test.
pub(crate) fn rule_pieces(s: f64, x: f64, params: &WalrasianQuantumParams) -> (f64, f64, f64, f64) {
    let e = crate::math::exp(-params.zeta * s);
    let l = params.lambda_star * crate::math::exp(-params.a * s);
    let a_term = params.c * x * e + l;
    let b_term = l / a_term;
    (e, l, a_term, b_term)
}

/// Evaluates the closed-form rule on the requested branch.
pub fn walrasian_quantum(
    s: f64,
    x: f64,
    params: &WalrasianQuantumParams,
    branch: Branch,
) -> Result<QuantumRoot, StrategyError> {
    if !(x > 0.0) {
        return Err(StrategyError::BadInput {
            detail: "X must be positive",
        });
    }
    let (e, _l, a_term, b_term) = rule_pieces(s, x, params);
    if a_term == 0.0 {
        // Unreachable under the parameter invariants (c, X > 0, λ* ≥ 0).
        return Err(StrategyError::ZeroDenominator {
            what: "walrasian A-term",
            s,
        });
    }
    let head = e * (params.p - x / a_term);
    let discriminant = head * head - e * (2.0 * params.p * x * e / a_term + b_term);
    if discriminant < 0.0 {
        return Ok(QuantumRoot::NoRealRoot { discriminant });
    }
    let root = crate::math::sqrt(discriminant);
    let signed = match branch {
        Branch::Plus => head + root,
        Branch::Minus => head - root,
    };
    Ok(QuantumRoot::Real(-signed / (params.c * e)))
}

/// Defect of a control against the quadratic the closed-form rule solves:
/// (cEu + E(p − X/A))² − D. Zero (to rounding) at both branches.
pub fn walrasian_rule_defect(s: f64, x: f64, params: &WalrasianQuantumParams, u: f64) -> f64 {
    let (e, _l, a_term, b_term) = rule_pieces(s, x, params);
    let head = e * (params.p - x / a_term);
    let discriminant = head * head - e * (2.0 * params.p * x * e / a_term + b_term);
    let lhs = params.c * e * u + head;
    lhs * lhs - discriminant
}

/// The advertising control problem with analytic f-partials, for the
/// first-order-condition machinery and action sums.
pub fn walrasian_problem(params: &WalrasianQuantumParams, sigma0: f64) -> ProblemSpec {
    let WalrasianQuantumParams {
        p,
        c,
        zeta,
        a,
        lambda_star,
    } = *params;
    ProblemSpec {
        profit: Box::new(move |s, x, u| crate::math::exp(-zeta * s) * (p * x * x - c * x * x * u)),
        sde: ScalarSde {
            drift: Box::new(move |_, x, u| a * x - u),
            diffusion: Box::new(move |_, _, u| crate::math::sqrt(sigma0 * u)),
            guards: Guards::SQRT_SAFE,
        },
        g: GFunction::analytic(
            move |s, x| lambda_star * crate::math::exp(-a * s) * x,
            move |s, x| -a * lambda_star * crate::math::exp(-a * s) * x,
            move |s, _| lambda_star * crate::math::exp(-a * s),
            |_, _| 0.0,
        ),
        zeta,
        partials: Some(Box::new(move |s, x, u| {
            let e = crate::math::exp(-zeta * s);
            let l = lambda_star * crate::math::exp(-a * s);
            FValue {
                f: e * x * x * (p - c * u) + l * x - u * l,
                f_u: -(c * x * x * e + l),
                f_x: 2.0 * x * e * (p - c * u) + l,
                f_xx: 2.0 * e * (p - c * u),
                f_xu: -2.0 * c * x * e,
            }
        })),
    }
}
