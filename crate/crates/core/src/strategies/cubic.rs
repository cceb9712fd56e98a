//! The consumer-goods firm's cubic feedback rule and its Pontryagin
//! counterpart 2bX/3.
//!
//! With revenue R(X) = pX², dynamics dX = (bX − u) ds + √(2b) dB and
//! g = λ* e^{−bs} X, the stationarity condition reduces to the cubic
//! B₀u³ + B₁u² + B₂u + B₃ = 0 in the control, solved in closed form:
//! Cardano's formula when the shifted discriminant is nonnegative, the
//! trigonometric three-root form otherwise.

use alloc::boxed::Box;
use alloc::vec::Vec;

use super::StrategyError;
use crate::foc::{FValue, GFunction, ProblemSpec};
use crate::sde::{Guards, ScalarSde};

/// Parameters of the consumer-goods market model.
#[derive(Debug, Clone, Copy)]
pub struct Ex3Params {
    /// Revenue curvature: R(X) = pX².
    pub p: f64,
    /// Growth rate.
    pub b: f64,
    /// Marginal cost.
    pub c: f64,
    pub zeta: f64,
    pub lambda_star: f64,
}

/// Coefficients of the cubic in the control, highest degree first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoefficients {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

impl CubicCoefficients {
    /// Polynomial value at `u`.
    pub fn eval(&self, u: f64) -> f64 {
        ((self.b0 * u + self.b1) * u + self.b2) * u + self.b3
    }

    /// Largest coefficient magnitude, the natural residual scale.
    pub fn scale(&self) -> f64 {
        let mut m = crate::math::abs(self.b0);
        for v in [self.b1, self.b2, self.b3] {
            if crate::math::abs(v) > m {
                m = crate::math::abs(v);
            }
        }
        m
    }
}

/// Cubic coefficients at (s, X):
/// B₀ = 4c²e^{−ζs}, B₁ = 4(cX)²R″e^{−2ζs},
/// B₂ = 4c[λ*Xe^{−(b+ζ)s} − R′e^{−ζs} − λ*e^{−bs}], B₃ = (λ*)²R″e^{−2bs}.
pub fn ex3_cubic_coeffs(s: f64, x: f64, params: &Ex3Params) -> CubicCoefficients {
    let Ex3Params {
        p,
        b,
        c,
        zeta,
        lambda_star,
    } = *params;
    let e = crate::math::exp(-zeta * s);
    let r_prime = 2.0 * p * x;
    let r_double = 2.0 * p;
    CubicCoefficients {
        b0: 4.0 * c * c * e,
        b1: 4.0 * (c * x) * (c * x) * r_double * crate::math::exp(-2.0 * zeta * s),
        b2: 4.0
            * c
            * (lambda_star * x * crate::math::exp(-(b + zeta) * s)
                - r_prime * e
                - lambda_star * crate::math::exp(-b * s)),
        b3: lambda_star * lambda_star * r_double * crate::math::exp(-2.0 * b * s),
    }
}

/// Real cube root.
#[inline]
fn cbrt(v: f64) -> f64 {
    crate::math::cbrt(v)
}

/// All real roots of the cubic: one when Δ = D₂² + (D₃ − D₁²)³ ≥ 0 (Cardano
/// with real cube roots), three otherwise (trigonometric form).
pub fn cardano_real_roots(coeffs: &CubicCoefficients) -> Result<Vec<f64>, StrategyError> {
    if coeffs.b0 == 0.0 {
        return Err(StrategyError::NotCubic);
    }
    let d1 = -coeffs.b1 / (3.0 * coeffs.b0);
    let d2 = d1 * d1 * d1
        + (coeffs.b1 * coeffs.b2 - 3.0 * coeffs.b0 * coeffs.b3) / (6.0 * coeffs.b0 * coeffs.b0);
    let d3 = coeffs.b2 / (3.0 * coeffs.b0);
    let shifted = d3 - d1 * d1;
    let delta = d2 * d2 + shifted * shifted * shifted;
    if delta >= 0.0 {
        let r = crate::math::sqrt(delta);
        let mut roots = Vec::with_capacity(1);
        roots.push(d1 + cbrt(d2 + r) + cbrt(d2 - r));
        Ok(roots)
    } else {
        // Three real roots: 2√m cos(θ/3 − 2πj/3) shifted by D₁, m = D₁² − D₃.
        let m = d1 * d1 - d3;
        let mut arg = d2 / crate::math::powf(m, 1.5);
        if arg > 1.0 {
            arg = 1.0;
        } else if arg < -1.0 {
            arg = -1.0;
        }
        let theta = crate::math::acos(arg);
        let radius = 2.0 * crate::math::sqrt(m);
        let mut roots = Vec::with_capacity(3);
        for j in 0..3 {
            let angle = theta / 3.0 - 2.0 * core::f64::consts::PI * j as f64 / 3.0;
            roots.push(d1 + radius * crate::math::cos(angle));
        }
        Ok(roots)
    }
}

/// The Pontryagin benchmark rule for the same firm: the nonzero branch 2bX/3.
pub fn ex3_pontryagin(_s: f64, x: f64, b: f64) -> f64 {
    2.0 * b * x / 3.0
}

/// The consumer-goods control problem with analytic f-partials.
pub fn ex3_problem(params: &Ex3Params) -> ProblemSpec {
    let Ex3Params {
        p,
        b,
        c,
        zeta,
        lambda_star,
    } = *params;
    ProblemSpec {
        profit: Box::new(move |s, x, u| crate::math::exp(-zeta * s) * (p * x * x - c * x * u * u)),
        sde: ScalarSde {
            drift: Box::new(move |_, x, u| b * x - u),
            // Additive noise: no root terms, so no coefficient guards.
            diffusion: Box::new(move |_, _, _| crate::math::sqrt(2.0 * b)),
            guards: Guards::NONE,
        },
        g: GFunction::analytic(
            move |s, x| lambda_star * crate::math::exp(-b * s) * x,
            move |s, x| -b * lambda_star * crate::math::exp(-b * s) * x,
            move |s, _| lambda_star * crate::math::exp(-b * s),
            |_, _| 0.0,
        ),
        zeta,
        partials: Some(Box::new(move |s, x, u| {
            let e = crate::math::exp(-zeta * s);
            let l = lambda_star * crate::math::exp(-b * s);
            FValue {
                f: e * (p * x * x - c * x * u * u) + l * x - u * l,
                f_u: -(2.0 * c * x * u * e + l),
                f_x: e * (2.0 * p * x - c * u * u) + l,
                f_xx: 2.0 * p * e,
                f_xu: -2.0 * c * u * e,
            }
        })),
    }
}

/// Preferred control among the real roots: smallest nonnegative, else
/// smallest magnitude (advertising expenditure is economically nonnegative).
pub fn preferred_root(roots: &[f64]) -> Option<f64> {
    super::smallest_admissible(roots)
}
