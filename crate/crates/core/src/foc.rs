//! The integrating-factor function g, the assembled f function, and the
//! Wick-rotated first-order condition
//!
//! ```text
//! f_u · (f_xx)^2 = 2 · f_x · f_xu,        f = π + g + g_s + μ g_x + ½ σ² g_xx
//! ```
//!
//! whose root in u is the optimal feedback control. The residual is always
//! evaluated in the product form above; the rearranged form divides by f_xx
//! and is singular where f is linear in X.

use alloc::boxed::Box;

use crate::sde::ScalarSde;

/// Relative step factor for central differences (see `step_size`).
pub const FD_STEP_FACTOR: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub enum FocError {
    /// f evaluated to a non-finite value.
    Domain { s: f64, x: f64, u: f64 },
    /// No sign change of the residual in the bracket, even after scanning.
    NoSignChange { lo: f64, hi: f64 },
    /// Root refinement did not reach the tolerance in 200 iterations.
    MaxIterations { last: f64, residual: f64 },
}

impl core::fmt::Display for FocError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FocError::Domain { s, x, u } => {
                write!(f, "f is not finite at (s = {s}, X = {x}, u = {u})")
            }
            FocError::NoSignChange { lo, hi } => {
                write!(f, "no sign change in bracket [{lo}, {hi}]")
            }
            FocError::MaxIterations { last, residual } => {
                write!(
                    f,
                    "max iterations reached (u = {last}, residual = {residual})"
                )
            }
        }
    }
}

impl core::error::Error for FocError {}

type Map2 = Box<dyn Fn(f64, f64) -> f64 + Sync>;
type Map3 = Box<dyn Fn(f64, f64, f64) -> f64 + Sync>;

/// How the partial derivatives of g are obtained.
pub enum GDerivatives {
    Analytic {
        d_s: Map2,
        d_x: Map2,
        d_xx: Map2,
    },
    /// Central differences of `value` with step 1e-5·max(1, |X|), O(h²).
    FiniteDifference,
}

/// The integrating-factor function g(s, X) with its partials.
pub struct GFunction {
    pub value: Map2,
    pub mode: GDerivatives,
}

impl GFunction {
    pub fn analytic(
        value: impl Fn(f64, f64) -> f64 + Sync + 'static,
        d_s: impl Fn(f64, f64) -> f64 + Sync + 'static,
        d_x: impl Fn(f64, f64) -> f64 + Sync + 'static,
        d_xx: impl Fn(f64, f64) -> f64 + Sync + 'static,
    ) -> Self {
        GFunction {
            value: Box::new(value),
            mode: GDerivatives::Analytic {
                d_s: Box::new(d_s),
                d_x: Box::new(d_x),
                d_xx: Box::new(d_xx),
            },
        }
    }

    pub fn finite_difference(value: impl Fn(f64, f64) -> f64 + Sync + 'static) -> Self {
        GFunction {
            value: Box::new(value),
            mode: GDerivatives::FiniteDifference,
        }
    }

    pub fn zero() -> Self {
        GFunction::analytic(|_, _| 0.0, |_, _| 0.0, |_, _| 0.0, |_, _| 0.0)
    }

    #[inline]
    pub fn value(&self, s: f64, x: f64) -> f64 {
        (self.value)(s, x)
    }

    pub fn d_s(&self, s: f64, x: f64) -> f64 {
        match &self.mode {
            GDerivatives::Analytic { d_s, .. } => d_s(s, x),
            GDerivatives::FiniteDifference => {
                let h = step_size(s);
                ((self.value)(s + h, x) - (self.value)(s - h, x)) / (2.0 * h)
            }
        }
    }

    pub fn d_x(&self, s: f64, x: f64) -> f64 {
        match &self.mode {
            GDerivatives::Analytic { d_x, .. } => d_x(s, x),
            GDerivatives::FiniteDifference => {
                let h = step_size(x);
                ((self.value)(s, x + h) - (self.value)(s, x - h)) / (2.0 * h)
            }
        }
    }

    pub fn d_xx(&self, s: f64, x: f64) -> f64 {
        match &self.mode {
            GDerivatives::Analytic { d_xx, .. } => d_xx(s, x),
            GDerivatives::FiniteDifference => {
                let h = step_size(x);
                ((self.value)(s, x + h) - 2.0 * (self.value)(s, x) + (self.value)(s, x - h))
                    / (h * h)
            }
        }
    }
}

/// f and the partials entering the first-order condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FValue {
    pub f: f64,
    pub f_u: f64,
    pub f_x: f64,
    pub f_xx: f64,
    pub f_xu: f64,
}

/// A scalar control problem: profit, dynamics, integrating factor, discount.
pub struct ProblemSpec {
    /// Instantaneous profit π(s, X, u), discount included by the caller.
    pub profit: Map3,
    pub sde: ScalarSde,
    pub g: GFunction,
    /// Discount rate ζ ∈ (0, 1]; carried for experiment bookkeeping.
    pub zeta: f64,
    /// Analytic partials of f, bypassing finite differences when supplied.
    pub partials: Option<Box<dyn Fn(f64, f64, f64) -> FValue + Sync>>,
}

#[inline]
fn step_size(v: f64) -> f64 {
    FD_STEP_FACTOR
        * if crate::math::abs(v) > 1.0 {
            crate::math::abs(v)
        } else {
            1.0
        }
}

/// f(s, X, u) = π + g + ∂g/∂s + μ·∂g/∂X + ½σ²·∂²g/∂X².
pub fn f_value(spec: &ProblemSpec, s: f64, x: f64, u: f64) -> f64 {
    let mu = (spec.sde.drift)(s, x, u);
    let g_xx = spec.g.d_xx(s, x);
    // The diffusion only enters through ½σ²·g_xx; skipping it when g_xx = 0
    // keeps f defined where σ itself is not (√u dynamics at negative u).
    let curvature = if g_xx == 0.0 {
        0.0
    } else {
        let sigma = (spec.sde.diffusion)(s, x, u);
        0.5 * sigma * sigma * g_xx
    };
    (spec.profit)(s, x, u)
        + spec.g.value(s, x)
        + spec.g.d_s(s, x)
        + mu * spec.g.d_x(s, x)
        + curvature
}

/// Assembles f with partials using explicit central-difference steps.
///
/// Exposed so convergence checks can drive the step size; ordinary callers
/// want [`compute_f`].
pub fn compute_f_with_steps(
    spec: &ProblemSpec,
    s: f64,
    x: f64,
    u: f64,
    h_x: f64,
    h_u: f64,
) -> Result<FValue, FocError> {
    let f = f_value(spec, s, x, u);
    if !f.is_finite() {
        return Err(FocError::Domain { s, x, u });
    }
    if let Some(partials) = &spec.partials {
        let mut v = partials(s, x, u);
        v.f = f;
        return Ok(v);
    }
    let fp = |xx: f64, uu: f64| f_value(spec, s, xx, uu);
    let f_u = (fp(x, u + h_u) - fp(x, u - h_u)) / (2.0 * h_u);
    let f_x = (fp(x + h_x, u) - fp(x - h_x, u)) / (2.0 * h_x);
    let f_xx = (fp(x + h_x, u) - 2.0 * f + fp(x - h_x, u)) / (h_x * h_x);
    let f_xu = (fp(x + h_x, u + h_u) - fp(x + h_x, u - h_u) - fp(x - h_x, u + h_u)
        + fp(x - h_x, u - h_u))
        / (4.0 * h_x * h_u);
    let v = FValue {
        f,
        f_u,
        f_x,
        f_xx,
        f_xu,
    };
    if !(v.f_u.is_finite() && v.f_x.is_finite() && v.f_xx.is_finite() && v.f_xu.is_finite()) {
        return Err(FocError::Domain { s, x, u });
    }
    Ok(v)
}

/// Assembles f with partials at the default steps h = 1e-5·max(1, |·|).
pub fn compute_f(spec: &ProblemSpec, s: f64, x: f64, u: f64) -> Result<FValue, FocError> {
    compute_f_with_steps(spec, s, x, u, step_size(x), step_size(u))
}

/// Residual of the first-order condition: f_u·(f_xx)² − 2·f_x·f_xu.
pub fn foc_residual(spec: &ProblemSpec, s: f64, x: f64, u: f64) -> Result<f64, FocError> {
    let v = compute_f(spec, s, x, u)?;
    Ok(v.f_u * v.f_xx * v.f_xx - 2.0 * v.f_x * v.f_xu)
}

/// Magnitude scale of the residual terms, for relative tolerances.
pub fn residual_scale(spec: &ProblemSpec, s: f64, x: f64, u: f64) -> Result<f64, FocError> {
    let v = compute_f(spec, s, x, u)?;
    Ok(crate::math::abs(v.f_u) * v.f_xx * v.f_xx + 2.0 * crate::math::abs(v.f_x * v.f_xu))
}

const MAX_SOLVE_ITERATIONS: usize = 200;
const SCAN_POINTS: usize = 64;

/// Root of the first-order condition inside `bracket`.
///
/// If the residual does not change sign across the bracket ends, 64
/// equispaced points are scanned for a sign change first. Bisection narrows
/// the bracket, a secant step polishes, and the result satisfies
/// `|residual| ≤ tol·(1 + scale)`.
pub fn solve_foc(
    spec: &ProblemSpec,
    s: f64,
    x: f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<f64, FocError> {
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    let mut r_lo = foc_residual(spec, s, x, lo)?;
    let mut r_hi = foc_residual(spec, s, x, hi)?;

    let accepted = |u: f64, r: f64| -> Result<bool, FocError> {
        Ok(crate::math::abs(r) <= tol * (1.0 + residual_scale(spec, s, x, u)?))
    };

    // A usable bracket has residuals of strictly opposite sign, or exactly
    // one exact zero; an identically-zero residual is degenerate.
    let sign_change =
        |a: f64, b: f64| (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0) || ((a == 0.0) != (b == 0.0));

    if !sign_change(r_lo, r_hi) {
        // Scan for a sign change on an equispaced grid.
        let step = (hi - lo) / SCAN_POINTS as f64;
        let mut found = None;
        let mut prev_u = lo;
        let mut prev_r = r_lo;
        for i in 1..=SCAN_POINTS {
            let u = lo + step * i as f64;
            let r = foc_residual(spec, s, x, u)?;
            if sign_change(prev_r, r) {
                found = Some((prev_u, prev_r, u, r));
                break;
            }
            prev_u = u;
            prev_r = r;
        }
        match found {
            Some((a, ra, b, rb)) => {
                lo = a;
                r_lo = ra;
                hi = b;
                r_hi = rb;
            }
            None => return Err(FocError::NoSignChange { lo, hi }),
        }
    }

    if r_lo == 0.0 && accepted(lo, r_lo)? {
        return Ok(lo);
    }
    if r_hi == 0.0 && accepted(hi, r_hi)? {
        return Ok(hi);
    }

    let mut iterations = 0usize;
    let mut u = 0.5 * (lo + hi);
    let mut r = foc_residual(spec, s, x, u)?;
    while iterations < MAX_SOLVE_ITERATIONS {
        iterations += 1;
        if accepted(u, r)? {
            return Ok(u);
        }
        if r_lo * r <= 0.0 {
            hi = u;
            r_hi = r;
        } else {
            lo = u;
            r_lo = r;
        }
        // Secant proposal from the bracket ends, falling back to bisection
        // whenever it leaves the bracket.
        let denom = r_hi - r_lo;
        let secant = if denom != 0.0 {
            lo - r_lo * (hi - lo) / denom
        } else {
            0.5 * (lo + hi)
        };
        u = if secant > lo && secant < hi {
            secant
        } else {
            0.5 * (lo + hi)
        };
        r = foc_residual(spec, s, x, u)?;
    }
    Err(FocError::MaxIterations {
        last: u,
        residual: r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sde::Guards;
    use crate::strategies::walrasian::{walrasian_problem, WalrasianQuantumParams};

    fn constant_profit_problem() -> ProblemSpec {
        ProblemSpec {
            profit: Box::new(|_, _, _| 1.0),
            sde: ScalarSde {
                drift: Box::new(|_, _, _| 0.0),
                diffusion: Box::new(|_, _, _| 0.0),
                guards: Guards::NONE,
            },
            g: GFunction::zero(),
            zeta: 0.2,
            partials: None,
        }
    }

    #[test]
    fn constant_case_has_unit_f_and_zero_partials() {
        let spec = constant_profit_problem();
        let v = compute_f(&spec, 0.3, 1.2, 0.4).unwrap();
        assert_eq!(v.f, 1.0);
        assert!(v.f_u.abs() < 1e-9);
        assert!(v.f_x.abs() < 1e-9);
        assert!(v.f_xx.abs() < 1e-4);
        assert!(v.f_xu.abs() < 1e-9);
    }

    #[test]
    fn printed_f_of_the_advertising_example_is_reproduced() {
        // g = λ e^{-a s} X, π = e^{-ζ s}(p X² − c X² u) at the table1.cfg values.
        let params = WalrasianQuantumParams {
            p: 1.0,
            c: 0.8,
            zeta: 0.2,
            a: 0.3,
            lambda_star: 0.6,
        };
        let spec = walrasian_problem(&params, 0.5);
        let v = compute_f(&spec, 0.0, 1.0, 0.0).unwrap();
        // pX² + λX − aλX + aXλ at (0, 1, 0): 1.0 + 0.6 = 1.6
        assert!((v.f - 1.6).abs() < 1e-14);
        // Analytic partials at that point.
        assert!((v.f_u - -(0.8 + 0.6)).abs() < 1e-12);
        assert!((v.f_x - (2.0 + 0.6)).abs() < 1e-12);
        assert!((v.f_xx - 2.0).abs() < 1e-12);
        assert!((v.f_xu - -1.6).abs() < 1e-12);
    }

    #[test]
    fn linear_g_and_state_free_drift_leave_fxx_to_profit() {
        // μ independent of X, g linear in X ⇒ f_xx = π_xx = 6x at (s, x, u).
        let spec = ProblemSpec {
            profit: Box::new(|_, x, _| x * x * x),
            sde: ScalarSde {
                drift: Box::new(|_, _, u| 1.0 - u),
                diffusion: Box::new(|_, _, _| 0.3),
                guards: Guards::NONE,
            },
            g: GFunction::analytic(|_, x| 2.0 * x, |_, _| 0.0, |_, _| 2.0, |_, _| 0.0),
            zeta: 0.2,
            partials: None,
        };
        let x = 0.7;
        let v = compute_f(&spec, 0.1, x, 0.2).unwrap();
        assert!((v.f_xx - 6.0 * x).abs() < 1e-4, "f_xx {}", v.f_xx);
    }

    #[test]
    fn residual_vanishes_when_f_is_u_independent() {
        let spec = constant_profit_problem();
        let r = foc_residual(&spec, 0.0, 1.0, 0.3).unwrap();
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn synthetic_linear_residual_has_unit_root() {
        // f_u = u − 1, f_xx = 1, f_x = 0 ⇒ residual = u − 1.
        let spec = ProblemSpec {
            profit: Box::new(|_, _, _| 0.0),
            sde: ScalarSde {
                drift: Box::new(|_, _, _| 0.0),
                diffusion: Box::new(|_, _, _| 0.0),
                guards: Guards::NONE,
            },
            g: GFunction::zero(),
            zeta: 0.2,
            partials: Some(Box::new(|_, _, u| FValue {
                f: 0.0,
                f_u: u - 1.0,
                f_x: 0.0,
                f_xx: 1.0,
                f_xu: 0.0,
            })),
        };
        let root = solve_foc(&spec, 0.0, 1.0, (-4.0, 5.0), 1e-12).unwrap();
        assert!((root - 1.0).abs() < 1e-9, "root {root}");
    }

    #[test]
    fn degenerate_residual_reports_no_sign_change() {
        let spec = constant_profit_problem();
        let err = solve_foc(&spec, 0.0, 1.0, (-1.0, 1.0), 1e-10).unwrap_err();
        assert!(matches!(err, FocError::NoSignChange { .. }));
    }

    #[test]
    fn advertising_example_roots_satisfy_the_condition() {
        // p = 1, c = 10, ζ = 0.2, a = 0.3, λ* = 0 at (s, X) = (0, 1): the
        // stationarity equation factors as (p − cu)(p − cu − 2) = 0 up to
        // scale, with roots u = 0.1 and u = -0.1.
        let params = WalrasianQuantumParams {
            p: 1.0,
            c: 10.0,
            zeta: 0.2,
            a: 0.3,
            lambda_star: 0.0,
        };
        let spec = walrasian_problem(&params, 0.5);
        let high = solve_foc(&spec, 0.0, 1.0, (0.05, 0.15), 1e-10).unwrap();
        let low = solve_foc(&spec, 0.0, 1.0, (-0.15, -0.05), 1e-10).unwrap();
        assert!((high - 0.1).abs() < 1e-8, "high {high}");
        assert!((low - -0.1).abs() < 1e-8, "low {low}");
        for u in [high, low] {
            let r = foc_residual(&spec, 0.0, 1.0, u).unwrap();
            let scale = residual_scale(&spec, 0.0, 1.0, u).unwrap();
            assert!(r.abs() <= 1e-10 * (1.0 + scale));
        }
    }

    #[test]
    fn finite_difference_partials_match_analytic_route() {
        let params = WalrasianQuantumParams {
            p: 1.0,
            c: 0.8,
            zeta: 0.2,
            a: 0.3,
            lambda_star: 0.6,
        };
        let with = walrasian_problem(&params, 0.5);
        let mut without = walrasian_problem(&params, 0.5);
        without.partials = None;
        for (s, x, u) in [(0.0, 1.0, 0.2), (0.4, 1.7, -0.1), (0.9, 0.6, 0.05)] {
            let a = compute_f(&with, s, x, u).unwrap();
            let b = compute_f(&without, s, x, u).unwrap();
            assert!((a.f_u - b.f_u).abs() < 1e-6);
            assert!((a.f_x - b.f_x).abs() < 1e-6);
            assert!((a.f_xx - b.f_xx).abs() < 1e-4);
            assert!((a.f_xu - b.f_xu).abs() < 1e-5);
        }
    }
}
