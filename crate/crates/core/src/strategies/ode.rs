//! Coupled A(s), B(s) systems behind the Pontryagin value functions,
//! integrated forward from s = 0 with the classic fourth-order one-step
//! method.
//!
//! Neither example states terminal or initial data; A(0) = B(0) = 0 is the
//! conventional default and both are configurable.

use alloc::vec::Vec;

use super::nash::NashParams;
use super::resource::ResourceParams;
use super::StrategyError;
use crate::sde::TimeGrid;

/// Which printed system to integrate.
pub enum AbSystem<'a> {
    /// Two-player extraction:
    /// A' = [ζ + σσ/8 + b/2]A − k₁/(4[c₁ + A/2]) − α₁⁰k₂/(4[c₂ + A/(2α₁⁰)]),
    /// B' = ζB − aA/2.
    Resource(&'a ResourceParams),
    /// k-firm game:
    /// A' = [ζ + σσ/8 − b/2]A − (2k−1)/(2k²[c + A/2])
    ///      + c(2k−1)²/(4k³[c + A/2]²) + (2k−1)²A/(8k²[c + A/2]²),
    /// B' = ζB − aA/2.
    Nash(&'a NashParams),
}

/// Sampled A(s), B(s) on a uniform grid.
#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub grid: TimeGrid,
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
}

impl OdeSolution {
    /// Linear interpolation at `s`; errors outside the covered range.
    pub fn sample(&self, s: f64) -> Result<(f64, f64), StrategyError> {
        let t_end = self.grid.t_end();
        if s < 0.0 || s > t_end * (1.0 + 1e-12) + 1e-15 {
            return Err(StrategyError::BadInput {
                detail: "s outside ODE solution range",
            });
        }
        let position = (s / self.grid.dt()).min((self.grid.n_steps()) as f64);
        let idx = position as usize;
        if idx >= self.grid.n_steps() {
            return Ok((
                self.a_values[self.grid.n_steps()],
                self.b_values[self.grid.n_steps()],
            ));
        }
        let w = position - idx as f64;
        Ok((
            self.a_values[idx] * (1.0 - w) + self.a_values[idx + 1] * w,
            self.b_values[idx] * (1.0 - w) + self.b_values[idx + 1] * w,
        ))
    }
}

const DENOMINATOR_FLOOR: f64 = 1e-12;

fn rhs(system: &AbSystem<'_>, _s: f64, a: f64, b: f64) -> Result<(f64, f64), StrategyError> {
    match system {
        AbSystem::Resource(p) => {
            let trace = super::trace_of_row(&p.sigma_row);
            let den1 = p.c1 + a / 2.0;
            let den2 = p.c2 + a / (2.0 * p.alpha10);
            if crate::math::abs(den1) < DENOMINATOR_FLOOR
                || crate::math::abs(den2) < DENOMINATOR_FLOOR
            {
                return Err(StrategyError::ZeroDenominator {
                    what: "resource A-equation",
                    s: _s,
                });
            }
            let da = (p.zeta + trace / 8.0 + p.b / 2.0) * a
                - p.k1 / (4.0 * den1)
                - p.alpha10 * p.k2 / (4.0 * den2);
            let db = p.zeta * b - 0.5 * p.a * a;
            Ok((da, db))
        }
        AbSystem::Nash(p) => {
            let trace = p.trace_sigma();
            let k = p.k as f64;
            let den = p.c + a / 2.0;
            if crate::math::abs(den) < DENOMINATOR_FLOOR {
                return Err(StrategyError::ZeroDenominator {
                    what: "nash A-equation",
                    s: _s,
                });
            }
            let m = 2.0 * k - 1.0;
            let da = (p.zeta + trace / 8.0 - p.b / 2.0) * a - m / (2.0 * k * k * den)
                + p.c * m * m / (4.0 * k * k * k * den * den)
                + m * m * a / (8.0 * k * k * den * den);
            let db = p.zeta * b - 0.5 * p.a * a;
            Ok((da, db))
        }
    }
}

/// Fourth-order integration of the chosen system on `grid`, forward from
/// s = 0 with data (a0, b0). A denominator passing through zero aborts with
/// the offending time.
pub fn solve_ab_odes(
    system: AbSystem<'_>,
    grid: &TimeGrid,
    a0: f64,
    b0: f64,
) -> Result<OdeSolution, StrategyError> {
    let n = grid.n_steps();
    let h = grid.dt();
    let mut a_values = Vec::with_capacity(n + 1);
    let mut b_values = Vec::with_capacity(n + 1);
    let (mut a, mut b) = (a0, b0);
    a_values.push(a);
    b_values.push(b);

    let sign_of = |v: f64| v > 0.0;
    rhs(&system, 0.0, a, b)?;
    let initial_sign = match &system {
        AbSystem::Resource(p) => sign_of(p.c1 + a / 2.0),
        AbSystem::Nash(p) => sign_of(p.c + a / 2.0),
    };

    for step in 0..n {
        let s = grid.time_at(step);
        let (k1a, k1b) = rhs(&system, s, a, b)?;
        let (k2a, k2b) = rhs(&system, s + h / 2.0, a + h * k1a / 2.0, b + h * k1b / 2.0)?;
        let (k3a, k3b) = rhs(&system, s + h / 2.0, a + h * k2a / 2.0, b + h * k2b / 2.0)?;
        let (k4a, k4b) = rhs(&system, s + h, a + h * k3a, b + h * k3b)?;
        a += h * (k1a + 2.0 * k2a + 2.0 * k3a + k4a) / 6.0;
        b += h * (k1b + 2.0 * k2b + 2.0 * k3b + k4b) / 6.0;
        if !(a.is_finite() && b.is_finite()) {
            return Err(StrategyError::ZeroDenominator {
                what: "AB system (non-finite state)",
                s: grid.time_at(step + 1),
            });
        }
        let now_sign = match &system {
            AbSystem::Resource(p) => sign_of(p.c1 + a / 2.0),
            AbSystem::Nash(p) => sign_of(p.c + a / 2.0),
        };
        if now_sign != initial_sign {
            return Err(StrategyError::ZeroDenominator {
                what: "AB system denominator crossed zero",
                s: grid.time_at(step + 1),
            });
        }
        a_values.push(a);
        b_values.push(b);
    }
    Ok(OdeSolution {
        grid: *grid,
        a_values,
        b_values,
    })
}
