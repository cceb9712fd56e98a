//! Exponential path reweighting, effective-sample-size diagnostics, weighted
//! control estimation, and grid propagation of the damping kernel.
//!
//! All exponential weightings are computed with the shift-by-extremum
//! (log-sum-exp) discipline so cost scales far beyond the double exponent
//! range stay usable.

use alloc::vec;
use alloc::vec::Vec;

use crate::foc::{f_value, ProblemSpec};
use crate::sde::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum PathIntegralError {
    EmptyInput,
    NonFiniteCost {
        index: usize,
    },
    LengthMismatch {
        controls: usize,
        weights: usize,
    },
    /// Every node of the damped density is zero.
    KernelAnnihilatedDensity,
    NegativeDensity {
        index: usize,
    },
    BadStep {
        detail: &'static str,
    },
    /// f evaluation failed inside the action sum.
    ActionDomain {
        step: usize,
    },
}

impl core::fmt::Display for PathIntegralError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PathIntegralError::EmptyInput => write!(f, "empty input"),
            PathIntegralError::NonFiniteCost { index } => {
                write!(f, "non-finite cost at index {index}")
            }
            PathIntegralError::LengthMismatch { controls, weights } => {
                write!(
                    f,
                    "length mismatch: {controls} controls vs {weights} weights"
                )
            }
            PathIntegralError::KernelAnnihilatedDensity => {
                write!(f, "kernel annihilated density")
            }
            PathIntegralError::NegativeDensity { index } => {
                write!(f, "negative density value at node {index}")
            }
            PathIntegralError::BadStep { detail } => write!(f, "bad step: {detail}"),
            PathIntegralError::ActionDomain { step } => {
                write!(f, "action integrand not finite at step {step}")
            }
        }
    }
}

impl core::error::Error for PathIntegralError {}

/// Whether large costs should attract or repel weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostSense {
    /// w_i ∝ exp(+ε·J_i): profits, larger is better.
    Maximize,
    /// w_i ∝ exp(−ε·J_i): costs, smaller is better.
    Minimize,
}

/// Normalized exponential weights with their effective sample size.
#[derive(Debug, Clone)]
pub struct WeightedEnsemble {
    pub costs: Vec<f64>,
    pub weights: Vec<f64>,
    pub ess: f64,
}

/// 1/Σŵ² for already-normalized weights.
pub fn effective_sample_size(weights: &[f64]) -> f64 {
    let sum_sq: f64 = weights.iter().map(|w| w * w).sum();
    1.0 / sum_sq
}

/// Exponential importance weights w_i ∝ exp(±ε_w·J_i), shifted by the
/// extremum before exponentiation; ess = 1/Σw².
pub fn exp_weights(
    costs: &[f64],
    eps_w: f64,
    sense: CostSense,
) -> Result<WeightedEnsemble, PathIntegralError> {
    if costs.is_empty() {
        return Err(PathIntegralError::EmptyInput);
    }
    if let Some(index) = costs.iter().position(|c| !c.is_finite()) {
        return Err(PathIntegralError::NonFiniteCost { index });
    }
    let reference = match sense {
        CostSense::Maximize => costs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        CostSense::Minimize => costs.iter().cloned().fold(f64::INFINITY, f64::min),
    };
    let sign = match sense {
        CostSense::Maximize => 1.0,
        CostSense::Minimize => -1.0,
    };
    let mut weights: Vec<f64> = costs
        .iter()
        .map(|j| crate::math::exp(sign * eps_w * (j - reference)))
        .collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let ess = effective_sample_size(&weights);
    Ok(WeightedEnsemble {
        costs: costs.to_vec(),
        weights,
        ess,
    })
}

/// Convex combination Σ w_i·u^{(i)} of control vectors.
pub fn weighted_control(
    controls: &[Vec<f64>],
    ensemble: &WeightedEnsemble,
) -> Result<Vec<f64>, PathIntegralError> {
    if controls.len() != ensemble.weights.len() {
        return Err(PathIntegralError::LengthMismatch {
            controls: controls.len(),
            weights: ensemble.weights.len(),
        });
    }
    if controls.is_empty() {
        return Err(PathIntegralError::EmptyInput);
    }
    let dim = controls[0].len();
    let mut out = vec![0.0; dim];
    for (control, weight) in controls.iter().zip(&ensemble.weights) {
        if control.len() != dim {
            return Err(PathIntegralError::LengthMismatch {
                controls: control.len(),
                weights: dim,
            });
        }
        for (slot, value) in out.iter_mut().zip(control) {
            *slot += weight * value;
        }
    }
    Ok(out)
}

/// Nonnegative density on a uniform 1-D grid, kept at unit mass Σψ·Δx = 1.
#[derive(Debug, Clone)]
pub struct GridDensity {
    pub x0: f64,
    pub dx: f64,
    pub psi: Vec<f64>,
}

impl GridDensity {
    /// Builds and normalizes a density; values must be nonnegative with
    /// positive total mass.
    pub fn new(x0: f64, dx: f64, psi: Vec<f64>) -> Result<Self, PathIntegralError> {
        if psi.is_empty() {
            return Err(PathIntegralError::EmptyInput);
        }
        if !(dx > 0.0) {
            return Err(PathIntegralError::BadStep {
                detail: "dx must be positive",
            });
        }
        if let Some(index) = psi.iter().position(|v| *v < 0.0 || !v.is_finite()) {
            return Err(PathIntegralError::NegativeDensity { index });
        }
        let mut density = GridDensity { x0, dx, psi };
        density.renormalize()?;
        Ok(density)
    }

    pub fn mass(&self) -> f64 {
        self.psi.iter().sum::<f64>() * self.dx
    }

    fn renormalize(&mut self) -> Result<(), PathIntegralError> {
        let mass = self.mass();
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(PathIntegralError::KernelAnnihilatedDensity);
        }
        for v in self.psi.iter_mut() {
            *v /= mass;
        }
        Ok(())
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }
}

/// One damping step of the transition kernel: ψ ← exp(−ε·f)·ψ, then
/// renormalization to unit mass (which is what the penalization constant
/// does in the continuum limit). The exponent is shifted by min f before
/// exponentiation; the shift cancels in the renormalization.
pub fn propagate_kernel(
    density: &GridDensity,
    f_values: &[f64],
    eps: f64,
) -> Result<GridDensity, PathIntegralError> {
    if f_values.len() != density.psi.len() {
        return Err(PathIntegralError::LengthMismatch {
            controls: f_values.len(),
            weights: density.psi.len(),
        });
    }
    if !(eps > 0.0) {
        return Err(PathIntegralError::BadStep {
            detail: "eps must be positive",
        });
    }
    let f_min = f_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut next = density.clone();
    for (value, f) in next.psi.iter_mut().zip(f_values) {
        *value *= crate::math::exp(-eps * (f - f_min));
    }
    next.renormalize()?;
    Ok(next)
}

/// Discrete action Σ_n f(s_n, X_n, u_n)·Δs along a scalar path.
pub fn discrete_action(path: &Path, spec: &ProblemSpec) -> Result<f64, PathIntegralError> {
    let dt = path.grid.dt();
    let mut total = 0.0;
    for (step, control) in path.controls.iter().enumerate() {
        let s = path.grid.time_at(step);
        let value = f_value(spec, s, path.states[step][0], control[0]);
        if !value.is_finite() {
            return Err(PathIntegralError::ActionDomain { step });
        }
        total += value * dt;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foc::GFunction;
    use crate::sde::{simulate_path, BrownianIncrements, Guards, ScalarSde, TimeGrid, ZeroControl};
    use alloc::boxed::Box;

    fn unit_profit_problem() -> ProblemSpec {
        ProblemSpec {
            profit: Box::new(|_, _, _| 1.0),
            sde: ScalarSde {
                drift: Box::new(|_, x, _| 0.1 * x),
                diffusion: Box::new(|_, _, _| 0.0),
                guards: Guards::NONE,
            },
            g: GFunction::zero(),
            zeta: 0.2,
            partials: None,
        }
    }

    fn deterministic_path(grid: &TimeGrid) -> Path {
        let sde = ScalarSde {
            drift: Box::new(|_, x, _| 0.1 * x),
            diffusion: Box::new(|_, _, _| 0.0),
            guards: Guards::NONE,
        };
        let noise = BrownianIncrements::generate(0, 0, grid.n_steps(), 1, grid.dt());
        simulate_path(&[1.0], &sde, &ZeroControl(1), grid, &noise).unwrap()
    }

    #[test]
    fn constant_integrand_sums_to_horizon() {
        let grid = TimeGrid::from_horizon(1.0, 0.01).unwrap();
        let path = deterministic_path(&grid);
        let action = discrete_action(&path, &unit_profit_problem()).unwrap();
        assert!((action - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_g_reduces_to_profit_riemann_sum() {
        let grid = TimeGrid::from_horizon(1.0, 0.02).unwrap();
        let path = deterministic_path(&grid);
        let mut spec = unit_profit_problem();
        spec.profit = Box::new(|s, x, _| s + x);
        let action = discrete_action(&path, &spec).unwrap();
        let mut expected = 0.0;
        for n in 0..grid.n_steps() {
            expected += (grid.time_at(n) + path.states[n][0]) * grid.dt();
        }
        assert!((action - expected).abs() < 1e-12);
    }

    #[test]
    fn refinement_changes_action_at_first_order() {
        // Left-endpoint sums of a smooth integrand converge at O(dt):
        // Richardson against a much finer reference keeps the ratio near 2.
        let action_at = |dt: f64| {
            let grid = TimeGrid::from_horizon(1.0, dt).unwrap();
            let path = deterministic_path(&grid);
            let mut with_profit = unit_profit_problem();
            with_profit.profit = Box::new(|s, x, _| s * s + x);
            discrete_action(&path, &with_profit).unwrap()
        };
        let reference = action_at(1.0 / 512.0);
        let coarse = action_at(1.0 / 64.0);
        let fine = action_at(1.0 / 128.0);
        let ratio = (coarse - reference) / (fine - reference);
        assert!(ratio > 1.6 && ratio < 2.4, "ratio {ratio}");
    }

    #[test]
    fn equal_costs_weight_uniformly() {
        let ens = exp_weights(&[3.0; 4], 1.0, CostSense::Maximize).unwrap();
        for w in &ens.weights {
            assert!((w - 0.25).abs() < 1e-15);
        }
        assert!((ens.ess - 4.0).abs() < 1e-12);
    }

    #[test]
    fn three_to_one_weights_have_ess_1_6() {
        // exp(ln 3) : 1 splits the mass 0.75 / 0.25.
        let ens = exp_weights(&[crate::math::ln(3.0), 0.0], 1.0, CostSense::Maximize).unwrap();
        assert!((ens.weights[0] - 0.75).abs() < 1e-14);
        assert!((ens.weights[1] - 0.25).abs() < 1e-14);
        assert!((ens.ess - 1.6).abs() < 1e-12);
        assert_eq!(effective_sample_size(&[0.75, 0.25]), 1.6);
    }

    #[test]
    fn dominating_cost_drives_ess_to_one() {
        let ens = exp_weights(&[0.0, 0.0, 60.0], 1.0, CostSense::Maximize).unwrap();
        assert!((ens.ess - 1.0).abs() < 1e-6);
    }

    #[test]
    fn minimize_sense_flips_the_ordering() {
        let ens = exp_weights(&[1.0, 5.0], 1.0, CostSense::Minimize).unwrap();
        assert!(ens.weights[0] > ens.weights[1]);
    }

    #[test]
    fn empty_costs_error() {
        assert!(matches!(
            exp_weights(&[], 1.0, CostSense::Maximize),
            Err(PathIntegralError::EmptyInput)
        ));
    }

    #[test]
    fn non_finite_costs_are_rejected_with_their_index() {
        assert!(matches!(
            exp_weights(&[1.0, f64::NAN, 2.0], 1.0, CostSense::Maximize),
            Err(PathIntegralError::NonFiniteCost { index: 1 })
        ));
    }

    #[test]
    fn uniform_weights_average_controls() {
        let ens = exp_weights(&[1.0, 1.0], 1.0, CostSense::Maximize).unwrap();
        let controls = alloc::vec![alloc::vec![1.0, 0.0], alloc::vec![3.0, 2.0]];
        let u = weighted_control(&controls, &ens).unwrap();
        assert!((u[0] - 2.0).abs() < 1e-15);
        assert!((u[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_hot_weights_select_exactly() {
        let ens = exp_weights(&[0.0, 800.0], 1.0, CostSense::Maximize).unwrap();
        let controls = alloc::vec![alloc::vec![1.0], alloc::vec![-7.0]];
        let u = weighted_control(&controls, &ens).unwrap();
        assert_eq!(u[0], -7.0);
    }

    #[test]
    fn mismatched_lengths_error() {
        let ens = exp_weights(&[1.0, 2.0], 1.0, CostSense::Maximize).unwrap();
        assert!(weighted_control(&[alloc::vec![1.0]], &ens).is_err());
    }

    #[test]
    fn constant_f_leaves_density_unchanged() {
        let density = GridDensity::new(0.0, 0.1, alloc::vec![0.2, 0.7, 0.1, 0.4]).unwrap();
        let next = propagate_kernel(&density, &[5.5; 4], 0.3).unwrap();
        for (a, b) in density.psi.iter().zip(&next.psi) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn two_cell_mass_ratio_matches_exponential() {
        let density = GridDensity::new(0.0, 1.0, alloc::vec![1.0, 1.0]).unwrap();
        let eps = 0.7;
        let delta = 2.3;
        let next = propagate_kernel(&density, &[delta, 0.0], eps).unwrap();
        let ratio = next.psi[0] / next.psi[1];
        assert!((ratio - crate::math::exp(-eps * delta)).abs() < 1e-14);
    }

    #[test]
    fn n_steps_equal_one_shot_for_autonomous_f() {
        let density =
            GridDensity::new(-1.0, 0.05, (0..40).map(|i| 1.0 + (i % 5) as f64).collect()).unwrap();
        let f: Vec<f64> = (0..40).map(|i| (i as f64 * 0.1).sin() + 1.5).collect();
        let eps = 0.2;
        let n = 10;
        let mut stepped = density.clone();
        for _ in 0..n {
            stepped = propagate_kernel(&stepped, &f, eps).unwrap();
        }
        let one_shot = propagate_kernel(&density, &f, eps * n as f64).unwrap();
        for (a, b) in stepped.psi.iter().zip(&one_shot.psi) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
        }
        assert!((stepped.mass() - 1.0).abs() < 1e-10);
        assert!(stepped.psi.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn annihilation_is_reported() {
        let density = GridDensity::new(0.0, 1.0, alloc::vec![1.0, 1.0]).unwrap();
        let err = propagate_kernel(&density, &[f64::INFINITY, f64::INFINITY], 1.0).unwrap_err();
        assert!(matches!(err, PathIntegralError::KernelAnnihilatedDensity));
    }
}
