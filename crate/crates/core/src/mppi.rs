//! Receding-horizon path-integral controller.
//!
//! At each decision time s_n the controller rolls out M disturbance
//! sequences over an H-step lookahead under a zero baseline control,
//! accumulates discounted running costs J^{(i)}, picks a temperature θ̂ by
//! minimizing the entropic-robust objective γθ + θ·ln[(1/M)Σ exp(J^{(i)}/θ)],
//! forms weights r^{(i)} ∝ exp(J^{(i)}/θ̂), and pushes the weighted
//! first-step disturbance through the diffusion channel:
//!
//! ```text
//! u(s_n) = κ_u · Σ(X(s_n)) · (Σ_i r^{(i)} ε^{(i)}_n) · √Δs
//! ```
//!
//! followed by componentwise truncation to [u_min, u_max] and a
//! nonnegativity constraint. Only the first step is applied; the next
//! decision re-samples.
//!
//! Weights increase with J exactly as the update is written; callers whose J
//! is a cost rather than a reward can flip [`PiConfig::weighting`].
//!
//! Everything is keyed on (seed, decision index, rollout index), so batches
//! are reproducible for any parallel execution that fills slots by index;
//! all reductions happen sequentially in index order.

use alloc::vec;
use alloc::vec::Vec;

use crate::path_integral::effective_sample_size;
use crate::rng::CounterRng;
use crate::sde::{BrownianIncrements, Path, PathStats, Sde, SdeError, StepFlags, TimeGrid};
use crate::strategies::pareto::ParetoParams;

/// Stream id of the closed-loop noise; rollout streams are derived from
/// (decision index, rollout index) and cannot collide with it.
pub const CLOSED_LOOP_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub enum PiError {
    BadConfig {
        detail: &'static str,
    },
    /// More than half of a batch diverged.
    TooManyDiverged {
        decision: usize,
        diverged: usize,
        rollouts: usize,
    },
    /// Every rollout diverged, leaving no finite costs.
    AllDiverged {
        decision: usize,
    },
    Sde(SdeError),
}

impl core::fmt::Display for PiError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PiError::BadConfig { detail } => write!(f, "bad controller config: {detail}"),
            PiError::TooManyDiverged {
                decision,
                diverged,
                rollouts,
            } => {
                write!(
                    f,
                    "{diverged}/{rollouts} rollouts diverged at decision {decision}"
                )
            }
            PiError::AllDiverged { decision } => {
                write!(f, "all rollouts diverged at decision {decision}")
            }
            PiError::Sde(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PiError {}

impl From<SdeError> for PiError {
    fn from(e: SdeError) -> Self {
        PiError::Sde(e)
    }
}

/// Sign convention of the rollout weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostWeighting {
    /// r^{(i)} ∝ exp(+J^{(i)}/θ̂), exactly as the update is printed.
    #[default]
    HighCost,
    /// r^{(i)} ∝ exp(−J^{(i)}/θ̂).
    LowCost,
}

/// Log-spaced temperature grid, scaled per decision by the cost spread.
#[derive(Debug, Clone, Copy)]
pub struct ThetaGrid {
    pub count: usize,
    pub log10_min: f64,
    pub log10_max: f64,
}

impl Default for ThetaGrid {
    fn default() -> Self {
        ThetaGrid {
            count: 50,
            log10_min: -2.0,
            log10_max: 2.0,
        }
    }
}

impl ThetaGrid {
    /// Grid values: 10^lin · max(1, interquartile range of the costs).
    pub fn build(&self, costs: &[f64]) -> Vec<f64> {
        let scale = {
            let iqr = interquartile_range(costs);
            if iqr > 1.0 {
                iqr
            } else {
                1.0
            }
        };
        if self.count == 1 {
            return vec![scale * crate::math::exp10(self.log10_min)];
        }
        (0..self.count)
            .map(|i| {
                let t = i as f64 / (self.count - 1) as f64;
                scale * crate::math::exp10(self.log10_min + t * (self.log10_max - self.log10_min))
            })
            .collect()
    }
}

fn interquartile_range(costs: &[f64]) -> f64 {
    if costs.len() < 2 {
        return 0.0;
    }
    let mut sorted: Vec<f64> = costs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |p: f64| -> f64 {
        // Nearest-rank quantile.
        let rank = libm::ceil(p * sorted.len() as f64) as usize;
        sorted[rank.clamp(1, sorted.len()) - 1]
    };
    q(0.75) - q(0.25)
}

/// Controller parameters.
#[derive(Debug, Clone)]
pub struct PiConfig {
    /// Rollouts per update, M ≥ 1.
    pub rollouts: usize,
    /// Lookahead steps, H ≥ 1.
    pub horizon: usize,
    /// Robustness parameter γ.
    pub gamma: f64,
    /// Update scaling κ_u.
    pub kappa_u: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub theta: ThetaGrid,
    pub dt: f64,
    pub weighting: CostWeighting,
}

impl PiConfig {
    pub fn validate(&self) -> Result<(), PiError> {
        if self.rollouts == 0 {
            return Err(PiError::BadConfig {
                detail: "M must be at least 1",
            });
        }
        if self.horizon == 0 {
            return Err(PiError::BadConfig {
                detail: "H must be at least 1",
            });
        }
        if !(self.dt > 0.0) {
            return Err(PiError::BadConfig {
                detail: "dt must be positive",
            });
        }
        if self.u_min > self.u_max {
            return Err(PiError::BadConfig {
                detail: "u_min must not exceed u_max",
            });
        }
        if self.theta.count == 0 || self.theta.log10_min > self.theta.log10_max {
            return Err(PiError::BadConfig {
                detail: "theta grid must be nonempty and ordered",
            });
        }
        Ok(())
    }
}

/// Running cost q(s, X, u).
pub trait RunningCost: Sync {
    fn cost(&self, s: f64, x: &[f64], u: &[f64]) -> f64;
}

impl<F> RunningCost for F
where
    F: Fn(f64, &[f64], &[f64]) -> f64 + Sync,
{
    fn cost(&self, s: f64, x: &[f64], u: &[f64]) -> f64 {
        self(s, x, u)
    }
}

/// Negative cooperative profit integrand:
/// q = −e^{−ζs}·Σ_ρ α_ρ{p[X_ρ + ω₁Σ_{ρ̃≠ρ}X_ρ̃]u_ρ − cX_ρ[u_ρ² + ω₂Σ_{ρ̃≠ρ}u_ρ̃²]}.
pub fn pareto_running_cost(s: f64, x: &[f64], u: &[f64], params: &ParetoParams) -> f64 {
    let e = crate::math::exp(-params.zeta * s);
    let mut total = 0.0;
    for rho in 0..params.k {
        let revenue = params.p * params.revenue_bracket(x, rho) * u[rho];
        let own_cost = u[rho] * u[rho];
        let cross_cost: f64 = u
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != rho)
            .map(|(_, v)| v * v)
            .sum();
        total += params.alpha[rho]
            * (revenue - params.c * x[rho] * (own_cost + params.omega2 * cross_cost));
    }
    -e * total
}

/// Disturbances and costs of one lookahead batch.
#[derive(Debug, Clone)]
pub struct RolloutBatch {
    /// Standard-normal draws, row-major M × H × m.
    pub disturbances: Vec<f64>,
    /// Discounted running costs J^{(i)}; +∞ marks a diverged rollout.
    pub costs: Vec<f64>,
    pub horizon: usize,
    pub noise_dim: usize,
    pub diverged: usize,
}

impl RolloutBatch {
    /// First-step disturbance of rollout `i` (length m).
    pub fn first_step(&self, i: usize) -> &[f64] {
        let stride = self.horizon * self.noise_dim;
        &self.disturbances[i * stride..i * stride + self.noise_dim]
    }
}

/// Everything a batch evaluation needs; bundled so serial and parallel
/// engines share one signature.
pub struct RolloutRequest<'a> {
    pub sde: &'a dyn Sde,
    pub running_cost: &'a dyn RunningCost,
    pub x_now: &'a [f64],
    pub s_now: f64,
    pub baseline_u: &'a [f64],
    pub config: &'a PiConfig,
    pub seed: u64,
    pub decision_index: usize,
}

/// Rollout stream id for (decision, rollout): disjoint from the closed loop.
pub fn rollout_stream(decision_index: usize, rollout_index: usize) -> u64 {
    ((decision_index as u64) << 32) | rollout_index as u64
}

/// Simulates rollout `i`: returns its disturbance block (H × m standard
/// normals) and the discounted running cost, +∞ on divergence.
pub fn rollout_one(req: &RolloutRequest<'_>, rollout_index: usize) -> (Vec<f64>, f64) {
    let k = req.sde.state_dim();
    let m = req.sde.noise_dim();
    let h = req.config.horizon;
    let dt = req.config.dt;
    let sqrt_dt = crate::math::sqrt(dt);
    let mut rng =
        CounterRng::from_stream(req.seed, rollout_stream(req.decision_index, rollout_index));
    let mut eps = vec![0.0; h * m];
    rng.fill_standard_normal(&mut eps);

    let mut x = req.x_now.to_vec();
    let mut next = vec![0.0; k];
    let mut mu = vec![0.0; k];
    let mut sigma = vec![0.0; k * m];
    let mut gx: Vec<f64> = Vec::new();
    let mut gu: Vec<f64> = Vec::new();
    let guards = req.sde.guards();
    let mut cost = 0.0;
    for step in 0..h {
        let s = req.s_now + dt * step as f64;
        // Coefficient evaluation under the same guards as the simulator.
        gx.clear();
        gx.extend_from_slice(&x);
        gu.clear();
        gu.extend_from_slice(req.baseline_u);
        if let Some(floor) = guards.control_floor {
            for v in gu.iter_mut() {
                if *v < floor {
                    *v = floor;
                }
            }
        }
        if let Some(floor) = guards.state_floor {
            for v in gx.iter_mut() {
                if *v < floor {
                    *v = floor;
                }
            }
        }
        req.sde.drift(s, &gx, &gu, &mut mu);
        req.sde.diffusion(s, &gx, &gu, &mut sigma);
        let eps_row = &eps[step * m..(step + 1) * m];
        for i in 0..k {
            let mut noise = 0.0;
            for j in 0..m {
                noise += sigma[i * m + j] * eps_row[j] * sqrt_dt;
            }
            next[i] = x[i] + mu[i] * dt + noise;
        }
        if next.iter().any(|v| !v.is_finite()) {
            return (eps, f64::INFINITY);
        }
        x.copy_from_slice(&next);
        let s_next = req.s_now + dt * (step + 1) as f64;
        cost += req.running_cost.cost(s_next, &x, req.baseline_u) * dt;
    }
    if !cost.is_finite() {
        cost = f64::INFINITY;
    }
    (eps, cost)
}

/// Batch evaluation strategy; implementations must fill slots by rollout
/// index so results are independent of scheduling.
pub trait RolloutEngine: Sync {
    fn batch(&self, req: &RolloutRequest<'_>) -> RolloutBatch;
}

/// Straight-line loop over rollouts.
pub struct SerialRollouts;

impl RolloutEngine for SerialRollouts {
    fn batch(&self, req: &RolloutRequest<'_>) -> RolloutBatch {
        let m = req.sde.noise_dim();
        let h = req.config.horizon;
        let rollouts = req.config.rollouts;
        let mut disturbances = vec![0.0; rollouts * h * m];
        let mut costs = vec![0.0; rollouts];
        for i in 0..rollouts {
            let (eps, cost) = rollout_one(req, i);
            disturbances[i * h * m..(i + 1) * h * m].copy_from_slice(&eps);
            costs[i] = cost;
        }
        let diverged = costs.iter().filter(|c| !c.is_finite()).count();
        RolloutBatch {
            disturbances,
            costs,
            horizon: h,
            noise_dim: m,
            diverged,
        }
    }
}

/// Convenience wrapper running one serial batch.
pub fn rollout_batch(req: &RolloutRequest<'_>) -> RolloutBatch {
    SerialRollouts.batch(req)
}

/// Selected temperature and the objective value it attains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureSelection {
    pub theta_hat: f64,
    pub objective_value: f64,
}

/// θ·ln[(1/M)Σ exp(J_i/θ)], evaluated with a max-shift.
pub fn log_mean_exp_scaled(costs: &[f64], theta: f64) -> f64 {
    let j_max = costs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = costs
        .iter()
        .map(|j| crate::math::exp((j - j_max) / theta))
        .sum();
    j_max + theta * (crate::math::ln(sum) - crate::math::ln(costs.len() as f64))
}

/// Minimizes γθ + θ·logmeanexp(J/θ) over the grid; ties break toward the
/// smaller θ. Costs must already exclude diverged rollouts.
pub fn select_temperature(
    costs: &[f64],
    gamma: f64,
    theta_grid: &[f64],
) -> Result<TemperatureSelection, PiError> {
    if costs.is_empty() {
        return Err(PiError::AllDiverged { decision: 0 });
    }
    if theta_grid.is_empty() {
        return Err(PiError::BadConfig {
            detail: "theta grid is empty",
        });
    }
    let mut best: Option<TemperatureSelection> = None;
    for &theta in theta_grid {
        let objective = gamma * theta + log_mean_exp_scaled(costs, theta);
        let better = match best {
            None => true,
            Some(b) => objective < b.objective_value,
        };
        if better {
            best = Some(TemperatureSelection {
                theta_hat: theta,
                objective_value: objective,
            });
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// Diagnostics of one control update.
#[derive(Debug, Clone, Copy)]
pub struct UpdateDiagnostics {
    pub theta_hat: f64,
    pub objective_value: f64,
    /// Effective sample size of the rollout weights.
    pub ess: f64,
    /// Components truncated by the [u_min, u_max] clamp.
    pub clamped_components: u32,
    pub diverged_rollouts: usize,
}

/// Weighted-disturbance control update with admissibility clamping.
///
/// Diverged rollouts carry zero weight. The weighted first-step disturbance
/// is pushed through Σ(X(s_n)) evaluated at the baseline control.
pub fn pi_update(
    x_now: &[f64],
    s_now: f64,
    batch: &RolloutBatch,
    selection: &TemperatureSelection,
    sde: &dyn Sde,
    baseline_u: &[f64],
    config: &PiConfig,
) -> (Vec<f64>, UpdateDiagnostics) {
    let k = sde.state_dim();
    let m = sde.noise_dim();
    let sign = match config.weighting {
        CostWeighting::HighCost => 1.0,
        CostWeighting::LowCost => -1.0,
    };
    // Shift by the extremum that dominates the chosen sign.
    let finite = batch.costs.iter().cloned().filter(|c| c.is_finite());
    let shift = match config.weighting {
        CostWeighting::HighCost => finite.fold(f64::NEG_INFINITY, f64::max),
        CostWeighting::LowCost => finite.fold(f64::INFINITY, f64::min),
    };
    let mut weights = vec![0.0; batch.costs.len()];
    let mut total = 0.0;
    for (w, j) in weights.iter_mut().zip(&batch.costs) {
        if j.is_finite() {
            *w = crate::math::exp(sign * (j - shift) / selection.theta_hat);
            total += *w;
        }
    }
    for w in weights.iter_mut() {
        *w /= total;
    }
    let ess = effective_sample_size(&weights);

    // Weighted first-step disturbance, in index order.
    let mut weighted_eps = vec![0.0; m];
    for (i, w) in weights.iter().enumerate() {
        if *w > 0.0 {
            let eps = batch.first_step(i);
            for j in 0..m {
                weighted_eps[j] += w * eps[j];
            }
        }
    }

    let mut sigma = vec![0.0; k * m];
    sde.diffusion(s_now, x_now, baseline_u, &mut sigma);
    let sqrt_dt = crate::math::sqrt(config.dt);
    let mut u = vec![0.0; k];
    let mut clamped = 0u32;
    for i in 0..k {
        let mut push = 0.0;
        for j in 0..m {
            push += sigma[i * m + j] * weighted_eps[j];
        }
        let mut v = config.kappa_u * push * sqrt_dt;
        if v < config.u_min {
            v = config.u_min;
            clamped += 1;
        } else if v > config.u_max {
            v = config.u_max;
            clamped += 1;
        }
        // Nonnegativity applies after the interval truncation.
        if v < 0.0 {
            v = 0.0;
            clamped += 1;
        }
        u[i] = v;
    }
    let diagnostics = UpdateDiagnostics {
        theta_hat: selection.theta_hat,
        objective_value: selection.objective_value,
        ess,
        clamped_components: clamped,
        diverged_rollouts: batch.diverged,
    };
    (u, diagnostics)
}

/// Per-decision record of a closed-loop run.
#[derive(Debug, Clone, Copy)]
pub struct StepDiagnostics {
    pub step: usize,
    pub s: f64,
    pub theta_hat: f64,
    pub ess: f64,
    pub clamped_components: u32,
    pub diverged_rollouts: usize,
}

/// Closed-loop trajectory with per-step diagnostics.
#[derive(Debug)]
pub struct PiRun {
    pub path: Path,
    pub diagnostics: Vec<StepDiagnostics>,
}

/// Runs the controller in closed loop on `[0, t_end]`.
///
/// The applied step consumes the shared closed-loop stream
/// [`CLOSED_LOOP_STREAM`], so a benchmark controller driven by the same
/// stream sees identical increments. Closed-loop divergence aborts with the
/// partial trajectory recorded in `path.diverged_at`.
pub fn run_receding_horizon(
    x0: &[f64],
    sde: &dyn Sde,
    running_cost: &dyn RunningCost,
    config: &PiConfig,
    seed: u64,
    t_end: f64,
    engine: &dyn RolloutEngine,
) -> Result<PiRun, PiError> {
    config.validate()?;
    let grid = TimeGrid::from_horizon(t_end, config.dt)?;
    let k = sde.state_dim();
    let m = sde.noise_dim();
    if x0.len() != k {
        return Err(PiError::Sde(SdeError::ShapeMismatch {
            detail: "x0 length != k",
        }));
    }
    let noise =
        BrownianIncrements::generate(seed, CLOSED_LOOP_STREAM, grid.n_steps(), m, grid.dt());
    let baseline = vec![0.0; k];

    let mut states = Vec::with_capacity(grid.n_steps() + 1);
    let mut controls = Vec::with_capacity(grid.n_steps());
    let mut flags = Vec::with_capacity(grid.n_steps());
    let mut diagnostics = Vec::with_capacity(grid.n_steps());
    let mut stats = PathStats::default();
    let mut diverged_at = None;
    states.push(x0.to_vec());

    for step in 0..grid.n_steps() {
        let s = grid.time_at(step);
        let x = states[step].clone();
        let req = RolloutRequest {
            sde,
            running_cost,
            x_now: &x,
            s_now: s,
            baseline_u: &baseline,
            config,
            seed,
            decision_index: step,
        };
        let batch = engine.batch(&req);
        if 2 * batch.diverged > config.rollouts {
            return Err(PiError::TooManyDiverged {
                decision: step,
                diverged: batch.diverged,
                rollouts: config.rollouts,
            });
        }
        let finite: Vec<f64> = batch
            .costs
            .iter()
            .cloned()
            .filter(|c| c.is_finite())
            .collect();
        if finite.is_empty() {
            return Err(PiError::AllDiverged { decision: step });
        }
        let theta_grid = config.theta.build(&finite);
        let selection = select_temperature(&finite, config.gamma, &theta_grid)?;
        let (u, update) = pi_update(&x, s, &batch, &selection, sde, &baseline, config);

        diagnostics.push(StepDiagnostics {
            step,
            s,
            theta_hat: update.theta_hat,
            ess: update.ess,
            clamped_components: update.clamped_components,
            diverged_rollouts: update.diverged_rollouts,
        });

        match crate::sde::em_step(sde, s, &x, &u, grid.dt(), noise.step(step)) {
            Ok((next, events)) => {
                stats.control_clamps += events.control as u64;
                stats.state_clamps += events.state as u64;
                flags.push(StepFlags {
                    clamped: events.any() || update.clamped_components > 0,
                    fallback: false,
                });
                controls.push(u);
                states.push(next);
            }
            Err(_) => {
                controls.push(u);
                flags.push(StepFlags {
                    clamped: update.clamped_components > 0,
                    fallback: false,
                });
                diverged_at = Some(step);
                break;
            }
        }
    }

    let path = Path {
        grid,
        states,
        controls,
        flags,
        stats,
        diverged_at,
    };
    Ok(PiRun { path, diagnostics })
}
