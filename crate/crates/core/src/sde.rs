//! Time discretization, seeded Brownian increments and Euler-Maruyama
//! integration of controlled diffusions.
//!
//! Controls are evaluated at the left endpoint of each step (explicit
//! scheme). Dynamics with square-root terms never see negative arguments:
//! optional guards floor the control and the state *inside* drift/diffusion
//! evaluation only, and every clamp is counted so it stays observable.

use alloc::vec;
use alloc::vec::Vec;

use crate::rng::CounterRng;

/// Floor the state process may not cross inside coefficient evaluation.
pub const DEFAULT_STATE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum SdeError {
    /// `dt`, `n_steps` and `t_end` are mutually inconsistent or degenerate.
    BadGrid { detail: &'static str },
    /// A drift/diffusion/update produced a non-finite value.
    Divergence {
        step: usize,
        s: f64,
        state: Vec<f64>,
    },
    /// Input slice lengths do not match the declared dimensions.
    ShapeMismatch { detail: &'static str },
    /// Zero paths requested.
    EmptyEnsemble,
}

impl core::fmt::Display for SdeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SdeError::BadGrid { detail } => write!(f, "bad time grid: {detail}"),
            SdeError::Divergence { step, s, .. } => {
                write!(f, "divergence at step {step} (s = {s})")
            }
            SdeError::ShapeMismatch { detail } => write!(f, "shape mismatch: {detail}"),
            SdeError::EmptyEnsemble => write!(f, "ensemble needs at least one path"),
        }
    }
}

impl core::error::Error for SdeError {}

/// Uniform partition of `[0, t_end]` into `n_steps` steps of width `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    dt: f64,
    n_steps: usize,
}

impl TimeGrid {
    /// Grid with `n_steps` steps of width `dt`; `t_end` is derived.
    pub fn new(dt: f64, n_steps: usize) -> Result<Self, SdeError> {
        if !(dt > 0.0) {
            return Err(SdeError::BadGrid {
                detail: "dt must be positive",
            });
        }
        if n_steps == 0 {
            return Err(SdeError::BadGrid {
                detail: "n_steps must be at least 1",
            });
        }
        Ok(TimeGrid {
            t_end: dt * n_steps as f64,
            dt,
            n_steps,
        })
    }

    /// Grid over `[0, t_end]` with step `dt`; the step count is
    /// `round(t_end / dt)` and must reproduce `t_end` to 1e-12 relative.
    pub fn from_horizon(t_end: f64, dt: f64) -> Result<Self, SdeError> {
        if !(dt > 0.0) {
            return Err(SdeError::BadGrid {
                detail: "dt must be positive",
            });
        }
        if !(t_end > 0.0) {
            return Err(SdeError::BadGrid {
                detail: "t_end must be positive",
            });
        }
        let n = crate::math::round(t_end / dt);
        if n < 1.0 {
            return Err(SdeError::BadGrid {
                detail: "horizon shorter than one step",
            });
        }
        let n_steps = n as usize;
        let tol = 1e-12 * if t_end > 1.0 { t_end } else { 1.0 };
        if crate::math::abs(n * dt - t_end) > tol {
            return Err(SdeError::BadGrid {
                detail: "t_end is not an integer number of steps",
            });
        }
        Ok(TimeGrid { t_end, dt, n_steps })
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    #[inline]
    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Time at node `n` (0 ≤ n ≤ n_steps).
    #[inline]
    pub fn time_at(&self, n: usize) -> f64 {
        self.dt * n as f64
    }
}

/// Matrix of N(0, dt) increments for one stream: `n_steps` rows, `m` columns.
#[derive(Debug, Clone)]
pub struct BrownianIncrements {
    seed: u64,
    stream_id: u64,
    dt: f64,
    m: usize,
    values: Vec<f64>,
}

impl BrownianIncrements {
    /// Draws the full increment matrix for `(seed, stream_id)`.
    pub fn generate(seed: u64, stream_id: u64, n_steps: usize, m: usize, dt: f64) -> Self {
        let mut rng = CounterRng::from_stream(seed, stream_id);
        let scale = crate::math::sqrt(dt);
        let mut values = vec![0.0; n_steps * m];
        for v in values.iter_mut() {
            *v = rng.standard_normal() * scale;
        }
        BrownianIncrements {
            seed,
            stream_id,
            dt,
            m,
            values,
        }
    }

    #[inline]
    pub fn n_steps(&self) -> usize {
        if self.m == 0 {
            0
        } else {
            self.values.len() / self.m
        }
    }

    #[inline]
    pub fn noise_dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Increment row for step `n`.
    #[inline]
    pub fn step(&self, n: usize) -> &[f64] {
        &self.values[n * self.m..(n + 1) * self.m]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Guards applied to coefficient evaluation (not to the state update).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Guards {
    /// Controls are floored at this value before entering μ and σ.
    pub control_floor: Option<f64>,
    /// States are floored at this value before entering μ and σ.
    pub state_floor: Option<f64>,
}

impl Guards {
    pub const NONE: Guards = Guards {
        control_floor: None,
        state_floor: None,
    };

    /// Floors for dynamics with √u or √X terms: u ≥ 0, X ≥ 1e-10.
    pub const SQRT_SAFE: Guards = Guards {
        control_floor: Some(0.0),
        state_floor: Some(DEFAULT_STATE_FLOOR),
    };
}

/// Clamp events observed while evaluating one step's coefficients.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClampEvents {
    pub control: u32,
    pub state: u32,
}

impl ClampEvents {
    #[inline]
    pub fn any(&self) -> bool {
        self.control > 0 || self.state > 0
    }

    #[inline]
    pub fn merge(&mut self, other: ClampEvents) {
        self.control += other.control;
        self.state += other.state;
    }
}

/// A controlled diffusion dX = μ(s, X, u) ds + σ(s, X, u) dB.
pub trait Sde: Sync {
    /// State dimension k.
    fn state_dim(&self) -> usize;
    /// Noise dimension m.
    fn noise_dim(&self) -> usize;
    /// Writes μ(s, x, u) into `out` (length k).
    fn drift(&self, s: f64, x: &[f64], u: &[f64], out: &mut [f64]);
    /// Writes σ(s, x, u) into `out` row-major (k × m).
    fn diffusion(&self, s: f64, x: &[f64], u: &[f64], out: &mut [f64]);
    fn guards(&self) -> Guards {
        Guards::NONE
    }
}

/// An [`Sde`] assembled from drift and diffusion closures.
pub struct SdeSpec<D, S>
where
    D: Fn(f64, &[f64], &[f64], &mut [f64]) + Sync,
    S: Fn(f64, &[f64], &[f64], &mut [f64]) + Sync,
{
    pub k: usize,
    pub m: usize,
    pub drift: D,
    pub diffusion: S,
    pub guards: Guards,
}

impl<D, S> Sde for SdeSpec<D, S>
where
    D: Fn(f64, &[f64], &[f64], &mut [f64]) + Sync,
    S: Fn(f64, &[f64], &[f64], &mut [f64]) + Sync,
{
    fn state_dim(&self) -> usize {
        self.k
    }

    fn noise_dim(&self) -> usize {
        self.m
    }

    fn drift(&self, s: f64, x: &[f64], u: &[f64], out: &mut [f64]) {
        (self.drift)(s, x, u, out)
    }

    fn diffusion(&self, s: f64, x: &[f64], u: &[f64], out: &mut [f64]) {
        (self.diffusion)(s, x, u, out)
    }

    fn guards(&self) -> Guards {
        self.guards
    }
}

/// Scalar (k = m = 1) diffusion with boxed coefficients, shared between the
/// first-order-condition machinery and simulation.
pub struct ScalarSde {
    pub drift: alloc::boxed::Box<dyn Fn(f64, f64, f64) -> f64 + Sync>,
    pub diffusion: alloc::boxed::Box<dyn Fn(f64, f64, f64) -> f64 + Sync>,
    pub guards: Guards,
}

impl Sde for ScalarSde {
    fn state_dim(&self) -> usize {
        1
    }

    fn noise_dim(&self) -> usize {
        1
    }

    fn drift(&self, s: f64, x: &[f64], u: &[f64], out: &mut [f64]) {
        out[0] = (self.drift)(s, x[0], u[0]);
    }

    fn diffusion(&self, s: f64, x: &[f64], u: &[f64], out: &mut [f64]) {
        out[0] = (self.diffusion)(s, x[0], u[0]);
    }

    fn guards(&self) -> Guards {
        self.guards
    }
}

fn apply_guards(
    guards: Guards,
    x: &[f64],
    u: &[f64],
    gx: &mut Vec<f64>,
    gu: &mut Vec<f64>,
) -> ClampEvents {
    let mut events = ClampEvents::default();
    gx.clear();
    gx.extend_from_slice(x);
    gu.clear();
    gu.extend_from_slice(u);
    if let Some(floor) = guards.control_floor {
        for v in gu.iter_mut() {
            if *v < floor {
                *v = floor;
                events.control += 1;
            }
        }
    }
    if let Some(floor) = guards.state_floor {
        for v in gx.iter_mut() {
            if *v < floor {
                *v = floor;
                events.state += 1;
            }
        }
    }
    events
}

/// Scratch buffers reused across steps of one trajectory.
struct StepScratch {
    mu: Vec<f64>,
    sigma: Vec<f64>,
    gx: Vec<f64>,
    gu: Vec<f64>,
}

impl StepScratch {
    fn new(k: usize, m: usize) -> Self {
        StepScratch {
            mu: vec![0.0; k],
            sigma: vec![0.0; k * m],
            gx: Vec::new(),
            gu: Vec::new(),
        }
    }
}

fn em_step_into(
    sde: &dyn Sde,
    s: f64,
    x: &[f64],
    u: &[f64],
    dt: f64,
    dw: &[f64],
    next: &mut [f64],
    scratch: &mut StepScratch,
) -> Result<ClampEvents, SdeError> {
    let k = sde.state_dim();
    let m = sde.noise_dim();
    let events = apply_guards(sde.guards(), x, u, &mut scratch.gx, &mut scratch.gu);
    sde.drift(s, &scratch.gx, &scratch.gu, &mut scratch.mu);
    sde.diffusion(s, &scratch.gx, &scratch.gu, &mut scratch.sigma);
    for i in 0..k {
        let mut noise = 0.0;
        for j in 0..m {
            noise += scratch.sigma[i * m + j] * dw[j];
        }
        next[i] = x[i] + scratch.mu[i] * dt + noise;
        if !next[i].is_finite() {
            return Err(SdeError::Divergence {
                step: 0,
                s,
                state: x.to_vec(),
            });
        }
    }
    Ok(events)
}

/// One explicit Euler-Maruyama step: X + μ(s, X, u)·dt + σ(s, X, u)·dW.
pub fn em_step(
    sde: &dyn Sde,
    s: f64,
    x: &[f64],
    u: &[f64],
    dt: f64,
    dw: &[f64],
) -> Result<(Vec<f64>, ClampEvents), SdeError> {
    if !(dt > 0.0) {
        return Err(SdeError::BadGrid {
            detail: "dt must be positive",
        });
    }
    if x.len() != sde.state_dim() {
        return Err(SdeError::ShapeMismatch {
            detail: "state length != k",
        });
    }
    if dw.len() != sde.noise_dim() {
        return Err(SdeError::ShapeMismatch {
            detail: "noise length != m",
        });
    }
    let mut scratch = StepScratch::new(sde.state_dim(), sde.noise_dim());
    let mut next = vec![0.0; sde.state_dim()];
    let events = em_step_into(sde, s, x, u, dt, dw, &mut next, &mut scratch)?;
    Ok((next, events))
}

/// Per-path context handed to feedback rules.
pub struct RuleContext<'a> {
    /// Cumulative Brownian motion B(s_n) = Σ_{j<n} dW_j, one entry per noise
    /// dimension.
    pub cumulative_noise: &'a [f64],
}

impl RuleContext<'_> {
    pub const EMPTY: RuleContext<'static> = RuleContext {
        cumulative_noise: &[],
    };
}

/// Control decision at one step; `fallback` marks a rule that had no usable
/// value (e.g. a negative discriminant) and substituted a safe default.
#[derive(Debug, Clone)]
pub struct ControlDecision {
    pub u: Vec<f64>,
    pub fallback: bool,
}

impl ControlDecision {
    pub fn of(u: Vec<f64>) -> Self {
        ControlDecision { u, fallback: false }
    }
}

/// Feedback map (s, X) → u.
pub trait FeedbackRule: Sync {
    fn control(&self, s: f64, x: &[f64], ctx: &RuleContext<'_>) -> ControlDecision;
}

/// The zero control of a given dimension.
pub struct ZeroControl(pub usize);

impl FeedbackRule for ZeroControl {
    fn control(&self, _s: f64, _x: &[f64], _ctx: &RuleContext<'_>) -> ControlDecision {
        ControlDecision::of(vec![0.0; self.0])
    }
}

/// Adapter turning a plain closure into a [`FeedbackRule`].
pub struct RuleFn<F>(pub F);

impl<F> FeedbackRule for RuleFn<F>
where
    F: Fn(f64, &[f64]) -> Vec<f64> + Sync,
{
    fn control(&self, s: f64, x: &[f64], _ctx: &RuleContext<'_>) -> ControlDecision {
        ControlDecision::of((self.0)(s, x))
    }
}

/// Step-level flags recorded along a trajectory.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepFlags {
    /// Coefficient evaluation clamped the control or the state.
    pub clamped: bool,
    /// The feedback rule fell back to its safe default.
    pub fallback: bool,
}

/// Aggregate per-path event counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PathStats {
    pub control_clamps: u64,
    pub state_clamps: u64,
    pub rule_fallbacks: u64,
}

/// A simulated trajectory: `n_steps + 1` states, `n_steps` controls.
#[derive(Debug, Clone)]
pub struct Path {
    pub grid: TimeGrid,
    pub states: Vec<Vec<f64>>,
    pub controls: Vec<Vec<f64>>,
    pub flags: Vec<StepFlags>,
    pub stats: PathStats,
    /// Step index at which the update became non-finite, if any.
    pub diverged_at: Option<usize>,
}

impl Path {
    pub fn terminal(&self) -> &[f64] {
        self.states
            .last()
            .expect("path has at least the initial state")
    }
}

fn run_path(
    x0: &[f64],
    sde: &dyn Sde,
    rule: &dyn FeedbackRule,
    grid: &TimeGrid,
    noise: &BrownianIncrements,
) -> Result<Path, SdeError> {
    let k = sde.state_dim();
    let m = sde.noise_dim();
    if x0.len() != k {
        return Err(SdeError::ShapeMismatch {
            detail: "x0 length != k",
        });
    }
    if noise.noise_dim() != m {
        return Err(SdeError::ShapeMismatch {
            detail: "noise columns != m",
        });
    }
    if noise.n_steps() < grid.n_steps() {
        return Err(SdeError::ShapeMismatch {
            detail: "noise rows < n_steps",
        });
    }

    let n = grid.n_steps();
    let mut states = Vec::with_capacity(n + 1);
    let mut controls = Vec::with_capacity(n);
    let mut flags = Vec::with_capacity(n);
    let mut stats = PathStats::default();
    let mut cumulative = vec![0.0; m];
    let mut scratch = StepScratch::new(k, m);
    let mut diverged_at = None;

    states.push(x0.to_vec());
    for step in 0..n {
        let s = grid.time_at(step);
        let x = states[step].clone();
        let decision = rule.control(
            s,
            &x,
            &RuleContext {
                cumulative_noise: &cumulative,
            },
        );
        if decision.u.len() != k {
            return Err(SdeError::ShapeMismatch {
                detail: "rule output length != k",
            });
        }
        let dw = noise.step(step);
        let mut next = vec![0.0; k];
        let outcome = em_step_into(
            sde,
            s,
            &x,
            &decision.u,
            grid.dt(),
            dw,
            &mut next,
            &mut scratch,
        );
        let events = match outcome {
            Ok(events) => events,
            Err(_) => {
                controls.push(decision.u);
                flags.push(StepFlags {
                    clamped: false,
                    fallback: decision.fallback,
                });
                if decision.fallback {
                    stats.rule_fallbacks += 1;
                }
                diverged_at = Some(step);
                break;
            }
        };
        stats.control_clamps += events.control as u64;
        stats.state_clamps += events.state as u64;
        if decision.fallback {
            stats.rule_fallbacks += 1;
        }
        flags.push(StepFlags {
            clamped: events.any(),
            fallback: decision.fallback,
        });
        controls.push(decision.u);
        for j in 0..m {
            cumulative[j] += dw[j];
        }
        states.push(next);
    }

    Ok(Path {
        grid: *grid,
        states,
        controls,
        flags,
        stats,
        diverged_at,
    })
}

/// Integrates one trajectory; divergence is an error carrying the step index.
pub fn simulate_path(
    x0: &[f64],
    sde: &dyn Sde,
    rule: &dyn FeedbackRule,
    grid: &TimeGrid,
    noise: &BrownianIncrements,
) -> Result<Path, SdeError> {
    let path = run_path(x0, sde, rule, grid, noise)?;
    if let Some(step) = path.diverged_at {
        return Err(SdeError::Divergence {
            step,
            s: grid.time_at(step),
            state: path.states[step].clone(),
        });
    }
    Ok(path)
}

/// An ensemble of trajectories; diverged paths are kept (truncated) and
/// counted rather than failing the run.
#[derive(Debug)]
pub struct Ensemble {
    pub paths: Vec<Path>,
    pub diverged: usize,
}

/// Simulates path `i` of an ensemble: stream_id = i.
pub fn simulate_ensemble_member(
    x0: &[f64],
    sde: &dyn Sde,
    rule: &dyn FeedbackRule,
    grid: &TimeGrid,
    seed: u64,
    index: usize,
) -> Result<Path, SdeError> {
    let noise = BrownianIncrements::generate(
        seed,
        index as u64,
        grid.n_steps(),
        sde.noise_dim(),
        grid.dt(),
    );
    run_path(x0, sde, rule, grid, &noise)
}

/// Simulates `n_paths` trajectories on streams `0..n_paths`.
///
/// The result is a pure function of `(seed, inputs)`; the CLI crate runs the
/// same per-index member function under rayon and obtains bitwise-identical
/// ensembles.
pub fn simulate_ensemble(
    x0: &[f64],
    sde: &dyn Sde,
    rule: &dyn FeedbackRule,
    grid: &TimeGrid,
    seed: u64,
    n_paths: usize,
) -> Result<Ensemble, SdeError> {
    if n_paths == 0 {
        return Err(SdeError::EmptyEnsemble);
    }
    let mut paths = Vec::with_capacity(n_paths);
    for i in 0..n_paths {
        paths.push(simulate_ensemble_member(x0, sde, rule, grid, seed, i)?);
    }
    let diverged = paths.iter().filter(|p| p.diverged_at.is_some()).count();
    Ok(Ensemble { paths, diverged })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_sde(
        drift: impl Fn(f64, f64, f64) -> f64 + Sync + 'static,
        diffusion: impl Fn(f64, f64, f64) -> f64 + Sync + 'static,
        guards: Guards,
    ) -> ScalarSde {
        ScalarSde {
            drift: alloc::boxed::Box::new(drift),
            diffusion: alloc::boxed::Box::new(diffusion),
            guards,
        }
    }

    #[test]
    fn zero_dynamics_is_identity() {
        let sde = scalar_sde(|_, _, _| 0.0, |_, _, _| 0.0, Guards::NONE);
        let (next, events) = em_step(&sde, 0.0, &[1.0], &[0.3], 0.01, &[0.5]).unwrap();
        assert_eq!(next, vec![1.0]);
        assert!(!events.any());
    }

    #[test]
    fn deterministic_euler_arithmetic() {
        let a = 0.30;
        let sde = scalar_sde(move |_, x, _| a * x, |_, _, _| 0.0, Guards::NONE);
        let (next, _) = em_step(&sde, 0.0, &[1.0], &[0.0], 0.001, &[0.0]).unwrap();
        assert!((next[0] - 1.0003).abs() < 1e-15);
    }

    #[test]
    fn table1_step_matches_explicit_recomputation() {
        // a = 0.30, sigma0 = 0.50; u below the control floor clamps to zero
        // inside both coefficients, so each step is X + aX dt exactly.
        let a = 0.30;
        let sigma0 = 0.50;
        let sde = scalar_sde(
            move |_, x, u| a * x - u,
            move |_, _, u| crate::math::sqrt(sigma0 * u),
            Guards::SQRT_SAFE,
        );
        let dt = 0.001;
        let mut x = 1.0;
        let u = -0.011897503240919875;
        let dw = 0.02;
        for step in 0..5 {
            let (next, events) = em_step(&sde, step as f64 * dt, &[x], &[u], dt, &[dw]).unwrap();
            let expected = x + a * x * dt;
            assert_eq!(next[0], expected);
            assert_eq!(events.control, 1);
            x = next[0];
        }
        // A positive admissible control passes through unclamped.
        let u = 0.05;
        let (next, events) = em_step(&sde, 0.0, &[1.0], &[u], dt, &[dw]).unwrap();
        let expected = 1.0 + (a - u) * dt + crate::math::sqrt(sigma0 * u) * dw;
        assert_eq!(next[0], expected);
        assert_eq!(events.control, 0);
    }

    #[test]
    fn clamp_events_are_counted_and_update_uses_raw_state() {
        let sde = scalar_sde(
            |_, x, _| {
                assert!(x >= DEFAULT_STATE_FLOOR);
                0.0
            },
            |_, _, _| 0.0,
            Guards::SQRT_SAFE,
        );
        let (next, events) = em_step(&sde, 0.0, &[-2.0], &[-1.0], 0.1, &[0.0]).unwrap();
        assert_eq!(next[0], -2.0);
        assert_eq!(events.state, 1);
        assert_eq!(events.control, 1);
    }

    #[test]
    fn divergence_is_reported_with_location() {
        let sde = scalar_sde(|_, x, _| x * 1e308, |_, _, _| 0.0, Guards::NONE);
        let err = em_step(&sde, 0.25, &[1e308], &[0.0], 1.0, &[0.0]).unwrap_err();
        match err {
            SdeError::Divergence { s, state, .. } => {
                assert_eq!(s, 0.25);
                assert_eq!(state, vec![1e308]);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn uncontrolled_growth_matches_linear_ode() {
        let a = 0.30;
        let sde = scalar_sde(move |_, x, _| a * x, |_, _, _| 0.0, Guards::NONE);
        let grid = TimeGrid::from_horizon(1.0, 0.001).unwrap();
        let noise = BrownianIncrements::generate(1, 0, grid.n_steps(), 1, grid.dt());
        let path = simulate_path(&[1.0], &sde, &ZeroControl(1), &grid, &noise).unwrap();
        let expected = crate::math::exp(0.3);
        assert!((path.terminal()[0] - expected).abs() < 10.0 * grid.dt());
        assert_eq!(path.states.len(), grid.n_steps() + 1);
        assert_eq!(path.controls.len(), grid.n_steps());
    }

    #[test]
    fn same_noise_gives_identical_path() {
        let sde = scalar_sde(|_, x, _| 0.3 * x, |_, x, _| 0.2 * x, Guards::NONE);
        let grid = TimeGrid::new(0.01, 100).unwrap();
        let noise = BrownianIncrements::generate(7, 3, grid.n_steps(), 1, grid.dt());
        let a = simulate_path(&[1.0], &sde, &ZeroControl(1), &grid, &noise).unwrap();
        let b = simulate_path(&[1.0], &sde, &ZeroControl(1), &grid, &noise).unwrap();
        assert_eq!(a.states, b.states);
    }

    #[test]
    fn zero_steps_is_rejected() {
        assert!(matches!(
            TimeGrid::new(0.1, 0),
            Err(SdeError::BadGrid { .. })
        ));
        assert!(matches!(
            TimeGrid::new(0.0, 10),
            Err(SdeError::BadGrid { .. })
        ));
    }

    #[test]
    fn horizon_must_be_an_integer_number_of_steps() {
        // round(1/0.3) = 3 steps reproduce 0.9, not 1.0.
        assert!(matches!(
            TimeGrid::from_horizon(1.0, 0.3),
            Err(SdeError::BadGrid { .. })
        ));
        let grid = TimeGrid::from_horizon(1.0, 0.001).unwrap();
        assert_eq!(grid.n_steps(), 1000);
        assert_eq!(grid.t_end(), 1.0);
    }

    #[test]
    fn ensemble_member_zero_matches_single_path() {
        let sde = scalar_sde(|_, x, _| 0.3 * x, |_, x, _| 0.2 * x, Guards::NONE);
        let grid = TimeGrid::new(0.01, 50).unwrap();
        let ens = simulate_ensemble(&[1.0], &sde, &ZeroControl(1), &grid, 99, 1).unwrap();
        let noise = BrownianIncrements::generate(99, 0, grid.n_steps(), 1, grid.dt());
        let single = simulate_path(&[1.0], &sde, &ZeroControl(1), &grid, &noise).unwrap();
        assert_eq!(ens.paths.len(), 1);
        assert_eq!(ens.diverged, 0);
        assert_eq!(ens.paths[0].states, single.states);
    }

    #[test]
    fn ensemble_records_divergence_without_failing() {
        let sde = scalar_sde(|_, x, _| x * 1e270, |_, _, _| 0.0, Guards::NONE);
        let grid = TimeGrid::new(1.0, 5).unwrap();
        let ens = simulate_ensemble(&[1e200], &sde, &ZeroControl(1), &grid, 3, 4).unwrap();
        assert_eq!(ens.diverged, 4);
        for path in &ens.paths {
            let at = path.diverged_at.expect("flagged diverged");
            assert!(path.states.len() == at + 1);
        }
    }

    #[test]
    fn gbm_ensemble_mean_is_within_three_standard_errors() {
        let sde = scalar_sde(|_, x, _| 0.3 * x, |_, x, _| 0.2 * x, Guards::NONE);
        let grid = TimeGrid::from_horizon(1.0, 0.01).unwrap();
        let ens = simulate_ensemble(&[1.0], &sde, &ZeroControl(1), &grid, 42, 2000).unwrap();
        let terminals: Vec<f64> = ens.paths.iter().map(|p| p.terminal()[0]).collect();
        let n = terminals.len() as f64;
        let mean = terminals.iter().sum::<f64>() / n;
        let var = terminals
            .iter()
            .map(|x| (x - mean) * (x - mean))
            .sum::<f64>()
            / (n - 1.0);
        let se = crate::math::sqrt(var / n);
        let analytic = crate::math::exp(0.3);
        assert!(
            (mean - analytic).abs() < 3.0 * se,
            "mean {mean} vs {analytic} (se {se})"
        );
    }

    #[test]
    fn increment_columns_have_small_empirical_mean() {
        let n = 100_000;
        let dt = 0.01;
        let inc = BrownianIncrements::generate(42, 0, n, 1, dt);
        let mean = inc.values().iter().sum::<f64>() / n as f64;
        let bound = 4.0 * crate::math::sqrt(dt / n as f64);
        assert!(mean.abs() < bound, "mean {mean} bound {bound}");
    }

    #[test]
    fn increments_are_reproducible() {
        let a = BrownianIncrements::generate(5, 9, 64, 2, 0.5);
        let b = BrownianIncrements::generate(5, 9, 64, 2, 0.5);
        assert_eq!(a.values(), b.values());
    }
}
