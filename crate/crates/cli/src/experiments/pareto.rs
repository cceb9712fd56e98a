//! Cooperative-market run (`table3.cfg`): the receding-horizon path-integral
//! controller against the cooperative Pontryagin benchmark, both closed loops
//! driven by the same Brownian increments.

use serde_json::json;

use pathint_core::mppi::{run_receding_horizon, PiRun, CLOSED_LOOP_STREAM};
use pathint_core::sde::{simulate_path, BrownianIncrements, Guards, Path, SdeSpec, TimeGrid};

use super::{finish_run, ParetoPontryaginFeedback, RunContext};
use crate::config::{ExperimentKind, ParetoConfig};
use crate::csvio::{write_csv, Cell};
use crate::parallel::RayonRollouts;
use crate::CliError;

fn market_sde(config: &ParetoConfig) -> impl pathint_core::sde::Sde + '_ {
    let k = config.params.k;
    let a_matrix = config.params.a_matrix.clone();
    let sigma0 = config.params.sigma0;
    SdeSpec {
        k,
        m: 1,
        // Drift (A·X) ⊙ X − u, one-factor diffusion σ₀·X.
        drift: move |_s: f64, x: &[f64], u: &[f64], out: &mut [f64]| {
            for i in 0..out.len() {
                let mut row = 0.0;
                for j in 0..x.len() {
                    row += a_matrix[i * x.len() + j] * x[j];
                }
                out[i] = row * x[i] - u[i];
            }
        },
        diffusion: move |_s: f64, x: &[f64], _u: &[f64], out: &mut [f64]| {
            for i in 0..out.len() {
                out[i] = sigma0 * x[i];
            }
        },
        guards: Guards::NONE,
    }
}

fn trajectory_rows(path: &Path, noise: &BrownianIncrements, k: usize) -> Vec<Vec<Cell>> {
    let mut rows = Vec::with_capacity(path.states.len());
    for step in 0..path.states.len() {
        let mut row: Vec<Cell> = vec![Cell::Int(step as i64), Cell::Float(path.grid.time_at(step))];
        for i in 0..k {
            row.push(Cell::Float(path.states[step][i]));
        }
        for i in 0..k {
            let u = if step < path.controls.len() {
                path.controls[step][i]
            } else {
                0.0
            };
            row.push(Cell::Float(u));
        }
        let dw = if step < path.controls.len() {
            noise.step(step)[0]
        } else {
            0.0
        };
        row.push(Cell::Float(dw));
        rows.push(row);
    }
    rows
}

fn control_extremes(path: &Path) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for u in &path.controls {
        for v in u {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    (lo, hi)
}

fn max_abs_state(path: &Path) -> f64 {
    path.states
        .iter()
        .flat_map(|x| x.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

pub fn run_compare(config: &ParetoConfig, ctx: &RunContext) -> Result<(), CliError> {
    let started = std::time::Instant::now();
    let sde = market_sde(config);
    let params = config.params.clone();
    let running_cost = move |s: f64, x: &[f64], u: &[f64]| {
        pathint_core::mppi::pareto_running_cost(s, x, u, &params)
    };

    let pi_run: PiRun = run_receding_horizon(
        &config.x0,
        &sde,
        &running_cost,
        &config.pi,
        ctx.seed,
        config.t_end,
        &RayonRollouts,
    )?;
    if let Some(step) = pi_run.path.diverged_at {
        return Err(CliError::Numerical(format!(
            "closed loop diverged at step {step}"
        )));
    }

    let grid = TimeGrid::from_horizon(config.t_end, config.pi.dt)?;
    let noise =
        BrownianIncrements::generate(ctx.seed, CLOSED_LOOP_STREAM, grid.n_steps(), 1, grid.dt());
    let benchmark_rule = ParetoPontryaginFeedback {
        params: config.params.clone(),
        u_max: config.pi.u_max,
    };
    let benchmark_path = simulate_path(&config.x0, &sde, &benchmark_rule, &grid, &noise)?;

    let k = config.params.k;
    let mut header: Vec<String> = vec!["step".into(), "s".into()];
    for i in 0..k {
        header.push(format!("x{}", i + 1));
    }
    for i in 0..k {
        header.push(format!("u{}", i + 1));
    }
    header.push("dw".into());
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();

    write_csv(
        &ctx.file("pi_trajectory.csv"),
        &header_refs,
        &trajectory_rows(&pi_run.path, &noise, k),
    )?;
    write_csv(
        &ctx.file("pontryagin_trajectory.csv"),
        &header_refs,
        &trajectory_rows(&benchmark_path, &noise, k),
    )?;

    let diag_rows: Vec<Vec<Cell>> = pi_run
        .diagnostics
        .iter()
        .map(|d| {
            vec![
                Cell::Int(d.step as i64),
                Cell::Float(d.s),
                Cell::Float(d.theta_hat),
                Cell::Float(d.ess),
                Cell::Int(d.clamped_components as i64),
                Cell::Int(d.diverged_rollouts as i64),
            ]
        })
        .collect();
    write_csv(
        &ctx.file("pi_diagnostics.csv"),
        &[
            "step",
            "s",
            "theta_hat",
            "ess",
            "clamped_components",
            "diverged_rollouts",
        ],
        &diag_rows,
    )?;

    let (pi_u_lo, pi_u_hi) = control_extremes(&pi_run.path);
    let (bm_u_lo, bm_u_hi) = control_extremes(&benchmark_path);
    let mean_ess = pi_run.diagnostics.iter().map(|d| d.ess).sum::<f64>()
        / pi_run.diagnostics.len().max(1) as f64;
    let total_diverged: usize = pi_run.diagnostics.iter().map(|d| d.diverged_rollouts).sum();
    let bounds_ok = |lo: f64, hi: f64| lo >= config.pi.u_min && hi <= config.pi.u_max;

    let summary = json!({
        "experiment": "pareto_pi_compare",
        "n_steps": grid.n_steps(),
        "dt": grid.dt(),
        "pi": {
            "max_abs_state": max_abs_state(&pi_run.path),
            "control_min": pi_u_lo,
            "control_max": pi_u_hi,
            "controls_in_bounds": bounds_ok(pi_u_lo, pi_u_hi),
            "mean_ess": mean_ess,
            "diverged_rollouts": total_diverged,
        },
        "pontryagin": {
            "max_abs_state": max_abs_state(&benchmark_path),
            "control_min": bm_u_lo,
            "control_max": bm_u_hi,
            "controls_in_bounds": bounds_ok(bm_u_lo, bm_u_hi),
            "rule_fallbacks": benchmark_path.stats.rule_fallbacks,
        },
        "runtime_seconds": started.elapsed().as_secs_f64(),
    });
    finish_run(
        ctx,
        ExperimentKind::ParetoPiCompare,
        &summary,
        &[
            "pi_trajectory.csv",
            "pontryagin_trajectory.csv",
            "pi_diagnostics.csv",
        ],
    )
}
