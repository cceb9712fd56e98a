//! Consumer-goods comparisons (`table2.cfg`): the cubic quantum rule against
//! the linear benchmark 2bX/3, single-trajectory and Monte Carlo, both arms
//! driven by common random numbers.

use serde_json::json;

use pathint_core::foc::ProblemSpec;
use pathint_core::path_integral::WeightedEnsemble;
use pathint_core::sde::{simulate_path, BrownianIncrements, FeedbackRule, Path};
use pathint_core::strategies::cubic::ex3_problem;
use pathint_core::strategies::Provenance;

use super::{finish_run, CubicFeedback, Ex3PontryaginFeedback, RunContext};
use crate::config::{Ex3Config, ExperimentKind};
use crate::csvio::{write_csv, Cell};
use crate::mc::{discounted_profit, McSummary};
use crate::summary::histogram;
use crate::CliError;

fn trajectory_rows(path: &Path, noise: &BrownianIncrements) -> Vec<Vec<Cell>> {
    let n = path.grid.n_steps();
    let t_end = path.grid.t_end();
    let mut rows = Vec::with_capacity(n + 1);
    for step in 0..path.states.len() {
        let s = path.grid.time_at(step);
        let (u, dw) = if step < path.controls.len() {
            (path.controls[step][0], noise.step(step)[0])
        } else {
            (0.0, 0.0)
        };
        rows.push(vec![
            Cell::Int(step as i64),
            Cell::Float(s),
            Cell::Float(s / t_end),
            Cell::Float(path.states[step][0]),
            Cell::Float(u),
            Cell::Float(dw),
        ]);
    }
    rows
}

fn arm_summary(path: &Path, spec: &ProblemSpec) -> serde_json::Value {
    json!({
        "terminal_x": path.terminal()[0],
        "discounted_profit": discounted_profit(path, spec),
        "rule_fallbacks": path.stats.rule_fallbacks,
        "control_clamps": path.stats.control_clamps,
        "state_clamps": path.stats.state_clamps,
    })
}

pub fn run_compare(config: &Ex3Config, ctx: &RunContext) -> Result<(), CliError> {
    let started = std::time::Instant::now();
    let spec = ex3_problem(&config.params);
    let quantum = CubicFeedback {
        params: config.params,
    };
    let pontryagin = Ex3PontryaginFeedback { b: config.params.b };

    // One shared increment stream: the comparison isolates the feedback rule.
    let noise =
        BrownianIncrements::generate(ctx.seed, 0, config.grid.n_steps(), 1, config.grid.dt());
    let quantum_path = simulate_path(&[config.x0], &spec.sde, &quantum, &config.grid, &noise)?;
    let pontryagin_path =
        simulate_path(&[config.x0], &spec.sde, &pontryagin, &config.grid, &noise)?;

    let header = ["step", "s", "s_over_t", "x", "u", "dw"];
    let trajectory_file = |p: Provenance| format!("{}_trajectory.csv", p.label());
    write_csv(
        &ctx.file(&trajectory_file(Provenance::Quantum)),
        &header,
        &trajectory_rows(&quantum_path, &noise),
    )?;
    write_csv(
        &ctx.file(&trajectory_file(Provenance::Pontryagin)),
        &header,
        &trajectory_rows(&pontryagin_path, &noise),
    )?;

    let summary = json!({
        "experiment": "ex3_compare",
        "n_steps": config.grid.n_steps(),
        "dt": config.grid.dt(),
        "quantum": arm_summary(&quantum_path, &spec),
        "pontryagin": arm_summary(&pontryagin_path, &spec),
        "runtime_seconds": started.elapsed().as_secs_f64(),
    });
    finish_run(
        ctx,
        ExperimentKind::Ex3Compare,
        &summary,
        &["quantum_trajectory.csv", "pontryagin_trajectory.csv"],
    )
}

fn run_arm(
    config: &Ex3Config,
    ctx: &RunContext,
    rule: &dyn FeedbackRule,
    spec: &ProblemSpec,
    n_paths: usize,
) -> Result<McSummary, CliError> {
    let ensemble = crate::parallel::par_simulate_ensemble(
        &[config.x0],
        &spec.sde,
        rule,
        &config.grid,
        ctx.seed,
        n_paths,
    )?;
    McSummary::compute(&ensemble, |path| discounted_profit(path, spec))
}

fn weight_rows(weights: &WeightedEnsemble) -> Vec<Vec<Cell>> {
    weights
        .costs
        .iter()
        .zip(&weights.weights)
        .enumerate()
        .map(|(i, (profit, weight))| {
            vec![
                Cell::Int(i as i64),
                Cell::Float(*profit),
                Cell::Float(*weight),
            ]
        })
        .collect()
}

pub fn run_mc(config: &Ex3Config, ctx: &RunContext) -> Result<(), CliError> {
    let started = std::time::Instant::now();
    let n_paths = ctx.n_paths.ok_or_else(|| {
        CliError::Config(crate::config::ConfigError {
            line: None,
            message: "`run.n_paths` is required for Monte Carlo runs".into(),
        })
    })?;
    let spec = ex3_problem(&config.params);
    let quantum = CubicFeedback {
        params: config.params,
    };
    let pontryagin = Ex3PontryaginFeedback { b: config.params.b };

    // Path i uses stream i in both arms: identical increments path-by-path.
    let q = run_arm(config, ctx, &quantum, &spec, n_paths)?;
    let p = run_arm(config, ctx, &pontryagin, &spec, n_paths)?;

    write_csv(
        &ctx.file("quantum_histogram.csv"),
        &["bin_low", "bin_high", "count"],
        &histogram(&q.terminals),
    )?;
    write_csv(
        &ctx.file("pontryagin_histogram.csv"),
        &["bin_low", "bin_high", "count"],
        &histogram(&p.terminals),
    )?;
    write_csv(
        &ctx.file("quantum_weights.csv"),
        &["path", "profit", "weight"],
        &weight_rows(&q.weights),
    )?;
    write_csv(
        &ctx.file("pontryagin_weights.csv"),
        &["path", "profit", "weight"],
        &weight_rows(&p.weights),
    )?;

    let summary = json!({
        "experiment": "ex3_mc",
        "n_paths": n_paths,
        "quantum": q.to_json(),
        "pontryagin": p.to_json(),
        "runtime_seconds": started.elapsed().as_secs_f64(),
    });
    finish_run(
        ctx,
        ExperimentKind::Ex3Mc,
        &summary,
        &[
            "quantum_histogram.csv",
            "pontryagin_histogram.csv",
            "quantum_weights.csv",
            "pontryagin_weights.csv",
        ],
    )
}
