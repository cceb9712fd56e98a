//! Advertising-market runs (`table1.cfg`): a single feedback trajectory and
//! the Monte Carlo ensemble with exponential-weight diagnostics.

use serde_json::json;

use pathint_core::sde::{simulate_path, BrownianIncrements, FeedbackRule, Path, RuleContext};
use pathint_core::strategies::walrasian::walrasian_problem;

use super::{finish_run, RunContext, WalrasianFeedback};
use crate::config::{ExperimentKind, WalrasianConfig};
use crate::csvio::{write_csv, Cell};
use crate::mc::{discounted_profit, McSummary};
use crate::summary::histogram;
use crate::CliError;

fn trajectory_rows(path: &Path, rule: &dyn FeedbackRule) -> Vec<Vec<Cell>> {
    let n = path.grid.n_steps();
    let t_end = path.grid.t_end();
    let mut rows = Vec::with_capacity(n + 1);
    for step in 0..=n.min(path.states.len() - 1) {
        let s = path.grid.time_at(step);
        let x = path.states[step][0];
        let (u, flagged) = if step < path.controls.len() {
            let flags = path.flags[step];
            (path.controls[step][0], flags.clamped || flags.fallback)
        } else {
            // Terminal node: evaluate the rule for display.
            let decision = rule.control(s, &[x], &RuleContext::EMPTY);
            (decision.u[0], decision.fallback)
        };
        rows.push(vec![
            Cell::Int(step as i64),
            Cell::Float(s),
            Cell::Float(s / t_end),
            Cell::Float(x),
            Cell::Float(u),
            Cell::Int(flagged as i64),
        ]);
    }
    rows
}

pub fn run_single(config: &WalrasianConfig, ctx: &RunContext) -> Result<(), CliError> {
    let started = std::time::Instant::now();
    let spec = walrasian_problem(&config.params, config.sigma0);
    let rule = WalrasianFeedback {
        params: config.params,
        branch: config.branch,
    };
    let noise =
        BrownianIncrements::generate(ctx.seed, 0, config.grid.n_steps(), 1, config.grid.dt());
    let path = simulate_path(&[config.x0], &spec.sde, &rule, &config.grid, &noise)?;

    write_csv(
        &ctx.file("trajectory.csv"),
        &["step", "s", "s_over_t", "x", "u", "clamped"],
        &trajectory_rows(&path, &rule),
    )?;

    let summary = json!({
        "experiment": "walrasian_path",
        "n_steps": config.grid.n_steps(),
        "dt": config.grid.dt(),
        "terminal_x": path.terminal()[0],
        "discounted_profit": discounted_profit(&path, &spec),
        "rule_fallbacks": path.stats.rule_fallbacks,
        "control_clamps": path.stats.control_clamps,
        "state_clamps": path.stats.state_clamps,
        "runtime_seconds": started.elapsed().as_secs_f64(),
    });
    finish_run(
        ctx,
        ExperimentKind::WalrasianPath,
        &summary,
        &["trajectory.csv"],
    )
}

pub fn run_mc(config: &WalrasianConfig, ctx: &RunContext) -> Result<(), CliError> {
    let started = std::time::Instant::now();
    let n_paths = ctx.n_paths.ok_or_else(|| {
        CliError::Config(crate::config::ConfigError {
            line: None,
            message: "`run.n_paths` is required for Monte Carlo runs".into(),
        })
    })?;
    let spec = walrasian_problem(&config.params, config.sigma0);
    let rule = WalrasianFeedback {
        params: config.params,
        branch: config.branch,
    };
    let ensemble = crate::parallel::par_simulate_ensemble(
        &[config.x0],
        &spec.sde,
        &rule,
        &config.grid,
        ctx.seed,
        n_paths,
    )?;
    let mc = McSummary::compute(&ensemble, |path| discounted_profit(path, &spec))?;

    write_csv(
        &ctx.file("histogram.csv"),
        &["bin_low", "bin_high", "count"],
        &histogram(&mc.terminals),
    )?;
    let weight_rows: Vec<Vec<Cell>> = mc
        .weights
        .costs
        .iter()
        .zip(&mc.weights.weights)
        .enumerate()
        .map(|(i, (profit, weight))| {
            vec![
                Cell::Int(i as i64),
                Cell::Float(*profit),
                Cell::Float(*weight),
            ]
        })
        .collect();
    write_csv(
        &ctx.file("weights.csv"),
        &["path", "profit", "weight"],
        &weight_rows,
    )?;

    // A small bundle of representative trajectories for the figure.
    let shown = ensemble.paths.len().min(20);
    let mut path_rows = Vec::new();
    for (index, path) in ensemble.paths.iter().take(shown).enumerate() {
        for (step, state) in path.states.iter().enumerate() {
            path_rows.push(vec![
                Cell::Int(index as i64),
                Cell::Int(step as i64),
                Cell::Float(path.grid.time_at(step)),
                Cell::Float(path.grid.time_at(step) / path.grid.t_end()),
                Cell::Float(state[0]),
            ]);
        }
    }
    write_csv(
        &ctx.file("paths.csv"),
        &["path", "step", "s", "s_over_t", "x"],
        &path_rows,
    )?;

    let mut summary = mc.to_json();
    let extra = json!({
        "experiment": "walrasian_mc",
        "n_paths": n_paths,
        "rule_fallbacks": mc.rule_fallbacks,
        "control_clamps": mc.control_clamps,
        "state_clamps": mc.state_clamps,
        "runtime_seconds": started.elapsed().as_secs_f64(),
    });
    for (key, value) in extra.as_object().unwrap() {
        summary[key] = value.clone();
    }
    finish_run(
        ctx,
        ExperimentKind::WalrasianMc,
        &summary,
        &["histogram.csv", "weights.csv", "paths.csv"],
    )
}
