//! Residual scan of the first-order condition over a control interval at a
//! fixed (s, X), with the roots it brackets and the closed-form branch
//! values for cross-reference.

use serde_json::json;

use pathint_core::foc::{compute_f, foc_residual, solve_foc};
use pathint_core::strategies::walrasian::{
    walrasian_problem, walrasian_quantum, Branch, QuantumRoot,
};

use super::{finish_run, RunContext};
use crate::config::{ExperimentKind, FocScanConfig};
use crate::csvio::{write_csv, Cell};
use crate::CliError;

const ROOT_TOLERANCE: f64 = 1e-10;

pub fn run(config: &FocScanConfig, ctx: &RunContext) -> Result<(), CliError> {
    let started = std::time::Instant::now();
    let spec = walrasian_problem(&config.params, config.sigma0);

    let mut rows = Vec::with_capacity(config.points);
    let mut samples = Vec::with_capacity(config.points);
    for i in 0..config.points {
        let t = i as f64 / (config.points - 1) as f64;
        let u = config.u_min + t * (config.u_max - config.u_min);
        let v = compute_f(&spec, config.s, config.x, u)?;
        let residual = v.f_u * v.f_xx * v.f_xx - 2.0 * v.f_x * v.f_xu;
        samples.push((u, residual));
        rows.push(vec![
            Cell::Float(u),
            Cell::Float(residual),
            Cell::Float(v.f),
            Cell::Float(v.f_u),
            Cell::Float(v.f_x),
            Cell::Float(v.f_xx),
            Cell::Float(v.f_xu),
        ]);
    }
    write_csv(
        &ctx.file("residual.csv"),
        &["u", "residual", "f", "f_u", "f_x", "f_xx", "f_xu"],
        &rows,
    )?;

    // Every sign change brackets a stationary control.
    let mut roots = Vec::new();
    for pair in samples.windows(2) {
        let (u0, r0) = pair[0];
        let (u1, r1) = pair[1];
        if (r0 < 0.0 && r1 > 0.0) || (r0 > 0.0 && r1 < 0.0) {
            let root = solve_foc(&spec, config.s, config.x, (u0, u1), ROOT_TOLERANCE)?;
            let check = foc_residual(&spec, config.s, config.x, root)?;
            roots.push(json!({ "u": root, "residual": check }));
        }
    }

    let branch_value =
        |branch: Branch| match walrasian_quantum(config.s, config.x, &config.params, branch) {
            Ok(QuantumRoot::Real(u)) => json!(u),
            Ok(QuantumRoot::NoRealRoot { .. }) => json!(null),
            Err(_) => json!(null),
        };
    let discriminant = {
        let e = (-config.params.zeta * config.s).exp();
        let l = config.params.lambda_star * (-config.params.a * config.s).exp();
        let a_term = config.params.c * config.x * e + l;
        let head = e * (config.params.p - config.x / a_term);
        head * head - e * (2.0 * config.params.p * config.x * e / a_term + l / a_term)
    };

    let summary = json!({
        "experiment": "foc_scan",
        "s": config.s,
        "x": config.x,
        "stationary_controls": roots,
        "closed_form_minus": branch_value(Branch::Minus),
        "closed_form_plus": branch_value(Branch::Plus),
        "closed_form_discriminant": discriminant,
        "runtime_seconds": started.elapsed().as_secs_f64(),
    });
    finish_run(ctx, ExperimentKind::FocScan, &summary, &["residual.csv"])
}
