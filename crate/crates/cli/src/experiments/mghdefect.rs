//! Grid-refinement study of the Hamiltonian operator: the defect of the
//! central-difference application against the analytic operator on a smooth
//! test function, halving the spacing per level.

use serde_json::json;

use pathint_core::mgh::{mgh_operator_apply, Grid2};

use super::{finish_run, RunContext};
use crate::config::{ExperimentKind, MghDefectConfig};
use crate::csvio::{write_csv, Cell};
use crate::CliError;

fn test_function(a: f64, b: f64) -> f64 {
    (1.3 * a).sin() * (0.7 * b).cos() + 0.2 * a * b
}

struct TestPartials {
    c: f64,
    c_a: f64,
    c_b: f64,
    c_aa: f64,
    c_ab: f64,
    c_bb: f64,
}

fn test_partials(a: f64, b: f64) -> TestPartials {
    let sa = (1.3 * a).sin();
    let ca = (1.3 * a).cos();
    let sb = (0.7 * b).sin();
    let cb = (0.7 * b).cos();
    TestPartials {
        c: sa * cb + 0.2 * a * b,
        c_a: 1.3 * ca * cb + 0.2 * b,
        c_b: -0.7 * sa * sb + 0.2 * a,
        c_aa: -1.69 * sa * cb,
        c_ab: -0.91 * ca * sb + 0.2,
        c_bb: -0.49 * sa * cb,
    }
}

pub fn run(config: &MghDefectConfig, ctx: &RunContext) -> Result<(), CliError> {
    let started = std::time::Instant::now();
    let mut rows = Vec::new();
    let mut defects = Vec::new();
    let mut ratios = Vec::new();

    for level in 0..config.refinements {
        let nodes = (config.nodes - 1) * (1 << level) + 1;
        let da = (config.a_max - config.a_min) / (nodes - 1) as f64;
        let db = (config.b_max - config.b_min) / (nodes - 1) as f64;
        let grid = Grid2::from_fn(
            config.a_min,
            da,
            nodes,
            config.b_min,
            db,
            nodes,
            test_function,
        );
        let applied = mgh_operator_apply(&grid, &config.op)?;
        let mut defect: f64 = 0.0;
        for ia in 1..nodes - 1 {
            for ib in 1..nodes - 1 {
                let a = grid.a_at(ia);
                let b = grid.b_at(ib);
                let p = test_partials(a, b);
                let exact = config
                    .op
                    .apply_analytic(b, p.c, p.c_a, p.c_b, p.c_aa, p.c_ab, p.c_bb);
                defect = defect.max((applied.at(ia, ib) - exact).abs());
            }
        }
        let ratio = if level == 0 {
            f64::NAN
        } else {
            defects[level - 1] / defect
        };
        if level > 0 {
            ratios.push(ratio);
        }
        rows.push(vec![
            Cell::Int(level as i64),
            Cell::Int(nodes as i64),
            Cell::Float(da),
            Cell::Float(db),
            Cell::Float(defect),
            Cell::Float(if level == 0 { 0.0 } else { ratio }),
        ]);
        defects.push(defect);
    }
    write_csv(
        &ctx.file("defect.csv"),
        &[
            "level",
            "nodes",
            "h_a",
            "h_b",
            "max_defect",
            "ratio_to_previous",
        ],
        &rows,
    )?;

    let observed_order = ratios.last().map(|r| r.log2());
    let summary = json!({
        "experiment": "mgh_defect",
        "defects": defects,
        "ratios": ratios,
        "observed_order": observed_order,
        "runtime_seconds": started.elapsed().as_secs_f64(),
    });
    finish_run(ctx, ExperimentKind::MghDefect, &summary, &["defect.csv"])
}
