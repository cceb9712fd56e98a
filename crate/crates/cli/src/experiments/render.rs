//! Figure rendering from the CSV artifacts. Runners call this after writing
//! their CSVs; the `render` subcommand calls it on an existing directory, so
//! figures are always a pure function of the CSV bytes.

use std::path::Path;

use crate::config::ExperimentKind;
use crate::csvio::read_csv;
use crate::svg::{write_svg, Panel, Series};
use crate::CliError;

fn line_series(path: &Path, x_col: &str, y_col: &str, label: &str) -> Result<Series, CliError> {
    let table = read_csv(path)?;
    Ok(Series {
        label: label.into(),
        xs: table.column(x_col)?,
        ys: table.column(y_col)?,
    })
}

fn histogram_panel(path: &Path, title: &str, x_label: &str) -> Result<Panel, CliError> {
    let table = read_csv(path)?;
    Ok(Panel::Histogram {
        title: title.into(),
        x_label: x_label.into(),
        lows: table.column("bin_low")?,
        highs: table.column("bin_high")?,
        counts: table.column("count")?,
    })
}

fn state_control_panels(path: &Path, arm: &str, k: usize) -> Result<(Panel, Panel), CliError> {
    let table = read_csv(path)?;
    let s = table.column("s")?;
    let mut states = Vec::new();
    let mut controls = Vec::new();
    for i in 1..=k {
        states.push(Series {
            label: format!("x{i}"),
            xs: s.clone(),
            ys: table.column(&format!("x{i}"))?,
        });
        let mut u = table.column(&format!("u{i}"))?;
        // The terminal row carries no applied control.
        u.pop();
        controls.push(Series {
            label: format!("u{i}"),
            xs: s[..u.len()].to_vec(),
            ys: u,
        });
    }
    Ok((
        Panel::Lines {
            title: format!("{arm}: states"),
            x_label: "s".into(),
            y_label: "X".into(),
            series: states,
        },
        Panel::Lines {
            title: format!("{arm}: controls"),
            x_label: "s".into(),
            y_label: "u".into(),
            series: controls,
        },
    ))
}

/// Renders `figure.svg` for the experiment's artifacts in `dir`.
pub fn render_experiment(dir: &Path, kind: ExperimentKind) -> Result<(), CliError> {
    let figure = dir.join("figure.svg");
    match kind {
        ExperimentKind::WalrasianPath => {
            // Upper panel: the state trajectory; lower panel: the control.
            let state = line_series(&dir.join("trajectory.csv"), "s_over_t", "x", "X(s)")?;
            let control = line_series(&dir.join("trajectory.csv"), "s_over_t", "u", "u(s)")?;
            write_svg(
                &figure,
                &[
                    Panel::Lines {
                        title: "market share".into(),
                        x_label: "s/t".into(),
                        y_label: "X".into(),
                        series: vec![state],
                    },
                    Panel::Lines {
                        title: "feedback control".into(),
                        x_label: "s/t".into(),
                        y_label: "u".into(),
                        series: vec![control],
                    },
                ],
            )
        }
        ExperimentKind::WalrasianMc => {
            let paths_table = read_csv(&dir.join("paths.csv"))?;
            let ids = paths_table.column("path")?;
            let s_over_t = paths_table.column("s_over_t")?;
            let xs = paths_table.column("x")?;
            let mut series: Vec<Series> = Vec::new();
            let mut current = f64::NAN;
            for ((id, s), x) in ids.iter().zip(&s_over_t).zip(&xs) {
                if *id != current {
                    current = *id;
                    series.push(Series {
                        label: format!("path {}", *id as i64),
                        xs: Vec::new(),
                        ys: Vec::new(),
                    });
                }
                let last = series.last_mut().expect("series started");
                last.xs.push(*s);
                last.ys.push(*x);
            }
            write_svg(
                &figure,
                &[
                    Panel::Lines {
                        title: "sample trajectories".into(),
                        x_label: "s/t".into(),
                        y_label: "X".into(),
                        series,
                    },
                    histogram_panel(&dir.join("histogram.csv"), "terminal market share", "X(t)")?,
                ],
            )
        }
        ExperimentKind::Ex3Compare => {
            let qx = line_series(&dir.join("quantum_trajectory.csv"), "s", "x", "X(s)")?;
            let qu = line_series(&dir.join("quantum_trajectory.csv"), "s", "u", "u(s)")?;
            let px = line_series(&dir.join("pontryagin_trajectory.csv"), "s", "x", "X(s)")?;
            let pu = line_series(&dir.join("pontryagin_trajectory.csv"), "s", "u", "u(s)")?;
            let panel = |title: &str, y: &str, series: Series| Panel::Lines {
                title: title.into(),
                x_label: "s".into(),
                y_label: y.into(),
                series: vec![series],
            };
            write_svg(
                &figure,
                &[
                    panel("quantum: state", "X", qx),
                    panel("quantum: control", "u", qu),
                    panel("pontryagin: state", "X", px),
                    panel("pontryagin: control", "u", pu),
                ],
            )
        }
        ExperimentKind::Ex3Mc => write_svg(
            &figure,
            &[
                histogram_panel(
                    &dir.join("quantum_histogram.csv"),
                    "quantum terminal X",
                    "X(t)",
                )?,
                histogram_panel(
                    &dir.join("pontryagin_histogram.csv"),
                    "pontryagin terminal X",
                    "X(t)",
                )?,
                weight_histogram(&dir.join("quantum_weights.csv"), "quantum weights")?,
                weight_histogram(&dir.join("pontryagin_weights.csv"), "pontryagin weights")?,
            ],
        ),
        ExperimentKind::ParetoPiCompare => {
            let k = infer_state_dim(&dir.join("pi_trajectory.csv"))?;
            let (pi_states, pi_controls) =
                state_control_panels(&dir.join("pi_trajectory.csv"), "path integral", k)?;
            let (bm_states, bm_controls) =
                state_control_panels(&dir.join("pontryagin_trajectory.csv"), "pontryagin", k)?;
            write_svg(&figure, &[pi_states, pi_controls, bm_states, bm_controls])
        }
        ExperimentKind::FocScan => {
            let residual = line_series(&dir.join("residual.csv"), "u", "residual", "residual")?;
            write_svg(
                &figure,
                &[Panel::Lines {
                    title: "stationarity residual".into(),
                    x_label: "u".into(),
                    y_label: "residual".into(),
                    series: vec![residual],
                }],
            )
        }
        ExperimentKind::MghDefect => {
            let defect = line_series(&dir.join("defect.csv"), "h_a", "max_defect", "max defect")?;
            write_svg(
                &figure,
                &[Panel::Lines {
                    title: "operator defect vs spacing".into(),
                    x_label: "h".into(),
                    y_label: "defect".into(),
                    series: vec![defect],
                }],
            )
        }
    }
}

fn weight_histogram(path: &Path, title: &str) -> Result<Panel, CliError> {
    let table = read_csv(path)?;
    let weights = table.column("weight")?;
    let rows = crate::summary::histogram(&weights);
    let mut lows = Vec::new();
    let mut highs = Vec::new();
    let mut counts = Vec::new();
    for row in rows {
        if let [crate::csvio::Cell::Float(lo), crate::csvio::Cell::Float(hi), crate::csvio::Cell::Int(c)] =
            row[..]
        {
            lows.push(lo);
            highs.push(hi);
            counts.push(c as f64);
        }
    }
    Ok(Panel::Histogram {
        title: title.into(),
        x_label: "weight".into(),
        lows,
        highs,
        counts,
    })
}

fn infer_state_dim(path: &Path) -> Result<usize, CliError> {
    let table = read_csv(path)?;
    let k = table.header.iter().filter(|h| h.starts_with('x')).count();
    if k == 0 {
        return Err(CliError::Io(format!(
            "{}: no state columns",
            path.display()
        )));
    }
    Ok(k)
}
