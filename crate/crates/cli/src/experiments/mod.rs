//! Experiment runners. Every run writes its CSV artifacts, a `summary.json`
//! and a `manifest.json` into the output directory; figures are re-rendered
//! from the CSVs so the `render` subcommand and the in-run rendering share
//! one code path.

use std::path::{Path, PathBuf};

use pathint_core::sde::{ControlDecision, FeedbackRule, RuleContext};
use pathint_core::strategies::{
    cardano_real_roots, ex3_cubic_coeffs, ex3_pontryagin, pareto_pontryagin, preferred_root,
    walrasian_quantum, Branch, Ex3Params, ParetoParams, QuantumRoot, WalrasianQuantumParams,
};

use crate::config::{ExperimentConfig, ExperimentKind, Payload};
use crate::CliError;

mod ex3;
mod focscan;
mod mghdefect;
mod pareto;
pub mod render;
mod walrasian;

/// Everything a runner needs besides its payload.
pub struct RunContext {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub n_paths: Option<usize>,
    pub config_hash: String,
    pub render_svg: bool,
}

impl RunContext {
    pub fn file(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

/// Which runner family a subcommand drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    MonteCarlo,
    CompareEx3,
    PiCompare,
    FocScan,
    MghDefect,
}

/// Dispatches a parsed config to its runner.
pub fn run(mode: Mode, config: &ExperimentConfig, ctx: &RunContext) -> Result<(), CliError> {
    std::fs::create_dir_all(&ctx.out_dir)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", ctx.out_dir.display())))?;
    match (mode, &config.payload) {
        (Mode::Simulate, Payload::Walrasian(w)) => walrasian::run_single(w, ctx),
        (Mode::MonteCarlo, Payload::Walrasian(w)) => walrasian::run_mc(w, ctx),
        (Mode::MonteCarlo, Payload::Ex3(e)) => ex3::run_mc(e, ctx),
        (Mode::CompareEx3, Payload::Ex3(e)) => ex3::run_compare(e, ctx),
        (Mode::PiCompare, Payload::Pareto(p)) => pareto::run_compare(p, ctx),
        (Mode::FocScan, Payload::FocScan(f)) => focscan::run(f, ctx),
        (Mode::MghDefect, Payload::MghDefect(m)) => mghdefect::run(m, ctx),
        _ => Err(CliError::Config(crate::config::ConfigError {
            line: None,
            message: format!(
                "experiment `{}` does not fit this subcommand",
                config.experiment.id()
            ),
        })),
    }
}

pub(crate) fn finish_run(
    ctx: &RunContext,
    experiment: ExperimentKind,
    summary: &serde_json::Value,
    csv_files: &[&str],
) -> Result<(), CliError> {
    crate::summary::write_summary(&ctx.out_dir, summary)?;
    let mut files: Vec<&str> = csv_files.to_vec();
    files.push("summary.json");
    if ctx.render_svg {
        render::render_experiment(&ctx.out_dir, experiment)?;
        files.push("figure.svg");
    }
    crate::summary::write_manifest(
        &ctx.out_dir,
        experiment.id(),
        &ctx.config_hash,
        ctx.seed,
        &files,
    )
}

pub fn render_from_manifest(out_dir: &Path) -> Result<(), CliError> {
    let manifest_path = out_dir.join("manifest.json");
    let text = std::fs::read_to_string(&manifest_path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", manifest_path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Io(format!("parsing {}: {e}", manifest_path.display())))?;
    let id = value
        .get("experiment")
        .and_then(|v| v.as_str())
        .ok_or_else(|| CliError::Io("manifest has no experiment id".into()))?;
    let kind = match id {
        "walrasian_path" => ExperimentKind::WalrasianPath,
        "walrasian_mc" => ExperimentKind::WalrasianMc,
        "ex3_compare" => ExperimentKind::Ex3Compare,
        "ex3_mc" => ExperimentKind::Ex3Mc,
        "pareto_pi_compare" => ExperimentKind::ParetoPiCompare,
        "foc_scan" => ExperimentKind::FocScan,
        "mgh_defect" => ExperimentKind::MghDefect,
        other => {
            return Err(CliError::Io(format!(
                "manifest names unknown experiment `{other}`"
            )))
        }
    };
    render::render_experiment(out_dir, kind)
}

/// The advertising rule with its no-real-root fallback to zero.
pub struct WalrasianFeedback {
    pub params: WalrasianQuantumParams,
    pub branch: Branch,
}

impl FeedbackRule for WalrasianFeedback {
    fn control(&self, s: f64, x: &[f64], _ctx: &RuleContext<'_>) -> ControlDecision {
        match walrasian_quantum(s, x[0], &self.params, self.branch) {
            Ok(QuantumRoot::Real(u)) => ControlDecision::of(vec![u]),
            _ => ControlDecision {
                u: vec![0.0],
                fallback: true,
            },
        }
    }
}

/// The cubic feedback rule, picking the preferred real root.
pub struct CubicFeedback {
    pub params: Ex3Params,
}

impl FeedbackRule for CubicFeedback {
    fn control(&self, s: f64, x: &[f64], _ctx: &RuleContext<'_>) -> ControlDecision {
        let coeffs = ex3_cubic_coeffs(s, x[0], &self.params);
        match cardano_real_roots(&coeffs)
            .ok()
            .as_deref()
            .and_then(preferred_root)
        {
            Some(u) => ControlDecision::of(vec![u]),
            None => ControlDecision {
                u: vec![0.0],
                fallback: true,
            },
        }
    }
}

/// The linear benchmark rule 2bX/3.
pub struct Ex3PontryaginFeedback {
    pub b: f64,
}

impl FeedbackRule for Ex3PontryaginFeedback {
    fn control(&self, s: f64, x: &[f64], _ctx: &RuleContext<'_>) -> ControlDecision {
        ControlDecision::of(vec![ex3_pontryagin(s, x[0], self.b)])
    }
}

/// The cooperative benchmark rule, clamped into [0, u_max] per firm.
pub struct ParetoPontryaginFeedback {
    pub params: ParetoParams,
    pub u_max: f64,
}

impl FeedbackRule for ParetoPontryaginFeedback {
    fn control(&self, s: f64, x: &[f64], _ctx: &RuleContext<'_>) -> ControlDecision {
        let mut u = Vec::with_capacity(self.params.k);
        let mut fallback = false;
        for rho in 0..self.params.k {
            match pareto_pontryagin(s, x, rho, &self.params, Some(self.u_max)) {
                Ok(v) => u.push(v),
                Err(_) => {
                    u.push(0.0);
                    fallback = true;
                }
            }
        }
        ControlDecision { u, fallback }
    }
}
