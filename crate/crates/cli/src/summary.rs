//! Run summaries: nearest-rank quantiles, fixed-width histograms, and the
//! manifest every run writes next to its artifacts.

use std::path::Path;

use serde_json::{json, Value};

use crate::csvio::Cell;
use crate::CliError;

/// Nearest-rank quantile: the ⌈p·n⌉-th smallest value.
/// q50 of {1, 2, 3, 4} is 2.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let n = sorted.len();
    let rank = (p * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Scalar statistics block used for terminal states and profits.
pub fn stats_block(values: &[f64]) -> Value {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    json!({
        "mean": mean,
        "q05": quantile(&sorted, 0.05),
        "q25": quantile(&sorted, 0.25),
        "q50": quantile(&sorted, 0.50),
        "q75": quantile(&sorted, 0.75),
        "q95": quantile(&sorted, 0.95),
        "min": sorted[0],
        "max": sorted[sorted.len() - 1],
    })
}

pub const HISTOGRAM_BINS: usize = 50;

/// Fixed 50-bin equal-width histogram over [min, max]; a degenerate range
/// puts all mass in the first bin.
pub fn histogram(values: &[f64]) -> Vec<Vec<Cell>> {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = (max - min) / HISTOGRAM_BINS as f64;
    let mut counts = [0usize; HISTOGRAM_BINS];
    for v in values {
        let bin = if width > 0.0 {
            (((v - min) / width) as usize).min(HISTOGRAM_BINS - 1)
        } else {
            0
        };
        counts[bin] += 1;
    }
    (0..HISTOGRAM_BINS)
        .map(|i| {
            vec![
                Cell::Float(min + width * i as f64),
                Cell::Float(min + width * (i + 1) as f64),
                Cell::Int(counts[i] as i64),
            ]
        })
        .collect()
}

/// Writes `summary.json` (sorted keys, stable for equal content).
pub fn write_summary(out_dir: &Path, summary: &Value) -> Result<(), CliError> {
    let path = out_dir.join("summary.json");
    let text = serde_json::to_string_pretty(summary)
        .map_err(|e| CliError::Io(format!("serializing summary: {e}")))?;
    std::fs::write(&path, text + "\n")
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

/// Writes `manifest.json`: config hash, seed, library version, experiment id
/// and the artifact list. Reruns with equal manifests produce bitwise-equal
/// CSVs.
pub fn write_manifest(
    out_dir: &Path,
    experiment: &str,
    config_hash: &str,
    seed: u64,
    files: &[&str],
) -> Result<(), CliError> {
    let mut sorted_files: Vec<&str> = files.to_vec();
    sorted_files.sort_unstable();
    let manifest = json!({
        "config_hash": config_hash,
        "experiment": experiment,
        "files": sorted_files,
        "seed": seed,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let path = out_dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Io(format!("serializing manifest: {e}")))?;
    std::fs::write(&path, text + "\n")
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}
