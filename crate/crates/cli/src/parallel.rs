//! Rayon drivers over the core's per-index functions. Slots are filled by
//! index and reduced sequentially, so outputs are bitwise-identical to the
//! serial versions for every thread count.

use rayon::prelude::*;

use pathint_core::mppi::{rollout_one, RolloutBatch, RolloutEngine, RolloutRequest};
use pathint_core::sde::{
    simulate_ensemble_member, Ensemble, FeedbackRule, Path, Sde, SdeError, TimeGrid,
};

use crate::CliError;

/// Builds a rayon pool with the requested size (or the rayon default).
pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Io(format!("building thread pool: {e}")))
}

/// Parallel counterpart of `simulate_ensemble`: path i runs on stream i.
pub fn par_simulate_ensemble(
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
    let paths: Result<Vec<Path>, SdeError> = (0..n_paths)
        .into_par_iter()
        .map(|i| simulate_ensemble_member(x0, sde, rule, grid, seed, i))
        .collect();
    let paths = paths?;
    let diverged = paths.iter().filter(|p| p.diverged_at.is_some()).count();
    Ok(Ensemble { paths, diverged })
}

/// Parallel rollout engine: rollout i fills slot i.
pub struct RayonRollouts;

impl RolloutEngine for RayonRollouts {
    fn batch(&self, req: &RolloutRequest<'_>) -> RolloutBatch {
        let m = req.sde.noise_dim();
        let h = req.config.horizon;
        let rollouts = req.config.rollouts;
        let results: Vec<(Vec<f64>, f64)> = (0..rollouts)
            .into_par_iter()
            .map(|i| rollout_one(req, i))
            .collect();
        let mut disturbances = vec![0.0; rollouts * h * m];
        let mut costs = vec![0.0; rollouts];
        for (i, (eps, cost)) in results.into_iter().enumerate() {
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
