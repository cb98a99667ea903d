//! Rayon drivers for region sweeps and trajectory batches. Results are
//! ordered by input index regardless of scheduling.

use pp_stability_core::region::{classify_cell, GridError, GridSpec, RegionMap};
use pp_stability_core::simulation::{iterate_guarded, SimError, Trajectory, DIVERGENCE_GUARD};
use pp_stability_core::{Model, State};
use rayon::prelude::*;

pub fn sweep_parallel(spec: &GridSpec) -> Result<RegionMap, GridError> {
    spec.validate()?;
    let n_beta = spec.beta.n;
    let cells = (0..spec.cell_count())
        .into_par_iter()
        .map(|idx| classify_cell(spec, spec.x_at(idx / n_beta), spec.beta_at(idx % n_beta)))
        .collect();
    Ok(RegionMap::assemble(*spec, cells))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimJob {
    pub model: Model,
    pub h: f64,
    pub x0: State,
    pub steps: usize,
}

impl SimJob {
    pub fn run(&self) -> Result<Trajectory, SimError> {
        iterate_guarded(self.model, self.h, self.x0, self.steps, DIVERGENCE_GUARD)
    }
}

pub fn iterate_batch(jobs: &[SimJob]) -> Vec<Result<Trajectory, SimError>> {
    jobs.par_iter().map(SimJob::run).collect()
}
