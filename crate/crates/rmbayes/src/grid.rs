//! Parallel execution of simulation grids.
//!
//! Replications are spread over the rayon pool; each draws from its own
//! substream, so the report equals [`rmbayes_core::run_grid`] bit for bit.

use rayon::prelude::*;
use rmbayes_core::simulation::{run_rep, summarize_cell};
use rmbayes_core::{CellResult, Error, GridReport, GridSpec, SimulationConfig};

fn wrap(config: &SimulationConfig, e: Error) -> Error {
    match e {
        e @ Error::Cell { .. } => e,
        e => Error::Cell {
            label: config.label(),
            source: Box::new(e),
        },
    }
}

pub fn run_cell_parallel(config: &SimulationConfig) -> Result<CellResult, Error> {
    config.validate().map_err(|e| wrap(config, e))?;
    let records = (0..config.reps)
        .into_par_iter()
        .map(|rep| run_rep(config, rep))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| wrap(config, e))?;
    summarize_cell(*config, records).map_err(|e| wrap(config, e))
}

pub fn run_grid_parallel(spec: &GridSpec) -> Result<GridReport, Error> {
    spec.validate()?;
    let cells = spec
        .cells()
        .par_iter()
        .map(run_cell_parallel)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GridReport {
        spec: spec.clone(),
        cells,
    })
}
