//! Bounded worker pools and deterministic task helpers.
//!
//! Parallel execution never changes results: every task computes its outputs
//! with the same operation order as the serial path, and task results are
//! collected in task order, so outputs are bitwise identical for any worker
//! count.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Executes work either inline (one worker) or inside a dedicated rayon
/// pool with a fixed thread count. Thread counts are always explicit; this
/// crate never auto-detects parallelism.
pub(crate) enum Executor {
    Serial,
    Pool(rayon::ThreadPool),
}

impl Executor {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidPlan("workers must be at least 1".into()));
        }
        if workers == 1 {
            return Ok(Executor::Serial);
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::WorkerPool(e.to_string()))?;
        Ok(Executor::Pool(pool))
    }

    pub fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match self {
            Executor::Serial => f(),
            Executor::Pool(pool) => pool.install(f),
        }
    }
}

/// Maps independent work items, in parallel when requested, preserving item
/// order in the results.
pub(crate) fn run_sections<I, R, F>(parallel: bool, items: Vec<I>, f: F) -> Vec<R>
where
    I: Send,
    R: Send,
    F: Fn(I) -> R + Sync + Send,
{
    if parallel {
        items.into_par_iter().map(f).collect()
    } else {
        items.into_iter().map(f).collect()
    }
}
