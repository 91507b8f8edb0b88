//! CSV emission for benchmark rows.
//!
//! One row per run, echoing the full configuration needed to reproduce it.
//! Timing and counting never appear in the same row: counting runs leave
//! `seconds_median` empty, timed runs leave the count columns empty. With a
//! fixed config, seed, and workers=1, everything except `seconds_median` is
//! byte-stable across invocations.

pub const CSV_HEADER: &str =
    "experiment,precision,algorithm,n,bs,nmin,alpha,workers,reps,seconds_median,mul_count,add_count,max_rel_error";

/// One benchmark run.
#[derive(Debug, Default)]
pub struct BenchRecord {
    pub experiment: &'static str,
    pub precision: &'static str,
    pub algorithm: String,
    pub n: usize,
    pub bs: Option<usize>,
    pub nmin: Option<usize>,
    pub alpha: Option<usize>,
    pub workers: usize,
    pub reps: usize,
    pub seconds_median: Option<f64>,
    pub mul_count: Option<u64>,
    pub add_count: Option<u64>,
    /// Numeric error, or a token like `singular` when the run failed
    /// structurally (documented in the README).
    pub max_rel_error: Option<String>,
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

impl BenchRecord {
    pub fn to_csv_line(&self) -> String {
        let seconds = self.seconds_median.map(|s| format!("{s:.6}"));
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.precision,
            self.algorithm,
            self.n,
            opt(&self.bs),
            opt(&self.nmin),
            opt(&self.alpha),
            self.workers,
            self.reps,
            opt(&seconds),
            opt(&self.mul_count),
            opt(&self.add_count),
            opt(&self.max_rel_error),
        )
    }
}

/// Median of raw timings (mean of the middle pair for even counts).
pub fn median_seconds(mut samples: Vec<f64>) -> f64 {
    assert!(!samples.is_empty());
    samples.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        0.5 * (samples[mid - 1] + samples[mid])
    }
}
