//! The experiment loops behind the `matmul` and `lu` subcommands.

use std::io::Write;
use std::time::Instant;

use anyhow::{Context, Result};

use mpmat::scalar::with_op_counts;
use mpmat::{
    build_rhs, exact_bench_product, generate_bench_pair, generate_lotkin, generate_random,
    lu_row_parallel, matmul, solve, Algorithm, Counted, DenseMatrix, DoubleDouble, LuPlan,
    MatmulPlan, QuadDouble, Scalar,
};

use crate::csv::{median_seconds, BenchRecord, CSV_HEADER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Prec {
    Dd,
    Qd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum MatrixKind {
    /// The structured benchmark pair sqrt(5)(i+j-1), sqrt(3)(n-i).
    Bench,
    /// Seeded uniform entries in [-1, 1].
    Random,
    /// The ill-conditioned Lotkin matrix (LU only).
    Lotkin,
}

/// One LU variant: a trailing-update algorithm, or the row-wise parallel
/// unblocked baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LuVariant {
    Update(Algorithm),
    Rowwise,
}

impl LuVariant {
    pub fn name(self) -> &'static str {
        match self {
            LuVariant::Update(a) => a.name(),
            LuVariant::Rowwise => "rowwise",
        }
    }
}

pub struct MatmulConfig {
    pub precision: Prec,
    pub sizes: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub nmin: usize,
    pub bs: usize,
    pub workers: Vec<usize>,
    pub seed: u64,
    pub reps: usize,
    pub matrix: MatrixKind,
    pub verify: bool,
    pub count_ops: bool,
}

pub struct LuConfig {
    pub precision: Prec,
    pub sizes: Vec<usize>,
    pub variants: Vec<LuVariant>,
    pub nmin: usize,
    pub alphas: Vec<usize>,
    pub workers: Vec<usize>,
    pub seed: u64,
    pub reps: usize,
    pub matrix: MatrixKind,
    pub count_ops: bool,
}

/// Runs the matmul experiment grid; returns false when a verify bound was
/// violated (the caller maps that to exit code 2).
pub fn run_matmul(cfg: &MatmulConfig, out: &mut dyn Write) -> Result<bool> {
    writeln!(out, "{CSV_HEADER}")?;
    match cfg.precision {
        Prec::Dd => matmul_rows::<DoubleDouble>(cfg, out),
        Prec::Qd => matmul_rows::<QuadDouble>(cfg, out),
    }
}

fn make_pair<T: Scalar>(cfg: &MatmulConfig, n: usize) -> (DenseMatrix<T>, DenseMatrix<T>) {
    match cfg.matrix {
        MatrixKind::Bench => generate_bench_pair::<T>(n),
        MatrixKind::Random => (generate_random::<T>(n, cfg.seed), generate_random::<T>(n, cfg.seed ^ 0x9E37_79B9_7F4A_7C15)),
        MatrixKind::Lotkin => unreachable!("rejected during validation"),
    }
}

fn matmul_rows<T: Scalar>(cfg: &MatmulConfig, out: &mut dyn Write) -> Result<bool> {
    let mut within_bounds = true;
    for &n in &cfg.sizes {
        let (a, b) = make_pair::<T>(cfg, n);
        let reference = if cfg.verify {
            Some(DenseMatrix::from_fn(n, n, |i, j| exact_bench_product::<T>(n, i + 1, j + 1)))
        } else {
            None
        };
        for &algorithm in &cfg.algorithms {
            for &workers in &cfg.workers {
                let plan =
                    MatmulPlan { algorithm, block_size: cfg.bs, n_min: cfg.nmin, workers };
                let mut record = BenchRecord {
                    experiment: "matmul",
                    precision: T::precision_label(),
                    algorithm: algorithm.name().to_string(),
                    n,
                    bs: matches!(algorithm, Algorithm::Block).then_some(cfg.bs),
                    nmin: matches!(algorithm, Algorithm::Strassen | Algorithm::Winograd)
                        .then_some(cfg.nmin),
                    alpha: None,
                    workers,
                    reps: cfg.reps,
                    ..Default::default()
                };

                let product = if cfg.count_ops {
                    let ac = a.map(Counted);
                    let bc = b.map(Counted);
                    let run = with_op_counts(|| matmul(&ac, &bc, &plan));
                    match run {
                        (Ok(c), counts) => {
                            record.mul_count = Some(counts.mul);
                            record.add_count = Some(counts.add);
                            Some(c.map(|x| x.0))
                        }
                        (Err(e), _) => {
                            eprintln!("matmul {algorithm:?} n={n}: {e}");
                            continue;
                        }
                    }
                } else {
                    let mut samples = Vec::with_capacity(cfg.reps);
                    let mut last = None;
                    let mut failed = false;
                    for _ in 0..cfg.reps {
                        let start = Instant::now();
                        match matmul(&a, &b, &plan) {
                            Ok(c) => {
                                samples.push(start.elapsed().as_secs_f64());
                                last = Some(c);
                            }
                            Err(e) => {
                                eprintln!("matmul {algorithm:?} n={n}: {e}");
                                failed = true;
                                break;
                            }
                        }
                    }
                    if failed {
                        continue;
                    }
                    record.seconds_median = Some(median_seconds(samples));
                    last
                };

                if let (Some(reference), Some(c)) = (&reference, &product) {
                    match mpmat::max_componentwise_rel_error(c, reference) {
                        Ok(err) => {
                            let err = err.to_f64();
                            record.max_rel_error = Some(format!("{err:e}"));
                            if err > 4.0 * n as f64 * T::unit_roundoff() {
                                within_bounds = false;
                            }
                        }
                        Err(e) => {
                            eprintln!("verify n={n}: {e}");
                            within_bounds = false;
                        }
                    }
                }
                writeln!(out, "{}", record.to_csv_line())?;
            }
        }
    }
    Ok(within_bounds)
}

pub fn run_lu(cfg: &LuConfig, out: &mut dyn Write) -> Result<bool> {
    writeln!(out, "{CSV_HEADER}")?;
    match cfg.precision {
        Prec::Dd => lu_rows::<DoubleDouble>(cfg, out),
        Prec::Qd => lu_rows::<QuadDouble>(cfg, out),
    }
}

fn lu_rows<T: Scalar>(cfg: &LuConfig, out: &mut dyn Write) -> Result<bool> {
    for &n in &cfg.sizes {
        let a: DenseMatrix<T> = match cfg.matrix {
            MatrixKind::Random => generate_random(n, cfg.seed),
            MatrixKind::Lotkin => generate_lotkin(n),
            MatrixKind::Bench => unreachable!("rejected during validation"),
        };
        let x_true: Vec<T> = (0..n).map(|i| T::from_usize(i)).collect();
        let b = build_rhs(&a, &x_true).context("building the right-hand side")?;
        let update_alphas: Vec<Option<usize>> = cfg.alphas.iter().map(|&v| Some(v)).collect();

        for &variant in &cfg.variants {
            let alphas: &[Option<usize>] = match variant {
                LuVariant::Update(_) => &update_alphas,
                LuVariant::Rowwise => &[None],
            };
            for &alpha in alphas {
                for &workers in &cfg.workers {
                    let record = lu_one_row::<T>(cfg, &a, &b, &x_true, variant, alpha, workers);
                    match record {
                        Ok(rec) => writeln!(out, "{}", rec.to_csv_line())?,
                        Err(e) => eprintln!("lu {} n={n}: {e}", variant.name()),
                    }
                }
            }
        }
    }
    Ok(true)
}

fn lu_one_row<T: Scalar>(
    cfg: &LuConfig,
    a: &DenseMatrix<T>,
    b: &[T],
    x_true: &[T],
    variant: LuVariant,
    alpha: Option<usize>,
    workers: usize,
) -> Result<BenchRecord> {
    let n = a.rows();
    let mut record = BenchRecord {
        experiment: "lu",
        precision: T::precision_label(),
        algorithm: variant.name().to_string(),
        n,
        bs: None,
        nmin: matches!(variant, LuVariant::Update(_)).then_some(cfg.nmin),
        alpha,
        workers,
        reps: cfg.reps,
        ..Default::default()
    };

    if cfg.count_ops {
        let ac = a.map(Counted);
        let bc: Vec<Counted<T>> = b.iter().map(|&v| Counted(v)).collect();
        let xc: Vec<Counted<T>> = x_true.iter().map(|&v| Counted(v)).collect();
        let (outcome, counts) =
            with_op_counts(|| run_lu_once(&ac, &bc, &xc, cfg.nmin, variant, alpha, workers));
        record.mul_count = Some(counts.mul);
        record.add_count = Some(counts.add);
        match outcome {
            Ok((_, err)) => record.max_rel_error = Some(format!("{:e}", err.to_f64())),
            Err(mpmat::Error::SingularStructure { .. }) => {
                record.max_rel_error = Some("singular".to_string());
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        let mut samples = Vec::with_capacity(cfg.reps);
        let mut last_err = None;
        for _ in 0..cfg.reps {
            match run_lu_once(a, b, x_true, cfg.nmin, variant, alpha, workers) {
                Ok((secs, err)) => {
                    samples.push(secs);
                    last_err = Some(err);
                }
                Err(mpmat::Error::SingularStructure { .. }) => {
                    record.max_rel_error = Some("singular".to_string());
                    return Ok(record);
                }
                Err(e) => return Err(e.into()),
            }
        }
        record.seconds_median = Some(median_seconds(samples));
        record.max_rel_error = last_err.map(|e| format!("{:e}", e.to_f64()));
    }
    Ok(record)
}

fn run_lu_once<T: Scalar>(
    a: &DenseMatrix<T>,
    b: &[T],
    x_true: &[T],
    nmin: usize,
    variant: LuVariant,
    alpha: Option<usize>,
    workers: usize,
) -> mpmat::Result<(f64, T)> {
    match variant {
        LuVariant::Update(update) => {
            let plan = LuPlan {
                n_min: nmin,
                alpha: alpha.expect("update variants carry alpha"),
                update: MatmulPlan { algorithm: update, block_size: nmin, n_min: nmin, workers: 1 },
                workers,
            };
            let report = solve(a, b, &plan, Some(x_true))?;
            Ok((report.seconds, report.max_rel_error.expect("true solution supplied")))
        }
        LuVariant::Rowwise => {
            let start = Instant::now();
            let factors = lu_row_parallel(a, workers)?;
            let x_hat = factors.solve_vec(b)?;
            let seconds = start.elapsed().as_secs_f64();
            let err = mpmat::matrix::max_rel_error_slices(&x_hat, x_true)?;
            Ok((seconds, err))
        }
    }
}
