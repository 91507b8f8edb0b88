//! Blocked pivot-free LU decomposition with a pluggable trailing-submatrix
//! multiplication, triangular solves, and solution-error reporting.
//!
//! No pivoting is performed anywhere: a zero pivot is reported as an error
//! naming the failing index, never worked around. Panel factorization is
//! serial; the panel border solves are data-parallel over disjoint columns
//! and rows; the trailing update runs the plan's multiplication algorithm
//! with the full worker budget.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matmul::{matmul_in_current_pool, MatmulPlan};
use crate::matrix::{max_rel_error_slices, vec_norm_inf, DenseMatrix};
use crate::par::Executor;
use crate::scalar::Scalar;

/// Tuning for the blocked factorization: the panel width is
/// `K = alpha * n_min`, and `update` chooses the multiplication used for the
/// trailing submatrix. The update always inherits this plan's full worker
/// budget (it dominates the cost).
#[derive(Clone, Copy, Debug)]
pub struct LuPlan {
    pub n_min: usize,
    pub alpha: usize,
    pub update: MatmulPlan,
    pub workers: usize,
}

impl Default for LuPlan {
    fn default() -> Self {
        Self { n_min: 32, alpha: 1, update: MatmulPlan::default(), workers: 1 }
    }
}

impl LuPlan {
    /// Panel width `K = alpha * n_min`.
    pub fn panel_width(&self) -> usize {
        self.alpha * self.n_min
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min < 1 {
            return Err(Error::InvalidPlan("n_min must be at least 1".into()));
        }
        if self.alpha < 1 {
            return Err(Error::InvalidPlan("alpha must be at least 1".into()));
        }
        if self.workers < 1 {
            return Err(Error::InvalidPlan("workers must be at least 1".into()));
        }
        self.update.validate()
    }
}

/// Packed factorization: unit-lower L below the diagonal, U on and above it.
#[derive(Clone, Debug)]
pub struct LuFactors<T> {
    lu: DenseMatrix<T>,
}

impl<T: Scalar> LuFactors<T> {
    pub fn n(&self) -> usize {
        self.lu.rows()
    }

    /// The packed L\U matrix.
    pub fn packed(&self) -> &DenseMatrix<T> {
        &self.lu
    }

    /// Explicit (L, U) pair; L gets its implicit unit diagonal.
    pub fn unpack(&self) -> (DenseMatrix<T>, DenseMatrix<T>) {
        let n = self.n();
        let mut l = DenseMatrix::identity(n);
        let mut u = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if j < i {
                    l.set(i, j, self.lu.get(i, j));
                } else {
                    u.set(i, j, self.lu.get(i, j));
                }
            }
        }
        (l, u)
    }

    /// Forward substitution (unit lower) then backward substitution (upper).
    pub fn solve_vec(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.n();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                op: "triangular solve",
                left_rows: n,
                left_cols: n,
                right_rows: b.len(),
                right_cols: 1,
            });
        }
        let mut x = b.to_vec();
        for i in 1..n {
            let row = self.lu.row(i);
            let mut acc = x[i];
            for t in 0..i {
                acc = acc - row[t] * x[t];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut acc = x[i];
            for t in (i + 1)..n {
                acc = acc - row[t] * x[t];
            }
            x[i] = acc / row[i];
        }
        Ok(x)
    }
}

/// One solved system: the computed solution plus its quality metrics.
#[derive(Clone, Debug)]
pub struct SolveReport<T> {
    pub x_hat: Vec<T>,
    /// Max componentwise relative error against the caller's true solution.
    pub max_rel_error: Option<T>,
    /// `norm_inf(A*x - b) / (norm_inf(A) * norm_inf(x))`.
    pub residual_norm: T,
    /// Wall time of factorization plus triangular solves.
    pub seconds: f64,
}

fn check_square<T: Scalar>(a: &DenseMatrix<T>) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch {
            op: "lu",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: a.rows(),
            right_cols: a.rows(),
        });
    }
    Ok(())
}

/// Doolittle elimination without pivoting on the square panel of width `k`
/// whose top-left corner sits at (p, p). Fixed elimination order; this exact
/// loop is both the unblocked factorization and the blocked panel step.
fn factor_panel<T: Scalar>(m: &mut DenseMatrix<T>, p: usize, k: usize) -> Result<()> {
    for kk in 0..k {
        let pivot = m.get(p + kk, p + kk);
        if pivot.is_zero() {
            return Err(Error::SingularStructure { index: p + kk });
        }
        for i in (kk + 1)..k {
            let l = m.get(p + i, p + kk) / pivot;
            m.set(p + i, p + kk, l);
            for j in (kk + 1)..k {
                let v = m.get(p + i, p + j) - l * m.get(p + kk, p + j);
                m.set(p + i, p + j, v);
            }
        }
    }
    Ok(())
}

/// Unblocked Doolittle factorization; the oracle the blocked variants are
/// compared against.
pub fn lu_unblocked<T: Scalar>(a: &DenseMatrix<T>) -> Result<LuFactors<T>> {
    check_square(a)?;
    let mut m = a.clone();
    let n = m.rows();
    factor_panel(&mut m, 0, n)?;
    Ok(LuFactors { lu: m })
}

/// Unblocked factorization with the per-step row updates data-parallel over
/// rows: the classic row-wise parallel baseline. Bitwise identical to
/// [`lu_unblocked`] for any worker count.
pub fn lu_row_parallel<T: Scalar>(a: &DenseMatrix<T>, workers: usize) -> Result<LuFactors<T>> {
    check_square(a)?;
    let exec = Executor::new(workers)?;
    let mut m = a.clone();
    let n = m.rows();
    let parallel = workers > 1;
    exec.run(|| -> Result<()> {
        let cols = n;
        for kk in 0..n {
            let pivot = m.get(kk, kk);
            if pivot.is_zero() {
                return Err(Error::SingularStructure { index: kk });
            }
            let (head, tail) = m.data_mut().split_at_mut((kk + 1) * cols);
            let pivot_row = &head[kk * cols..(kk + 1) * cols];
            let eliminate = |row: &mut [T]| {
                let l = row[kk] / pivot;
                row[kk] = l;
                for j in (kk + 1)..cols {
                    row[j] = row[j] - l * pivot_row[j];
                }
            };
            if parallel {
                tail.par_chunks_mut(cols).for_each(eliminate);
            } else {
                tail.chunks_mut(cols).for_each(eliminate);
            }
        }
        Ok(())
    })?;
    Ok(LuFactors { lu: m })
}

/// Transforms A12 into U12 in place: solves `L11 * U12 = A12` with the unit
/// lower panel, independently per column.
fn solve_unit_lower_right<T: Scalar>(
    m: &mut DenseMatrix<T>,
    p: usize,
    k: usize,
    rest: usize,
    parallel: bool,
) {
    let mut cols: Vec<Vec<T>> = (0..rest)
        .map(|c| (0..k).map(|r| m.get(p + r, p + k + c)).collect())
        .collect();
    {
        let mref = &*m;
        let solve_col = |col: &mut Vec<T>| {
            for r in 1..k {
                let mut acc = col[r];
                for t in 0..r {
                    acc = acc - mref.get(p + r, p + t) * col[t];
                }
                col[r] = acc;
            }
        };
        if parallel {
            cols.par_iter_mut().for_each(solve_col);
        } else {
            cols.iter_mut().for_each(solve_col);
        }
    }
    for (c, col) in cols.iter().enumerate() {
        for r in 1..k {
            m.set(p + r, p + k + c, col[r]);
        }
    }
}

/// Transforms A21 into L21 in place: solves `L21 * U11 = A21` against the
/// upper panel, independently per row.
fn solve_upper_below<T: Scalar>(
    m: &mut DenseMatrix<T>,
    p: usize,
    k: usize,
    _rest: usize,
    parallel: bool,
) {
    let cols = m.cols();
    let (head, tail) = m.data_mut().split_at_mut((p + k) * cols);
    let panel = &*head;
    let row_solve = |row: &mut [T]| {
        for c in 0..k {
            let mut acc = row[p + c];
            for t in 0..c {
                acc = acc - row[p + t] * panel[(p + t) * cols + (p + c)];
            }
            row[p + c] = acc / panel[(p + c) * cols + (p + c)];
        }
    };
    if parallel {
        tail.par_chunks_mut(cols).for_each(row_solve);
    } else {
        tail.chunks_mut(cols).for_each(row_solve);
    }
}

/// Blocked right-looking factorization: factor the K-wide panel, solve the
/// borders into U12 and L21, subtract `L21 * U12` from the trailing matrix
/// with the plan's multiplication, and repeat on the trailing matrix. The
/// final panel narrower than K is factored directly.
pub fn lu_blocked<T: Scalar>(a: &DenseMatrix<T>, plan: &LuPlan) -> Result<LuFactors<T>> {
    check_square(a)?;
    plan.validate()?;
    let exec = Executor::new(plan.workers)?;
    exec.run(|| lu_blocked_in_pool(a, plan))
}

fn lu_blocked_in_pool<T: Scalar>(a: &DenseMatrix<T>, plan: &LuPlan) -> Result<LuFactors<T>> {
    let n = a.rows();
    let mut m = a.clone();
    let kw = plan.panel_width();
    let parallel = plan.workers > 1;
    let update_plan = MatmulPlan { workers: plan.workers, ..plan.update };
    let mut p = 0;
    while p < n {
        let k = kw.min(n - p);
        factor_panel(&mut m, p, k)?;
        let rest = n - p - k;
        if rest > 0 {
            solve_unit_lower_right(&mut m, p, k, rest, parallel);
            solve_upper_below(&mut m, p, k, rest, parallel);
            let l21 = m.extract(p + k, p, rest, k);
            let u12 = m.extract(p, p + k, k, rest);
            let prod = matmul_in_current_pool(&l21, &u12, &update_plan)?;
            m.sub_block_assign(p + k, p + k, &prod);
        }
        p += k;
    }
    Ok(LuFactors { lu: m })
}

/// `b := A * x` computed with the Simple multiplication order in the working
/// precision.
pub fn build_rhs<T: Scalar>(a: &DenseMatrix<T>, x_true: &[T]) -> Result<Vec<T>> {
    if x_true.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            op: "matvec",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: x_true.len(),
            right_cols: 1,
        });
    }
    Ok((0..a.rows())
        .map(|i| {
            let row = a.row(i);
            let mut acc = T::zero();
            for (k, &xv) in x_true.iter().enumerate() {
                acc = acc + row[k] * xv;
            }
            acc
        })
        .collect())
}

/// Factors with [`lu_blocked`], runs the triangular solves, and reports the
/// residual plus (when the true solution is supplied) the maximum relative
/// error of the computed solution.
pub fn solve<T: Scalar>(
    a: &DenseMatrix<T>,
    b: &[T],
    plan: &LuPlan,
    x_true: Option<&[T]>,
) -> Result<SolveReport<T>> {
    check_square(a)?;
    let start = Instant::now();
    let factors = lu_blocked(a, plan)?;
    let x_hat = factors.solve_vec(b)?;
    let seconds = start.elapsed().as_secs_f64();

    let ax = build_rhs(a, &x_hat)?;
    let r: Vec<T> = ax.iter().zip(b).map(|(&lhs, &rhs)| lhs - rhs).collect();
    let denom = a.norm_inf() * vec_norm_inf(&x_hat);
    let residual_norm =
        if denom.is_zero() { vec_norm_inf(&r) } else { vec_norm_inf(&r) / denom };
    let max_rel_error = match x_true {
        Some(xt) => Some(max_rel_error_slices(&x_hat, xt)?),
        None => None,
    };
    Ok(SolveReport { x_hat, max_rel_error, residual_norm, seconds })
}

/// `norm_1(A) * norm_1(A^-1)` with the inverse columns obtained from
/// unit-vector solves in the working precision. Exactly singular input
/// surfaces as the factorization error. (Tests cross-check this against an
/// exact rational inversion for small n.)
pub fn condition_number_1<T: Scalar>(a: &DenseMatrix<T>) -> Result<T> {
    check_square(a)?;
    let n = a.rows();
    let factors = lu_unblocked(a)?;
    let mut best = T::zero();
    let mut e = vec![T::zero(); n];
    for j in 0..n {
        e[j] = T::one();
        let col = factors.solve_vec(&e)?;
        e[j] = T::zero();
        let mut sum = T::zero();
        for v in &col {
            sum = sum + v.abs();
        }
        if sum.compare(best) == std::cmp::Ordering::Greater {
            best = sum;
        }
    }
    Ok(a.norm_1() * best)
}
