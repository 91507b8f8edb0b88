//! The four matrix multiplication algorithms: Simple (textbook triple loop),
//! Block (cache tiling, same operation order as Simple), and the recursive
//! Strassen and Winograd schemes with a 7-way task-parallel top level.
//!
//! Determinism contract: for a fixed plan shape, every element of the result
//! is produced by the same scalar operation sequence regardless of the
//! worker count, so outputs are bitwise identical across worker counts.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{add_views, sub_views, DenseMatrix, MatrixView};
use crate::par::{run_sections, Executor};
use crate::scalar::Scalar;

/// Algorithm selector for a multiplication plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Simple,
    Block,
    Strassen,
    Winograd,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Simple => "simple",
            Algorithm::Block => "block",
            Algorithm::Strassen => "strassen",
            Algorithm::Winograd => "winograd",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(Algorithm::Simple),
            "block" => Ok(Algorithm::Block),
            "strassen" => Ok(Algorithm::Strassen),
            "winograd" => Ok(Algorithm::Winograd),
            other => Err(Error::InvalidPlan(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// A multiplication plan: the algorithm plus its tuning knobs.
///
/// `block_size` tiles the Block algorithm; `n_min` is the dimension at or
/// below which the recursive algorithms stop self-calling and hand the leaf
/// to the Block algorithm with `bs = n_min` (so Strassen(32) bottoms out in
/// Block(32)). `workers == 1` means strictly serial execution.
#[derive(Clone, Copy, Debug)]
pub struct MatmulPlan {
    pub algorithm: Algorithm,
    pub block_size: usize,
    pub n_min: usize,
    pub workers: usize,
}

impl Default for MatmulPlan {
    fn default() -> Self {
        Self { algorithm: Algorithm::Block, block_size: 32, n_min: 32, workers: 1 }
    }
}

impl MatmulPlan {
    pub fn new(algorithm: Algorithm) -> Self {
        Self { algorithm, ..Self::default() }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_size < 1 {
            return Err(Error::InvalidPlan("block_size must be at least 1".into()));
        }
        if self.n_min < 2 {
            return Err(Error::InvalidPlan("n_min must be at least 2".into()));
        }
        if self.workers < 1 {
            return Err(Error::InvalidPlan("workers must be at least 1".into()));
        }
        Ok(())
    }
}

fn check_inner_dims<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<()> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch {
            op: "matmul",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    Ok(())
}

/// Multiplies under the given plan, creating the plan's worker pool.
pub fn matmul<T: Scalar>(
    a: &DenseMatrix<T>,
    b: &DenseMatrix<T>,
    plan: &MatmulPlan,
) -> Result<DenseMatrix<T>> {
    plan.validate()?;
    check_inner_dims(a, b)?;
    let exec = Executor::new(plan.workers)?;
    Ok(exec.run(|| dispatch(a.view(), b.view(), plan)))
}

/// Like [`matmul`] but reuses whatever pool the caller is already running
/// in (used by the LU solver so the worker budget is shared, never
/// oversubscribed).
pub(crate) fn matmul_in_current_pool<T: Scalar>(
    a: &DenseMatrix<T>,
    b: &DenseMatrix<T>,
    plan: &MatmulPlan,
) -> Result<DenseMatrix<T>> {
    plan.validate()?;
    check_inner_dims(a, b)?;
    Ok(dispatch(a.view(), b.view(), plan))
}

/// Textbook triple loop: `c_ij = sum_k a_ik * b_kj`, k ascending. Serial;
/// this is the reference order every other algorithm is compared against.
pub fn matmul_simple<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    check_inner_dims(a, b)?;
    Ok(simple_product(a.view(), b.view(), false))
}

/// Block algorithm under the plan's `block_size` and workers.
pub fn matmul_block<T: Scalar>(
    a: &DenseMatrix<T>,
    b: &DenseMatrix<T>,
    plan: &MatmulPlan,
) -> Result<DenseMatrix<T>> {
    matmul(a, b, &MatmulPlan { algorithm: Algorithm::Block, ..*plan })
}

/// Strassen recursion under the plan's `n_min` and workers.
pub fn matmul_strassen<T: Scalar>(
    a: &DenseMatrix<T>,
    b: &DenseMatrix<T>,
    plan: &MatmulPlan,
) -> Result<DenseMatrix<T>> {
    matmul(a, b, &MatmulPlan { algorithm: Algorithm::Strassen, ..*plan })
}

/// Winograd recursion under the plan's `n_min` and workers.
pub fn matmul_winograd<T: Scalar>(
    a: &DenseMatrix<T>,
    b: &DenseMatrix<T>,
    plan: &MatmulPlan,
) -> Result<DenseMatrix<T>> {
    matmul(a, b, &MatmulPlan { algorithm: Algorithm::Winograd, ..*plan })
}

fn dispatch<T: Scalar>(a: MatrixView<'_, T>, b: MatrixView<'_, T>, plan: &MatmulPlan) -> DenseMatrix<T> {
    let parallel = plan.workers > 1;
    match plan.algorithm {
        Algorithm::Simple => simple_product(a, b, parallel),
        Algorithm::Block => block_product(a, b, plan.block_size, parallel),
        Algorithm::Strassen => recursive_product(a, b, Scheme::Strassen, plan, parallel),
        Algorithm::Winograd => recursive_product(a, b, Scheme::Winograd, plan, parallel),
    }
}

/// The Simple algorithm body; untiled. When parallel it distributes whole
/// output rows, which leaves every element's summation order untouched.
fn simple_product<T: Scalar>(
    a: MatrixView<'_, T>,
    b: MatrixView<'_, T>,
    parallel: bool,
) -> DenseMatrix<T> {
    let m = a.rows();
    let n = b.cols();
    let untiled = m.max(a.cols()).max(n);
    let mut c = DenseMatrix::zeros(m, n);
    let cols = c.cols();
    if parallel && m > 1 {
        c.data_mut().par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
            accumulate_rows(row, cols, i, a, b, untiled);
        });
    } else {
        accumulate_rows(c.data_mut(), cols, 0, a, b, untiled);
    }
    c
}

/// Accumulates `a * b` into the rows of `c` starting at `row_offset`,
/// walking k-blocks in ascending order. For every output element the
/// additions happen in ascending k order starting from zero, which is
/// exactly the Simple order -- Block and Simple are bitwise identical.
fn accumulate_rows<T: Scalar>(
    c_rows: &mut [T],
    c_cols: usize,
    row_offset: usize,
    a: MatrixView<'_, T>,
    b: MatrixView<'_, T>,
    bs: usize,
) {
    let m = c_rows.len() / c_cols;
    let l = a.cols();
    let n = b.cols();
    for kb in (0..l).step_by(bs) {
        let kmax = (kb + bs).min(l);
        for jb in (0..n).step_by(bs) {
            let jmax = (jb + bs).min(n);
            for i in 0..m {
                let arow = a.row(row_offset + i);
                let crow = &mut c_rows[i * c_cols..(i + 1) * c_cols];
                for k in kb..kmax {
                    let aik = arow[k];
                    let brow = b.row(k);
                    for j in jb..jmax {
                        crow[j] = crow[j] + aik * brow[j];
                    }
                }
            }
        }
    }
}

/// The Block algorithm body. When parallel, output row-bands are distributed
/// across the pool; each element is still produced by one task with the
/// serial operation order.
fn block_product<T: Scalar>(
    a: MatrixView<'_, T>,
    b: MatrixView<'_, T>,
    bs: usize,
    parallel: bool,
) -> DenseMatrix<T> {
    let m = a.rows();
    let n = b.cols();
    let mut c = DenseMatrix::zeros(m, n);
    if parallel && m > bs {
        let cols = c.cols();
        c.data_mut()
            .par_chunks_mut(bs * cols)
            .enumerate()
            .for_each(|(band, rows)| {
                accumulate_rows(rows, cols, band * bs, a, b, bs);
            });
    } else {
        let cols = c.cols();
        let mut offset = 0;
        let data = c.data_mut();
        while offset < m {
            let band_rows = bs.min(m - offset);
            accumulate_rows(
                &mut data[offset * cols..(offset + band_rows) * cols],
                cols,
                offset,
                a,
                b,
                bs,
            );
            offset += band_rows;
        }
    }
    c
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Scheme {
    Strassen,
    Winograd,
}

/// Entry for the recursive algorithms: handles the non-square embedding rule
/// before starting the square recursion.
fn recursive_product<T: Scalar>(
    a: MatrixView<'_, T>,
    b: MatrixView<'_, T>,
    scheme: Scheme,
    plan: &MatmulPlan,
    parallel: bool,
) -> DenseMatrix<T> {
    let (m, l, n) = (a.rows(), a.cols(), b.cols());
    if m == l && l == n {
        return square_recursive(a, b, scheme, plan.n_min, parallel);
    }
    // Non-square: embed into the bounding square only when no dimension is
    // thin; padding a thin operand would dwarf the real work.
    let min_dim = m.min(l).min(n);
    if min_dim > 2 * plan.n_min {
        let s = m.max(l).max(n);
        let ap = a.to_padded_matrix(s, s);
        let bp = b.to_padded_matrix(s, s);
        let cp = square_recursive(ap.view(), bp.view(), scheme, plan.n_min, parallel);
        cp.block(0, 0, m, n).to_owned_matrix()
    } else {
        block_product(a, b, plan.n_min, parallel)
    }
}

/// One level of the square recursion. Odd sizes are zero-padded to the next
/// even size at this level and cropped on return; leaves at or below `n_min`
/// run the Block algorithm with `bs = n_min`.
fn square_recursive<T: Scalar>(
    a: MatrixView<'_, T>,
    b: MatrixView<'_, T>,
    scheme: Scheme,
    n_min: usize,
    parallel: bool,
) -> DenseMatrix<T> {
    let n = a.rows();
    if n <= n_min {
        // `parallel` is only ever true here when the whole call fit in one
        // leaf; recursion below the top level passes false.
        return block_product(a, b, n_min, parallel);
    }
    if n % 2 == 1 {
        let ap = a.to_padded_matrix(n + 1, n + 1);
        let bp = b.to_padded_matrix(n + 1, n + 1);
        let cp = square_recursive(ap.view(), bp.view(), scheme, n_min, parallel);
        return cp.block(0, 0, n, n).to_owned_matrix();
    }
    let h = n / 2;
    let a11 = a.block(0, 0, h, h);
    let a12 = a.block(0, h, h, h);
    let a21 = a.block(h, 0, h, h);
    let a22 = a.block(h, h, h, h);
    let b11 = b.block(0, 0, h, h);
    let b12 = b.block(0, h, h, h);
    let b21 = b.block(h, 0, h, h);
    let b22 = b.block(h, h, h, h);

    enum Operand<'v, T: Scalar> {
        Borrowed(MatrixView<'v, T>),
        Owned(DenseMatrix<T>),
    }
    impl<'v, T: Scalar> Operand<'v, T> {
        fn view(&self) -> MatrixView<'_, T> {
            match self {
                Operand::Borrowed(v) => *v,
                Operand::Owned(m) => m.view(),
            }
        }
    }
    use Operand::{Borrowed, Owned};

    let own = |m: crate::error::Result<DenseMatrix<T>>| Owned(m.expect("conforming halves"));

    // The seven half-size products. Operand sums are formed once, up front;
    // only the products themselves run as parallel sections (recursion below
    // the top level stays serial inside its section).
    let pairs: Vec<(Operand<'_, T>, Operand<'_, T>)> = match scheme {
        Scheme::Strassen => vec![
            (own(add_views(a11, a22)), own(add_views(b11, b22))),
            (own(add_views(a21, a22)), Borrowed(b11)),
            (Borrowed(a11), own(sub_views(b12, b22))),
            (Borrowed(a22), own(sub_views(b21, b11))),
            (own(add_views(a11, a12)), Borrowed(b22)),
            (own(sub_views(a21, a11)), own(add_views(b11, b12))),
            (own(sub_views(a12, a22)), own(add_views(b21, b22))),
        ],
        Scheme::Winograd => {
            let s1 = add_views(a21, a22).expect("conforming halves");
            let s2 = sub_views(s1.view(), a11).expect("conforming halves");
            let s3 = sub_views(a11, a21).expect("conforming halves");
            let s4 = sub_views(a12, s2.view()).expect("conforming halves");
            let t1 = sub_views(b12, b11).expect("conforming halves");
            let t2 = sub_views(b22, t1.view()).expect("conforming halves");
            let t3 = sub_views(b22, b12).expect("conforming halves");
            let t4 = sub_views(t2.view(), b21).expect("conforming halves");
            vec![
                (Borrowed(a11), Borrowed(b11)),
                (Borrowed(a12), Borrowed(b21)),
                (Owned(s4), Borrowed(b22)),
                (Borrowed(a22), Owned(t4)),
                (Owned(s1), Owned(t1)),
                (Owned(s2), Owned(t2)),
                (Owned(s3), Owned(t3)),
            ]
        }
    };

    let products = run_sections(parallel, pairs, |(left, right)| {
        square_recursive(left.view(), right.view(), scheme, n_min, false)
    });

    let mut c = DenseMatrix::zeros(n, n);
    match scheme {
        Scheme::Strassen => {
            let [p1, p2, p3, p4, p5, p6, p7]: [DenseMatrix<T>; 7] =
                products.try_into().ok().expect("seven products");
            // C11 = P1 + P4 - P5 + P7, C12 = P3 + P5,
            // C21 = P2 + P4,           C22 = P1 - P2 + P3 + P6
            let combos: Vec<(usize, usize, Vec<(bool, &DenseMatrix<T>)>)> = vec![
                (0, 0, vec![(false, &p1), (false, &p4), (true, &p5), (false, &p7)]),
                (0, h, vec![(false, &p3), (false, &p5)]),
                (h, 0, vec![(false, &p2), (false, &p4)]),
                (h, h, vec![(false, &p1), (true, &p2), (false, &p3), (false, &p6)]),
            ];
            let quadrants = run_sections(parallel, combos, |(r0, c0, terms)| (r0, c0, signed_sum(&terms)));
            for (r0, c0, q) in quadrants {
                c.write_block(r0, c0, &q);
            }
        }
        Scheme::Winograd => {
            let [m1, m2, m3, m4, m5, m6, m7]: [DenseMatrix<T>; 7] =
                products.try_into().ok().expect("seven products");
            // Shared stems first, then one addition per remaining corner:
            // U2 = M1 + M6, U3 = U2 + M7; C11 = M1 + M2, C12 = (U2 + M5) + M3,
            // C21 = U3 - M4, C22 = U3 + M5.
            let u2 = add_views(m1.view(), m6.view()).expect("conforming halves");
            let u3 = add_views(u2.view(), m7.view()).expect("conforming halves");
            let combos: Vec<(usize, usize, Vec<(bool, &DenseMatrix<T>)>)> = vec![
                (0, 0, vec![(false, &m1), (false, &m2)]),
                (0, h, vec![(false, &u2), (false, &m5), (false, &m3)]),
                (h, 0, vec![(false, &u3), (true, &m4)]),
                (h, h, vec![(false, &u3), (false, &m5)]),
            ];
            let quadrants = run_sections(parallel, combos, |(r0, c0, terms)| (r0, c0, signed_sum(&terms)));
            for (r0, c0, q) in quadrants {
                c.write_block(r0, c0, &q);
            }
        }
    }
    c
}

/// Left-to-right signed sum of equally sized matrices.
fn signed_sum<T: Scalar>(terms: &[(bool, &DenseMatrix<T>)]) -> DenseMatrix<T> {
    let (first_neg, first) = terms[0];
    debug_assert!(!first_neg, "leading term is always positive here");
    let mut acc = (*first).clone();
    for &(negate, m) in &terms[1..] {
        debug_assert!(m.rows() == acc.rows() && m.cols() == acc.cols());
        for i in 0..acc.rows() {
            let src = m.row(i);
            for (dst, s) in acc.row_mut(i).iter_mut().zip(src) {
                *dst = if negate { *dst - *s } else { *dst + *s };
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::generate_random;
    use crate::scalar::DoubleDouble;

    type Dd = DoubleDouble;

    fn int_matrix(rows: Vec<Vec<i64>>) -> DenseMatrix<Dd> {
        DenseMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(Dd::from_i64).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn hand_checked_two_by_two() {
        let a = int_matrix(vec![vec![1, 2], vec![3, 4]]);
        let b = int_matrix(vec![vec![5, 6], vec![7, 8]]);
        let expected = int_matrix(vec![vec![19, 22], vec![43, 50]]);
        for algorithm in [Algorithm::Simple, Algorithm::Block, Algorithm::Strassen, Algorithm::Winograd] {
            let plan = MatmulPlan { algorithm, n_min: 2, ..MatmulPlan::default() };
            let c = matmul(&a, &b, &plan).unwrap();
            assert!(c.bitwise_eq(&expected), "{algorithm:?}");
        }
    }

    #[test]
    fn identity_returns_rhs_bitwise() {
        let b = generate_random::<Dd>(3, 5);
        let c = matmul_simple(&DenseMatrix::identity(3), &b).unwrap();
        assert!(c.bitwise_eq(&b));
    }

    #[test]
    fn block_is_bitwise_simple_for_any_block_size() {
        let a = generate_random::<Dd>(13, 100);
        let b = generate_random::<Dd>(13, 101);
        let reference = matmul_simple(&a, &b).unwrap();
        for bs in [1, 3, 5, 13, 64] {
            let plan = MatmulPlan { algorithm: Algorithm::Block, block_size: bs, ..Default::default() };
            let c = matmul(&a, &b, &plan).unwrap();
            assert!(c.bitwise_eq(&reference), "bs = {bs}");
        }
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let a = DenseMatrix::<Dd>::zeros(2, 3);
        let b = DenseMatrix::<Dd>::zeros(2, 3);
        assert!(matches!(
            matmul(&a, &b, &MatmulPlan::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_bad_plans() {
        let a = DenseMatrix::<Dd>::zeros(2, 2);
        for plan in [
            MatmulPlan { n_min: 1, ..Default::default() },
            MatmulPlan { block_size: 0, ..Default::default() },
            MatmulPlan { workers: 0, ..Default::default() },
        ] {
            assert!(matches!(matmul(&a, &a, &plan), Err(Error::InvalidPlan(_))), "{plan:?}");
        }
    }

    #[test]
    fn padding_is_transparent_for_odd_sizes() {
        let n = 9;
        let a = generate_random::<Dd>(n, 21);
        let b = generate_random::<Dd>(n, 22);
        let plan = MatmulPlan { algorithm: Algorithm::Winograd, n_min: 2, ..Default::default() };
        let direct = matmul(&a, &b, &plan).unwrap();

        let ap = a.view().to_padded_matrix(n + 1, n + 1);
        let bp = b.view().to_padded_matrix(n + 1, n + 1);
        let padded = matmul(&ap, &bp, &plan).unwrap();
        let cropped = padded.block(0, 0, n, n).to_owned_matrix();
        assert!(direct.bitwise_eq(&cropped));
    }

    #[test]
    fn non_square_agrees_with_simple() {
        for (m, l, n) in [(3usize, 7usize, 2usize), (8, 4, 6), (5, 2, 9)] {
            let a = DenseMatrix::<Dd>::from_fn(m, l, |i, j| Dd::from_i64((i + 2 * j) as i64 % 5 - 2));
            let b = DenseMatrix::<Dd>::from_fn(l, n, |i, j| Dd::from_i64((3 * i + j) as i64 % 7 - 3));
            let reference = matmul_simple(&a, &b).unwrap();
            for algorithm in [Algorithm::Block, Algorithm::Strassen, Algorithm::Winograd] {
                let plan = MatmulPlan { algorithm, n_min: 2, block_size: 3, ..Default::default() };
                let c = matmul(&a, &b, &plan).unwrap();
                // integer inputs, exact products: bitwise agreement expected
                assert!(c.bitwise_eq(&reference), "{algorithm:?} {m}x{l}x{n}");
            }
        }
    }

    #[test]
    fn non_square_embedding_path_agrees_with_simple() {
        // min dimension exceeds 2 * n_min, so the bounding-square path runs
        let (m, l, n) = (12usize, 9usize, 10usize);
        let a = DenseMatrix::<Dd>::from_fn(m, l, |i, j| Dd::from_i64((i * 3 + j) as i64 % 11 - 5));
        let b = DenseMatrix::<Dd>::from_fn(l, n, |i, j| Dd::from_i64((i + 5 * j) as i64 % 13 - 6));
        let reference = matmul_simple(&a, &b).unwrap();
        for algorithm in [Algorithm::Strassen, Algorithm::Winograd] {
            let plan = MatmulPlan { algorithm, n_min: 4, ..Default::default() };
            let c = matmul(&a, &b, &plan).unwrap();
            assert!(c.bitwise_eq(&reference), "{algorithm:?}");
        }
    }
}
