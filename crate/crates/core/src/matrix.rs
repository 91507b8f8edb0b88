//! Dense row-major matrices, sub-block views, test-matrix generators,
//! norms, the closed-form benchmark oracle, and text-format I/O.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::scalar::{splitmix64_unit, Scalar};

/// Row-major dense matrix. Dimensions are fixed at construction and always
/// positive; generator-built matrices contain only finite elements.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidPlan("rows must be non-empty and rectangular".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub(crate) fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub(crate) fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// View of the whole matrix.
    pub fn view(&self) -> MatrixView<'_, T> {
        MatrixView { data: &self.data, stride: self.cols, rows: self.rows, cols: self.cols }
    }

    /// View of the block starting at (r0, c0).
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> MatrixView<'_, T> {
        self.view().block(r0, c0, rows, cols)
    }

    /// Owned copy of a block.
    pub fn extract(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> DenseMatrix<T> {
        self.block(r0, c0, rows, cols).to_owned_matrix()
    }

    /// Copies `src` over the block starting at (r0, c0).
    pub fn write_block(&mut self, r0: usize, c0: usize, src: &DenseMatrix<T>) {
        assert!(r0 + src.rows <= self.rows && c0 + src.cols <= self.cols, "block out of bounds");
        for i in 0..src.rows {
            let dst = &mut self.data[(r0 + i) * self.cols + c0..];
            dst[..src.cols].copy_from_slice(src.row(i));
        }
    }

    /// Subtracts `src` elementwise from the block starting at (r0, c0).
    pub fn sub_block_assign(&mut self, r0: usize, c0: usize, src: &DenseMatrix<T>) {
        assert!(r0 + src.rows <= self.rows && c0 + src.cols <= self.cols, "block out of bounds");
        for i in 0..src.rows {
            let dst = &mut self.data[(r0 + i) * self.cols + c0..(r0 + i) * self.cols + c0 + src.cols];
            for (d, s) in dst.iter_mut().zip(src.row(i)) {
                *d = *d - *s;
            }
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> DenseMatrix<U> {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    /// Bit-for-bit equality, stricter than `==` (distinguishes signed zeros).
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.bit_eq(*b))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> T {
        let mut best = T::zero();
        for j in 0..self.cols {
            let mut sum = T::zero();
            for i in 0..self.rows {
                sum = sum + self.get(i, j).abs();
            }
            if sum.compare(best) == std::cmp::Ordering::Greater {
                best = sum;
            }
        }
        best
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        let mut best = T::zero();
        for i in 0..self.rows {
            let mut sum = T::zero();
            for &x in self.row(i) {
                sum = sum + x.abs();
            }
            if sum.compare(best) == std::cmp::Ordering::Greater {
                best = sum;
            }
        }
        best
    }
}

/// Borrowed rectangular window into a [`DenseMatrix`]. Views are read-only;
/// concurrent tasks may share them freely.
#[derive(Clone, Copy)]
pub struct MatrixView<'a, T> {
    data: &'a [T],
    stride: usize,
    rows: usize,
    cols: usize,
}

impl<'a, T: Scalar> MatrixView<'a, T> {
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.stride + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &'a [T] {
        &self.data[i * self.stride..i * self.stride + self.cols]
    }

    /// Sub-view; bounds must lie inside this view.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> MatrixView<'a, T> {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of bounds");
        MatrixView { data: &self.data[r0 * self.stride + c0..], stride: self.stride, rows, cols }
    }

    pub fn to_owned_matrix(&self) -> DenseMatrix<T> {
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
        }
        DenseMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Owned copy placed in the top-left corner of a zero matrix of the
    /// given (larger) size.
    pub fn to_padded_matrix(&self, rows: usize, cols: usize) -> DenseMatrix<T> {
        assert!(rows >= self.rows && cols >= self.cols);
        let mut m = DenseMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            m.data[i * cols..i * cols + self.cols].copy_from_slice(self.row(i));
        }
        m
    }
}

fn check_same_shape<T: Scalar>(
    op: &'static str,
    a: &MatrixView<'_, T>,
    b: &MatrixView<'_, T>,
) -> Result<()> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            op,
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    Ok(())
}

/// Elementwise sum.
pub fn mat_add<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    add_views(a.view(), b.view())
}

/// Elementwise difference.
pub fn mat_sub<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    sub_views(a.view(), b.view())
}

pub(crate) fn add_views<T: Scalar>(a: MatrixView<'_, T>, b: MatrixView<'_, T>) -> Result<DenseMatrix<T>> {
    check_same_shape("add", &a, &b)?;
    let mut out = DenseMatrix::zeros(a.rows(), a.cols());
    for i in 0..a.rows() {
        let (ra, rb) = (a.row(i), b.row(i));
        for (j, dst) in out.row_mut(i).iter_mut().enumerate() {
            *dst = ra[j] + rb[j];
        }
    }
    Ok(out)
}

pub(crate) fn sub_views<T: Scalar>(a: MatrixView<'_, T>, b: MatrixView<'_, T>) -> Result<DenseMatrix<T>> {
    check_same_shape("sub", &a, &b)?;
    let mut out = DenseMatrix::zeros(a.rows(), a.cols());
    for i in 0..a.rows() {
        let (ra, rb) = (a.row(i), b.row(i));
        for (j, dst) in out.row_mut(i).iter_mut().enumerate() {
            *dst = ra[j] - rb[j];
        }
    }
    Ok(out)
}

/// The benchmark input pair: `A[i][j] = sqrt(5) * (i + j - 1)` and
/// `B[i][j] = sqrt(3) * (n - i)` with 1-based indices. The constants come
/// from the scalar's own square root of the exact integers, so every
/// precision gets its correctly rounded value. Note that B does not depend
/// on j (all columns are identical by construction).
pub fn generate_bench_pair<T: Scalar>(n: usize) -> (DenseMatrix<T>, DenseMatrix<T>) {
    assert!(n >= 1);
    let sqrt5 = T::from_i64(5).try_sqrt().expect("5 is nonnegative");
    let sqrt3 = T::from_i64(3).try_sqrt().expect("3 is nonnegative");
    let a = DenseMatrix::from_fn(n, n, |i, j| sqrt5 * T::from_usize(i + j + 1));
    let b = DenseMatrix::from_fn(n, n, |i, _| sqrt3 * T::from_usize(n - (i + 1)));
    (a, b)
}

/// Seeded random matrix with entries uniform in [-1, 1], identical across
/// precisions (the underlying doubles embed exactly).
pub fn generate_random<T: Scalar>(n: usize, seed: u64) -> DenseMatrix<T> {
    assert!(n >= 1);
    let mut state = seed;
    DenseMatrix::from_fn(n, n, |_, _| T::from_f64(splitmix64_unit(&mut state)))
}

/// The Lotkin matrix: first row all ones, rest Hilbert-like `1/(i+j-1)`.
/// A standard ill-conditioned test input.
pub fn generate_lotkin<T: Scalar>(n: usize) -> DenseMatrix<T> {
    assert!(n >= 1);
    DenseMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            T::one()
        } else {
            T::one() / T::from_usize(i + j + 1)
        }
    })
}

/// Closed-form value of element (i, j) of the benchmark product
/// `sqrt(5)(i+k-1) * sqrt(3)(n-k)` summed over k: equals
/// `sqrt(15) * sum_{k=1..n} (i+k-1)(n-k)`, evaluated in exact integer
/// arithmetic and scaled by the target precision's own sqrt(15).
/// Independent of j.
pub fn exact_bench_product<T: Scalar>(n: usize, i: usize, _j: usize) -> T {
    assert!((1..=n).contains(&i));
    let mut sum: i128 = 0;
    for k in 1..=n {
        sum += ((i + k - 1) as i128) * ((n - k) as i128);
    }
    let sqrt15 = T::from_i64(15).try_sqrt().expect("15 is nonnegative");
    sqrt15 * T::from_i128(sum)
}

/// Maximum componentwise relative error of `x` against `reference`.
///
/// Elements with a zero reference fall back to normalization by
/// `norm_inf(reference)` so the metric stays finite; an entirely zero
/// reference against a nonzero `x` is an error.
pub fn max_componentwise_rel_error<T: Scalar>(
    x: &DenseMatrix<T>,
    reference: &DenseMatrix<T>,
) -> Result<T> {
    check_same_shape("relative error", &x.view(), &reference.view())?;
    max_rel_error_slices(x.data(), reference.data())
}

/// Slice form of the relative-error metric (vectors are 1-column matrices).
pub fn max_rel_error_slices<T: Scalar>(x: &[T], reference: &[T]) -> Result<T> {
    assert_eq!(x.len(), reference.len());
    let mut ref_inf = T::zero();
    for r in reference {
        let a = r.abs();
        if a.compare(ref_inf) == std::cmp::Ordering::Greater {
            ref_inf = a;
        }
    }
    if ref_inf.is_zero() {
        if x.iter().all(|v| v.is_zero()) {
            return Ok(T::zero());
        }
        return Err(Error::ZeroReference);
    }
    let mut worst = T::zero();
    for (&v, &r) in x.iter().zip(reference) {
        let denom = if r.is_zero() { ref_inf } else { r.abs() };
        let e = (v - r).abs() / denom;
        if e.compare(worst) == std::cmp::Ordering::Greater {
            worst = e;
        }
    }
    Ok(worst)
}

/// Infinity norm of a vector.
pub fn vec_norm_inf<T: Scalar>(v: &[T]) -> T {
    let mut best = T::zero();
    for x in v {
        let a = x.abs();
        if a.compare(best) == std::cmp::Ordering::Greater {
            best = a;
        }
    }
    best
}

/// Writes the text format: header `rows cols precision`, then one row per
/// line of exact decimal strings (loading always reproduces the matrix bit
/// for bit).
pub fn write_matrix<T: Scalar, W: Write>(w: &mut W, m: &DenseMatrix<T>) -> Result<()> {
    writeln!(w, "{} {} {}", m.rows(), m.cols(), T::precision_label())?;
    let mut line = String::new();
    for i in 0..m.rows() {
        line.clear();
        for (j, &x) in m.row(i).iter().enumerate() {
            if j > 0 {
                line.push(' ');
            }
            line.push_str(&x.to_decimal_string_exact());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Reads the text format written by [`write_matrix`]; the header's
/// precision label must match `T`.
pub fn read_matrix<T: Scalar, R: BufRead>(r: &mut R) -> Result<DenseMatrix<T>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedMatrixFile { line: 1, reason: "missing header".into() })??;
    let mut parts = header.split_whitespace();
    let bad_header =
        |reason: &str| Error::MalformedMatrixFile { line: 1, reason: reason.to_string() };
    let rows: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad_header("expected row count"))?;
    let cols: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad_header("expected column count"))?;
    let precision = parts.next().ok_or_else(|| bad_header("expected precision label"))?;
    if parts.next().is_some() {
        return Err(bad_header("trailing header fields"));
    }
    if precision != T::precision_label() {
        return Err(bad_header(&format!(
            "precision is {precision:?} but {:?} was requested",
            T::precision_label()
        )));
    }
    if rows == 0 || cols == 0 {
        return Err(bad_header("dimensions must be positive"));
    }

    let mut data = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let line_no = i + 2;
        let line = lines.next().ok_or_else(|| Error::MalformedMatrixFile {
            line: line_no,
            reason: "missing row".into(),
        })??;
        let mut count = 0;
        for token in line.split_whitespace() {
            let v = T::parse_decimal(token).map_err(|e| Error::MalformedMatrixFile {
                line: line_no,
                reason: e.to_string(),
            })?;
            data.push(v);
            count += 1;
        }
        if count != cols {
            return Err(Error::MalformedMatrixFile {
                line: line_no,
                reason: format!("expected {cols} elements, found {count}"),
            });
        }
    }
    Ok(DenseMatrix { rows, cols, data })
}
