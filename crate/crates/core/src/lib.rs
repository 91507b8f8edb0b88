//! Multiple-precision dense linear algebra.
//!
//! Double-double (~32 decimal digits) and quad-double (~64 decimal digits)
//! scalars built from error-free transformations, four dense matrix
//! multiplication algorithms (Simple, Block, Strassen, Winograd) with serial
//! and task-parallel execution, and a blocked pivot-free LU solver whose
//! trailing update is a pluggable multiplication.
//!
//! Everything numeric is generic over [`Scalar`]; plain `f64` implements it
//! too, which is convenient for cheap cross-checks. Two hard contracts hold
//! throughout:
//!
//! * **Determinism.** Results are bitwise identical for any worker count;
//!   parallelism never reorders scalar operations.
//! * **Transparent counting.** Wrapping scalars in [`Counted`] changes no
//!   bits, only tallies multiplications and additions.

pub mod error;
pub mod lu;
pub mod matmul;
pub mod matrix;
mod par;
pub mod scalar;

pub use error::{Error, Result};
pub use lu::{
    build_rhs, condition_number_1, lu_blocked, lu_row_parallel, lu_unblocked, solve, LuFactors,
    LuPlan, SolveReport,
};
pub use matmul::{
    matmul, matmul_block, matmul_simple, matmul_strassen, matmul_winograd, Algorithm, MatmulPlan,
};
pub use matrix::{
    exact_bench_product, generate_bench_pair, generate_lotkin, generate_random, mat_add, mat_sub,
    max_componentwise_rel_error, read_matrix, write_matrix, DenseMatrix, MatrixView,
};
pub use scalar::{
    assert_round_to_nearest, splitmix64, with_op_counts, Counted, DoubleDouble, OpCounts,
    QuadDouble, Scalar,
};

/// Double-double matrix.
pub type DdMatrix = DenseMatrix<DoubleDouble>;
/// Quad-double matrix.
pub type QdMatrix = DenseMatrix<QuadDouble>;
