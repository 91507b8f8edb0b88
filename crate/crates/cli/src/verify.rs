//! The `verify` subcommand: the built-in invariant suite. Each check prints
//! one PASS/FAIL line; any failure makes the process exit with code 2.

use mpmat::scalar::with_op_counts;
use mpmat::{
    exact_bench_product, generate_bench_pair, generate_random, lu_blocked, lu_row_parallel,
    lu_unblocked, matmul, matmul_simple, max_componentwise_rel_error, read_matrix, write_matrix,
    Algorithm, Counted, DenseMatrix, DoubleDouble, LuPlan, MatmulPlan, QuadDouble, Scalar,
};

type Dd = DoubleDouble;
type Qd = QuadDouble;

type CheckResult = Result<String, String>;

fn plan32(algorithm: Algorithm, workers: usize) -> MatmulPlan {
    MatmulPlan { algorithm, block_size: 32, n_min: 32, workers }
}

fn lu_plan32(update: Algorithm, alpha: usize, workers: usize) -> LuPlan {
    LuPlan { n_min: 32, alpha, update: plan32(update, 1), workers }
}

/// Componentwise error against the product envelope |A||B|.
fn scaled_err<T: Scalar>(c: &DenseMatrix<T>, r: &DenseMatrix<T>, a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> f64 {
    let scale = matmul_simple(&a.map(|x| x.abs()), &b.map(|x| x.abs())).expect("conforming");
    let mut worst: f64 = 0.0;
    for i in 0..c.rows() {
        for j in 0..c.cols() {
            let d = (c.get(i, j) - r.get(i, j)).abs().to_f64();
            let s = scale.get(i, j).to_f64();
            if s > 0.0 {
                worst = worst.max(d / s);
            } else if d != 0.0 {
                return f64::INFINITY;
            }
        }
    }
    worst
}

fn check_rounding_mode() -> CheckResult {
    mpmat::assert_round_to_nearest();
    Ok("round-to-nearest-even confirmed".into())
}

fn oracle_equivalence<T: Scalar>(sizes: &[usize]) -> CheckResult {
    let mut worst: f64 = 0.0;
    for &n in sizes {
        let a = generate_random::<T>(n, 7000 + n as u64);
        let b = generate_random::<T>(n, 8000 + n as u64);
        let reference = matmul_simple(&a, &b).map_err(|e| e.to_string())?;
        for algorithm in [Algorithm::Block, Algorithm::Strassen, Algorithm::Winograd] {
            let c = matmul(&a, &b, &plan32(algorithm, 1)).map_err(|e| e.to_string())?;
            let err = scaled_err(&c, &reference, &a, &b);
            let bound = 4.0 * n as f64 * T::unit_roundoff();
            if err > bound {
                return Err(format!(
                    "{} {} n={n}: err {err:e} > {bound:e}",
                    T::precision_label(),
                    algorithm.name()
                ));
            }
            worst = worst.max(err / bound);
        }
    }
    Ok(format!("{} worst err/bound {worst:.2e}", T::precision_label()))
}

fn check_bench_closed_form() -> CheckResult {
    let n = 64;
    let (a, b) = generate_bench_pair::<Dd>(n);
    let reference = DenseMatrix::from_fn(n, n, |i, j| exact_bench_product::<Dd>(n, i + 1, j + 1));
    let c = matmul_simple(&a, &b).map_err(|e| e.to_string())?;
    let err = max_componentwise_rel_error(&c, &reference).map_err(|e| e.to_string())?.to_f64();
    let bound = 4.0 * n as f64 * Dd::unit_roundoff();
    if err <= bound {
        Ok(format!("n={n} rel err {err:.2e} <= {bound:.2e}"))
    } else {
        Err(format!("n={n} rel err {err:e} > {bound:e}"))
    }
}

fn check_count_laws() -> CheckResult {
    let a = generate_random::<Counted<Dd>>(64, 1);
    let b = generate_random::<Counted<Dd>>(64, 2);
    let (_, block) = with_op_counts(|| matmul(&a, &b, &plan32(Algorithm::Block, 1)).unwrap());
    if block.mul != 64 * 64 * 64 {
        return Err(format!("block n=64 muls {} != 64^3", block.mul));
    }
    let (_, strassen) = with_op_counts(|| matmul(&a, &b, &plan32(Algorithm::Strassen, 1)).unwrap());
    if strassen.mul != 7 * 32 * 32 * 32 {
        return Err(format!("strassen n=64 muls {} != 7*32^3", strassen.mul));
    }

    let a = generate_random::<Counted<Dd>>(128, 3);
    let b = generate_random::<Counted<Dd>>(128, 4);
    let (_, s) = with_op_counts(|| matmul(&a, &b, &plan32(Algorithm::Strassen, 1)).unwrap());
    let (_, w) = with_op_counts(|| matmul(&a, &b, &plan32(Algorithm::Winograd, 1)).unwrap());
    if w.mul != s.mul {
        return Err(format!("n=128 muls differ: winograd {} strassen {}", w.mul, s.mul));
    }
    if w.add >= s.add {
        return Err(format!("n=128 adds: winograd {} not below strassen {}", w.add, s.add));
    }
    Ok(format!(
        "block 64^3={}, strassen 7*32^3={}, winograd adds {} < strassen adds {}",
        block.mul, strassen.mul, w.add, s.add
    ))
}

fn check_counting_transparency() -> CheckResult {
    let n = 32;
    let a = generate_random::<Dd>(n, 11);
    let b = generate_random::<Dd>(n, 12);
    let plan = plan32(Algorithm::Winograd, 1);
    let plain = matmul(&a, &b, &plan).map_err(|e| e.to_string())?;
    let (counted, _) = with_op_counts(|| matmul(&a.map(Counted), &b.map(Counted), &plan).unwrap());
    if counted.map(|x| x.0).bitwise_eq(&plain) {
        Ok("counted run bitwise identical to plain run".into())
    } else {
        Err("counted run diverged from plain run".into())
    }
}

fn check_matmul_determinism() -> CheckResult {
    let cases: [(Algorithm, usize, usize); 3] = [
        (Algorithm::Strassen, 256, 8),
        (Algorithm::Block, 128, 4),
        (Algorithm::Winograd, 97, 4),
    ];
    for (algorithm, n, workers) in cases {
        let a = generate_random::<Dd>(n, 9000 + n as u64);
        let b = generate_random::<Dd>(n, 9001 + n as u64);
        let serial = matmul(&a, &b, &plan32(algorithm, 1)).map_err(|e| e.to_string())?;
        let parallel = matmul(&a, &b, &plan32(algorithm, workers)).map_err(|e| e.to_string())?;
        if !parallel.bitwise_eq(&serial) {
            return Err(format!("{} n={n} workers={workers} diverged", algorithm.name()));
        }
    }
    Ok("strassen n=256 (8 workers), block n=128, winograd n=97 bitwise equal".into())
}

fn check_lu_determinism() -> CheckResult {
    let a = generate_random::<Dd>(96, 77);
    let serial = lu_blocked(&a, &lu_plan32(Algorithm::Winograd, 2, 1)).map_err(|e| e.to_string())?;
    let parallel = lu_blocked(&a, &lu_plan32(Algorithm::Winograd, 2, 4)).map_err(|e| e.to_string())?;
    if !parallel.packed().bitwise_eq(serial.packed()) {
        return Err("blocked lu diverged across worker counts".into());
    }
    let rw_serial = lu_row_parallel(&a, 1).map_err(|e| e.to_string())?;
    let rw_parallel = lu_row_parallel(&a, 4).map_err(|e| e.to_string())?;
    if !rw_parallel.packed().bitwise_eq(rw_serial.packed()) {
        return Err("row-wise lu diverged across worker counts".into());
    }
    Ok("winograd-update and row-wise factorizations bitwise equal across workers".into())
}

fn check_lu_fidelity() -> CheckResult {
    let n = 96;
    let a = generate_random::<Dd>(n, 4242);
    let reference = lu_unblocked(&a).map_err(|e| e.to_string())?;
    let (lr, ur) = reference.unpack();
    let neps = n as f64 * Dd::unit_roundoff();
    let mut worst: f64 = 0.0;
    for alpha in [1usize, 2, 3] {
        let f = lu_blocked(&a, &lu_plan32(Algorithm::Block, alpha, 1)).map_err(|e| e.to_string())?;
        let (l, u) = f.unpack();
        for (x, y) in [(&l, &lr), (&u, &ur)] {
            let mut diff = x.clone();
            for i in 0..n {
                for j in 0..n {
                    diff.set(i, j, x.get(i, j) - y.get(i, j));
                }
            }
            worst = worst.max(diff.norm_inf().to_f64() / y.norm_inf().to_f64());
        }
    }
    if worst <= 1e4 * neps {
        Ok(format!("blocked vs unblocked factor distance {:.0} n*eps", worst / neps))
    } else {
        Err(format!("factor distance {worst:e} above 1e4 n*eps"))
    }
}

fn check_matrix_io() -> CheckResult {
    let dd = generate_random::<Dd>(6, 5);
    let mut buf = Vec::new();
    write_matrix(&mut buf, &dd).map_err(|e| e.to_string())?;
    let back = read_matrix::<Dd, _>(&mut buf.as_slice()).map_err(|e| e.to_string())?;
    if !back.bitwise_eq(&dd) {
        return Err("dd matrix changed across save/load".into());
    }
    let qd = generate_random::<Qd>(4, 6).map(|x| x / Qd::from_f64(3.0));
    let mut buf = Vec::new();
    write_matrix(&mut buf, &qd).map_err(|e| e.to_string())?;
    let back = read_matrix::<Qd, _>(&mut buf.as_slice()).map_err(|e| e.to_string())?;
    if !back.bitwise_eq(&qd) {
        return Err("qd matrix changed across save/load".into());
    }
    Ok("dd and qd matrices round-trip bit for bit".into())
}

/// Runs every check; returns the number of failures.
pub fn run_verify() -> usize {
    let checks: Vec<(&str, Box<dyn FnOnce() -> CheckResult>)> = vec![
        ("rounding-mode", Box::new(check_rounding_mode)),
        ("oracle-equivalence-dd", Box::new(|| oracle_equivalence::<Dd>(&[7, 16, 33, 40, 64, 65]))),
        ("oracle-equivalence-qd", Box::new(|| oracle_equivalence::<Qd>(&[9, 33, 64]))),
        ("bench-closed-form", Box::new(check_bench_closed_form)),
        ("count-laws", Box::new(check_count_laws)),
        ("counting-transparency", Box::new(check_counting_transparency)),
        ("matmul-determinism", Box::new(check_matmul_determinism)),
        ("lu-determinism", Box::new(check_lu_determinism)),
        ("lu-fidelity", Box::new(check_lu_fidelity)),
        ("matrix-io", Box::new(check_matrix_io)),
    ];
    let mut failures = 0;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                println!("[FAIL] {name}: {detail}");
                failures += 1;
            }
        }
    }
    if failures == 0 {
        println!("verify: all checks passed");
    } else {
        println!("verify: {failures} check(s) failed");
    }
    failures
}
