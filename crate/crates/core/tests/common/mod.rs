//! Shared oracles for the integration tests. Everything here is independent
//! of the library's own solvers: dense Gaussian elimination, inverse
//! iteration, and characteristic-polynomial evaluation.

use toda_toric_core::linalg::SymmetricMatrix;
use toda_toric_core::sample::SampleRng;

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
/// `A` is row-major `n x n`, consumed.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Eigenvector for an approximate eigenvalue via shifted inverse iteration.
pub fn inverse_iteration(m: &SymmetricMatrix, lambda: f64, rng: &mut SampleRng) -> Vec<f64> {
    let n = m.dim();
    let scale = m.frobenius_norm().max(1.0);
    let shift = lambda + 1e-8 * scale;
    let mut v: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    for _ in 0..4 {
        let a: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| m.get(i, j) - if i == j { shift } else { 0.0 })
                    .collect()
            })
            .collect();
        match solve_dense(a, v.clone()) {
            Some(w) => {
                let nrm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                v = w.iter().map(|x| x / nrm).collect();
            }
            None => break,
        }
    }
    v
}

/// Residual `|| M v - lambda v ||` of an eigenpair.
pub fn eigen_residual(m: &SymmetricMatrix, lambda: f64, v: &[f64]) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for i in 0..n {
        let mut r = -lambda * v[i];
        for j in 0..n {
            r += m.get(i, j) * v[j];
        }
        acc += r * r;
    }
    acc.sqrt()
}

/// `det(M - t I)` via LU elimination; the sign-change count of this value
/// along a grid brackets the spectrum independently of any eigensolver.
pub fn charpoly_det(m: &SymmetricMatrix, t: f64) -> f64 {
    let n = m.dim();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j) - if i == j { t } else { 0.0 }).collect())
        .collect();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= a[col][col];
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    det
}

/// Random symmetric matrix with entries of order one.
pub fn random_symmetric(rng: &mut SampleRng, m: usize) -> SymmetricMatrix {
    let mut out = SymmetricMatrix::zeros(m);
    for i in 0..m {
        for j in 0..=i {
            out.set(i, j, rng.range(-1.0, 1.0));
        }
    }
    out
}
