//! Dense small-scale linear algebra and the coordinate charts shared by the
//! rest of the crate: the zero-sum hyperplane, symmetric eigenvalues via
//! cyclic Jacobi rotations, and polynomial evaluation.

#[allow(unused_imports)]
#[allow(unused_imports)]
use alloc::vec; // vec! macro in no_std builds
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float; // float math in no_std builds

use crate::error::{Error, Result};

/// Absolute tolerance for the zero-sum constraint on `WPoint`.
pub const ZERO_SUM_TOL: f64 = 1e-12;

/// Maximum dimension accepted by the eigensolver.
pub const MAX_EIGEN_DIM: usize = 64;

/// A point of the hyperplane `W^{n-1} = { x in R^n : sum x_i = 0 }`.
#[derive(Debug, Clone, PartialEq)]
pub struct WPoint {
    entries: Vec<f64>,
}

impl WPoint {
    /// Validates the zero-sum constraint (absolute tolerance 1e-12).
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        let sum: f64 = entries.iter().sum();
        if sum.abs() > ZERO_SUM_TOL {
            return Err(Error::ZeroSumViolation { sum });
        }
        Ok(WPoint { entries })
    }

    pub fn zeros(n: usize) -> Self {
        WPoint { entries: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    /// Cyclic difference `x_i - x_{i+1}` with `x_{n+1} = x_1` (0-based `i`).
    pub fn cyclic_diff(&self, i: usize) -> f64 {
        let n = self.entries.len();
        self.entries[i] - self.entries[(i + 1) % n]
    }

    pub fn scaled(&self, s: f64) -> WPoint {
        WPoint { entries: self.entries.iter().map(|x| s * x).collect() }
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl core::ops::Index<usize> for WPoint {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

/// Orthogonal projection of an ambient vector onto the zero-sum hyperplane:
/// subtracts the mean from every entry. Linear and idempotent.
pub fn project_to_w(v: &[f64]) -> WPoint {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    WPoint { entries: v.iter().map(|x| x - mean).collect() }
}

/// Symmetric matrix with each off-diagonal entry stored once
/// (lower triangle, row-major), so symmetry holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymmetricMatrix { dim, data: vec![0.0; dim * (dim + 1) / 2] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        r * (r + 1) / 2 + c
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let v = self.get(i, j);
                s += v * v;
            }
        }
        s.sqrt()
    }
}

/// Dense square matrix, row-major. Small sizes only.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix { dim, data: vec![0.0; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        let n = self.dim;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aik * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(other.data.iter()) {
            *x -= y;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

/// Eigenvalues of a symmetric matrix, sorted nondecreasing.
///
/// Cyclic Jacobi rotations with an off-diagonal Frobenius threshold of
/// 1e-14 times the matrix norm and a cap of 100 sweeps. Deterministic,
/// no external dependency, adequate for dimensions up to 64.
pub fn sym_eigenvalues(m: &SymmetricMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    if n > MAX_EIGEN_DIM {
        return Err(Error::DimensionTooLarge { m: n });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = m.to_dense();
    let norm = m.frobenius_norm();
    let tol = 1e-14 * norm;

    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * a.get(i, j) * a.get(i, j);
            }
        }
        if off.sqrt() <= tol {
            let mut eig: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
            eig.sort_unstable_by(f64::total_cmp);
            return Ok(eig);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                // smaller-magnitude root keeps the rotation stable
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    Err(Error::Internal("Jacobi eigensolver did not converge in 100 sweeps"))
}

/// Orthonormal Darboux chart for `W^{n-1}` and `V^{2n-2} = W^{n-1} x_L W^{n-1}`.
///
/// The basis comes from Gram-Schmidt applied to `e_1 - e_2, e_2 - e_3, ...`
/// in that fixed order, so all derived numbers are reproducible. Using the
/// same basis for the position and momentum blocks makes the induced chart
/// on `V^{2n-2}` canonical: `B^T O B = J` holds entrywise.
#[derive(Debug, Clone)]
pub struct DarbouxChart {
    n: usize,
    basis: Vec<WPoint>,
}

/// Deterministic orthonormal basis of `W^{n-1}`; requires `n >= 3`.
pub fn build_w_basis(n: usize) -> Result<DarbouxChart> {
    if n < 3 {
        return Err(Error::DimensionTooSmall { n });
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for i in 0..(n - 1) {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v[i + 1] = -1.0;
        for b in &basis {
            let dot: f64 = v.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b.iter()) {
                *x -= dot * y;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
        basis.push(v);
    }
    Ok(DarbouxChart {
        n,
        basis: basis.into_iter().map(|v| WPoint { entries: v }).collect(),
    })
}

impl DarbouxChart {
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// Chart dimension `n - 1`.
    pub fn dim(&self) -> usize {
        self.n - 1
    }

    pub fn basis(&self) -> &[WPoint] {
        &self.basis
    }

    /// Chart coordinates of a zero-sum point.
    pub fn to_chart(&self, x: &WPoint) -> Vec<f64> {
        self.basis
            .iter()
            .map(|b| b.as_slice().iter().zip(x.as_slice()).map(|(u, v)| u * v).sum())
            .collect()
    }

    pub fn to_chart_slice(&self, x: &[f64]) -> Vec<f64> {
        self.basis
            .iter()
            .map(|b| b.as_slice().iter().zip(x.iter()).map(|(u, v)| u * v).sum())
            .collect()
    }

    /// Ambient zero-sum point with the given chart coordinates.
    pub fn from_chart(&self, u: &[f64]) -> WPoint {
        let mut x = vec![0.0; self.n];
        for (c, b) in u.iter().zip(self.basis.iter()) {
            for (xi, bi) in x.iter_mut().zip(b.as_slice()) {
                *xi += c * bi;
            }
        }
        WPoint { entries: x }
    }
}

/// Polynomial in one variable, coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Poly { coeffs: vec![c] }
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_deriv(&self, x: f64) -> (f64, f64) {
        poly_eval_deriv(&self.coeffs, x)
    }

    /// Multiplication by the variable (degree shift).
    pub fn mul_x(&self) -> Poly {
        let mut coeffs = vec![0.0];
        coeffs.extend_from_slice(&self.coeffs);
        Poly::new(coeffs)
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Poly) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), 0.0);
        }
        for (s, o) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *s += a * o;
        }
        self.trim();
    }

    pub fn scale(&mut self, a: f64) {
        for c in self.coeffs.iter_mut() {
            *c *= a;
        }
    }
}

/// Horner evaluation of a polynomial and its derivative.
/// Coefficients in ascending degree order.
pub fn poly_eval_deriv(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut value = 0.0;
    let mut deriv = 0.0;
    for &c in coeffs.iter().rev() {
        deriv = deriv * x + value;
        value = value * x + c;
    }
    (value, deriv)
}
