//! Lax matrices and discrete Floquet theory for the periodic lattice:
//! fundamental solutions of the three-term difference equation, the
//! discriminant, the Dirichlet divisor, and the band/gap structure.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float; // float math in no_std builds

use crate::dynamics::FlaschkaPoint;
use crate::dynamics::LeafParam;
use crate::error::{Error, Result};
use crate::linalg::{poly_eval_deriv, sym_eigenvalues, DenseMatrix, SymmetricMatrix};

/// Two Dirichlet eigenvalues closer than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Gaps narrower than this count as closed.
pub const GAP_CLOSED_TOL: f64 = 1e-10;

/// Magnitude past which the Floquet recursion switches to rescaled storage.
const RESCALE_THRESHOLD: f64 = 1e150;

/// The Lax pair of the lattice: `L` periodic Jacobi (diagonal `b`,
/// off-diagonal `a_1..a_{n-1}`, corners `a_n`), `B` antisymmetric with the
/// same sparsity.
#[derive(Debug, Clone)]
pub struct LaxPair {
    pub l: SymmetricMatrix,
    pub b: DenseMatrix,
}

/// Builds the Lax pair of a Flaschka point.
pub fn lax_matrices(f: &FlaschkaPoint) -> LaxPair {
    let n = f.n();
    let mut l = SymmetricMatrix::zeros(n);
    let mut b = DenseMatrix::zeros(n);
    for i in 0..n {
        l.set(i, i, f.b()[i]);
    }
    for i in 0..(n - 1) {
        l.set(i, i + 1, f.a()[i]);
        b.set(i, i + 1, f.a()[i] / 2.0);
        b.set(i + 1, i, -f.a()[i] / 2.0);
    }
    l.set(0, n - 1, f.a()[n - 1]);
    b.set(0, n - 1, -f.a()[n - 1] / 2.0);
    b.set(n - 1, 0, f.a()[n - 1] / 2.0);
    LaxPair { l, b }
}

/// The `2n x 2n` periodic Jacobi matrix of the doubled period, whose
/// eigenvalues are the zeros of the squared-discriminant polynomial.
pub fn q_matrix(f: &FlaschkaPoint) -> SymmetricMatrix {
    let n = f.n();
    let m = 2 * n;
    let mut q = SymmetricMatrix::zeros(m);
    for i in 0..m {
        q.set(i, i, f.b()[i % n]);
    }
    for i in 0..(m - 1) {
        q.set(i, i + 1, f.a()[i % n]);
    }
    q.set(0, m - 1, f.a()[n - 1]);
    q
}

/// Conserved eigenvalues of `L`, sorted nondecreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct TodaSpectrum {
    values: Vec<f64>,
}

impl TodaSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }
}

/// The eigenvalue map: sorted spectrum of the Lax matrix.
pub fn toda_eigenvalues(f: &FlaschkaPoint) -> Result<TodaSpectrum> {
    let pair = lax_matrices(f);
    let values = sym_eigenvalues(&pair.l)?;
    let trace: f64 = f.b().iter().sum();
    let sum: f64 = values.iter().sum();
    let scale = pair.l.frobenius_norm().max(1.0);
    if (sum - trace).abs() > 1e-10 * scale {
        return Err(Error::Internal("eigenvalue sum drifted from the trace"));
    }
    Ok(TodaSpectrum { values })
}

/// Fundamental solutions `y_1(k, lambda)`, `y_2(k, lambda)` of the
/// three-term difference equation with periodically extended coefficients.
/// Values past 1e150 in magnitude are kept as (mantissa, log-scale) pairs.
#[derive(Debug, Clone)]
pub struct FundamentalSolutions {
    m1: Vec<f64>,
    m2: Vec<f64>,
    scale: Vec<f64>,
}

impl FundamentalSolutions {
    /// Plain value of `y_1(k)`; infinite if it exceeds the f64 range.
    pub fn y1(&self, k: usize) -> f64 {
        self.m1[k] * self.scale[k].exp()
    }

    pub fn y2(&self, k: usize) -> f64 {
        self.m2[k] * self.scale[k].exp()
    }

    /// `(sign, log |y_1(k)|)`.
    pub fn ln_abs_y1(&self, k: usize) -> (f64, f64) {
        (self.m1[k].signum(), self.m1[k].abs().ln() + self.scale[k])
    }

    pub fn ln_abs_y2(&self, k: usize) -> (f64, f64) {
        (self.m2[k].signum(), self.m2[k].abs().ln() + self.scale[k])
    }

    /// Wronskian `y_1(k) y_2(k+1) - y_1(k+1) y_2(k)` with scale composition.
    pub fn wronskian(&self, k: usize) -> f64 {
        let m = self.m1[k] * self.m2[k + 1] - self.m1[k + 1] * self.m2[k];
        m * (self.scale[k] + self.scale[k + 1]).exp()
    }
}

/// Runs the recursion up to index `k_max >= n + 1`.
///
/// Coefficients are indexed as in the difference equation: `b_k`, `a_k` for
/// `k >= 1` repeat with period `n`, and `a_0 = a_n`.
pub fn fundamental_solutions(
    f: &FlaschkaPoint,
    lambda: f64,
    k_max: usize,
) -> Result<FundamentalSolutions> {
    let n = f.n();
    if k_max < n + 1 {
        return Err(Error::ParamOutOfRange { what: "k_max", value: k_max as f64 });
    }
    let coeff_a = |k: usize| -> f64 {
        if k == 0 {
            f.a()[n - 1]
        } else {
            f.a()[(k - 1) % n]
        }
    };
    let coeff_b = |k: usize| -> f64 { f.b()[(k - 1) % n] };

    let mut m1 = Vec::with_capacity(k_max + 1);
    let mut m2 = Vec::with_capacity(k_max + 1);
    let mut scale = Vec::with_capacity(k_max + 1);
    m1.extend_from_slice(&[1.0, 0.0]);
    m2.extend_from_slice(&[0.0, 1.0]);
    scale.extend_from_slice(&[0.0, 0.0]);

    for k in 1..k_max {
        // rebase y(k-1) onto the scale of y(k)
        let rebase = (scale[k - 1] - scale[k]).exp();
        let c = (lambda - coeff_b(k)) / coeff_a(k);
        let d = coeff_a(k - 1) / coeff_a(k) * rebase;
        let mut v1 = c * m1[k] - d * m1[k - 1];
        let mut v2 = c * m2[k] - d * m2[k - 1];
        let mut s = scale[k];
        let mag = v1.abs().max(v2.abs());
        if mag > RESCALE_THRESHOLD {
            let shift = mag.ln();
            v1 *= (-shift).exp();
            v2 *= (-shift).exp();
            s += shift;
        }
        m1.push(v1);
        m2.push(v2);
        scale.push(s);
    }
    Ok(FundamentalSolutions { m1, m2, scale })
}

/// Dirichlet divisor: eigenvalues `mu_i` of the once-truncated Lax matrix
/// together with the conjugate logarithms `f_i = log |y_2(n+1, mu_i)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletData {
    mu: Vec<f64>,
    f: Vec<f64>,
}

impl DirichletData {
    /// Validates strict ordering of the `mu`.
    pub fn new(mu: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if mu.len() != f.len() {
            return Err(Error::Internal("mu/f length mismatch"));
        }
        for w in mu.windows(2) {
            if w[1] - w[0] <= DEGENERACY_TOL {
                return Err(Error::DegenerateSpectrum { gap: w[1] - w[0] });
            }
        }
        Ok(DirichletData { mu, f })
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }
}

/// Computes the Dirichlet data of a Flaschka point. Rejects points whose
/// truncated spectrum is degenerate within tolerance (measure zero for
/// generic data; callers resample).
pub fn dirichlet_data(f: &FlaschkaPoint) -> Result<DirichletData> {
    let n = f.n();
    let mut t = SymmetricMatrix::zeros(n - 1);
    for j in 0..(n - 1) {
        t.set(j, j, f.b()[j + 1]);
    }
    for j in 0..(n - 2) {
        t.set(j, j + 1, f.a()[j + 1]);
    }
    let mu = sym_eigenvalues(&t)?;
    for w in mu.windows(2) {
        if w[1] - w[0] <= DEGENERACY_TOL {
            return Err(Error::DegenerateSpectrum { gap: w[1] - w[0] });
        }
    }
    let mut fv = Vec::with_capacity(n - 1);
    for &m in &mu {
        let sols = fundamental_solutions(f, m, n + 1)?;
        let (_, ln_abs) = sols.ln_abs_y2(n + 1);
        if !ln_abs.is_finite() {
            return Err(Error::Internal("y_2(n+1) vanished at a Dirichlet eigenvalue"));
        }
        // |Delta(mu_i)| >= 2 up to round-off
        let delta = sols.y1(n) + sols.y2(n + 1);
        if delta.is_finite() && delta.abs() < 2.0 - 1e-9 {
            return Err(Error::Internal("discriminant bound violated at a Dirichlet eigenvalue"));
        }
        fv.push(ln_abs);
    }
    DirichletData::new(mu, fv)
}

/// Discriminant via the Floquet recursion, `y_1(n, l) + y_2(n+1, l)`.
pub fn discriminant_recursion(f: &FlaschkaPoint, lambda: f64) -> Result<f64> {
    let n = f.n();
    let sols = fundamental_solutions(f, lambda, n + 1)?;
    Ok(sols.y1(n) + sols.y2(n + 1))
}

/// Discriminant via the product form,
/// `alpha^{-n} prod (l - l_i) + 2`, as `(sign, log |Delta|)`.
///
/// The log form stays finite where the plain value would overflow, which is
/// what the action integrand needs at small coupling.
pub fn discriminant_log(lambda_plus: &[f64], alpha: &LeafParam, lambda: f64) -> (f64, f64) {
    let n = lambda_plus.len() as f64;
    let mut sign = 1.0;
    let mut log_abs = -n * alpha.alpha().ln();
    for &root in lambda_plus {
        let factor = lambda - root;
        if factor == 0.0 {
            return (1.0, core::f64::consts::LN_2);
        }
        sign *= factor.signum();
        log_abs += factor.abs().ln();
    }
    // Delta = sign * e^{log_abs} + 2
    if log_abs > 700.0 {
        (sign, log_abs + (2.0 * sign * (-log_abs).exp()).ln_1p())
    } else {
        let v = sign * log_abs.exp() + 2.0;
        (v.signum(), v.abs().ln())
    }
}

/// Plain-value product-form discriminant; may overflow to infinity.
pub fn discriminant_from_spectrum(lambda_plus: &[f64], alpha: &LeafParam, lambda: f64) -> f64 {
    let (sign, log_abs) = discriminant_log(lambda_plus, alpha, lambda);
    sign * log_abs.exp()
}

/// Sorted zeros of the squared-discriminant polynomial together with the
/// spectral gaps `[l_{2i}, l_{2i+1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    edges: Vec<f64>,
}

impl BandStructure {
    /// All `2n` edges, nondecreasing.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn gap_count(&self) -> usize {
        self.edges.len() / 2 - 1
    }

    /// The `i`-th gap (0-based), `[l_{2i}, l_{2i+1}]` in 1-based labels.
    pub fn gap(&self, i: usize) -> (f64, f64) {
        (self.edges[2 * i + 1], self.edges[2 * i + 2])
    }

    pub fn gap_width(&self, i: usize) -> f64 {
        let (lo, hi) = self.gap(i);
        hi - lo
    }
}

/// `true` when every gap is open beyond tolerance, i.e. the spectrum is a
/// regular value of the eigenvalue map.
pub fn is_regular(bands: &BandStructure) -> bool {
    (0..bands.gap_count()).all(|i| bands.gap_width(i) > GAP_CLOSED_TOL)
}

/// Evaluates `g(l) = prod (l - y_i)` and its derivative.
fn g_and_deriv(y: &[f64], lambda: f64) -> (f64, f64) {
    let mut val = 1.0;
    let mut der = 0.0;
    for &root in y {
        der = der * (lambda - root) + val;
        val *= lambda - root;
    }
    (val, der)
}

/// Bisection run to floating-point exhaustion: the returned root is exact
/// to one ulp, which keeps tangency detection working even when the whole
/// spectrum lives at denormal-adjacent scales.
fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..2100 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (flo < 0.0) == (fm < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Monic coefficients (ascending) of `prod (l - y_i)`.
fn expand_from_roots(y: &[f64]) -> Vec<f64> {
    let mut coeffs = alloc::vec![1.0];
    for &root in y {
        let mut next = alloc::vec![0.0; coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= root * c;
        }
        coeffs = next;
    }
    coeffs
}

fn derivative_coeffs(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

/// All real roots of a polynomial with only real roots, isolated by the
/// recursive derivative cascade: the critical points of each level bracket
/// the roots of the level above (Rolle), so no sign change can be missed.
/// Roots of even multiplicity at a critical point are reported once.
fn real_rooted_roots(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        return alloc::vec![-coeffs[0] / coeffs[1]];
    }
    let crits = real_rooted_roots(&derivative_coeffs(coeffs), lo, hi);
    let eval = |x: f64| poly_eval_deriv(coeffs, x).0;
    let mut stops = alloc::vec![lo];
    stops.extend_from_slice(&crits);
    stops.push(hi);
    let mut roots = Vec::new();
    for &c in &crits {
        if eval(c) == 0.0 {
            roots.push(c);
        }
    }
    for w in stops.windows(2) {
        let (l, r) = (w[0], w[1]);
        let (fl, fr) = (eval(l), eval(r));
        if fl == 0.0 || fr == 0.0 {
            continue;
        }
        if (fl < 0.0) != (fr < 0.0) {
            roots.push(bisect(&eval, l, r));
        }
    }
    roots.sort_unstable_by(f64::total_cmp);
    roots
}

/// Band edges from a sorted zero-sum spectrum and a coupling.
///
/// The zeros of `Delta - 2` are the spectrum itself; the zeros of
/// `Delta + 2` solve `g(l) = -4 alpha^n` and are bracketed exactly by the
/// critical points of `g`, so the search cannot miss a pair of nearly
/// coincident roots no matter how thin the bands are. Tangential minima
/// (`|Delta| - 2` below 1e-10 at a critical point) are recorded as
/// zero-width gaps. Finding fewer than `n` real roots means the pair
/// `(spectrum, alpha)` is not in the image of the eigenvalue map.
pub fn band_structure(lambda_plus: &[f64], alpha: &LeafParam) -> Result<BandStructure> {
    let n = lambda_plus.len();
    if n < 3 {
        return Err(Error::DimensionTooSmall { n });
    }
    let mut y = lambda_plus.to_vec();
    y.sort_unstable_by(f64::total_cmp);
    let scale = y.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let sum: f64 = y.iter().sum();
    if sum.abs() > 1e-8 * scale {
        return Err(Error::ZeroSumViolation { sum });
    }

    // t = 4 alpha^n, evaluated in log form
    let log_alpha_n = n as f64 * alpha.alpha().ln();
    let t = (log_alpha_n + core::f64::consts::LN_2 * 2.0).exp();
    let tangent_tol = 1e-10 * log_alpha_n.exp();

    // partition points: the critical points of g (roots of g' lie in the
    // root hull by Gauss-Lucas, so [y_1 - 1, y_n + 1] brackets every level)
    let g_coeffs = expand_from_roots(&y);
    let partition = real_rooted_roots(&derivative_coeffs(&g_coeffs), y[0] - 1.0, y[n - 1] + 1.0);

    let big_g = |x: f64| g_and_deriv(&y, x).0 + t;
    let margin = 1.0 + 2.0 * alpha.alpha();
    let lo_end = y[0] - margin;
    let hi_end = y[n - 1] + margin;

    // classify partition points: tangential double roots get recorded and
    // their G value treated as +0 for the interval scans
    let mut minus_roots: Vec<f64> = Vec::with_capacity(n);
    let mut stops: Vec<(f64, f64)> = Vec::with_capacity(n + 1);
    stops.push((lo_end, big_g(lo_end)));
    for &p in &partition {
        let gp = big_g(p);
        if gp.abs() <= tangent_tol {
            minus_roots.push(p);
            minus_roots.push(p);
            stops.push((p, 0.0));
        } else {
            stops.push((p, gp));
        }
    }
    stops.push((hi_end, big_g(hi_end)));

    for w in stops.windows(2) {
        let (l, gl) = w[0];
        let (r, gr) = w[1];
        if gl == 0.0 || gr == 0.0 {
            continue; // tangency already recorded
        }
        if (gl < 0.0) != (gr < 0.0) {
            minus_roots.push(bisect(&big_g, l, r));
        }
    }

    if minus_roots.len() != n {
        return Err(Error::RootCount { expected: n, found: minus_roots.len() });
    }

    let mut edges = y;
    edges.extend_from_slice(&minus_roots);
    edges.sort_unstable_by(f64::total_cmp);
    Ok(BandStructure { edges })
}

/// Leading coefficient oracle used in tests: the `(m-1)`-th divided
/// difference of samples of a degree-`(m-1)` polynomial is its leading
/// coefficient.
#[doc(hidden)]
pub fn divided_difference(xs: &[f64], fs: &[f64]) -> f64 {
    let mut table = fs.to_vec();
    let m = xs.len();
    for level in 1..m {
        for i in 0..(m - level) {
            table[i] = (table[i + 1] - table[i]) / (xs[i + level] - xs[i]);
        }
    }
    table[0]
}
