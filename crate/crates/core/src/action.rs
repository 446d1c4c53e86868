//! Action variables and the maps that tie the lattice to toric geometry:
//! spectral weights, inverse spectral reconstruction through orthogonal
//! polynomials, gap action integrals, the sorted-difference map, and the
//! stiff-scaled spectral maps.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float; // float math in no_std builds

use crate::dynamics::{flaschka, DeformParam, FlaschkaPoint, LeafParam, PhasePoint};
use crate::error::{Error, Result};
use crate::linalg::{build_w_basis, Poly};
use crate::quad::QuadCache;
use crate::spectral::{
    band_structure, dirichlet_data, discriminant_log, toda_eigenvalues, DirichletData,
    GAP_CLOSED_TOL,
};

/// A sorted zero-sum spectrum, i.e. a point of the Weyl chamber `W_+^{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPoint {
    y: Vec<f64>,
}

impl SpectralPoint {
    /// Validates ordering and the zero-sum constraint.
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if y.len() < 3 {
            return Err(Error::DimensionTooSmall { n: y.len() });
        }
        if y.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::ParamOutOfRange { what: "spectrum (unsorted)", value: f64::NAN });
        }
        let scale = y.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let sum: f64 = y.iter().sum();
        if sum.abs() > 1e-12 * scale {
            return Err(Error::ZeroSumViolation { sum });
        }
        Ok(SpectralPoint { y })
    }

    /// Sorts and re-centers raw eigenvalues. The exact spectrum of a
    /// traceless matrix sums to zero, so subtracting the mean only removes
    /// round-off from the eigensolver.
    pub fn from_eigenvalues(mut y: Vec<f64>) -> Result<Self> {
        y.sort_unstable_by(f64::total_cmp);
        let mean: f64 = y.iter().sum::<f64>() / y.len() as f64;
        for v in y.iter_mut() {
            *v -= mean;
        }
        Self::new(y)
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }
}

/// Spectral weights `w_i = alpha^n e^{f_i} / prod_{j != i} |mu_i - mu_j|`,
/// carried in log form.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    log_w: Vec<f64>,
}

impl Weights {
    pub fn from_log(log_w: Vec<f64>) -> Self {
        Weights { log_w }
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_w
    }

    pub fn values(&self) -> Vec<f64> {
        self.log_w.iter().map(|&l| l.exp()).collect()
    }

    pub fn len(&self) -> usize {
        self.log_w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_w.is_empty()
    }
}

/// Weights of the discrete spectral measure attached to Dirichlet data.
pub fn weights_from(d: &DirichletData, alpha: &LeafParam) -> Result<Weights> {
    let m = d.len();
    let n = m + 1;
    let mu = d.mu();
    for w in mu.windows(2) {
        if w[1] - w[0] < 1e-10 {
            return Err(Error::IllConditioned { what: "mu gap", measure: w[1] - w[0] });
        }
    }
    let mut log_w = Vec::with_capacity(m);
    for i in 0..m {
        let mut l = n as f64 * alpha.alpha().ln() + d.f()[i];
        for j in 0..m {
            if j != i {
                l -= (mu[i] - mu[j]).abs().ln();
            }
        }
        log_w.push(l);
    }
    Ok(Weights { log_w })
}

/// The orthonormal polynomial basis `P_2, ..., P_n` of the discrete measure:
/// `deg P_k = k - 2` and every leading coefficient is negative. There is
/// exactly one such basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoBasis {
    polys: Vec<Poly>,
}

impl OrthoBasis {
    /// `P_k` for `k = 2..=n`.
    pub fn poly(&self, k: usize) -> &Poly {
        &self.polys[k - 2]
    }

    pub fn count(&self) -> usize {
        self.polys.len()
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }
}

fn discrete_dot(p: &Poly, q: &Poly, mu: &[f64], w: &[f64]) -> f64 {
    mu.iter().zip(w.iter()).map(|(&x, &wi)| p.eval(x) * q.eval(x) * wi).sum()
}

/// Gram-Schmidt on the monomial sequence under the weighted node product,
/// then sign-normalized to negative leading coefficients. Rejects inputs
/// whose Gram matrix is numerically rank-deficient (residual ratio below
/// 1e-6, i.e. condition number beyond ~1e12).
pub fn ortho_polynomials(weights: &Weights, mu: &[f64]) -> Result<OrthoBasis> {
    let m = mu.len();
    if weights.len() != m {
        return Err(Error::Internal("weights/nodes length mismatch"));
    }
    let w = weights.values();
    if w.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::IllConditioned { what: "weights", measure: f64::NAN });
    }
    let mut polys: Vec<Poly> = Vec::with_capacity(m);
    for k in 0..m {
        let mut mono = alloc::vec![0.0; k + 1];
        mono[k] = 1.0;
        let mut v = Poly::new(mono);
        let orig = discrete_dot(&v, &v, mu, &w);
        // two orthogonalization passes keep the basis orthonormal to round-off
        for _ in 0..2 {
            for p in &polys {
                let c = discrete_dot(&v, p, mu, &w);
                v.axpy(-c, p);
            }
        }
        let nrm2 = discrete_dot(&v, &v, mu, &w);
        if !(nrm2 > 1e-12 * orig) {
            return Err(Error::IllConditioned {
                what: "orthogonal basis",
                measure: (orig / nrm2).sqrt(),
            });
        }
        v.scale(1.0 / nrm2.sqrt());
        if v.leading() > 0.0 {
            v.scale(-1.0);
        }
        if v.degree() != k {
            return Err(Error::Internal("orthogonal polynomial lost its degree"));
        }
        polys.push(v);
    }
    Ok(OrthoBasis { polys })
}

/// Inverse spectral reconstruction: recovers the on-leaf Flaschka point
/// from its Dirichlet data via the three-term structure of the orthonormal
/// basis, closing with both Casimirs.
pub fn reconstruct_ba(d: &DirichletData, alpha: &LeafParam) -> Result<FlaschkaPoint> {
    let weights = weights_from(d, alpha)?;
    let basis = ortho_polynomials(&weights, d.mu())?;
    let m = d.len();
    let n = m + 1;
    let w = weights.values();
    let mu = d.mu();

    // a_1 = -1 / P_2 with P_2 constant and negative
    let p2 = basis.poly(2).coeffs()[0];
    let mut a = alloc::vec![0.0; n];
    a[0] = -1.0 / p2;
    let mut b = alloc::vec![0.0; n];
    for k in 2..=n {
        let pk = basis.poly(k);
        b[k - 1] = discrete_dot(&pk.mul_x(), pk, mu, &w);
    }
    for k in 2..=(n - 1) {
        let pk = basis.poly(k);
        let pk1 = basis.poly(k + 1);
        a[k - 1] = discrete_dot(&pk.mul_x(), pk1, mu, &w);
    }
    b[0] = -b[1..].iter().sum::<f64>();
    if a[..(n - 1)].iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::IllConditioned { what: "reconstructed couplings", measure: f64::NAN });
    }
    // a_n from the multiplicative Casimir, in log form
    let log_an =
        n as f64 * alpha.alpha().ln() - a[..(n - 1)].iter().map(|x| x.ln()).sum::<f64>();
    a[n - 1] = log_an.exp();
    FlaschkaPoint::new(b, a)
}

/// The Darboux chart `(f, mu)` of a phase point: Dirichlet data of its
/// Flaschka image.
pub fn phi_alpha_chart(x: &PhasePoint, alpha: &LeafParam) -> Result<DirichletData> {
    dirichlet_data(&flaschka(x, alpha)?)
}

/// Frobenius defect of the symplecticity identity for the `(f, mu)` chart,
/// measured through central finite differences in Darboux coordinates on
/// the reduced phase space: the pullback of `sum dmu_i ^ df_i` through the
/// chart must be the standard form.
pub fn chart_symplecticity_defect(
    x: &PhasePoint,
    alpha: &LeafParam,
    fd_step: f64,
) -> Result<f64> {
    let n = x.n();
    let m = n - 1;
    let chart = build_w_basis(n)?;
    let u0 = chart.to_chart(&x.q);
    let v0 = chart.to_chart(&x.p);

    let eval = |u: &[f64], v: &[f64]| -> Result<Vec<f64>> {
        let q = chart.from_chart(u);
        let p = chart.from_chart(v);
        let d = phi_alpha_chart(&PhasePoint::new(q, p)?, alpha)?;
        let mut z = d.f().to_vec();
        z.extend_from_slice(d.mu());
        Ok(z)
    };

    // Jacobian columns: u directions then v directions
    let mut jac: Vec<Vec<f64>> = Vec::with_capacity(2 * m);
    for block in 0..2 {
        for k in 0..m {
            let (mut up, mut um) = (u0.clone(), u0.clone());
            let (mut vp, mut vm) = (v0.clone(), v0.clone());
            if block == 0 {
                up[k] += fd_step;
                um[k] -= fd_step;
            } else {
                vp[k] += fd_step;
                vm[k] -= fd_step;
            }
            let zp = eval(&up, &vp)?;
            let zm = eval(&um, &vm)?;
            jac.push(
                zp.iter().zip(zm.iter()).map(|(a, b)| (a - b) / (2.0 * fd_step)).collect(),
            );
        }
    }

    // omega'(za, zb) for z = (f_1..f_m, mu_1..mu_m), omega' = sum dmu ^ df
    let pair_w = |za: &[f64], zb: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..m {
            s += za[m + i] * zb[i] - za[i] * zb[m + i];
        }
        s
    };
    // standard form on (u, v): omega(e_{u_i}, e_{v_j}) = delta_ij
    let mut defect2 = 0.0;
    for acol in 0..(2 * m) {
        for bcol in 0..(2 * m) {
            let got = pair_w(&jac[acol], &jac[bcol]);
            let want = if acol < m && bcol == acol + m {
                1.0
            } else if bcol < m && acol == bcol + m {
                -1.0
            } else {
                0.0
            };
            defect2 += (got - want) * (got - want);
        }
    }
    Ok(defect2.sqrt())
}

/// Nonnegative gap actions (or their `1/c` rescalings), in symplectic-area
/// units. A component vanishes exactly when the corresponding gap is closed.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionVector {
    values: Vec<f64>,
}

impl ActionVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Reusable quadrature state for the action integrals. One context amortizes
/// the Gauss-Legendre node tables across many evaluations.
#[derive(Debug, Default)]
pub struct ActionContext {
    quad: QuadCache,
}

impl ActionContext {
    pub fn new() -> Self {
        ActionContext { quad: QuadCache::new() }
    }
}

/// Relative tolerance for the node-doubling ladder of the gap integrals.
pub const ACTION_QUAD_TOL: f64 = 1e-9;

/// `acosh(|Delta| / 2)` from `log |Delta|`, stable across the whole range:
/// zero inside bands, accurate near band edges, and equal to `log |Delta|`
/// once the argument is astronomically large.
fn acosh_half_from_log(log_abs_delta: f64) -> f64 {
    let log_x = log_abs_delta - core::f64::consts::LN_2;
    if log_x > 40.0 {
        return log_abs_delta;
    }
    let x = log_x.exp();
    if x <= 1.0 {
        0.0
    } else {
        x.acosh()
    }
}

/// Gap action integrals `I_i = 2 int acosh(|Delta|/2) dmu` over the open
/// gaps. The substitution `mu = m + r sin(theta)` absorbs the square-root
/// vanishing at the band edges; node counts double until successive values
/// agree to 1e-9 relative. Closed gaps contribute exactly zero.
pub fn action_integrals_with(
    ctx: &mut ActionContext,
    y: &SpectralPoint,
    alpha: &LeafParam,
) -> Result<ActionVector> {
    let bands = band_structure(y.values(), alpha)?;
    let mut values = Vec::with_capacity(bands.gap_count());
    for i in 0..bands.gap_count() {
        let (lo, hi) = bands.gap(i);
        if hi - lo <= GAP_CLOSED_TOL {
            values.push(0.0);
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let rad = 0.5 * (hi - lo);
        let yv = y.values();
        let integrand = |theta: f64| {
            let mu = mid + rad * theta.sin();
            let (_, log_abs) = discriminant_log(yv, alpha, mu);
            acosh_half_from_log(log_abs) * rad * theta.cos()
        };
        let (v, _) = ctx.quad.integrate_doubling(
            -core::f64::consts::FRAC_PI_2,
            core::f64::consts::FRAC_PI_2,
            ACTION_QUAD_TOL,
            integrand,
        )?;
        values.push((2.0 * v).max(0.0));
    }
    Ok(ActionVector { values })
}

/// One-shot variant of [`action_integrals_with`].
pub fn action_integrals(y: &SpectralPoint, alpha: &LeafParam) -> Result<ActionVector> {
    action_integrals_with(&mut ActionContext::new(), y, alpha)
}

/// Sorted-difference map `rho(v) = n (v_(2) - v_(1), ..., v_(n) - v_(n-1))`,
/// invariant under coordinate permutations.
pub fn rho(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    sorted.windows(2).map(|w| n as f64 * (w[1] - w[0])).collect()
}

/// The stiff-scaled eigenvalue map: spectrum of the Lax matrix at
/// `b = p`, `a_i = c e^{c (q_i - q_{i+1} - 1) / 2}`. Entries are built in
/// the shifted form so nothing overflows while `q` stays near the simplex;
/// far outside, the saturation report fires.
pub fn f_c(x: &PhasePoint, c: &DeformParam) -> Result<SpectralPoint> {
    let n = x.n();
    let cv = c.c();
    let mut a = Vec::with_capacity(n);
    for i in 0..n {
        let e = cv * (x.q.cyclic_diff(i) - 1.0) / 2.0;
        if e + cv.ln() > crate::dynamics::EXP_SATURATION {
            return Err(Error::Overflow { what: "f_c entries", exponent: e });
        }
        a.push(cv * e.exp());
    }
    let f = FlaschkaPoint::new(x.p.as_slice().to_vec(), a)?;
    let spec = toda_eigenvalues(&f)?;
    SpectralPoint::from_eigenvalues(spec.values().to_vec())
}

/// The correction term of the rescaled action integrand:
/// `h_c(mu) = (2/c) log[(|g + 2 alpha^n| + sqrt(g (g + 4 alpha^n))) / 2]`
/// with `g(mu) = prod (mu - y_i)` and `alpha = c e^{-c/2}`. On the gaps it
/// is bounded below by `-n + 2n log(c)/c`.
pub fn h_c_correction(y_sorted: &[f64], c: &DeformParam, mu: f64) -> f64 {
    let n = y_sorted.len() as f64;
    let cv = c.c();
    let t = (n * (cv.ln() - cv / 2.0)).exp(); // alpha^n
    let mut g = 1.0;
    for &root in y_sorted {
        g *= mu - root;
    }
    let radicand = (g * (g + 4.0 * t)).max(0.0);
    let val = (((g + 2.0 * t).abs() + radicand.sqrt()) / 2.0).max(f64::MIN_POSITIVE);
    2.0 / cv * val.ln()
}

/// Rescaled actions `J_c = I_{c e^{-c/2}} / c`, evaluated through the
/// width-times-rate decomposition so no intermediate quantity overflows up
/// to `c = 200`: the bulk term `(l_{2i+1} - l_{2i}) (n - 2n log(c)/c)` is
/// exact and only the order-`1/c` correction is integrated numerically.
pub fn j_c_with(
    ctx: &mut ActionContext,
    y: &SpectralPoint,
    c: &DeformParam,
) -> Result<ActionVector> {
    let alpha = c.coupling();
    let bands = band_structure(y.values(), &alpha)?;
    let n = y.n() as f64;
    let cv = c.c();
    let rate = n - 2.0 * n * cv.ln() / cv;
    let mut values = Vec::with_capacity(bands.gap_count());
    for i in 0..bands.gap_count() {
        let (lo, hi) = bands.gap(i);
        if hi - lo <= GAP_CLOSED_TOL {
            values.push(0.0);
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let rad = 0.5 * (hi - lo);
        let yv = y.values();
        let integrand = |theta: f64| {
            let mu = mid + rad * theta.sin();
            h_c_correction(yv, c, mu) * rad * theta.cos()
        };
        let (corr, _) = ctx.quad.integrate_doubling(
            -core::f64::consts::FRAC_PI_2,
            core::f64::consts::FRAC_PI_2,
            ACTION_QUAD_TOL,
            integrand,
        )?;
        values.push(((hi - lo) * rate + corr).max(0.0));
    }
    Ok(ActionVector { values })
}

/// One-shot variant of [`j_c_with`].
pub fn j_c(y: &SpectralPoint, c: &DeformParam) -> Result<ActionVector> {
    j_c_with(&mut ActionContext::new(), y, c)
}

/// The computable moment image `J_c(F_c(x))`: the only numerical access to
/// the scaled symplectomorphism whose existence the action-angle theory
/// provides.
pub fn moment_image_with(
    ctx: &mut ActionContext,
    x: &PhasePoint,
    c: &DeformParam,
) -> Result<ActionVector> {
    let y = f_c(x, c)?;
    j_c_with(ctx, &y, c)
}

/// One-shot variant of [`moment_image_with`].
pub fn moment_image(x: &PhasePoint, c: &DeformParam) -> Result<ActionVector> {
    moment_image_with(&mut ActionContext::new(), x, c)
}
