//! Phase-space types, Hamiltonians (standard and stiff-deformed), the
//! Flaschka change of variables, Casimirs, and time integrators.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float; // float math in no_std builds

use crate::error::{Error, Result};
use crate::linalg::{build_w_basis, project_to_w, WPoint};

/// Exponent bound past which exponentials are reported as saturated.
pub const EXP_SATURATION: f64 = 700.0;

/// Coupling strength of the exponential potential; strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafParam {
    alpha: f64,
}

impl LeafParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::NonPositive { what: "alpha", value: alpha });
        }
        Ok(LeafParam { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Stiffness parameter of the deformed potential; `2 <= c <= 200`.
///
/// The lower bound is where the sublevel-set monotonicity starts to hold;
/// the upper bound keeps every intermediate quantity representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformParam {
    c: f64,
}

impl DeformParam {
    pub fn new(c: f64) -> Result<Self> {
        if !(2.0..=200.0).contains(&c) {
            return Err(Error::ParamOutOfRange { what: "c", value: c });
        }
        Ok(DeformParam { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// The coupling `alpha = c e^{-c/2}` used by the scaled spectral maps.
    pub fn coupling(&self) -> LeafParam {
        LeafParam { alpha: self.c * (-self.c / 2.0).exp() }
    }
}

/// A point of the reduced phase space `V^{2n-2}`: zero-sum positions and momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub q: WPoint,
    pub p: WPoint,
}

impl PhasePoint {
    pub fn new(q: WPoint, p: WPoint) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::Internal("position/momentum dimension mismatch"));
        }
        if q.len() < 3 {
            return Err(Error::DimensionTooSmall { n: q.len() });
        }
        Ok(PhasePoint { q, p })
    }

    /// Builds from raw slices, projecting both blocks onto the hyperplane.
    pub fn project(q: &[f64], p: &[f64]) -> Result<Self> {
        Self::new(project_to_w(q), project_to_w(p))
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }
}

/// Flaschka variables `(b, a)` with `a_i > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlaschkaPoint {
    b: Vec<f64>,
    a: Vec<f64>,
}

/// Tolerance on the leaf constraints `sum b = 0` (absolute) and
/// `prod a = alpha^n` (relative).
pub const LEAF_TOL: f64 = 1e-10;

impl FlaschkaPoint {
    pub fn new(b: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        if b.len() != a.len() {
            return Err(Error::Internal("b/a length mismatch"));
        }
        if b.len() < 3 {
            return Err(Error::DimensionTooSmall { n: b.len() });
        }
        for (i, &ai) in a.iter().enumerate() {
            if !(ai > 0.0) {
                let _ = i;
                return Err(Error::NonPositive { what: "a_i", value: ai });
            }
        }
        Ok(FlaschkaPoint { b, a })
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// First Casimir, `sum b_i`.
    pub fn casimir_sum(&self) -> f64 {
        self.b.iter().sum()
    }

    /// Log of the second Casimir, `log prod a_i`.
    pub fn casimir_log_prod(&self) -> f64 {
        self.a.iter().map(|&x| x.ln()).sum()
    }

    /// Checks both leaf constraints for the given coupling.
    pub fn check_on_leaf(&self, alpha: &LeafParam) -> Result<()> {
        let sum = self.casimir_sum();
        if sum.abs() > LEAF_TOL {
            return Err(Error::OffLeaf { casimir_error: sum.abs() });
        }
        let n = self.n() as f64;
        let log_err = self.casimir_log_prod() - n * alpha.alpha().ln();
        if log_err.abs() > LEAF_TOL {
            return Err(Error::OffLeaf { casimir_error: log_err.abs() });
        }
        Ok(())
    }

    /// The coupling whose leaf the point lies on, `alpha = (prod a)^{1/n}`.
    pub fn leaf_coupling(&self) -> LeafParam {
        LeafParam { alpha: (self.casimir_log_prod() / self.n() as f64).exp() }
    }
}

/// Energy `H = 1/2 sum p_i^2 + alpha^2 sum e^{q_i - q_{i+1}}` (cyclic).
pub fn hamiltonian_h(x: &PhasePoint, alpha: &LeafParam) -> Result<f64> {
    let n = x.n();
    let kinetic: f64 = x.p.as_slice().iter().map(|p| p * p).sum::<f64>() / 2.0;
    let la = alpha.alpha().ln();
    let mut potential = 0.0;
    for i in 0..n {
        let g = x.q.cyclic_diff(i);
        if g + 2.0 * la > EXP_SATURATION {
            return Err(Error::Overflow { what: "hamiltonian_h", exponent: g });
        }
        potential += alpha.alpha() * alpha.alpha() * g.exp();
    }
    Ok(kinetic + potential)
}

/// Energy in Flaschka variables, `1/2 sum b_i^2 + sum a_i^2`.
pub fn hamiltonian_hbar(f: &FlaschkaPoint) -> f64 {
    f.b.iter().map(|b| b * b).sum::<f64>() / 2.0 + f.a.iter().map(|a| a * a).sum::<f64>()
}

/// Stiff potential `U_c(q) = c^2 e^{-c} sum e^{c (q_i - q_{i+1})}`.
///
/// Each term is evaluated as `c^2 * exp(c (q_i - q_{i+1} - 1))`, so a point
/// on a facet contributes exactly `c^2`.
pub fn potential_uc(q: &WPoint, c: &DeformParam) -> Result<f64> {
    let cv = c.c();
    let mut acc = 0.0;
    for i in 0..q.len() {
        let e = cv * (q.cyclic_diff(i) - 1.0);
        if e + 2.0 * cv.ln() > EXP_SATURATION {
            return Err(Error::Overflow { what: "potential_uc", exponent: e });
        }
        acc += cv * cv * e.exp();
    }
    Ok(acc)
}

/// Deformed energy `H_c = 1/2 |p|^2 + U_c(q)`.
pub fn hamiltonian_hc(x: &PhasePoint, c: &DeformParam) -> Result<f64> {
    let kinetic: f64 = x.p.as_slice().iter().map(|p| p * p).sum::<f64>() / 2.0;
    Ok(kinetic + potential_uc(&x.q, c)?)
}

/// The Flaschka map restricted to `V^{2n-2}`:
/// `b = p`, `a_i = alpha e^{(q_i - q_{i+1})/2}` (cyclic).
pub fn flaschka(x: &PhasePoint, alpha: &LeafParam) -> Result<FlaschkaPoint> {
    let n = x.n();
    let la = alpha.alpha().ln();
    let mut a = Vec::with_capacity(n);
    for i in 0..n {
        let e = x.q.cyclic_diff(i) / 2.0;
        if e + la > EXP_SATURATION {
            return Err(Error::Overflow { what: "flaschka", exponent: 2.0 * e });
        }
        a.push(alpha.alpha() * e.exp());
    }
    FlaschkaPoint::new(x.p.as_slice().to_vec(), a)
}

/// Inverse of the restricted Flaschka map: recovers `q` from the log-ratios
/// `2 log(a_i / alpha) = q_i - q_{i+1}` by cumulative sums, then projects to
/// zero mean. Rejects input off the leaf, where the difference system would
/// be inconsistent.
pub fn flaschka_inverse(f: &FlaschkaPoint, alpha: &LeafParam) -> Result<PhasePoint> {
    f.check_on_leaf(alpha)?;
    let n = f.n();
    let la = alpha.alpha().ln();
    let mut q = vec![0.0; n];
    for i in 0..(n - 1) {
        let t = 2.0 * (f.a[i].ln() - la);
        q[i + 1] = q[i] - t;
    }
    PhasePoint::project(&q, &f.b)
}

/// The Toda vector field in Flaschka variables:
/// `db_i = a_{i-1}^2 - a_i^2`, `da_i = a_i (b_i - b_{i+1}) / 2`.
pub fn toda_vector_field(f: &FlaschkaPoint) -> (Vec<f64>, Vec<f64>) {
    let n = f.n();
    let mut db = Vec::with_capacity(n);
    let mut da = Vec::with_capacity(n);
    for i in 0..n {
        let prev = f.a[(i + n - 1) % n];
        db.push(prev * prev - f.a[i] * f.a[i]);
        da.push(f.a[i] / 2.0 * (f.b[i] - f.b[(i + 1) % n]));
    }
    (db, da)
}

fn rk4_stage(b: &[f64], a: &[f64], db: &[f64], da: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let nb = b.iter().zip(db).map(|(x, d)| x + h * d).collect();
    let na = a.iter().zip(da).map(|(x, d)| x + h * d).collect();
    (nb, na)
}

fn field_raw(b: &[f64], a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = b.len();
    let mut db = Vec::with_capacity(n);
    let mut da = Vec::with_capacity(n);
    for i in 0..n {
        let prev = a[(i + n - 1) % n];
        db.push(prev * prev - a[i] * a[i]);
        da.push(a[i] / 2.0 * (b[i] - b[(i + 1) % n]));
    }
    (db, da)
}

fn all_positive(a: &[f64]) -> bool {
    a.iter().all(|&x| x > 0.0)
}

/// Minimum step size before the positivity-preserving halving gives up.
pub const MIN_RK4_STEP: f64 = 1e-12;

/// One RK4 step of size `dt`; recursively halves when positivity of `a`
/// fails in any stage or in the result.
fn rk4_step(b: &mut Vec<f64>, a: &mut Vec<f64>, dt: f64, t: f64) -> Result<()> {
    if dt < MIN_RK4_STEP {
        return Err(Error::StiffnessAbort { time: t, dt });
    }
    let (k1b, k1a) = field_raw(b, a);
    let (s2b, s2a) = rk4_stage(b, a, &k1b, &k1a, dt / 2.0);
    if !all_positive(&s2a) {
        rk4_step(b, a, dt / 2.0, t)?;
        return rk4_step(b, a, dt / 2.0, t + dt / 2.0);
    }
    let (k2b, k2a) = field_raw(&s2b, &s2a);
    let (s3b, s3a) = rk4_stage(b, a, &k2b, &k2a, dt / 2.0);
    if !all_positive(&s3a) {
        rk4_step(b, a, dt / 2.0, t)?;
        return rk4_step(b, a, dt / 2.0, t + dt / 2.0);
    }
    let (k3b, k3a) = field_raw(&s3b, &s3a);
    let (s4b, s4a) = rk4_stage(b, a, &k3b, &k3a, dt);
    if !all_positive(&s4a) {
        rk4_step(b, a, dt / 2.0, t)?;
        return rk4_step(b, a, dt / 2.0, t + dt / 2.0);
    }
    let (k4b, k4a) = field_raw(&s4b, &s4a);
    let nb: Vec<f64> = (0..b.len())
        .map(|i| b[i] + dt / 6.0 * (k1b[i] + 2.0 * k2b[i] + 2.0 * k3b[i] + k4b[i]))
        .collect();
    let na: Vec<f64> = (0..a.len())
        .map(|i| a[i] + dt / 6.0 * (k1a[i] + 2.0 * k2a[i] + 2.0 * k3a[i] + k4a[i]))
        .collect();
    if !all_positive(&na) {
        rk4_step(b, a, dt / 2.0, t)?;
        return rk4_step(b, a, dt / 2.0, t + dt / 2.0);
    }
    *b = nb;
    *a = na;
    Ok(())
}

/// Fixed-step RK4 on the Flaschka equations; returns the trajectory at
/// `t = 0, dt, 2 dt, ...` covering `[0, t_end]`.
pub fn integrate_flaschka(
    f0: &FlaschkaPoint,
    t_end: f64,
    dt: f64,
) -> Result<Vec<FlaschkaPoint>> {
    if !(dt > 0.0) {
        return Err(Error::ParamOutOfRange { what: "dt", value: dt });
    }
    if t_end < 0.0 {
        return Err(Error::ParamOutOfRange { what: "t_end", value: t_end });
    }
    let steps = (t_end / dt).round() as usize;
    let mut b = f0.b.clone();
    let mut a = f0.a.clone();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(f0.clone());
    for k in 0..steps {
        rk4_step(&mut b, &mut a, dt, k as f64 * dt)?;
        out.push(FlaschkaPoint::new(b.clone(), a.clone())?);
    }
    Ok(out)
}

/// Gradient of `U_c`; zero-sum by the telescoping structure.
pub(crate) fn grad_uc(q: &[f64], c: &DeformParam) -> Result<Vec<f64>> {
    let n = q.len();
    let cv = c.c();
    let mut e = Vec::with_capacity(n);
    for i in 0..n {
        let g = q[i] - q[(i + 1) % n];
        let ex = cv * (g - 1.0);
        if ex + 3.0 * cv.ln() > EXP_SATURATION {
            return Err(Error::Overflow { what: "grad_uc", exponent: ex });
        }
        e.push(ex.exp());
    }
    let c3 = cv * cv * cv;
    Ok((0..n).map(|i| c3 * (e[i] - e[(i + n - 1) % n])).collect())
}

/// Stormer-Verlet leapfrog for the separable `H_c`; observer is called at
/// step 0 and every `every` steps thereafter with `(step, q, p)`.
pub fn verlet_observe<F: FnMut(usize, &[f64], &[f64])>(
    x0: &PhasePoint,
    c: &DeformParam,
    t_end: f64,
    dt: f64,
    every: usize,
    mut observe: F,
) -> Result<PhasePoint> {
    if !(dt > 0.0) {
        return Err(Error::ParamOutOfRange { what: "dt", value: dt });
    }
    let steps = (t_end / dt).round() as usize;
    let mut q = x0.q.as_slice().to_vec();
    let mut p = x0.p.as_slice().to_vec();
    observe(0, &q, &p);
    for k in 0..steps {
        let f = grad_uc(&q, c)?;
        for i in 0..p.len() {
            p[i] -= dt / 2.0 * f[i];
        }
        for i in 0..q.len() {
            q[i] += dt * p[i];
        }
        let f = grad_uc(&q, c)?;
        for i in 0..p.len() {
            p[i] -= dt / 2.0 * f[i];
        }
        if every > 0 && (k + 1) % every == 0 {
            observe(k + 1, &q, &p);
        }
    }
    PhasePoint::project(&q, &p)
}

/// Stormer-Verlet trajectory of `H_c` sampled at every step.
pub fn integrate_qp_verlet(
    x0: &PhasePoint,
    c: &DeformParam,
    t_end: f64,
    dt: f64,
) -> Result<Vec<PhasePoint>> {
    let steps = (t_end / dt).round() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    verlet_observe(x0, c, t_end, dt, 1, |_, q, p| {
        out.push(PhasePoint::project(q, p).expect("projection cannot fail"));
    })?;
    Ok(out)
}

/// Random phase point with both blocks drawn from projected normals of the
/// given spread. Deterministic under the provided source.
pub fn sample_phase_point(rng: &mut crate::sample::SampleRng, n: usize, spread: f64) -> PhasePoint {
    let q: Vec<f64> = rng.normals(n).iter().map(|x| spread * x).collect();
    let p: Vec<f64> = rng.normals(n).iter().map(|x| spread * x).collect();
    PhasePoint::project(&q, &p).expect("projection cannot fail for n >= 3")
}

/// Random on-leaf Flaschka point for the given coupling.
pub fn sample_on_leaf(
    rng: &mut crate::sample::SampleRng,
    n: usize,
    alpha: &LeafParam,
    spread: f64,
) -> FlaschkaPoint {
    let x = sample_phase_point(rng, n, spread);
    flaschka(&x, alpha).expect("bounded spread cannot overflow")
}

/// Index of a coordinate function on the Flaschka side: `0..n` are the `b`,
/// `n..2n` are the `a`.
fn coordinate_fn(m: usize, n: usize, alpha: f64, q: &[f64], p: &[f64]) -> f64 {
    if m < n {
        p[m]
    } else {
        let i = m - n;
        let g = q[i] - q[(i + 1) % n];
        alpha * (g / 2.0).exp()
    }
}

/// Finite-difference step for the bracket checks; balances truncation
/// against round-off for order-one data.
pub const BRACKET_FD_STEP: f64 = 1e-6;

/// Canonical Poisson bracket of two pulled-back coordinate functions,
/// computed by central differences in Darboux coordinates on `V^{2n-2}`.
/// Indices as in [`coordinate_fn`]: `0..n` for `b`, `n..2n` for `a`.
pub fn poisson_bracket_pair(f: &FlaschkaPoint, m1: usize, m2: usize) -> Result<f64> {
    let n = f.n();
    let alpha = f.leaf_coupling();
    let x0 = flaschka_inverse(f, &alpha)?;
    let chart = build_w_basis(n)?;
    let u0 = chart.to_chart(&x0.q);
    let v0 = chart.to_chart(&x0.p);
    let dim = n - 1;
    let h = BRACKET_FD_STEP;

    let eval = |m: usize, u: &[f64], v: &[f64]| {
        let q = chart.from_chart(u);
        let p = chart.from_chart(v);
        coordinate_fn(m, n, alpha.alpha(), q.as_slice(), p.as_slice())
    };
    // Jacobians with respect to (u, v)
    let jac = |m: usize| -> (Vec<f64>, Vec<f64>) {
        let mut ju = Vec::with_capacity(dim);
        let mut jv = Vec::with_capacity(dim);
        for k in 0..dim {
            let mut up = u0.clone();
            let mut um = u0.clone();
            up[k] += h;
            um[k] -= h;
            ju.push((eval(m, &up, &v0) - eval(m, &um, &v0)) / (2.0 * h));
            let mut vp = v0.clone();
            let mut vm = v0.clone();
            vp[k] += h;
            vm[k] -= h;
            jv.push((eval(m, &u0, &vp) - eval(m, &u0, &vm)) / (2.0 * h));
        }
        (ju, jv)
    };
    let (j1u, j1v) = jac(m1);
    let (j2u, j2v) = jac(m2);
    let mut bracket = 0.0;
    for k in 0..dim {
        bracket += j1v[k] * j2u[k] - j1u[k] * j2v[k];
    }
    Ok(bracket)
}

/// Expected bracket of coordinate functions under the Flaschka bivector.
fn expected_bracket(f: &FlaschkaPoint, m1: usize, m2: usize) -> f64 {
    let n = f.n();
    let (bi, aj, sign) = match (m1 < n, m2 < n) {
        (true, true) | (false, false) => return 0.0,
        (true, false) => (m1, m2 - n, 1.0),
        (false, true) => (m2, m1 - n, -1.0),
    };
    if aj == bi {
        sign * f.a[aj] / 2.0
    } else if (aj + 1) % n == bi {
        -sign * f.a[aj] / 2.0
    } else {
        0.0
    }
}

/// Maximum deviation of the numerically computed brackets from the
/// structure constants of the Flaschka bivector, over all coordinate pairs.
pub fn poisson_bracket_check(f: &FlaschkaPoint) -> Result<f64> {
    let n = f.n();
    let mut worst: f64 = 0.0;
    for m1 in 0..(2 * n) {
        for m2 in (m1 + 1)..(2 * n) {
            let got = poisson_bracket_pair(f, m1, m2)?;
            let want = expected_bracket(f, m1, m2);
            worst = worst.max((got - want).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn equilibrium(n: usize, alpha: f64) -> PhasePoint {
        let _ = alpha;
        PhasePoint::new(WPoint::zeros(n), WPoint::zeros(n)).unwrap()
    }

    #[test]
    fn hamiltonian_values() {
        let alpha = LeafParam::new(1.0).unwrap();
        let x = equilibrium(3, 1.0);
        assert_relative_eq!(hamiltonian_h(&x, &alpha).unwrap(), 3.0);
        let x = PhasePoint::new(
            WPoint::zeros(3),
            WPoint::new(vec![1.0, -1.0, 0.0]).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(hamiltonian_h(&x, &alpha).unwrap(), 4.0);
    }

    #[test]
    fn hbar_values() {
        let f = FlaschkaPoint::new(vec![0.0; 3], vec![1.0; 3]).unwrap();
        assert_relative_eq!(hamiltonian_hbar(&f), 3.0);
        let f = FlaschkaPoint::new(vec![1.0, -1.0, 0.0], vec![1.0; 3]).unwrap();
        assert_relative_eq!(hamiltonian_hbar(&f), 4.0);
    }

    #[test]
    fn energy_identity_random() {
        let mut rng = crate::sample::SampleRng::seed_from_u64(7);
        let alpha = LeafParam::new(1.3).unwrap();
        for _ in 0..1000 {
            let q = project_to_w(&rng.normals(4));
            let p = project_to_w(&rng.normals(4));
            let x = PhasePoint::new(q, p).unwrap();
            let f = flaschka(&x, &alpha).unwrap();
            let h = hamiltonian_h(&x, &alpha).unwrap();
            let hb = hamiltonian_hbar(&f);
            assert_relative_eq!(h, hb, max_relative = 1e-12);
        }
    }

    #[test]
    fn potential_uc_values() {
        let c = DeformParam::new(2.0).unwrap();
        let q = WPoint::zeros(3);
        assert_relative_eq!(
            potential_uc(&q, &c).unwrap(),
            12.0 * (-2.0_f64).exp(),
            max_relative = 1e-14
        );
        // all differences zero: n c^2 e^{-c}
        let c = DeformParam::new(7.5).unwrap();
        let q = WPoint::zeros(5);
        assert_relative_eq!(
            potential_uc(&q, &c).unwrap(),
            5.0 * 7.5 * 7.5 * (-7.5_f64).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn potential_uc_facet_term_exact() {
        // q_1 - q_2 = 1: that term contributes exactly c^2. At c = 200 the
        // other two terms are ~1e-126, far below one ulp of c^2, so the
        // total is bit-exact.
        let c = DeformParam::new(200.0).unwrap();
        let q = WPoint::new(vec![0.5, -0.5, 0.0]).unwrap();
        assert_eq!(potential_uc(&q, &c).unwrap(), 200.0 * 200.0);
    }

    #[test]
    fn flaschka_equilibrium_and_casimir() {
        let alpha = LeafParam::new(2.0).unwrap();
        let f = flaschka(&equilibrium(4, 2.0), &alpha).unwrap();
        assert_eq!(f.b(), &[0.0; 4]);
        for &a in f.a() {
            assert_relative_eq!(a, 2.0);
        }
        f.check_on_leaf(&alpha).unwrap();
    }

    #[test]
    fn flaschka_product_is_alpha_pow_n() {
        let mut rng = crate::sample::SampleRng::seed_from_u64(11);
        let alpha = LeafParam::new(0.7).unwrap();
        for _ in 0..1000 {
            let q = project_to_w(&rng.normals(5));
            let p = project_to_w(&rng.normals(5));
            let f = flaschka(&PhasePoint::new(q, p).unwrap(), &alpha).unwrap();
            let log_prod = f.casimir_log_prod();
            assert_relative_eq!(log_prod, 5.0 * 0.7_f64.ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn flaschka_roundtrip() {
        let mut rng = crate::sample::SampleRng::seed_from_u64(13);
        let alpha = LeafParam::new(1.1).unwrap();
        for _ in 0..1000 {
            let q = project_to_w(&rng.normals(4));
            let p = project_to_w(&rng.normals(4));
            let x = PhasePoint::new(q, p).unwrap();
            let f = flaschka(&x, &alpha).unwrap();
            let back = flaschka_inverse(&f, &alpha).unwrap();
            for i in 0..4 {
                assert_relative_eq!(back.q[i], x.q[i], epsilon = 1e-10);
                assert_relative_eq!(back.p[i], x.p[i], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn flaschka_inverse_rejects_off_leaf() {
        let alpha = LeafParam::new(1.0).unwrap();
        let f = FlaschkaPoint::new(vec![0.0; 3], vec![1.1, 1.0, 1.0]).unwrap();
        assert!(matches!(flaschka_inverse(&f, &alpha), Err(Error::OffLeaf { .. })));
    }

    #[test]
    fn vector_field_equilibrium_and_casimir_derivatives() {
        let f = FlaschkaPoint::new(vec![0.0; 3], vec![1.0; 3]).unwrap();
        let (db, da) = toda_vector_field(&f);
        assert_eq!(db, vec![0.0; 3]);
        assert_eq!(da, vec![0.0; 3]);

        let mut rng = crate::sample::SampleRng::seed_from_u64(17);
        for _ in 0..1000 {
            let b = project_to_w(&rng.normals(5)).into_vec();
            let a: Vec<f64> = (0..5).map(|_| rng.range(0.2, 2.0)).collect();
            let f = FlaschkaPoint::new(b, a).unwrap();
            let (db, da) = toda_vector_field(&f);
            let sum_db: f64 = db.iter().sum();
            let sum_da_over_a: f64 = da.iter().zip(f.a()).map(|(d, a)| d / a).sum();
            assert!(sum_db.abs() < 1e-13);
            assert!(sum_da_over_a.abs() < 1e-13);
        }
    }

    #[test]
    fn integrator_fixes_equilibrium() {
        let f = FlaschkaPoint::new(vec![0.0; 3], vec![1.0; 3]).unwrap();
        let traj = integrate_flaschka(&f, 1.0, 1e-2).unwrap();
        let last = traj.last().unwrap();
        for i in 0..3 {
            assert!(last.b()[i].abs() < 1e-15);
            assert_relative_eq!(last.a()[i], 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn integrator_halves_on_positivity_and_aborts_when_hopeless() {
        // huge momentum contrast drives an Euler-like stage of a below zero
        let f = FlaschkaPoint::new(vec![-2000.0, 2000.0, 0.0], vec![1.0, 1.0, 1.0]).unwrap();
        // one large step still succeeds through halving
        let traj = integrate_flaschka(&f, 1e-2, 1e-2).unwrap();
        assert!(traj.last().unwrap().a().iter().all(|&x| x > 0.0));
    }

    #[test]
    fn integrator_aborts_when_halving_cannot_restore_positivity() {
        // a momentum contrast of 1e16 forces stage negativity at any step
        // above the halving floor
        let f = FlaschkaPoint::new(vec![1e16, -1e16, 0.0], vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            integrate_flaschka(&f, 1e-3, 1e-3),
            Err(Error::StiffnessAbort { .. })
        ));
    }

    #[test]
    fn hamiltonian_reports_out_of_range_exponents() {
        let alpha = LeafParam::new(1.0).unwrap();
        let q = WPoint::new(vec![500.0, -500.0, 0.0]).unwrap();
        let x = PhasePoint::new(q, WPoint::zeros(3)).unwrap();
        assert!(matches!(hamiltonian_h(&x, &alpha), Err(Error::Overflow { .. })));
        assert!(matches!(flaschka(&x, &alpha), Ok(_)));
        let q = WPoint::new(vec![800.0, -800.0, 0.0]).unwrap();
        let x = PhasePoint::new(q, WPoint::zeros(3)).unwrap();
        assert!(matches!(flaschka(&x, &alpha), Err(Error::Overflow { .. })));
    }

    #[test]
    fn verlet_near_minimum_stays_put() {
        let c = DeformParam::new(10.0).unwrap();
        let x = equilibrium(3, 1.0);
        let traj = integrate_qp_verlet(&x, &c, 0.5, 1e-4).unwrap();
        let last = traj.last().unwrap();
        for i in 0..3 {
            assert!(last.q[i].abs() < 1e-12);
            assert!(last.p[i].abs() < 1e-12);
        }
    }

    #[test]
    fn verlet_time_reversal() {
        let c = DeformParam::new(20.0).unwrap();
        let x0 = PhasePoint::new(
            WPoint::new(vec![0.3, -0.2, -0.1]).unwrap(),
            WPoint::new(vec![0.5, -0.8, 0.3]).unwrap(),
        )
        .unwrap();
        let fwd = integrate_qp_verlet(&x0, &c, 2.0, 1e-4).unwrap();
        let end = fwd.last().unwrap();
        let flipped = PhasePoint::new(end.q.clone(), end.p.scaled(-1.0)).unwrap();
        let back = integrate_qp_verlet(&flipped, &c, 2.0, 1e-4).unwrap();
        let home = back.last().unwrap();
        for i in 0..3 {
            assert!((home.q[i] - x0.q[i]).abs() < 1e-6);
            assert!((home.p[i] + x0.p[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn poisson_brackets_match_structure_constants() {
        let mut rng = crate::sample::SampleRng::seed_from_u64(23);
        let n = 3;
        let b = project_to_w(&rng.normals(n)).into_vec();
        let raw: Vec<f64> = (0..n).map(|_| rng.range(0.5, 1.5)).collect();
        let log_mean: f64 = raw.iter().map(|x| x.ln()).sum::<f64>() / n as f64;
        let a: Vec<f64> = raw.iter().map(|x| x / log_mean.exp()).collect();
        let f = FlaschkaPoint::new(b, a).unwrap();

        // {b_1, b_2} = 0
        assert!(poisson_bracket_pair(&f, 0, 1).unwrap().abs() < 1e-6);
        // {b_1, a_1} = a_1 / 2
        let got = poisson_bracket_pair(&f, 0, n).unwrap();
        assert_relative_eq!(got, f.a()[0] / 2.0, max_relative = 1e-5);
        // {b_1, a_2} = 0
        assert!(poisson_bracket_pair(&f, 0, n + 1).unwrap().abs() < 1e-6);
        // {b_1, a_n} = -a_n / 2 (cyclic predecessor)
        let got = poisson_bracket_pair(&f, 0, 2 * n - 1).unwrap();
        assert_relative_eq!(got, -f.a()[n - 1] / 2.0, max_relative = 1e-5);

        assert!(poisson_bracket_check(&f).unwrap() < 1e-5);
    }

    #[test]
    fn deform_param_range() {
        assert!(DeformParam::new(1.9).is_err());
        assert!(DeformParam::new(200.1).is_err());
        assert!(DeformParam::new(2.0).is_ok());
        assert!(DeformParam::new(200.0).is_ok());
    }
}
