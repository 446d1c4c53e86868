//! Regions of the zero-sum hyperplane and their toric shadows: the cyclic
//! simplex, the lattice Voronoi cell, the six-cell orbit regions whose
//! sorted-difference images are triangles and rectangles, membership tests,
//! exact areas, and seeded Monte-Carlo volumes.

use alloc::boxed::Box;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float; // float math in no_std builds

use crate::error::{Error, Result};
use crate::linalg::{build_w_basis, DarbouxChart, WPoint};
use crate::sample::SampleRng;

/// A relatively open region of `W^{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub enum WRegion {
    /// `{ x : x_i - x_{i+1} < 1 cyclically }`, the open simplex with
    /// barycenter at the origin.
    SimplexS { n: usize },
    /// `{ x : max x - min x < 1 }`, the Voronoi cell of the root lattice.
    VoronoiP { n: usize },
    /// Orbit of the open triangle with edge vectors
    /// `u = (-2a/3, a/3, a/3)` and `v = (-b/3, -b/3, 2b/3)` under all six
    /// coordinate permutations (`n = 3` only).
    TriangleOrbit { a: f64, b: f64 },
    /// Orbit of the open parallelogram spanned by the same edge vectors.
    ParallelogramOrbit { a: f64, b: f64 },
    /// Pointwise dilation of another region about the origin.
    Scaled { inner: Box<WRegion>, factor: f64 },
}

/// Builds the open simplex region; `n >= 3`.
pub fn simplex_s(n: usize) -> Result<WRegion> {
    if n < 3 {
        return Err(Error::DimensionTooSmall { n });
    }
    Ok(WRegion::SimplexS { n })
}

/// Builds the Voronoi-cell region; `n >= 3`.
pub fn voronoi_p(n: usize) -> Result<WRegion> {
    if n < 3 {
        return Err(Error::DimensionTooSmall { n });
    }
    Ok(WRegion::VoronoiP { n })
}

/// Six-triangle orbit region; its sorted-difference image is the open
/// triangle with legs `(3a, 3b)`.
pub fn region_pe(a: f64, b: f64) -> Result<WRegion> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::NonPositive { what: "triangle parameters", value: a.min(b) });
    }
    Ok(WRegion::TriangleOrbit { a, b })
}

/// Six-parallelogram orbit region; its sorted-difference image is the open
/// `(3a, 3b)` rectangle.
pub fn region_pp(a: f64, b: f64) -> Result<WRegion> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::NonPositive { what: "parallelogram parameters", value: a.min(b) });
    }
    Ok(WRegion::ParallelogramOrbit { a, b })
}

/// Dilation about the origin. For star-shaped regions and `s <= 1` the
/// image is contained in the original.
pub fn scale_region(region: &WRegion, s: f64) -> Result<WRegion> {
    if !(s > 0.0) {
        return Err(Error::NonPositive { what: "scale factor", value: s });
    }
    Ok(match region {
        WRegion::Scaled { inner, factor } => {
            WRegion::Scaled { inner: inner.clone(), factor: factor * s }
        }
        other => WRegion::Scaled { inner: Box::new(other.clone()), factor: s },
    })
}

const PERMS3: [[usize; 3]; 6] =
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Cell edge vectors of the orbit regions.
fn cell_edges(a: f64, b: f64) -> ([f64; 3], [f64; 3]) {
    ([-2.0 * a / 3.0, a / 3.0, a / 3.0], [-b / 3.0, -b / 3.0, 2.0 * b / 3.0])
}

/// Solves `x = s u + t v` in the plane spanned by `u, v`.
fn cell_coordinates(x: &[f64], u: &[f64; 3], v: &[f64; 3]) -> (f64, f64) {
    let dot = |p: &[f64], q: &[f64]| -> f64 { p.iter().zip(q).map(|(a, b)| a * b).sum() };
    let uu = dot(u, u);
    let vv = dot(v, v);
    let uv = dot(u, v);
    let xu = dot(x, u);
    let xv = dot(x, v);
    let det = uu * vv - uv * uv;
    ((xu * vv - xv * uv) / det, (xv * uu - xu * uv) / det)
}

fn permuted(x: &[f64], perm: &[usize; 3]) -> [f64; 3] {
    // entry i of the result reads coordinate perm[i] of x
    [x[perm[0]], x[perm[1]], x[perm[2]]]
}

impl WRegion {
    pub fn ambient_n(&self) -> usize {
        match self {
            WRegion::SimplexS { n } | WRegion::VoronoiP { n } => *n,
            WRegion::TriangleOrbit { .. } | WRegion::ParallelogramOrbit { .. } => 3,
            WRegion::Scaled { inner, .. } => inner.ambient_n(),
        }
    }

    /// Strict membership of a zero-sum point.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            WRegion::SimplexS { n } => (0..*n).all(|i| x[i] - x[(i + 1) % n] < 1.0),
            WRegion::VoronoiP { .. } => {
                let max = x.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
                let min = x.iter().fold(f64::INFINITY, |m, &v| m.min(v));
                max - min < 1.0
            }
            WRegion::TriangleOrbit { a, b } => {
                let (u, v) = cell_edges(*a, *b);
                PERMS3.iter().any(|perm| {
                    let y = permuted(x, perm);
                    let (s, t) = cell_coordinates(&y, &u, &v);
                    s > 0.0 && t > 0.0 && s + t < 1.0
                })
            }
            WRegion::ParallelogramOrbit { a, b } => {
                let (u, v) = cell_edges(*a, *b);
                PERMS3.iter().any(|perm| {
                    let y = permuted(x, perm);
                    let (s, t) = cell_coordinates(&y, &u, &v);
                    s > 0.0 && t > 0.0 && s < 1.0 && t < 1.0
                })
            }
            WRegion::Scaled { inner, factor } => {
                let shrunk: Vec<f64> = x.iter().map(|v| v / factor).collect();
                inner.contains(&shrunk)
            }
        }
    }

    /// Corner points spanning the region: polytope vertices, or all orbit
    /// cell corners for the union regions. Chart boxes for rejection
    /// sampling come from them.
    pub fn corner_points(&self) -> Vec<Vec<f64>> {
        match self {
            WRegion::SimplexS { n } => {
                // cyclic permutations of ((n-1)/2, (n-1)/2 - 1, ..., -(n-1)/2)
                let gen: Vec<f64> =
                    (0..*n).map(|i| (*n as f64 - 1.0) / 2.0 - i as f64).collect();
                (0..*n).map(|s| (0..*n).map(|i| gen[(i + s) % n]).collect()).collect()
            }
            WRegion::VoronoiP { n } => {
                let mut gen: Vec<f64> = alloc::vec![1.0 / *n as f64; *n];
                gen[*n - 1] = -(*n as f64 - 1.0) / *n as f64;
                let mut out: Vec<Vec<f64>> = Vec::with_capacity(2 * n);
                for s in 0..*n {
                    let v: Vec<f64> = (0..*n).map(|i| gen[(i + s) % n]).collect();
                    out.push(v.iter().map(|x| -x).collect());
                    out.push(v);
                }
                out
            }
            WRegion::TriangleOrbit { a, b } | WRegion::ParallelogramOrbit { a, b } => {
                let (u, v) = cell_edges(*a, *b);
                let mut corners: Vec<[f64; 3]> = alloc::vec![[0.0; 3], u, v];
                if matches!(self, WRegion::ParallelogramOrbit { .. }) {
                    corners.push([u[0] + v[0], u[1] + v[1], u[2] + v[2]]);
                }
                let mut out = Vec::new();
                for perm in PERMS3.iter() {
                    for c in &corners {
                        // inverse action: place coordinate i at slot perm[i]
                        let mut p = [0.0; 3];
                        for i in 0..3 {
                            p[perm[i]] = c[i];
                        }
                        out.push(p.to_vec());
                    }
                }
                out
            }
            WRegion::Scaled { inner, factor } => inner
                .corner_points()
                .into_iter()
                .map(|v| v.iter().map(|x| factor * x).collect())
                .collect(),
        }
    }

    /// The sorted-difference image of the region as a toric base.
    pub fn rho_image(&self) -> Result<ToricBase> {
        match self {
            WRegion::SimplexS { .. } => {
                Err(Error::Unsupported("the simplex factor is not fully symmetric"))
            }
            WRegion::VoronoiP { n } => Ok(ToricBase::Simplex { a: *n as f64, dim: *n - 1 }),
            WRegion::TriangleOrbit { a, b } => {
                Ok(ToricBase::Triangle { a: 3.0 * a, b: 3.0 * b })
            }
            WRegion::ParallelogramOrbit { a, b } => {
                Ok(ToricBase::Rectangle { a: 3.0 * a, b: 3.0 * b })
            }
            WRegion::Scaled { inner, factor } => Ok(inner.rho_image()?.scaled(*factor)),
        }
    }

    /// Exact area for the planar case `n = 3`.
    pub fn exact_area(&self) -> Result<f64> {
        if self.ambient_n() != 3 {
            return Err(Error::Unsupported("exact areas are implemented for n = 3 only"));
        }
        Ok(match self {
            WRegion::SimplexS { .. } | WRegion::VoronoiP { .. } => {
                let chart = build_w_basis(3)?;
                let mut pts: Vec<(f64, f64)> = self
                    .corner_points()
                    .iter()
                    .map(|v| {
                        let c = chart.to_chart_slice(v);
                        (c[0], c[1])
                    })
                    .collect();
                let cx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
                let cy = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
                pts.sort_by(|p, q| {
                    let ap = (p.1 - cy).atan2(p.0 - cx);
                    let aq = (q.1 - cy).atan2(q.0 - cx);
                    ap.total_cmp(&aq)
                });
                shoelace(&pts)
            }
            WRegion::TriangleOrbit { a, b } => 6.0 * 0.5 * cell_parallelogram_area(*a, *b),
            WRegion::ParallelogramOrbit { a, b } => 6.0 * cell_parallelogram_area(*a, *b),
            WRegion::Scaled { inner, factor } => factor * factor * inner.exact_area()?,
        })
    }
}

fn shoelace(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len();
    let mut acc = 0.0;
    for i in 0..m {
        let (x1, y1) = pts[i];
        let (x2, y2) = pts[(i + 1) % m];
        acc += x1 * y2 - x2 * y1;
    }
    acc.abs() / 2.0
}

/// Area of the parallelogram spanned by the cell edge vectors, via the
/// 3-d cross product (both vectors lie in the zero-sum plane).
fn cell_parallelogram_area(a: f64, b: f64) -> f64 {
    let (u, v) = cell_edges(a, b);
    let cx = u[1] * v[2] - u[2] * v[1];
    let cy = u[2] * v[0] - u[0] * v[2];
    let cz = u[0] * v[1] - u[1] * v[0];
    (cx * cx + cy * cy + cz * cz).sqrt()
}

/// A relatively open subset of the nonnegative orthant serving as the base
/// of a toric domain.
#[derive(Debug, Clone, PartialEq)]
pub enum ToricBase {
    /// `{ r >= 0 : sum r_i < a }` in `dim` coordinates.
    Simplex { a: f64, dim: usize },
    /// `{ r > 0 : r_1/a + r_2/b < 1 }`.
    Triangle { a: f64, b: f64 },
    /// `{ 0 < r_1 < a, 0 < r_2 < b }`.
    Rectangle { a: f64, b: f64 },
}

impl ToricBase {
    pub fn contains(&self, r: &[f64]) -> bool {
        match self {
            ToricBase::Simplex { a, dim } => {
                r.len() == *dim && r.iter().all(|&v| v >= 0.0) && r.iter().sum::<f64>() < *a
            }
            ToricBase::Triangle { a, b } => {
                r.len() == 2 && r[0] > 0.0 && r[1] > 0.0 && r[0] / a + r[1] / b < 1.0
            }
            ToricBase::Rectangle { a, b } => {
                r.len() == 2 && r[0] > 0.0 && r[1] > 0.0 && r[0] < *a && r[1] < *b
            }
        }
    }

    /// Dilation by `s` (the sorted-difference map is positively homogeneous).
    pub fn scaled(&self, s: f64) -> ToricBase {
        match self {
            ToricBase::Simplex { a, dim } => ToricBase::Simplex { a: s * a, dim: *dim },
            ToricBase::Triangle { a, b } => ToricBase::Triangle { a: s * a, b: s * b },
            ToricBase::Rectangle { a, b } => ToricBase::Rectangle { a: s * a, b: s * b },
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            ToricBase::Simplex { a, dim } => {
                let mut fact = 1.0;
                for k in 1..=*dim {
                    fact *= k as f64;
                }
                a.powi(*dim as i32) / fact
            }
            ToricBase::Triangle { a, b } => a * b / 2.0,
            ToricBase::Rectangle { a, b } => a * b,
        }
    }
}

/// Canonical zero-sum preimage of a nonnegative difference vector: the
/// nondecreasing `y` with `rho(y) = r`.
pub fn canonical_preimage(r: &[f64]) -> Vec<f64> {
    let n = r.len() + 1;
    let nf = n as f64;
    let shift: f64 =
        r.iter().enumerate().map(|(j, &v)| (j as f64 + 1.0) * v).sum::<f64>() / (nf * nf);
    (0..n)
        .map(|i| {
            let tail: f64 = r[i..].iter().sum();
            shift - tail / nf
        })
        .collect()
}

/// Membership of `r` in the sorted-difference image of a fully symmetric
/// region, through the canonical preimage.
pub fn rho_image_contains(region: &WRegion, r: &[f64]) -> bool {
    if r.iter().any(|&v| v < 0.0) {
        return false;
    }
    region.contains(&canonical_preimage(r))
}

/// Euclidean distance (within the hyperplane) from `q` to the nearest
/// simplex facet `q_i - q_{i+1} = 1`; negative outside the closure.
pub fn simplex_facet_margin(q: &[f64]) -> f64 {
    let n = q.len();
    let mut margin = f64::INFINITY;
    for i in 0..n {
        let slack = 1.0 - (q[i] - q[(i + 1) % n]);
        margin = margin.min(slack / core::f64::consts::SQRT_2);
    }
    margin
}

/// Rejection sampler for a region, uniform with respect to the hyperplane's
/// intrinsic Lebesgue measure (the chart is an isometry).
#[derive(Debug, Clone)]
pub struct RegionSampler {
    region: WRegion,
    chart: DarbouxChart,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl RegionSampler {
    pub fn new(region: &WRegion) -> Result<Self> {
        let chart = build_w_basis(region.ambient_n())?;
        let dim = chart.dim();
        let mut lo = alloc::vec![f64::INFINITY; dim];
        let mut hi = alloc::vec![f64::NEG_INFINITY; dim];
        for corner in region.corner_points() {
            let c = chart.to_chart_slice(&corner);
            for k in 0..dim {
                lo[k] = lo[k].min(c[k]);
                hi[k] = hi[k].max(c[k]);
            }
        }
        Ok(RegionSampler { region: region.clone(), chart, lo, hi })
    }

    pub fn chart(&self) -> &DarbouxChart {
        &self.chart
    }

    pub fn box_volume(&self) -> f64 {
        self.lo.iter().zip(self.hi.iter()).map(|(l, h)| h - l).product()
    }

    /// One uniform point of the region (ambient coordinates).
    pub fn sample(&self, rng: &mut SampleRng) -> WPoint {
        loop {
            let u: Vec<f64> =
                self.lo.iter().zip(self.hi.iter()).map(|(&l, &h)| rng.range(l, h)).collect();
            let x = self.chart.from_chart(&u);
            if self.region.contains(x.as_slice()) {
                return x;
            }
        }
    }

    /// One box sample together with its membership flag, for volume counts.
    pub fn sample_box(&self, rng: &mut SampleRng) -> (WPoint, bool) {
        let u: Vec<f64> =
            self.lo.iter().zip(self.hi.iter()).map(|(&l, &h)| rng.range(l, h)).collect();
        let x = self.chart.from_chart(&u);
        let inside = self.region.contains(x.as_slice());
        (x, inside)
    }
}

/// Volume estimation method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VolumeMethod {
    /// Exact planar area (n = 3 only).
    Exact2d,
    /// Rejection sampling in the chart bounding box; deterministic per seed.
    MonteCarlo { samples: u64, seed: u64 },
}

/// A volume value with its statistical error (zero for exact routes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: u64,
}

/// Volume of a region in the hyperplane's intrinsic measure.
pub fn volume(region: &WRegion, method: VolumeMethod) -> Result<VolumeEstimate> {
    match method {
        VolumeMethod::Exact2d => {
            Ok(VolumeEstimate { value: region.exact_area()?, std_err: 0.0, samples: 0 })
        }
        VolumeMethod::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::ParamOutOfRange { what: "samples", value: 0.0 });
            }
            let sampler = RegionSampler::new(region)?;
            let mut rng = SampleRng::seed_from_u64(seed);
            let mut inside = 0u64;
            for _ in 0..samples {
                if sampler.sample_box(&mut rng).1 {
                    inside += 1;
                }
            }
            let p = inside as f64 / samples as f64;
            let box_vol = sampler.box_volume();
            Ok(VolumeEstimate {
                value: p * box_vol,
                std_err: box_vol * (p * (1.0 - p) / samples as f64).sqrt(),
                samples,
            })
        }
    }
}

/// A Lagrangian product: positions in one region, momenta in another.
#[derive(Debug, Clone)]
pub struct LagrangianProduct {
    pub q_region: WRegion,
    pub p_region: WRegion,
}

impl LagrangianProduct {
    pub fn new(q_region: WRegion, p_region: WRegion) -> Result<Self> {
        if q_region.ambient_n() != p_region.ambient_n() {
            return Err(Error::Internal("product factors live in different hyperplanes"));
        }
        Ok(LagrangianProduct { q_region, p_region })
    }

    pub fn contains(&self, q: &[f64], p: &[f64]) -> bool {
        self.q_region.contains(q) && self.p_region.contains(p)
    }
}
