//! Gauss-Legendre quadrature with node-doubling convergence control.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float; // float math in no_std builds

use crate::error::{Error, Result};

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights via Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let m = n.div_ceil(2);
        for i in 0..m {
            // Chebyshev-like initial guess
            let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let (_, d2) = legendre_and_deriv(n, x);
                    dp = d2;
                    break;
                }
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        // mirror to the negative half
        let mut all_nodes = Vec::with_capacity(n);
        let mut all_weights = Vec::with_capacity(n);
        for i in (0..m).rev() {
            if n % 2 == 1 && i == m - 1 {
                continue;
            }
            all_nodes.push(-nodes[i]);
            all_weights.push(weights[i]);
        }
        if n % 2 == 1 {
            all_nodes.push(0.0);
            all_weights.push(weights[m - 1]);
        }
        for i in 0..m {
            if n % 2 == 1 && i == m - 1 {
                continue;
            }
            all_nodes.push(nodes[i]);
            all_weights.push(weights[i]);
        }
        GaussLegendre { nodes: all_nodes, weights: all_weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(self.weights.iter()) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cache of Gauss-Legendre rules, reusable across many integrals.
#[derive(Debug, Default)]
pub struct QuadCache {
    rules: BTreeMap<usize, GaussLegendre>,
}

/// Node budget for the doubling ladder (2^14).
pub const MAX_QUAD_NODES: usize = 1 << 14;

impl QuadCache {
    pub fn new() -> Self {
        QuadCache { rules: BTreeMap::new() }
    }

    pub fn rule(&mut self, n: usize) -> &GaussLegendre {
        self.rules.entry(n).or_insert_with(|| GaussLegendre::new(n))
    }

    /// Integrate with node counts 16, 32, ... until two successive values
    /// differ by less than `rel_tol` relative, or the budget is exhausted.
    /// Returns the value and the node count that achieved convergence.
    pub fn integrate_doubling<F: Fn(f64) -> f64>(
        &mut self,
        a: f64,
        b: f64,
        rel_tol: f64,
        f: F,
    ) -> Result<(f64, usize)> {
        let mut n = 16;
        let mut prev = self.rule(n).integrate(a, b, &f);
        loop {
            n *= 2;
            if n > MAX_QUAD_NODES {
                return Err(Error::QuadratureNoConvergence {
                    nodes: n / 2,
                    last_delta: f64::NAN,
                });
            }
            let cur = self.rule(n).integrate(a, b, &f);
            let delta = (cur - prev).abs();
            if delta <= rel_tol * (1.0 + cur.abs()) {
                return Ok((cur, n));
            }
            if n == MAX_QUAD_NODES {
                return Err(Error::QuadratureNoConvergence { nodes: n, last_delta: delta });
            }
            prev = cur;
        }
    }
}
