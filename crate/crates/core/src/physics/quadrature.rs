//! Gauss-Legendre rules and their composite application.

use std::ops::{Add, Mul};

use num_traits::Zero;

use crate::scalar::Real;

/// `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Chebyshev-like initial guess `cos(pi (i + 3/4) / (n + 1/2))`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = T::lit(-x);
            nodes[n - 1 - i] = T::lit(x);
            weights[i] = T::lit(w);
            weights[n - 1 - i] = T::lit(w);
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn integrate<V, F>(&self, a: T, b: T, f: F) -> V
    where
        V: Zero + Add<Output = V> + Mul<T, Output = V>,
        F: Fn(T) -> V,
    {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        let mut acc = V::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * w;
        }
        acc * half
    }

    /// Applies the rule on `panels` equal sub-intervals of `[a, b]`.
    pub fn integrate_composite<V, F>(&self, a: T, b: T, panels: usize, f: F) -> V
    where
        V: Zero + Add<Output = V> + Mul<T, Output = V>,
        F: Fn(T) -> V,
    {
        let width = (b - a) / T::from_count(panels);
        let mut acc = V::zero();
        for p in 0..panels {
            let lo = a + width * T::from_count(p);
            acc = acc + self.integrate(lo, lo + width, &f);
        }
        acc
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
