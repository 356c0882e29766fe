//! Gauss–Legendre rules and composite panel grids.

use std::f64::consts::PI;

use crate::error::{HorseError, Result};

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-15 {
                dp = legendre_with_derivative(n, z).1;
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A flat list of quadrature nodes and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Composite rule on [a, b]: the interval is split at every breakpoint
    /// strictly inside it, and each piece into panels of width ≤ `width`.
    pub fn composite(a: f64, b: f64, breakpoints: &[f64], width: f64, order: usize) -> Rule {
        let (gx, gw) = gauss_legendre(order);
        let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&c| c > a && c < b).collect();
        cuts.push(a);
        cuts.push(b);
        cuts.sort_by(|p, q| p.total_cmp(q));
        cuts.dedup();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for seg in cuts.windows(2) {
            let (lo, hi) = (seg[0], seg[1]);
            let panels = ((hi - lo) / width).ceil().max(1.0) as usize;
            let h = (hi - lo) / panels as f64;
            for p in 0..panels {
                let c = lo + (p as f64 + 0.5) * h;
                for (x, w) in gx.iter().zip(&gw) {
                    nodes.push(c + 0.5 * h * x);
                    weights.push(0.5 * h * w);
                }
            }
        }
        Rule { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// ∫_a^b f by composite Gauss–Legendre, halving the panel width until two
/// successive estimates differ by less than `tol` (absolute).
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, breakpoints: &[f64], tol: f64) -> Result<f64> {
    let mut width = (b - a) / 4.0;
    let mut prev = Rule::composite(a, b, breakpoints, width, 16).integrate(&f);
    for _ in 0..14 {
        width *= 0.5;
        let cur = Rule::composite(a, b, breakpoints, width, 16).integrate(&f);
        if (cur - prev).abs() < tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(HorseError::Quadrature {
        estimate: prev,
        error: f64::NAN,
    })
}
