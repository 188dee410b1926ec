//! Gauss–Legendre quadrature on the unit interval, tensorized over knot-span
//! boxes of parametric elements and faces.

use crate::error::Error;
use crate::util::Vec3;
use crate::Result;

/// An `n`-point Gauss–Legendre rule mapped to `[0, 1]`.
///
/// Weights sum to one and the rule integrates polynomials up to degree
/// `2n - 1` exactly.
#[derive(Clone, Debug)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    /// Nodes by Newton iteration on the Legendre polynomial with Chebyshev
    /// starting values, converged to machine precision; no tabulated data.
    pub fn gauss(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "quadrature rule needs at least one point".into(),
            ));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Compute roots in (0, 1] of P_n on [-1, 1]; mirror the rest so the
        // rule is symmetric to the last bit.
        for i in 0..(n + 1) / 2 {
            // i-th root from the right.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_deriv(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_deriv(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Mirror the right-half root so the rule is symmetric to the bit.
            let node = 0.5 * (x + 1.0);
            nodes[n - 1 - i] = node;
            nodes[i] = 1.0 - node;
            weights[n - 1 - i] = 0.5 * w;
            weights[i] = 0.5 * w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.5;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Legendre polynomial `P_n` and derivative at `x` via the three-term
/// recurrence.
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Tensorized quadrature points over an axis-aligned cell `Π [lo_k, hi_k)`,
/// one interval per direction. Weights carry the cell volume; empty cells
/// produce no points.
pub fn cell_points(cell: &[(f64, f64)], rule: &QuadRule) -> Vec<(Vec3, f64)> {
    let m = cell.len();
    debug_assert!(m <= 3);
    let volume: f64 = cell.iter().map(|&(lo, hi)| hi - lo).product();
    if volume <= 0.0 {
        return Vec::new();
    }
    let total = rule.len().pow(m as u32);
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut point = [0.0; 3];
        let mut weight = volume;
        for (k, &(lo, hi)) in cell.iter().enumerate() {
            let q = rem % rule.len();
            rem /= rule.len();
            point[k] = lo + (hi - lo) * rule.nodes[q];
            weight *= rule.weights[q];
        }
        out.push((point, weight));
    }
    out
}

/// Merge two sorted breakpoint lists, removing near-duplicates.
///
/// Interface quadrature lays its cells on the union mesh of the two faces'
/// knot lines so integrands stay smooth on every cell.
pub fn merge_breakpoints(a: &[f64], b: &[f64], tol: f64) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for v in all {
        if out.last().is_none_or(|&last| v - last > tol) {
            out.push(v);
        }
    }
    out
}
