//! Linear solves and evaluation of the discrete solution.
//!
//! Systems are solved by Jacobi-preconditioned conjugate gradients with a
//! dense LU fallback below [`DENSE_DIRECT_LIMIT`] unknowns or when CG
//! stagnates. Serial and deterministic: identical inputs give identical
//! output bits.

use std::sync::Arc;

use crate::assembly::LinearSystem;
use crate::error::Error;
use crate::geometry::MultiPatch;
use crate::sparse::CsrMatrix;
use crate::util::Vec3;
use crate::Result;

/// Systems at most this large go straight to the dense factorization.
pub const DENSE_DIRECT_LIMIT: usize = 2000;

/// Biggest system the stagnation fallback will densify.
const DENSE_FALLBACK_LIMIT: usize = 20_000;

/// Solver controls; defaults follow the convergence-study setup (tight
/// tolerance so discretization error dominates).
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Relative residual target `‖Ax - b‖ / ‖b‖`.
    pub tol: f64,
    /// Iteration cap; `None` means `10 · n`.
    pub max_iter: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: None,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Dense LU factorization with partial pivoting.
pub struct DenseLu {
    n: usize,
    lu: Vec<Vec<f64>>,
    pivots: Vec<usize>,
}

impl DenseLu {
    pub fn factor(mut a: Vec<Vec<f64>>) -> Result<Self> {
        let n = a.len();
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            let (mut pivot_row, mut pivot_val) = (k, a[k][k].abs());
            for i in k + 1..n {
                if a[i][k].abs() > pivot_val {
                    pivot_row = i;
                    pivot_val = a[i][k].abs();
                }
            }
            if pivot_val < 1e-300 {
                return Err(Error::SolverDiverged {
                    iterations: 0,
                    residual: f64::INFINITY,
                });
            }
            pivots[k] = pivot_row;
            a.swap(k, pivot_row);
            let akk = a[k][k];
            for i in k + 1..n {
                let factor = a[i][k] / akk;
                a[i][k] = factor;
                if factor != 0.0 {
                    let (upper, lower) = a.split_at_mut(i);
                    let row_k = &upper[k];
                    let row_i = &mut lower[0];
                    for j in k + 1..n {
                        row_i[j] -= factor * row_k[j];
                    }
                }
            }
        }
        Ok(Self { n, lu: a, pivots })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        for k in 0..self.n {
            x.swap(k, self.pivots[k]);
        }
        for k in 0..self.n {
            for i in k + 1..self.n {
                x[i] -= self.lu[i][k] * x[k];
            }
        }
        for k in (0..self.n).rev() {
            for j in k + 1..self.n {
                x[k] -= self.lu[k][j] * x[j];
            }
            x[k] /= self.lu[k][k];
        }
        x
    }
}

/// Dense Cholesky; errors if the matrix is not positive definite.
pub fn dense_cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::SolverDiverged {
                        iterations: 0,
                        residual: sum,
                    });
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Ok(l)
}

fn dense_solve(matrix: &CsrMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let lu = DenseLu::factor(matrix.to_dense())?;
    Ok(lu.solve(rhs))
}

/// Jacobi-preconditioned conjugate gradients.
///
/// Returns `(solution, iterations, relative residual)`; `Err` only on
/// breakdown. The caller decides what to do with a residual above `tol`.
fn pcg(matrix: &CsrMatrix, rhs: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, usize, f64) {
    let n = matrix.dim();
    let b_norm = norm(rhs);
    if b_norm == 0.0 {
        return (vec![0.0; n], 0, 0.0);
    }
    let inv_diag: Vec<f64> = matrix
        .diagonal()
        .iter()
        .map(|&d| if d.abs() > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut best = f64::INFINITY;
    let mut since_best = 0usize;
    let mut iterations = 0;
    for iter in 1..=max_iter {
        matrix.mul_vec(&p, &mut q);
        let pq = dot(&p, &q);
        if pq == 0.0 {
            break;
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        iterations = iter;
        let rel = norm(&r) / b_norm;
        if rel <= tol {
            break;
        }
        if rel < 0.5 * best {
            best = rel;
            since_best = 0;
        } else {
            since_best += 1;
            // No meaningful progress for a long stretch: stagnation.
            if since_best > 500 {
                break;
            }
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    // Recompute the true residual; the recursive one can drift.
    matrix.mul_vec(&x, &mut q);
    for i in 0..n {
        q[i] -= rhs[i];
    }
    (x, iterations, norm(&q) / b_norm)
}

/// Solve a sparse system to the requested relative residual.
pub fn solve_coefficients(matrix: &CsrMatrix, rhs: &[f64], opts: SolveOptions) -> Result<Vec<f64>> {
    let n = matrix.dim();
    if n != rhs.len() {
        return Err(Error::InvalidArgument(format!(
            "matrix dimension {} does not match rhs length {}",
            n,
            rhs.len()
        )));
    }
    if n <= DENSE_DIRECT_LIMIT {
        return dense_solve(matrix, rhs);
    }
    let max_iter = opts.max_iter.unwrap_or(10 * n);
    let (x, iterations, rel) = pcg(matrix, rhs, opts.tol, max_iter);
    if rel <= opts.tol {
        return Ok(x);
    }
    if n <= DENSE_FALLBACK_LIMIT {
        return dense_solve(matrix, rhs);
    }
    Err(Error::SolverDiverged {
        iterations,
        residual: rel,
    })
}

/// Discrete solution: per-patch B-spline coefficient blocks over a shared
/// multipatch.
#[derive(Clone, Debug)]
pub struct DiscreteSolution {
    mp: Arc<MultiPatch>,
    offsets: Vec<usize>,
    coeffs: Vec<f64>,
}

impl DiscreteSolution {
    pub fn new(mp: Arc<MultiPatch>, offsets: Vec<usize>, coeffs: Vec<f64>) -> Result<Self> {
        if offsets.len() != mp.num_patches() + 1 {
            return Err(Error::InvalidArgument(
                "offset table must have one entry per patch plus the total".into(),
            ));
        }
        for i in 0..mp.num_patches() {
            let need = mp.patch(i).space().num_basis();
            if offsets[i + 1] - offsets[i] != need {
                return Err(Error::InvalidArgument(format!(
                    "patch {} expects {} coefficients, offsets give {}",
                    i,
                    need,
                    offsets[i + 1] - offsets[i]
                )));
            }
        }
        if coeffs.len() != *offsets.last().unwrap() {
            return Err(Error::InvalidArgument(
                "coefficient vector length does not match offsets".into(),
            ));
        }
        Ok(Self {
            mp,
            offsets,
            coeffs,
        })
    }

    pub fn multipatch(&self) -> &Arc<MultiPatch> {
        &self.mp
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn patch_coefficients(&self, patch: usize) -> &[f64] {
        &self.coeffs[self.offsets[patch]..self.offsets[patch + 1]]
    }

    /// Value of the discrete solution at a parametric point of a patch.
    pub fn eval(&self, patch: usize, xhat: Vec3) -> Result<f64> {
        let space = self.mp.patch(patch).space();
        let basis = space.eval(xhat, 0)?;
        let coeffs = self.patch_coefficients(patch);
        let mut value = 0.0;
        for local in 0..basis.len() {
            value += coeffs[basis.global_index(space, local)] * basis.values[local];
        }
        Ok(value)
    }

    /// Value and physical gradient at a parametric point of a patch.
    pub fn eval_with_gradient(&self, patch: usize, xhat: Vec3) -> Result<(f64, Vec3)> {
        let p = self.mp.patch(patch);
        let space = p.space();
        let basis = space.eval(xhat, 1)?;
        let jac = p.jacobian_from_basis(&basis, xhat)?;
        let coeffs = self.patch_coefficients(patch);
        let mut value = 0.0;
        let mut grad_param = [0.0; 3];
        for local in 0..basis.len() {
            let c = coeffs[basis.global_index(space, local)];
            value += c * basis.values[local];
            for k in 0..3 {
                grad_param[k] += c * basis.grads[local][k];
            }
        }
        Ok((value, jac.to_physical_gradient(grad_param)))
    }
}

/// Solve an assembled system and wrap the coefficients over the multipatch.
pub fn solve(
    mp: &Arc<MultiPatch>,
    system: &LinearSystem,
    opts: SolveOptions,
) -> Result<DiscreteSolution> {
    let coeffs = solve_coefficients(&system.matrix, &system.rhs, opts)?;
    DiscreteSolution::new(Arc::clone(mp), system.offsets.clone(), coeffs)
}

/// Inverse power iteration estimate of the smallest eigenvalue.
///
/// Desk-scale utility (dense factorization inside); used to witness
/// positive definiteness in tests.
pub fn smallest_eigenvalue_estimate(matrix: &CsrMatrix, iters: usize) -> Result<f64> {
    let n = matrix.dim();
    let lu = DenseLu::factor(matrix.to_dense())?;
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.7).sin()).collect();
    let scale = 1.0 / norm(&v);
    for vi in v.iter_mut() {
        *vi *= scale;
    }
    for _ in 0..iters {
        let w = lu.solve(&v);
        let s = 1.0 / norm(&w);
        v = w.into_iter().map(|x| x * s).collect();
    }
    let mut av = vec![0.0; n];
    matrix.mul_vec(&v, &mut av);
    Ok(dot(&v, &av) / dot(&v, &v))
}
