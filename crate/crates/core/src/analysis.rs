//! DG-norm error evaluation against exact solutions and convergence rates.
//!
//! The broken norm is
//! `‖v‖²_DG = Σ_i ( ρ_i ‖∇v‖²_{Ω_i} + (ρ_i/h) ‖v‖²_{∂Ω_i ∩ ∂Ω} + Σ_F ({ρ}/h) ‖v‖²_F )`
//! with `{ρ}` the arithmetic mean across an interface and `h` the global
//! mesh size. Interface traces are taken from each face's owner side.

use crate::assembly::ProblemSpec;
use crate::error::Error;
use crate::geometry::{ElementIter, FaceId, MultiPatch};
use crate::quadrature::{cell_points, QuadRule};
use crate::solver::DiscreteSolution;
use crate::util::{dot, sub};
use crate::Result;

/// Errors of one discrete solution at one refinement level.
#[derive(Clone, Copy, Debug)]
pub struct ErrorReport {
    /// Mesh size used in the norm weights.
    pub h: f64,
    /// Total DG-norm error.
    pub dg_error: f64,
    /// Volume gradient part `sqrt(Σ ρ_i ‖∇e‖²)`.
    pub volume_component: f64,
    /// Outer-boundary part `sqrt(Σ (ρ_i/h) ‖e‖²_{∂Ω})`.
    pub boundary_component: f64,
    /// Interface part `sqrt(Σ ({ρ}/h) ‖e‖²_F)`.
    pub interface_component: f64,
    /// Plain L² error.
    pub l2_error: f64,
    /// Measured overlap width (max over overlap pairs; 0 when matching).
    pub overlap_width: f64,
}

/// DG-norm error of a discrete solution against the exact solution carried
/// by the problem spec.
///
/// `quadrature` is the Gauss order per direction (the harness uses `p + 2`);
/// `h_override` replaces the mesh size in the norm weights (the refinement
/// driver passes the nominal undisplaced mesh size so rate ratios stay
/// exact).
pub fn dg_error(
    sol: &DiscreteSolution,
    spec: &ProblemSpec,
    quadrature: usize,
    h_override: Option<f64>,
) -> Result<ErrorReport> {
    let exact = spec
        .exact
        .as_ref()
        .ok_or_else(|| Error::Config("error evaluation needs an exact solution".into()))?;
    let exact_grad = spec
        .exact_gradient
        .as_ref()
        .ok_or_else(|| Error::Config("error evaluation needs an exact gradient".into()))?;
    let mp = sol.multipatch().as_ref();
    spec.validate(mp)?;
    let rule = QuadRule::gauss(quadrature)?;
    let h = match h_override {
        Some(h) => h,
        None => mp.mesh_size(),
    };
    let dim = mp.dim();

    let mut volume_sq = 0.0;
    let mut l2_sq = 0.0;
    for (pi, patch) in mp.patches().iter().enumerate() {
        let rho = spec.diffusion[pi];
        let space = patch.space();
        let coeffs = sol.patch_coefficients(pi);
        let spans = space.element_spans();
        for elem in ElementIter::new(&spans) {
            let cell: Vec<(f64, f64)> = elem.iter().map(|s| (s.lo, s.hi)).collect();
            for (xhat, w) in cell_points(&cell, &rule) {
                let basis = space.eval(xhat, 1)?;
                let jac = patch.jacobian_from_basis(&basis, xhat)?;
                let mut value = 0.0;
                let mut grad_param = [0.0; 3];
                let mut point = [0.0; 3];
                for local in 0..basis.len() {
                    let g = basis.global_index(space, local);
                    value += coeffs[g] * basis.values[local];
                    for k in 0..3 {
                        grad_param[k] += coeffs[g] * basis.grads[local][k];
                        point[k] += patch.control_points()[g][k] * basis.values[local];
                    }
                }
                let grad_h = jac.to_physical_gradient(grad_param);
                let diff_grad = sub(exact_grad(point), grad_h);
                let diff_val = exact(point) - value;
                let weight = w * jac.det;
                volume_sq += weight * rho * dot(diff_grad, diff_grad);
                l2_sq += weight * diff_val * diff_val;
            }
        }
    }

    let trace_sq = |face: FaceId, factor: f64| -> Result<f64> {
        let patch = mp.patch(face.patch);
        let coeffs = sol.patch_coefficients(face.patch);
        let space = patch.space();
        let mut acc = 0.0;
        for cell in face_cells(mp, face) {
            for (t, w) in cell_points(&cell, &rule) {
                let fg = patch.face_geometry(face, &t[..dim - 1])?;
                let xhat = face.embed(&t[..dim - 1], dim);
                let basis = space.eval(xhat, 0)?;
                let mut value = 0.0;
                for local in 0..basis.len() {
                    value += coeffs[basis.global_index(space, local)] * basis.values[local];
                }
                let diff = exact(fg.point) - value;
                acc += w * fg.measure * factor * diff * diff;
            }
        }
        Ok(acc)
    };

    let mut boundary_sq = 0.0;
    for face in mp.dirichlet_faces() {
        let rho = spec.diffusion[face.patch];
        boundary_sq += trace_sq(*face, rho / h)?;
    }

    let mut interface_sq = 0.0;
    for pair in mp.interfaces() {
        let rho_avg = 0.5 * (spec.diffusion[pair.a.patch] + spec.diffusion[pair.b.patch]);
        for (owner, _) in pair.sides() {
            interface_sq += trace_sq(owner, rho_avg / h)?;
        }
    }

    let mut overlap_width: f64 = 0.0;
    for (idx, pair) in mp.interfaces().iter().enumerate() {
        if pair.kind == crate::geometry::PairKind::Overlap {
            overlap_width = overlap_width.max(mp.overlap_width(idx, 100)?);
        }
    }

    Ok(ErrorReport {
        h,
        dg_error: (volume_sq + boundary_sq + interface_sq).sqrt(),
        volume_component: volume_sq.sqrt(),
        boundary_component: boundary_sq.sqrt(),
        interface_component: interface_sq.sqrt(),
        l2_error: l2_sq.sqrt(),
        overlap_width,
    })
}

fn face_cells(mp: &MultiPatch, face: FaceId) -> Vec<Vec<(f64, f64)>> {
    let breaks = mp.patch(face.patch).face_breakpoints(face);
    let counts: Vec<usize> = breaks.iter().map(|b| b.len() - 1).collect();
    let total: usize = counts.iter().product();
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut cell = Vec::with_capacity(breaks.len());
        for (k, b) in breaks.iter().enumerate() {
            let i = rem % counts[k];
            rem /= counts[k];
            cell.push((b[i], b[i + 1]));
        }
        out.push(cell);
    }
    out
}

/// One row of a convergence study.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceLevel {
    pub level: usize,
    pub dofs: usize,
    /// Width requested from the overlap driver at this level.
    pub nominal_width: f64,
    pub report: ErrorReport,
}

/// Refinement sequence with fitted rates.
#[derive(Clone, Debug)]
pub struct ConvergenceTable {
    /// Overlap exponent of the run (`d_o = h^λ`); infinity means matching.
    pub lambda: f64,
    pub levels: Vec<ConvergenceLevel>,
    /// `rates[i] = ln(e_{i-1}/e_i) / ln(h_{i-1}/h_i)`; `None` for level 0 or
    /// when an error vanishes.
    pub rates: Vec<Option<f64>>,
}

impl ConvergenceTable {
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            levels: Vec::new(),
            rates: Vec::new(),
        }
    }

    /// Append a level; the mesh size must halve level to level.
    pub fn push(&mut self, level: ConvergenceLevel) -> Result<()> {
        if let Some(prev) = self.levels.last() {
            let ratio = prev.report.h / level.report.h;
            if !(1.9..=2.1).contains(&ratio) {
                return Err(Error::Config(format!(
                    "mesh size must halve per level, got ratio {}",
                    ratio
                )));
            }
        }
        self.levels.push(level);
        Ok(())
    }

    /// (Re)fit the per-level rates from the stored errors.
    pub fn compute_rates(&mut self) {
        self.rates = rate(
            &self
                .levels
                .iter()
                .map(|l| l.report.dg_error)
                .collect::<Vec<_>>(),
            &self.levels.iter().map(|l| l.report.h).collect::<Vec<_>>(),
        );
    }

    /// Mean of the last two defined level-to-level rates, damping
    /// preasymptotic wobble.
    pub fn final_rate(&self) -> Option<f64> {
        let defined: Vec<f64> = self.rates.iter().filter_map(|r| *r).collect();
        match defined.len() {
            0 => None,
            1 => Some(defined[0]),
            n => Some(0.5 * (defined[n - 1] + defined[n - 2])),
        }
    }
}

/// Fitted rates between consecutive levels: `r_i = ln(e_{i-1}/e_i) / ln(h_{i-1}/h_i)`.
///
/// Index 0 is `None`; a vanishing error makes the touched rates undefined.
pub fn rate(errors: &[f64], hs: &[f64]) -> Vec<Option<f64>> {
    assert_eq!(errors.len(), hs.len());
    let mut out = vec![None; errors.len()];
    for i in 1..errors.len() {
        if errors[i - 1] > 0.0 && errors[i] > 0.0 && hs[i - 1] != hs[i] {
            out[i] = Some((errors[i - 1] / errors[i]).ln() / (hs[i - 1] / hs[i]).ln());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_quadratic_decay() {
        let rates = rate(&[1.0, 0.25], &[1.0, 0.5]);
        assert_eq!(rates[0], None);
        assert!((rates[1].unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rate_flat_sequence() {
        let rates = rate(&[1.0, 1.0], &[1.0, 0.5]);
        assert!(rates[1].unwrap().abs() < 1e-14);
    }

    #[test]
    fn rate_synthetic_exponent() {
        let hs: Vec<f64> = (0..5).map(|i| 0.5f64.powi(i)).collect();
        let errors: Vec<f64> = hs.iter().map(|h| h.powf(1.5)).collect();
        for r in rate(&errors, &hs).into_iter().skip(1) {
            assert!((r.unwrap() - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn rate_zero_error_flagged() {
        let rates = rate(&[1.0, 0.0, 0.5], &[1.0, 0.5, 0.25]);
        assert_eq!(rates[1], None);
        assert_eq!(rates[2], None);
    }

    fn report_with(h: f64, e: f64) -> ErrorReport {
        ErrorReport {
            h,
            dg_error: e,
            volume_component: e,
            boundary_component: 0.0,
            interface_component: 0.0,
            l2_error: e,
            overlap_width: 0.0,
        }
    }

    #[test]
    fn table_enforces_halving_and_fits() {
        let mut table = ConvergenceTable::new(2.0);
        for i in 0..4 {
            let h = 0.5f64.powi(i);
            table
                .push(ConvergenceLevel {
                    level: i as usize,
                    dofs: 100 << i,
                    nominal_width: 0.0,
                    report: report_with(h, h * h),
                })
                .unwrap();
        }
        table.compute_rates();
        assert!((table.final_rate().unwrap() - 2.0).abs() < 1e-12);

        let bad = ConvergenceLevel {
            level: 4,
            dofs: 1,
            nominal_width: 0.0,
            report: report_with(0.3, 0.1),
        };
        assert!(table.push(bad).is_err());
    }
}
