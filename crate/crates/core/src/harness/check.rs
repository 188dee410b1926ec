//! The invariant self-test suite backing `overlap-dgiga check`.
//!
//! Desk-scale versions of the property checks: partition of unity,
//! derivative consistency, quadrature exactness, geometric positivity,
//! matrix symmetry and definiteness, pairing involutions, the zero-width
//! reduction, manufactured-solution residuals and DG-error accounting.

use std::sync::Arc;

use crate::assembly::{assemble, AssemblyConfig};
use crate::bspline::{KnotVector, TensorSpace};
use crate::geometry::{PairKind, PairSide};
use crate::harness::examples::ExampleCase;
use crate::quadrature::QuadRule;
use crate::solver::{dense_cholesky, solve, SolveOptions};
use crate::util::SplitMix64;

/// Result of one named check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: &'static str, detail: String) -> Self {
        Self {
            name,
            passed: true,
            detail,
        }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        Self {
            name,
            passed: false,
            detail,
        }
    }

    fn from_bound(name: &'static str, worst: f64, bound: f64) -> Self {
        Self {
            name,
            passed: worst <= bound,
            detail: format!("worst {:.3e} (bound {:.1e})", worst, bound),
        }
    }
}

fn random_knot_vector(rng: &mut SplitMix64, degree: usize) -> KnotVector {
    let interior = 1 + (rng.next_u64() % 5) as usize;
    let mut vals: Vec<f64> = (0..interior).map(|_| rng.range(0.05, 0.95)).collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let mut knots = vec![0.0; degree + 1];
    knots.extend(&vals);
    knots.extend(std::iter::repeat_n(1.0, degree + 1));
    KnotVector::new(degree, knots).expect("random open knot vector")
}

fn check_partition_of_unity() -> CheckOutcome {
    let mut rng = SplitMix64::new(101);
    let mut worst_sum: f64 = 0.0;
    let mut worst_neg: f64 = 0.0;
    for degree in 1..=4 {
        let kv = random_knot_vector(&mut rng, degree);
        for _ in 0..1000 {
            let x = rng.next_f64();
            let (_, vals) = kv.eval_basis(x).expect("x in [0,1]");
            let sum: f64 = vals.iter().sum();
            worst_sum = worst_sum.max((sum - 1.0).abs());
            worst_neg = worst_neg.min(vals.iter().cloned().fold(0.0, f64::min));
        }
    }
    // Tensor-product version.
    let space = TensorSpace::new(vec![
        random_knot_vector(&mut rng, 2),
        random_knot_vector(&mut rng, 3),
    ])
    .unwrap();
    for _ in 0..1000 {
        let p = [rng.next_f64(), rng.next_f64(), 0.0];
        let basis = space.eval(p, 0).unwrap();
        let sum: f64 = basis.values.iter().sum();
        worst_sum = worst_sum.max((sum - 1.0).abs());
    }
    if worst_neg < -1e-14 {
        return CheckOutcome::fail(
            "partition-of-unity",
            format!("negative basis value {:.3e}", worst_neg),
        );
    }
    CheckOutcome::from_bound("partition-of-unity", worst_sum, 1e-12)
}

fn check_derivative_fd() -> CheckOutcome {
    let mut rng = SplitMix64::new(103);
    let delta = 1e-6;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < 100 {
        let degree = 1 + (rng.next_u64() % 3) as usize;
        let kv = random_knot_vector(&mut rng, degree);
        let x = rng.range(0.01, 0.99);
        if kv.breakpoints().iter().any(|b| (b - x).abs() < 1e-3) {
            continue;
        }
        checked += 1;
        let (first, table) = kv.eval_basis_derivs(x, 1).unwrap();
        let (fp, vp) = kv.eval_basis(x + delta).unwrap();
        let (fm, vm) = kv.eval_basis(x - delta).unwrap();
        for j in 0..=degree {
            let i = first + j;
            let take = |f: usize, v: &[f64]| -> f64 {
                if (f..f + v.len()).contains(&i) {
                    v[i - f]
                } else {
                    0.0
                }
            };
            let fd = (take(fp, &vp) - take(fm, &vm)) / (2.0 * delta);
            worst = worst.max((table[1][j] - fd).abs());
        }
    }
    CheckOutcome::from_bound("derivative-finite-difference", worst, 1e-5)
}

fn check_quadrature_exactness() -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for n in 1..=8 {
        let rule = QuadRule::gauss(n).unwrap();
        for k in 0..=(2 * n - 1) {
            let integral: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| w * x.powi(k as i32))
                .sum();
            worst = worst.max((integral - 1.0 / (k as f64 + 1.0)).abs());
        }
    }
    CheckOutcome::from_bound("quadrature-exactness", worst, 1e-13)
}

/// Coarse displaced geometry for one example (λ = 1, the widest overlap the
/// studies use).
fn displaced_example(case: &ExampleCase) -> crate::Result<crate::geometry::MultiPatch> {
    let mp = case.build(2, 4, false)?;
    let d_o = mp.parametric_mesh_size();
    let mut displaced = mp;
    for &pair in &case.overlap_pairs {
        displaced = displaced.make_overlap(pair, d_o)?;
    }
    Ok(displaced)
}

fn check_jacobian_positivity() -> CheckOutcome {
    for case in ExampleCase::all() {
        let displaced = match displaced_example(&case) {
            Ok(mp) => mp,
            Err(e) => {
                return CheckOutcome::fail("jacobian-positivity", format!("{}: {}", case.name, e))
            }
        };
        if let Err(e) = displaced.validate() {
            return CheckOutcome::fail("jacobian-positivity", format!("{}: {}", case.name, e));
        }
    }
    CheckOutcome::pass(
        "jacobian-positivity",
        "det J > 0 at all element Gauss points of every shipped geometry".into(),
    )
}

fn check_matrix_symmetry() -> CheckOutcome {
    let case = crate::harness::examples::example_smooth_homogeneous();
    let mp = match displaced_example(&case) {
        Ok(mp) => mp,
        Err(e) => return CheckOutcome::fail("matrix-symmetry", e.to_string()),
    };
    let system = match assemble(&mp, &case.spec, &AssemblyConfig::for_degree(2)) {
        Ok(s) => s,
        Err(e) => return CheckOutcome::fail("matrix-symmetry", e.to_string()),
    };
    let rel = system.matrix.max_asymmetry() / system.matrix.max_abs();
    CheckOutcome::from_bound("matrix-symmetry", rel, 1e-12)
}

fn check_spd() -> CheckOutcome {
    let case = crate::harness::examples::example_smooth_homogeneous();
    let mp = match displaced_example(&case) {
        Ok(mp) => mp,
        Err(e) => return CheckOutcome::fail("spd-cholesky", e.to_string()),
    };
    let system = match assemble(&mp, &case.spec, &AssemblyConfig::for_degree(2)) {
        Ok(s) => s,
        Err(e) => return CheckOutcome::fail("spd-cholesky", e.to_string()),
    };
    match dense_cholesky(&system.matrix.to_dense()) {
        Ok(_) => CheckOutcome::pass(
            "spd-cholesky",
            format!(
                "Cholesky factorization succeeded at eta = {} ({} dofs)",
                AssemblyConfig::for_degree(2).penalty,
                system.dofs()
            ),
        ),
        Err(_) => CheckOutcome::fail(
            "spd-cholesky",
            "matrix is not positive definite at the default penalty".into(),
        ),
    }
}

fn check_partner_involution() -> CheckOutcome {
    let mut rng = SplitMix64::new(107);
    let mut worst: f64 = 0.0;
    for case in ExampleCase::all() {
        let mp = match case.build(2, 4, false) {
            Ok(mp) => mp,
            Err(e) => return CheckOutcome::fail("partner-involution", e.to_string()),
        };
        let fd = mp.dim() - 1;
        for pair_index in 0..mp.interfaces().len() {
            for _ in 0..50 {
                let t: Vec<f64> = (0..fd).map(|_| rng.next_f64()).collect();
                let (_, t_b, _) = mp.partner_point(pair_index, PairSide::A, &t).unwrap();
                let (_, t_back, _) = mp.partner_point(pair_index, PairSide::B, &t_b).unwrap();
                for m in 0..fd {
                    worst = worst.max((t_back[m] - t[m]).abs());
                }
            }
        }
    }
    CheckOutcome::from_bound("partner-involution", worst, 1e-14)
}

fn check_zero_width_reduction() -> CheckOutcome {
    let case = crate::harness::examples::example_smooth_homogeneous();
    let cfg = AssemblyConfig::for_degree(2);
    let matching = match case
        .build(2, 4, false)
        .and_then(|mp| assemble(&mp, &case.spec, &cfg))
    {
        Ok(s) => s,
        Err(e) => return CheckOutcome::fail("zero-width-reduction", e.to_string()),
    };
    let mut relabeled = case.build(2, 4, false).unwrap();
    for &pair in &case.overlap_pairs {
        relabeled.set_pair_kind(pair, PairKind::Overlap);
    }
    let overlap = match assemble(&relabeled, &case.spec, &cfg) {
        Ok(s) => s,
        Err(e) => return CheckOutcome::fail("zero-width-reduction", e.to_string()),
    };
    let scale = matching.matrix.max_abs();
    let mut worst: f64 = 0.0;
    for i in 0..matching.dofs() {
        let (cols, vals) = matching.matrix.row(i);
        for (c, v) in cols.iter().zip(vals) {
            worst = worst.max((v - overlap.matrix.get(i, *c)).abs());
        }
        let (cols_b, vals_b) = overlap.matrix.row(i);
        for (c, v) in cols_b.iter().zip(vals_b) {
            worst = worst.max((v - matching.matrix.get(i, *c)).abs());
        }
    }
    CheckOutcome::from_bound("zero-width-reduction", worst / scale, 1e-12)
}

fn check_manufactured_residuals() -> CheckOutcome {
    let mut rng = SplitMix64::new(109);
    let mut worst: f64 = 0.0;
    let mut worst_case = "";
    for case in ExampleCase::all() {
        let mp = match case.build(2, 4, false) {
            Ok(mp) => mp,
            Err(e) => return CheckOutcome::fail("manufactured-residual", e.to_string()),
        };
        let grad = case.spec.exact_gradient.as_ref().unwrap();
        let f = &case.spec.source;
        let d = mp.dim();
        for sample in 0..100 {
            let patch = sample % mp.num_patches();
            let mut xhat = [0.0; 3];
            for k in 0..d {
                xhat[k] = rng.range(0.1, 0.9);
            }
            let x = mp.patch(patch).map_point(xhat).unwrap();
            let rho = case.spec.diffusion[patch];
            // Richardson-extrapolated central differences of the analytic
            // gradient give div(∇u) to O(δ⁴).
            let delta = 4e-4;
            let mut divergence = 0.0;
            for k in 0..d {
                let central = |dd: f64| -> f64 {
                    let mut plus = x;
                    let mut minus = x;
                    plus[k] += dd;
                    minus[k] -= dd;
                    (grad(plus)[k] - grad(minus)[k]) / (2.0 * dd)
                };
                divergence += (4.0 * central(0.5 * delta) - central(delta)) / 3.0;
            }
            let residual = (f(x) + rho * divergence).abs();
            if residual > worst {
                worst = residual;
                worst_case = case.name;
            }
        }
    }
    let mut outcome = CheckOutcome::from_bound("manufactured-residual", worst, 1e-8);
    outcome.detail = format!("{} (worst on {})", outcome.detail, worst_case);
    outcome
}

fn check_dg_error_accounting() -> CheckOutcome {
    let case = crate::harness::examples::example_smooth_homogeneous();
    let mp = match displaced_example(&case) {
        Ok(mp) => mp,
        Err(e) => return CheckOutcome::fail("dg-error-accounting", e.to_string()),
    };
    let cfg = AssemblyConfig::for_degree(2);
    let system = match assemble(&mp, &case.spec, &cfg) {
        Ok(s) => s,
        Err(e) => return CheckOutcome::fail("dg-error-accounting", e.to_string()),
    };
    let mp = Arc::new(mp);
    let sol = match solve(&mp, &system, SolveOptions::default()) {
        Ok(s) => s,
        Err(e) => return CheckOutcome::fail("dg-error-accounting", e.to_string()),
    };
    let report = match crate::analysis::dg_error(&sol, &case.spec, 4, None) {
        Ok(r) => r,
        Err(e) => return CheckOutcome::fail("dg-error-accounting", e.to_string()),
    };
    let total_sq = report.dg_error * report.dg_error;
    let sum_sq = report.volume_component * report.volume_component
        + report.boundary_component * report.boundary_component
        + report.interface_component * report.interface_component;
    let rel = (total_sq - sum_sq).abs() / total_sq;
    let mut outcome = CheckOutcome::from_bound("dg-error-accounting", rel, 1e-12);
    outcome.detail = format!(
        "dg {:.3e} = (vol {:.3e}, bnd {:.3e}, ifc {:.3e}); {}",
        report.dg_error,
        report.volume_component,
        report.boundary_component,
        report.interface_component,
        outcome.detail
    );
    outcome
}

/// Run the whole invariant suite.
pub fn self_check() -> Vec<CheckOutcome> {
    vec![
        check_partition_of_unity(),
        check_derivative_fd(),
        check_quadrature_exactness(),
        check_jacobian_positivity(),
        check_matrix_symmetry(),
        check_spd(),
        check_partner_involution(),
        check_zero_width_reduction(),
        check_manufactured_residuals(),
        check_dg_error_accounting(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for outcome in self_check() {
            assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
        }
    }
}
