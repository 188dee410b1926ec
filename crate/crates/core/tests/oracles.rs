//! Cross-module oracle tests: independent reference computations checked
//! against the assembled/solved pipeline.

use std::f64::consts::PI;
use std::sync::Arc;

use dgiga::analysis::dg_error;
use dgiga::assembly::{assemble, AssemblyConfig, ProblemSpec, ScalarField};
use dgiga::bspline::{KnotVector, TensorSpace};
use dgiga::geometry::{FaceId, InterfacePair, MultiPatch, Orientation, Patch, Side};
use dgiga::quadrature::{cell_points, QuadRule};
use dgiga::solver::{solve, DiscreteSolution, SolveOptions};
use dgiga::util::{dot, norm, sub, SplitMix64, Vec3};

fn unit_square_space(degree: usize, spans: usize) -> TensorSpace {
    TensorSpace::new(vec![
        KnotVector::open_uniform(degree, spans),
        KnotVector::open_uniform(degree, spans),
    ])
    .unwrap()
}

fn constant(v: f64) -> ScalarField {
    Arc::new(move |_| v)
}

/// Single unit-square patch with full Dirichlet boundary.
fn single_square(degree: usize, spans: usize) -> MultiPatch {
    let patch = Patch::identity(unit_square_space(degree, spans));
    let dirichlet = (0..2)
        .flat_map(|dir| [Side::Lo, Side::Hi].map(|s| FaceId::new(0, dir, s)))
        .collect();
    MultiPatch::new(vec![patch], Vec::new(), dirichlet).unwrap()
}

/// Two axis-aligned patches covering [0,2]x[0,1], glued at x = 1.
fn two_squares(degree: usize, spans: usize) -> MultiPatch {
    let left = Patch::identity(unit_square_space(degree, spans));
    let right = Patch::from_map(unit_square_space(degree, spans), |s| {
        [s[0] + 1.0, s[1], 0.0]
    });
    let pair = InterfacePair::matching(
        FaceId::new(0, 0, Side::Hi),
        FaceId::new(1, 0, Side::Lo),
        Orientation::identity(1),
    );
    let mut dirichlet = vec![FaceId::new(0, 0, Side::Lo), FaceId::new(1, 0, Side::Hi)];
    for p in 0..2 {
        dirichlet.push(FaceId::new(p, 1, Side::Lo));
        dirichlet.push(FaceId::new(p, 1, Side::Hi));
    }
    MultiPatch::new(vec![left, right], vec![pair], dirichlet).unwrap()
}

fn solve_problem(mp: MultiPatch, spec: &ProblemSpec, cfg: &AssemblyConfig) -> DiscreteSolution {
    let system = assemble(&mp, spec, cfg).unwrap();
    let mp = Arc::new(mp);
    solve(&mp, &system, SolveOptions::default()).unwrap()
}

#[test]
fn nitsche_patch_test_reproduces_linears() {
    // Constant rho, exact linear solution: the matching-interface scheme
    // must reproduce it to solver accuracy.
    let u = |p: Vec3| 1.0 + 2.0 * p[0] - 3.0 * p[1];
    let grad = |_: Vec3| -> Vec3 { [2.0, -3.0, 0.0] };
    let spec = ProblemSpec {
        diffusion: vec![2.0, 2.0],
        source: constant(0.0),
        dirichlet_value: Arc::new(u),
        exact: Some(Arc::new(u)),
        exact_gradient: Some(Arc::new(grad)),
    };
    let sol = solve_problem(two_squares(2, 4), &spec, &AssemblyConfig::for_degree(2));
    let report = dg_error(&sol, &spec, 4, None).unwrap();
    assert!(
        report.dg_error < 1e-10,
        "patch test error {}",
        report.dg_error
    );
}

#[test]
fn single_patch_manufactured_solution_rate() {
    // -Δu = 2π² sin(πx) sin(πy) on the unit square with u_D = 0; the L2
    // error decays at O(h^{p+1}).
    let u = |p: Vec3| (PI * p[0]).sin() * (PI * p[1]).sin();
    let grad = |p: Vec3| -> Vec3 {
        [
            PI * (PI * p[0]).cos() * (PI * p[1]).sin(),
            PI * (PI * p[0]).sin() * (PI * p[1]).cos(),
            0.0,
        ]
    };
    let spec = ProblemSpec {
        diffusion: vec![1.0],
        source: Arc::new(|p: Vec3| 2.0 * PI * PI * (PI * p[0]).sin() * (PI * p[1]).sin()),
        dirichlet_value: constant(0.0),
        exact: Some(Arc::new(u)),
        exact_gradient: Some(Arc::new(grad)),
    };
    let cfg = AssemblyConfig::for_degree(2);
    let mut l2 = Vec::new();
    for spans in [8usize, 16, 32] {
        let sol = solve_problem(single_square(2, spans), &spec, &cfg);
        l2.push(dg_error(&sol, &spec, 4, None).unwrap().l2_error);
    }
    for window in l2.windows(2) {
        let rate = (window[0] / window[1]).log2();
        assert!(
            (rate - 3.0).abs() < 0.3,
            "L2 rate {} deviates from p+1 = 3",
            rate
        );
    }
}

#[test]
fn two_patch_baseline_sipg_rate() {
    // Unit square split at x = 0.5, matching interfaces, u = sin(πx)sin(πy):
    // the DG-norm error decays at the classical rate p = 2.
    let degree = 2;
    let u = |p: Vec3| (PI * p[0]).sin() * (PI * p[1]).sin();
    let grad = |p: Vec3| -> Vec3 {
        [
            PI * (PI * p[0]).cos() * (PI * p[1]).sin(),
            PI * (PI * p[0]).sin() * (PI * p[1]).cos(),
            0.0,
        ]
    };
    let spec = ProblemSpec {
        diffusion: vec![1.0, 1.0],
        source: Arc::new(|p: Vec3| 2.0 * PI * PI * (PI * p[0]).sin() * (PI * p[1]).sin()),
        dirichlet_value: constant(0.0),
        exact: Some(Arc::new(u)),
        exact_gradient: Some(Arc::new(grad)),
    };
    let build = |spans: usize| -> MultiPatch {
        let left = Patch::from_map(unit_square_space(degree, spans), |s| {
            [0.5 * s[0], s[1], 0.0]
        });
        let right = Patch::from_map(unit_square_space(degree, spans), |s| {
            [0.5 + 0.5 * s[0], s[1], 0.0]
        });
        let pair = InterfacePair::matching(
            FaceId::new(0, 0, Side::Hi),
            FaceId::new(1, 0, Side::Lo),
            Orientation::identity(1),
        );
        let mut dirichlet = vec![FaceId::new(0, 0, Side::Lo), FaceId::new(1, 0, Side::Hi)];
        for p in 0..2 {
            dirichlet.push(FaceId::new(p, 1, Side::Lo));
            dirichlet.push(FaceId::new(p, 1, Side::Hi));
        }
        MultiPatch::new(vec![left, right], vec![pair], dirichlet).unwrap()
    };
    let cfg = AssemblyConfig::for_degree(degree);
    let mut errors = Vec::new();
    for spans in [8usize, 16, 32] {
        let mp = build(spans);
        let h = mp.mesh_size();
        let sol = solve_problem(mp, &spec, &cfg);
        errors.push(dg_error(&sol, &spec, 4, Some(h)).unwrap().dg_error);
    }
    let rate = (errors[1] / errors[2]).log2();
    assert!((rate - 2.0).abs() < 0.1, "SIPG baseline rate {}", rate);
}

#[test]
fn mono_patch_equivalence() {
    // Two matching patches against the same domain as a single patch: the
    // discrete solutions agree pointwise on a fine mesh.
    let u = |p: Vec3| (PI / 4.0 * (p[0] + 0.3)).sin() * (PI / 4.0 * (p[1] + 0.7)).sin();
    let grad = |p: Vec3| -> Vec3 {
        [
            PI / 4.0 * (PI / 4.0 * (p[0] + 0.3)).cos() * (PI / 4.0 * (p[1] + 0.7)).sin(),
            PI / 4.0 * (PI / 4.0 * (p[0] + 0.3)).sin() * (PI / 4.0 * (p[1] + 0.7)).cos(),
            0.0,
        ]
    };
    let factor = 2.0 * (PI / 4.0) * (PI / 4.0);
    let spec2 = ProblemSpec {
        diffusion: vec![1.0, 1.0],
        source: Arc::new(move |p: Vec3| {
            factor * (PI / 4.0 * (p[0] + 0.3)).sin() * (PI / 4.0 * (p[1] + 0.7)).sin()
        }),
        dirichlet_value: Arc::new(u),
        exact: Some(Arc::new(u)),
        exact_gradient: Some(Arc::new(grad)),
    };
    let spec1 = ProblemSpec {
        diffusion: vec![1.0],
        ..spec2.clone()
    };

    let spans = 64;
    let cfg = AssemblyConfig::for_degree(2);
    let sol_two = solve_problem(two_squares(2, spans), &spec2, &cfg);

    let mono_space = TensorSpace::new(vec![
        KnotVector::open_uniform(2, 2 * spans),
        KnotVector::open_uniform(2, spans),
    ])
    .unwrap();
    let mono_patch = Patch::from_map(mono_space, |s| [2.0 * s[0], s[1], 0.0]);
    let dirichlet = (0..2)
        .flat_map(|dir| [Side::Lo, Side::Hi].map(|s| FaceId::new(0, dir, s)))
        .collect();
    let mono = MultiPatch::new(vec![mono_patch], Vec::new(), dirichlet).unwrap();
    let sol_mono = solve_problem(mono, &spec1, &cfg);

    let mut rng = SplitMix64::new(99);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = rng.range(0.01, 1.99);
        let y = rng.range(0.01, 0.99);
        let v_two = if x < 1.0 {
            sol_two.eval(0, [x, y, 0.0]).unwrap()
        } else {
            sol_two.eval(1, [x - 1.0, y, 0.0]).unwrap()
        };
        let v_mono = sol_mono.eval(0, [0.5 * x, y, 0.0]).unwrap();
        worst = worst.max((v_two - v_mono).abs());
    }
    assert!(worst < 1e-6, "mono-patch disagreement {:.3e}", worst);
}

#[test]
fn mono_patch_equivalence_representable() {
    // Harmonic quadratic representable in the space: both topologies
    // reproduce it, so they agree to solver accuracy.
    let u = |p: Vec3| p[0] * p[0] - p[1] * p[1] + 0.5 * p[0] + p[1];
    let spec2 = ProblemSpec {
        diffusion: vec![1.0, 1.0],
        source: constant(0.0),
        dirichlet_value: Arc::new(u),
        exact: None,
        exact_gradient: None,
    };
    let cfg = AssemblyConfig::for_degree(2);
    let sol = solve_problem(two_squares(2, 8), &spec2, &cfg);
    let mut rng = SplitMix64::new(5);
    for _ in 0..50 {
        let x = rng.range(0.0, 2.0);
        let y = rng.next_f64();
        let v = if x < 1.0 {
            sol.eval(0, [x, y, 0.0]).unwrap()
        } else {
            sol.eval(1, [x - 1.0, y, 0.0]).unwrap()
        };
        assert!((v - u([x, y, 0.0])).abs() < 1e-8);
    }
}

#[test]
fn penalty_limit_drives_boundary_trace() {
    // Increasing η pushes the discrete trace toward the Dirichlet data.
    let g = |p: Vec3| (3.0 * p[0] + p[1]).sin();
    let spec = ProblemSpec {
        diffusion: vec![1.0],
        source: constant(0.0),
        dirichlet_value: Arc::new(g),
        exact: None,
        exact_gradient: None,
    };
    let rule = QuadRule::gauss(5).unwrap();
    let mut errors = Vec::new();
    for eta in [10.0, 100.0, 1000.0] {
        let cfg = AssemblyConfig {
            penalty: eta,
            ..AssemblyConfig::for_degree(2)
        };
        let mp = single_square(2, 4);
        let faces: Vec<FaceId> = mp.dirichlet_faces().to_vec();
        let sol = solve_problem(mp, &spec, &cfg);
        let mp = sol.multipatch().clone();
        let mut trace_sq = 0.0;
        for face in &faces {
            let patch = mp.patch(face.patch);
            for bp in patch.face_breakpoints(*face)[0].windows(2) {
                for (t, w) in cell_points(&[(bp[0], bp[1])], &rule) {
                    let fg = patch.face_geometry(*face, &t[..1]).unwrap();
                    let value = sol.eval(face.patch, face.embed(&t[..1], 2)).unwrap();
                    let diff = value - g(fg.point);
                    trace_sq += w * fg.measure * diff * diff;
                }
            }
        }
        errors.push(trace_sq.sqrt());
    }
    assert!(
        errors[0] > errors[1] && errors[1] > errors[2],
        "trace errors not monotone: {:?}",
        errors
    );
}

#[test]
fn solution_invariant_under_data_scaling() {
    // Multiplying rho and f by the same constant leaves the solution fixed.
    let u = |p: Vec3| (PI * p[0]).sin() * (PI * p[1]).sin();
    let base = ProblemSpec {
        diffusion: vec![1.5, 0.5],
        source: Arc::new(|p: Vec3| (2.0 * p[0] + p[1]).cos()),
        dirichlet_value: Arc::new(u),
        exact: None,
        exact_gradient: None,
    };
    let scaled = ProblemSpec {
        diffusion: base.diffusion.iter().map(|r| 10.0 * r).collect(),
        source: {
            let f = base.source.clone();
            Arc::new(move |p| 10.0 * f(p))
        },
        ..base.clone()
    };
    let cfg = AssemblyConfig::for_degree(2);
    let sol_a = solve_problem(two_squares(2, 6), &base, &cfg);
    let sol_b = solve_problem(two_squares(2, 6), &scaled, &cfg);
    let worst = sol_a
        .coefficients()
        .iter()
        .zip(sol_b.coefficients())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(
        worst < 1e-10,
        "scaling changed the solution by {:.3e}",
        worst
    );
}

#[test]
fn eval_solution_partition_linear_and_gradient() {
    let mp = Arc::new(single_square(2, 3));
    let n = mp.patch(0).space().num_basis();

    // All-ones coefficients give the constant 1.
    let ones = DiscreteSolution::new(mp.clone(), vec![0, n], vec![1.0; n]).unwrap();
    let mut rng = SplitMix64::new(31);
    for _ in 0..50 {
        let p = [rng.next_f64(), rng.next_f64(), 0.0];
        assert!((ones.eval(0, p).unwrap() - 1.0).abs() < 1e-13);
    }

    // Greville x-coordinates reproduce the linear x̂.
    let space = mp.patch(0).space();
    let coeffs: Vec<f64> = (0..n)
        .map(|flat| space.greville(&space.multi_index(flat))[0])
        .collect();
    let linear = DiscreteSolution::new(mp.clone(), vec![0, n], coeffs).unwrap();
    for _ in 0..50 {
        let p = [rng.next_f64(), rng.next_f64(), 0.0];
        assert!((linear.eval(0, p).unwrap() - p[0]).abs() < 1e-12);
    }

    // Gradient against central differences of eval.
    let coeffs: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();
    let sol = DiscreteSolution::new(mp, vec![0, n], coeffs).unwrap();
    let delta = 1e-6;
    for _ in 0..50 {
        let p = [rng.range(0.01, 0.99), rng.range(0.01, 0.99), 0.0];
        let (_, grad) = sol.eval_with_gradient(0, p).unwrap();
        for k in 0..2 {
            let mut plus = p;
            let mut minus = p;
            plus[k] += delta;
            minus[k] -= delta;
            let fd = (sol.eval(0, plus).unwrap() - sol.eval(0, minus).unwrap()) / (2.0 * delta);
            assert!((grad[k] - fd).abs() < 1e-5);
        }
    }
}

#[test]
fn dg_error_representable_solution_vanishes() {
    // Exact solution linear and representable: interpolated coefficients
    // give zero error up to quadrature noise.
    let mp = Arc::new(single_square(2, 4));
    let u = |p: Vec3| 0.25 + 2.0 * p[0] - 0.75 * p[1];
    let grad = |_: Vec3| -> Vec3 { [2.0, -0.75, 0.0] };
    let spec = ProblemSpec {
        diffusion: vec![1.0],
        source: constant(0.0),
        dirichlet_value: Arc::new(u),
        exact: Some(Arc::new(u)),
        exact_gradient: Some(Arc::new(grad)),
    };
    let space = mp.patch(0).space();
    let n = space.num_basis();
    let coeffs: Vec<f64> = (0..n)
        .map(|flat| u(space.greville(&space.multi_index(flat))))
        .collect();
    let sol = DiscreteSolution::new(mp, vec![0, n], coeffs).unwrap();
    let report = dg_error(&sol, &spec, 4, None).unwrap();
    assert!(report.dg_error < 1e-12, "dg error {}", report.dg_error);
    assert!(report.l2_error < 1e-12);
}

#[test]
fn dg_error_constant_offset_closed_form() {
    // u - u_h = c on a unit patch with rho = 1: zero volume part, boundary
    // part c sqrt(perimeter / h), L2 part c.
    let c = 0.7;
    let mp = Arc::new(single_square(2, 4));
    let spec = ProblemSpec {
        diffusion: vec![1.0],
        source: constant(0.0),
        dirichlet_value: constant(c),
        exact: Some(constant(c)),
        exact_gradient: Some(Arc::new(|_| [0.0, 0.0, 0.0])),
    };
    let n = mp.patch(0).space().num_basis();
    let sol = DiscreteSolution::new(mp.clone(), vec![0, n], vec![0.0; n]).unwrap();
    let h = mp.mesh_size();
    let report = dg_error(&sol, &spec, 4, None).unwrap();
    assert!(report.volume_component < 1e-13);
    assert!(report.interface_component == 0.0);
    let expected_boundary = c * (4.0 / h).sqrt();
    assert!(
        (report.boundary_component - expected_boundary).abs() < 1e-10,
        "{} vs {}",
        report.boundary_component,
        expected_boundary
    );
    assert!((report.l2_error - c).abs() < 1e-12);
}

#[test]
fn dg_error_matches_independent_overkill_evaluation() {
    // Random perturbation of interpolated coefficients; the module's error
    // (p+2 points) against an independently coded loop at order 7. Elements
    // fine enough that both rules resolve the smooth exact solution.
    let case = dgiga::harness::example_smooth_homogeneous();
    let mp = case
        .build(2, 8, false)
        .unwrap()
        .make_overlap(0, 0.05)
        .unwrap();
    let mp = mp.make_overlap(1, 0.05).unwrap();
    let mut rng = SplitMix64::new(7);
    let mut offsets = vec![0usize];
    for p in mp.patches() {
        offsets.push(offsets.last().unwrap() + p.space().num_basis());
    }
    let exact = case.spec.exact.clone().unwrap();
    let exact_grad = case.spec.exact_gradient.clone().unwrap();
    let mut coeffs = Vec::new();
    for patch in mp.patches() {
        let space = patch.space();
        for flat in 0..space.num_basis() {
            let g = space.greville(&space.multi_index(flat));
            let x = patch.map_point(g).unwrap();
            coeffs.push(exact(x) + 0.05 * rng.range(-1.0, 1.0));
        }
    }
    let mp = Arc::new(mp);
    let sol = DiscreteSolution::new(mp.clone(), offsets, coeffs).unwrap();
    let report = dg_error(&sol, &case.spec, 4, None).unwrap();

    // Independent evaluation through the public solution/geometry API.
    let rule = QuadRule::gauss(7).unwrap();
    let h = mp.mesh_size();
    let mut vol = 0.0;
    for (pi, patch) in mp.patches().iter().enumerate() {
        let rho = case.spec.diffusion[pi];
        let spans = patch.space().element_spans();
        let cells: Vec<Vec<(f64, f64)>> = spans[0]
            .iter()
            .flat_map(|sx| {
                spans[1]
                    .iter()
                    .map(move |sy| vec![(sx.lo, sx.hi), (sy.lo, sy.hi)])
            })
            .collect();
        for cell in cells {
            for (xhat, w) in cell_points(&cell, &rule) {
                let (_, grad_h) = sol.eval_with_gradient(pi, xhat).unwrap();
                let jac = patch.jacobian(xhat).unwrap();
                let x = patch.map_point(xhat).unwrap();
                let diff = sub(exact_grad(x), grad_h);
                vol += w * jac.det * rho * dot(diff, diff);
            }
        }
    }
    let trace = |face: FaceId, factor: f64| -> f64 {
        let patch = mp.patch(face.patch);
        let breaks = patch.face_breakpoints(face);
        let mut acc = 0.0;
        for bp in breaks[0].windows(2) {
            for (t, w) in cell_points(&[(bp[0], bp[1])], &rule) {
                let fg = patch.face_geometry(face, &t[..1]).unwrap();
                let v = sol.eval(face.patch, face.embed(&t[..1], 2)).unwrap();
                let diff = exact(fg.point) - v;
                acc += w * fg.measure * factor * diff * diff;
            }
        }
        acc
    };
    let mut boundary = 0.0;
    for face in mp.dirichlet_faces() {
        boundary += trace(*face, case.spec.diffusion[face.patch] / h);
    }
    let mut interface = 0.0;
    for pair in mp.interfaces() {
        let avg = 0.5 * (case.spec.diffusion[pair.a.patch] + case.spec.diffusion[pair.b.patch]);
        interface += trace(pair.a, avg / h);
        interface += trace(pair.b, avg / h);
    }
    let reference = (vol + boundary + interface).sqrt();
    assert!(
        (report.dg_error - reference).abs() <= 1e-9 * reference,
        "{} vs {}",
        report.dg_error,
        reference
    );
}

#[test]
fn discrete_solution_is_z_independent_for_extruded_case() {
    // The 3D example's data has no z-dependence; on the study's finest mesh
    // the discrete solution carries almost none either.
    let case = dgiga::harness::example_3d();
    let mp = case.build(2, 16, false).unwrap();
    let d_o = mp.parametric_mesh_size().powi(3);
    let mp = mp.make_overlap(0, d_o).unwrap();
    let cfg = AssemblyConfig::for_degree(2);
    let system = assemble(&mp, &case.spec, &cfg).unwrap();
    let mp = Arc::new(mp);
    let sol = solve(&mp, &system, SolveOptions::default()).unwrap();
    let rule = QuadRule::gauss(3).unwrap();
    let mut z_deriv_sq = 0.0;
    for pi in 0..mp.num_patches() {
        let patch = mp.patch(pi);
        let spans = patch.space().element_spans();
        for sx in &spans[0] {
            for sy in &spans[1] {
                for sz in &spans[2] {
                    let cell = vec![(sx.lo, sx.hi), (sy.lo, sy.hi), (sz.lo, sz.hi)];
                    for (xhat, w) in cell_points(&cell, &rule) {
                        let (_, grad) = sol.eval_with_gradient(pi, xhat).unwrap();
                        let jac = patch.jacobian(xhat).unwrap();
                        z_deriv_sq += w * jac.det * grad[2] * grad[2];
                    }
                }
            }
        }
    }
    let z_norm = z_deriv_sq.sqrt();
    assert!(z_norm < 1e-3, "z-derivative norm {}", z_norm);
}

#[test]
fn matrix_dump_is_parseable() {
    let mp = two_squares(1, 2);
    let spec = ProblemSpec {
        diffusion: vec![1.0, 1.0],
        source: constant(1.0),
        dirichlet_value: constant(0.0),
        exact: None,
        exact_gradient: None,
    };
    let system = assemble(&mp, &spec, &AssemblyConfig::for_degree(1)).unwrap();
    let dir = std::env::temp_dir().join("dgiga_matrix_dump_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("matrix.txt");
    system.write_matrix(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut count = 0;
    for line in text.lines() {
        let fields: Vec<&str> = line.split(' ').collect();
        assert_eq!(fields.len(), 3);
        let r: usize = fields[0].parse().unwrap();
        let c: usize = fields[1].parse().unwrap();
        let v: f64 = fields[2].parse().unwrap();
        assert!(r < system.dofs() && c < system.dofs());
        assert_eq!(v, system.matrix.get(r, c));
        count += 1;
    }
    assert_eq!(count, system.matrix.nnz());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn geometry_file_roundtrip_through_solver() {
    // Serialize a displaced geometry, read it back, and check the pairing
    // still works across the loaded interfaces.
    let case = dgiga::harness::example_smooth_homogeneous();
    let mp = case
        .build(2, 4, false)
        .unwrap()
        .make_overlap(0, 0.05)
        .unwrap();
    let text = dgiga::geometry::to_json_string(&mp);
    let loaded = dgiga::geometry::from_json_str(&text).unwrap();
    assert_eq!(loaded.num_patches(), mp.num_patches());
    let w_orig = mp.overlap_width(0, 40).unwrap();
    let w_loaded = loaded.overlap_width(0, 40).unwrap();
    assert!((w_orig - w_loaded).abs() < 1e-12);
    for (a, b) in mp.patches().iter().zip(loaded.patches()) {
        for (ca, cb) in a.control_points().iter().zip(b.control_points()) {
            assert!(norm(sub(*ca, *cb)) < 1e-15);
        }
    }
}
