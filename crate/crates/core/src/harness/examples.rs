//! Built-in manufactured-solution example problems.
//!
//! Each case carries a geometry builder (per refinement level), the exact
//! solution with its gradient, the patch-wise diffusion pattern and the
//! analytically derived source. Overlaps are created later by the driver,
//! which displaces the listed interface pairs.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::assembly::ProblemSpec;
use crate::bspline::{KnotVector, TensorSpace};
use crate::error::Error;
use crate::geometry::{FaceId, InterfacePair, MultiPatch, Orientation, Patch, Side};
use crate::util::Vec3;
use crate::Result;

type Builder = fn(degree: usize, elements: usize, non_matching: bool) -> Result<MultiPatch>;

/// A named example problem.
#[derive(Clone)]
pub struct ExampleCase {
    pub name: &'static str,
    pub dim: usize,
    /// Interface pairs the overlap driver displaces, in displacement order.
    pub overlap_pairs: Vec<usize>,
    pub spec: ProblemSpec,
    builder: Builder,
}

impl ExampleCase {
    /// Geometry at `elements` spans per direction per patch, with matching
    /// interfaces. `non_matching` refines the first patch once more.
    pub fn build(&self, degree: usize, elements: usize, non_matching: bool) -> Result<MultiPatch> {
        (self.builder)(degree, elements, non_matching)
    }

    pub fn by_name(name: &str) -> Result<ExampleCase> {
        match name {
            "smooth" => Ok(example_smooth_homogeneous()),
            "jump-rho" => Ok(example_discontinuous_rho()),
            "multiface" => Ok(example_multiface_overlap()),
            "box3d" => Ok(example_3d()),
            other => Err(Error::Config(format!(
                "unknown example {:?}; available: smooth, jump-rho, multiface, box3d",
                other
            ))),
        }
    }

    pub fn all() -> Vec<ExampleCase> {
        vec![
            example_smooth_homogeneous(),
            example_discontinuous_rho(),
            example_multiface_overlap(),
            example_3d(),
        ]
    }
}

fn square_space(degree: usize, elements: usize) -> TensorSpace {
    TensorSpace::new(vec![
        KnotVector::open_uniform(degree, elements),
        KnotVector::open_uniform(degree, elements),
    ])
    .expect("2D space")
}

/// 2×2 patch grid covering `[x0,x1] × [y0,y1]`, split at the midpoints.
///
/// Patch order: bottom-left, bottom-right, top-left, top-right. Interface
/// pairs: the two vertical ones (displacement moves the right patches left),
/// then the two horizontal ones (displacement moves the top patches down).
fn grid_2x2(
    degree: usize,
    elements: usize,
    non_matching: bool,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
) -> Result<MultiPatch> {
    let xm = 0.5 * (x0 + x1);
    let ym = 0.5 * (y0 + y1);
    let corners = [
        (x0, xm, y0, ym),
        (xm, x1, y0, ym),
        (x0, xm, ym, y1),
        (xm, x1, ym, y1),
    ];
    let mut patches = Vec::with_capacity(4);
    for (i, &(ax, bx, ay, by)) in corners.iter().enumerate() {
        let spans = if non_matching && i == 0 {
            elements * 2
        } else {
            elements
        };
        let space = square_space(degree, spans);
        patches.push(Patch::from_map(space, move |s| {
            [ax + (bx - ax) * s[0], ay + (by - ay) * s[1], 0.0]
        }));
    }
    let interfaces = vec![
        // Vertical chain at x = xm.
        InterfacePair::matching(
            FaceId::new(0, 0, Side::Hi),
            FaceId::new(1, 0, Side::Lo),
            Orientation::identity(1),
        ),
        InterfacePair::matching(
            FaceId::new(2, 0, Side::Hi),
            FaceId::new(3, 0, Side::Lo),
            Orientation::identity(1),
        ),
        // Horizontal chain at y = ym.
        InterfacePair::matching(
            FaceId::new(0, 1, Side::Hi),
            FaceId::new(2, 1, Side::Lo),
            Orientation::identity(1),
        ),
        InterfacePair::matching(
            FaceId::new(1, 1, Side::Hi),
            FaceId::new(3, 1, Side::Lo),
            Orientation::identity(1),
        ),
    ];
    let dirichlet = vec![
        FaceId::new(0, 0, Side::Lo),
        FaceId::new(0, 1, Side::Lo),
        FaceId::new(1, 0, Side::Hi),
        FaceId::new(1, 1, Side::Lo),
        FaceId::new(2, 0, Side::Lo),
        FaceId::new(2, 1, Side::Hi),
        FaceId::new(3, 0, Side::Hi),
        FaceId::new(3, 1, Side::Hi),
    ];
    MultiPatch::new(patches, interfaces, dirichlet)
}

/// Smooth solution, homogeneous diffusion (ρ = 1), 2×2 grid on `[0,6]²` with
/// the vertical interface chain marked for overlap. The domain matches the
/// solution's feature lengths (periods 12 and 6), mirroring the large
/// multipatch footprint the formula was designed for.
pub fn example_smooth_homogeneous() -> ExampleCase {
    let u =
        |p: Vec3| (PI * (p[0] + 0.4) / 6.0).sin() * (PI * (p[1] + 0.3) / 3.0).sin() + p[0] + p[1];
    let grad = |p: Vec3| -> Vec3 {
        let sx = (PI * (p[0] + 0.4) / 6.0).sin();
        let cx = (PI * (p[0] + 0.4) / 6.0).cos();
        let sy = (PI * (p[1] + 0.3) / 3.0).sin();
        let cy = (PI * (p[1] + 0.3) / 3.0).cos();
        [PI / 6.0 * cx * sy + 1.0, PI / 3.0 * sx * cy + 1.0, 0.0]
    };
    let laplace_factor = (PI / 6.0) * (PI / 6.0) + (PI / 3.0) * (PI / 3.0);
    let f = move |p: Vec3| {
        laplace_factor * (PI * (p[0] + 0.4) / 6.0).sin() * (PI * (p[1] + 0.3) / 3.0).sin()
    };
    ExampleCase {
        name: "smooth",
        dim: 2,
        overlap_pairs: vec![0, 1],
        spec: ProblemSpec {
            diffusion: vec![1.0; 4],
            source: Arc::new(f),
            dirichlet_value: Arc::new(u),
            exact: Some(Arc::new(u)),
            exact_gradient: Some(Arc::new(grad)),
        },
        builder: |degree, elements, non_matching| {
            grid_2x2(degree, elements, non_matching, 0.0, 6.0, 0.0, 6.0)
        },
    }
}

/// Discontinuous diffusion across x = 0 on `[-1,1] × [0,1]`: ρ = 3π/2 on the
/// left half, ρ = 2 on the right; the solution keeps value and normal flux
/// continuous across the jump. The vertical chain is marked for overlap.
pub fn example_discontinuous_rho() -> ExampleCase {
    const A: f64 = 3.0 * PI / 2.0;
    let u = |p: Vec3| {
        if p[0] < 0.0 {
            (PI * (2.0 * p[0] + p[1])).sin()
        } else {
            (PI * (A * p[0] + p[1])).sin()
        }
    };
    let grad = |p: Vec3| -> Vec3 {
        if p[0] < 0.0 {
            let c = (PI * (2.0 * p[0] + p[1])).cos();
            [2.0 * PI * c, PI * c, 0.0]
        } else {
            let c = (PI * (A * p[0] + p[1])).cos();
            [A * PI * c, PI * c, 0.0]
        }
    };
    let f = |p: Vec3| {
        if p[0] < 0.0 {
            // ρ_L π² (2² + 1) sin(π(2x + y))
            A * PI * PI * 5.0 * (PI * (2.0 * p[0] + p[1])).sin()
        } else {
            2.0 * PI * PI * (A * A + 1.0) * (PI * (A * p[0] + p[1])).sin()
        }
    };
    ExampleCase {
        name: "jump-rho",
        dim: 2,
        overlap_pairs: vec![0, 1],
        spec: ProblemSpec {
            diffusion: vec![A, 2.0, A, 2.0],
            source: Arc::new(f),
            dirichlet_value: Arc::new(u),
            exact: Some(Arc::new(u)),
            exact_gradient: Some(Arc::new(grad)),
        },
        builder: |degree, elements, non_matching| {
            grid_2x2(degree, elements, non_matching, -1.0, 1.0, 0.0, 1.0)
        },
    }
}

/// Overlap region bounded by more than two faces: all four interface pairs
/// of the 2×2 grid on `[0,2]²` are displaced, so the overlap surrounds the
/// central cross point. ρ = 1 globally.
pub fn example_multiface_overlap() -> ExampleCase {
    let u = |p: Vec3| (PI * (p[0] + 0.4)).sin() * (2.0 * PI * (p[1] + 0.3)).sin() + p[0] + p[1];
    let grad = |p: Vec3| -> Vec3 {
        let sx = (PI * (p[0] + 0.4)).sin();
        let cx = (PI * (p[0] + 0.4)).cos();
        let sy = (2.0 * PI * (p[1] + 0.3)).sin();
        let cy = (2.0 * PI * (p[1] + 0.3)).cos();
        [PI * cx * sy + 1.0, 2.0 * PI * sx * cy + 1.0, 0.0]
    };
    let f = |p: Vec3| 5.0 * PI * PI * (PI * (p[0] + 0.4)).sin() * (2.0 * PI * (p[1] + 0.3)).sin();
    ExampleCase {
        name: "multiface",
        dim: 2,
        overlap_pairs: vec![0, 1, 2, 3],
        spec: ProblemSpec {
            diffusion: vec![1.0; 4],
            source: Arc::new(f),
            dirichlet_value: Arc::new(u),
            exact: Some(Arc::new(u)),
            exact_gradient: Some(Arc::new(grad)),
        },
        builder: |degree, elements, non_matching| {
            grid_2x2(degree, elements, non_matching, 0.0, 2.0, 0.0, 2.0)
        },
    }
}

/// Two affine 3D patches meeting at the plane x + y = 0, extruded in z.
///
/// The patches are sheared bands of thickness 2 on either side of the
/// interface plane (x from -1 to 0 along the interface, z in `[0,1]`). The
/// solution branches at the plane with continuous value and normal flux:
/// `sin(π(x+y)/2)` on the lower band (ρ = 1) and `exp(sin(x+y)) - 1` on the
/// upper band (ρ = π/2). The second branch is shifted by -1 so the trace is
/// continuous across the plane.
pub fn example_3d() -> ExampleCase {
    let u = |p: Vec3| {
        let w = p[0] + p[1];
        if w < 0.0 {
            (0.5 * PI * w).sin()
        } else {
            w.sin().exp() - 1.0
        }
    };
    let grad = |p: Vec3| -> Vec3 {
        let w = p[0] + p[1];
        let c = if w < 0.0 {
            0.5 * PI * (0.5 * PI * w).cos()
        } else {
            w.cos() * w.sin().exp()
        };
        [c, c, 0.0]
    };
    let f = |p: Vec3| {
        let w = p[0] + p[1];
        if w < 0.0 {
            0.5 * PI * PI * (0.5 * PI * w).sin()
        } else {
            -PI * (w.cos() * w.cos() - w.sin()) * w.sin().exp()
        }
    };
    ExampleCase {
        name: "box3d",
        dim: 3,
        overlap_pairs: vec![0],
        spec: ProblemSpec {
            diffusion: vec![1.0, PI / 2.0],
            source: Arc::new(f),
            dirichlet_value: Arc::new(u),
            exact: Some(Arc::new(u)),
            exact_gradient: Some(Arc::new(grad)),
        },
        builder: |degree, elements, non_matching| {
            let space = |spans: usize| {
                TensorSpace::new(vec![
                    KnotVector::open_uniform(degree, spans),
                    KnotVector::open_uniform(degree, spans),
                    KnotVector::open_uniform(degree, spans),
                ])
                .expect("3D space")
            };
            let lower_spans = if non_matching { elements * 2 } else { elements };
            let lower = Patch::from_map(space(lower_spans), |s| {
                [-1.0 + s[0], 1.0 - s[0] + 2.0 * (s[1] - 1.0), s[2]]
            });
            let upper = Patch::from_map(space(elements), |s| {
                [-1.0 + s[0], 1.0 - s[0] + 2.0 * s[1], s[2]]
            });
            let interfaces = vec![InterfacePair::matching(
                FaceId::new(0, 1, Side::Hi),
                FaceId::new(1, 1, Side::Lo),
                Orientation::identity(2),
            )];
            let mut dirichlet = Vec::new();
            for patch in 0..2 {
                for dir in 0..3 {
                    for side in [Side::Lo, Side::Hi] {
                        let face = FaceId::new(patch, dir, side);
                        let on_interface = dir == 1
                            && ((patch == 0 && side == Side::Hi)
                                || (patch == 1 && side == Side::Lo));
                        if !on_interface {
                            dirichlet.push(face);
                        }
                    }
                }
            }
            MultiPatch::new(vec![lower, upper], interfaces, dirichlet)
        },
    }
}
