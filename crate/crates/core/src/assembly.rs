//! Assembly of the DG-IGA stiffness matrix and load vector.
//!
//! Per patch the bilinear form contributes `∫ ρ_i ∇u·∇φ dx`; outer Dirichlet
//! faces add Nitsche consistency/penalty terms; interface pairs add the
//! cross-overlap flux coupling. Each face of a pair is visited with its own
//! quadrature, measure and normal, and partner values are obtained through
//! the shared-face-parameter pairing, never by inverting a volume map.
//!
//! Two flux variants are assembled:
//!
//! - `Symmetric` (default): per face a weight-½ form built from the averaged
//!   flux `{ρ∇v}·n` and the jump `v_own - v_partner`, with consistency,
//!   symmetrizing and penalty terms. Every face contribution is symmetric in
//!   (trial, test), so the global matrix is symmetric by construction; the
//!   two face visits of a matching pair sum to the classical SIPG coupling.
//! - `OneSided`: per face the plain interior-penalty form with the owner's
//!   flux against the owner's test function, kept for study.

use std::sync::Arc;

use crate::error::Error;
use crate::geometry::{ElementIter, FaceId, Jacobian, MultiPatch, PairSide, Patch, Side};
use crate::quadrature::{cell_points, QuadRule};
use crate::sparse::{CsrMatrix, TripletList};
use crate::util::{cross, dot, norm, scale, Vec3};
use crate::Result;

/// Scalar field on physical points.
pub type ScalarField = Arc<dyn Fn(Vec3) -> f64 + Send + Sync>;
/// Vector field on physical points.
pub type VectorField = Arc<dyn Fn(Vec3) -> Vec3 + Send + Sync>;

/// Data of the diffusion problem `-div(ρ ∇u) = f`, `u = u_D` on the outer
/// boundary, with patch-wise constant `ρ`.
#[derive(Clone)]
pub struct ProblemSpec {
    /// One positive diffusion constant per patch.
    pub diffusion: Vec<f64>,
    pub source: ScalarField,
    pub dirichlet_value: ScalarField,
    /// Exact solution, when known (manufactured cases).
    pub exact: Option<ScalarField>,
    /// Exact physical gradient, when known.
    pub exact_gradient: Option<VectorField>,
}

impl ProblemSpec {
    pub fn validate(&self, mp: &MultiPatch) -> Result<()> {
        if self.diffusion.len() != mp.num_patches() {
            return Err(Error::Config(format!(
                "{} diffusion constants for {} patches",
                self.diffusion.len(),
                mp.num_patches()
            )));
        }
        if self.diffusion.iter().any(|&r| r <= 0.0) {
            return Err(Error::Config("diffusion must be positive".into()));
        }
        Ok(())
    }
}

/// Interface/boundary flux treatment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FluxVariant {
    Symmetric,
    OneSided,
}

/// Assembly controls.
#[derive(Clone, Copy, Debug)]
pub struct AssemblyConfig {
    /// Penalty η; must exceed a mesh-independent threshold for coercivity.
    pub penalty: f64,
    pub variant: FluxVariant,
    /// Gauss points per direction.
    pub quadrature: usize,
}

impl AssemblyConfig {
    /// Defaults for degree `p`: η = 4 (p+1)², symmetric fluxes, p+1 points.
    pub fn for_degree(p: usize) -> Self {
        Self {
            penalty: 4.0 * ((p + 1) * (p + 1)) as f64,
            variant: FluxVariant::Symmetric,
            quadrature: p + 1,
        }
    }
}

/// Assembled sparse system with the per-patch DOF offsets.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// `offsets[i]..offsets[i+1]` are patch i's coefficients.
    pub offsets: Vec<usize>,
}

impl LinearSystem {
    pub fn dofs(&self) -> usize {
        self.matrix.dim()
    }

    /// Coordinate-format text dump (`row col value`, 0-based) for external
    /// verification.
    pub fn write_matrix(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut writer = std::io::BufWriter::new(file);
        self.matrix.write_coo(&mut writer)?;
        Ok(())
    }
}

/// Normal and measure of a face from an already-computed volume Jacobian.
fn face_normal_measure(jac: &Jacobian, face: FaceId, dim: usize) -> Result<(Vec3, f64)> {
    let column = |b: usize| -> Vec3 { [jac.matrix[0][b], jac.matrix[1][b], jac.matrix[2][b]] };
    let tang = face.tangential_dirs(dim);
    let (raw, measure) = match dim {
        2 => {
            let v = column(tang[0]);
            ([v[1], -v[0], 0.0], norm(v))
        }
        3 => {
            let n = cross(column(tang[0]), column(tang[1]));
            (n, norm(n))
        }
        _ => return Err(Error::InvalidArgument("assembly supports 2D and 3D".into())),
    };
    if measure < 1e-12 {
        return Err(Error::SingularGeometry {
            patch: face.patch,
            point: [0.0; 3],
            det: measure,
        });
    }
    let mut normal = scale(raw, 1.0 / norm(raw));
    let want_positive = matches!(face.side, Side::Hi);
    if (dot(normal, column(face.dir)) > 0.0) != want_positive {
        normal = scale(normal, -1.0);
    }
    Ok((normal, measure))
}

/// All tensor cells spanned by per-direction breakpoint lists.
fn cells_from_breakpoints(breaks: &[Vec<f64>]) -> Vec<Vec<(f64, f64)>> {
    let counts: Vec<usize> = breaks.iter().map(|b| b.len().saturating_sub(1)).collect();
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

/// Evaluated trial/test data of one patch at one quadrature point.
struct LocalBasis {
    globals: Vec<usize>,
    values: Vec<f64>,
    phys_grads: Vec<Vec3>,
    point: Vec3,
    jac: Jacobian,
}

fn local_basis(patch: &Patch, offset: usize, xhat: Vec3) -> Result<LocalBasis> {
    let space = patch.space();
    let basis = space.eval(xhat, 1)?;
    let jac = patch.jacobian_from_basis(&basis, xhat)?;
    let nloc = basis.len();
    let mut globals = Vec::with_capacity(nloc);
    let mut phys_grads = Vec::with_capacity(nloc);
    let mut point = [0.0; 3];
    for local in 0..nloc {
        globals.push(offset + basis.global_index(space, local));
        phys_grads.push(jac.to_physical_gradient(basis.grads[local]));
        let c = patch.control_points()[basis.global_index(space, local)];
        for k in 0..3 {
            point[k] += c[k] * basis.values[local];
        }
    }
    Ok(LocalBasis {
        globals,
        values: basis.values,
        phys_grads,
        point,
        jac,
    })
}

struct Assembler<'a> {
    mp: &'a MultiPatch,
    spec: &'a ProblemSpec,
    cfg: &'a AssemblyConfig,
    rule: QuadRule,
    offsets: Vec<usize>,
    patch_h: Vec<f64>,
    triplets: TripletList,
    rhs: Vec<f64>,
}

impl<'a> Assembler<'a> {
    fn new(mp: &'a MultiPatch, spec: &'a ProblemSpec, cfg: &'a AssemblyConfig) -> Result<Self> {
        spec.validate(mp)?;
        if cfg.penalty <= 0.0 {
            return Err(Error::Config("penalty must be positive".into()));
        }
        let rule = QuadRule::gauss(cfg.quadrature)?;
        let mut offsets = vec![0usize];
        for patch in mp.patches() {
            offsets.push(offsets.last().unwrap() + patch.space().num_basis());
        }
        let n = *offsets.last().unwrap();
        Ok(Self {
            mp,
            spec,
            cfg,
            rule,
            offsets,
            patch_h: mp.patch_mesh_sizes(),
            triplets: TripletList::new(n),
            rhs: vec![0.0; n],
        })
    }

    fn volume(&mut self, patch_index: usize) -> Result<()> {
        let patch = self.mp.patch(patch_index);
        let rho = self.spec.diffusion[patch_index];
        let offset = self.offsets[patch_index];
        let spans = patch.space().element_spans();
        for elem in ElementIter::new(&spans) {
            let cell: Vec<(f64, f64)> = elem.iter().map(|s| (s.lo, s.hi)).collect();
            let points = cell_points(&cell, &self.rule);
            let mut globals: Option<Vec<usize>> = None;
            let mut local_mat: Vec<f64> = Vec::new();
            let mut local_rhs: Vec<f64> = Vec::new();
            for (xhat, w) in points {
                let lb = local_basis(patch, offset, xhat).map_err(|e| match e {
                    Error::SingularGeometry { point, det, .. } => Error::SingularGeometry {
                        patch: patch_index,
                        point,
                        det,
                    },
                    other => other,
                })?;
                if lb.jac.det <= 0.0 {
                    return Err(Error::SingularGeometry {
                        patch: patch_index,
                        point: xhat,
                        det: lb.jac.det,
                    });
                }
                let nloc = lb.globals.len();
                if globals.is_none() {
                    globals = Some(lb.globals.clone());
                    local_mat = vec![0.0; nloc * nloc];
                    local_rhs = vec![0.0; nloc];
                }
                debug_assert_eq!(globals.as_ref().unwrap(), &lb.globals);
                let weight = w * lb.jac.det;
                let fval = (self.spec.source)(lb.point);
                for a in 0..nloc {
                    local_rhs[a] += weight * fval * lb.values[a];
                    let ga = &lb.phys_grads[a];
                    for b in 0..nloc {
                        local_mat[a * nloc + b] += weight * rho * dot(*ga, lb.phys_grads[b]);
                    }
                }
            }
            if let Some(globals) = globals {
                let nloc = globals.len();
                for a in 0..nloc {
                    self.rhs[globals[a]] += local_rhs[a];
                    for b in 0..nloc {
                        self.triplets
                            .push(globals[a], globals[b], local_mat[a * nloc + b]);
                    }
                }
            }
        }
        Ok(())
    }

    fn dirichlet_face(&mut self, face: FaceId) -> Result<()> {
        let patch = self.mp.patch(face.patch);
        let rho = self.spec.diffusion[face.patch];
        let offset = self.offsets[face.patch];
        let dim = self.mp.dim();
        let pen = self.cfg.penalty * rho / self.patch_h[face.patch];
        let symmetric = self.cfg.variant == FluxVariant::Symmetric;
        for cell in cells_from_breakpoints(&patch.face_breakpoints(face)) {
            let mut globals: Option<Vec<usize>> = None;
            let mut local_mat: Vec<f64> = Vec::new();
            let mut local_rhs: Vec<f64> = Vec::new();
            for (t, w) in cell_points(&cell, &self.rule) {
                let xhat = face.embed(&t[..dim - 1], dim);
                let lb = local_basis(patch, offset, xhat)?;
                let (normal, measure) = face_normal_measure(&lb.jac, face, dim)?;
                let ds = w * measure;
                let g_dirichlet = (self.spec.dirichlet_value)(lb.point);
                let nloc = lb.globals.len();
                if globals.is_none() {
                    globals = Some(lb.globals.clone());
                    local_mat = vec![0.0; nloc * nloc];
                    local_rhs = vec![0.0; nloc];
                }
                debug_assert_eq!(globals.as_ref().unwrap(), &lb.globals);
                let fluxes: Vec<f64> = lb
                    .phys_grads
                    .iter()
                    .map(|g| rho * dot(*g, normal))
                    .collect();
                for a in 0..nloc {
                    let va = lb.values[a];
                    local_rhs[a] += ds * pen * g_dirichlet * va;
                    if symmetric {
                        local_rhs[a] -= ds * fluxes[a] * g_dirichlet;
                    }
                    for b in 0..nloc {
                        let mut entry = -fluxes[b] * va + pen * va * lb.values[b];
                        if symmetric {
                            entry -= fluxes[a] * lb.values[b];
                        }
                        local_mat[a * nloc + b] += ds * entry;
                    }
                }
            }
            if let Some(globals) = globals {
                let nloc = globals.len();
                for a in 0..nloc {
                    self.rhs[globals[a]] += local_rhs[a];
                    for b in 0..nloc {
                        self.triplets
                            .push(globals[a], globals[b], local_mat[a * nloc + b]);
                    }
                }
            }
        }
        Ok(())
    }

    fn interface_side(&mut self, pair_index: usize, side: PairSide) -> Result<()> {
        let dim = self.mp.dim();
        let (owner_face, partner_face) = self.mp.pair_faces(pair_index, side)?;
        let own_patch = self.mp.patch(owner_face.patch);
        let par_patch = self.mp.patch(partner_face.patch);
        let rho_own = self.spec.diffusion[owner_face.patch];
        let rho_par = self.spec.diffusion[partner_face.patch];
        let rho_avg = 0.5 * (rho_own + rho_par);
        let h_pair = self.patch_h[owner_face.patch].max(self.patch_h[partner_face.patch]);
        let pen = self.cfg.penalty * rho_avg / h_pair;
        let breaks = self.mp.interface_breakpoints(pair_index, side)?;
        for cell in cells_from_breakpoints(&breaks) {
            let mut globals: Option<Vec<usize>> = None;
            let mut local_mat: Vec<f64> = Vec::new();
            for (t, w) in cell_points(&cell, &self.rule) {
                let t_own = &t[..dim - 1];
                let xhat_own = owner_face.embed(t_own, dim);
                let own = local_basis(own_patch, self.offsets[owner_face.patch], xhat_own)?;
                let (normal, measure) = face_normal_measure(&own.jac, owner_face, dim)?;
                let (_, _, xhat_par) = self.mp.partner_point(pair_index, side, t_own)?;
                let par = local_basis(par_patch, self.offsets[partner_face.patch], xhat_par)?;
                let ds = w * measure;

                let n_own = own.globals.len();
                let n_par = par.globals.len();
                let nloc = n_own + n_par;
                if globals.is_none() {
                    let mut g = own.globals.clone();
                    g.extend_from_slice(&par.globals);
                    globals = Some(g);
                    local_mat = vec![0.0; nloc * nloc];
                }

                match self.cfg.variant {
                    FluxVariant::Symmetric => {
                        // Jump v_own - v_partner and average flux ½(ρ∇v)·n
                        // over the combined local set; each face carries half
                        // of the coupling so the pair sums to full strength.
                        let mut jump = Vec::with_capacity(nloc);
                        let mut avg_flux = Vec::with_capacity(nloc);
                        for a in 0..n_own {
                            jump.push(own.values[a]);
                            avg_flux.push(0.5 * rho_own * dot(own.phys_grads[a], normal));
                        }
                        for a in 0..n_par {
                            jump.push(-par.values[a]);
                            avg_flux.push(0.5 * rho_par * dot(par.phys_grads[a], normal));
                        }
                        let half_ds = 0.5 * ds;
                        for a in 0..nloc {
                            for b in 0..nloc {
                                local_mat[a * nloc + b] += half_ds
                                    * (-avg_flux[b] * jump[a] - avg_flux[a] * jump[b]
                                        + pen * jump[a] * jump[b]);
                            }
                        }
                    }
                    FluxVariant::OneSided => {
                        // Owner flux against owner test, full-strength jump
                        // penalty; the analyzed plain interior-penalty form.
                        for a in 0..n_own {
                            let va = own.values[a];
                            for b in 0..n_own {
                                let flux_b = rho_own * dot(own.phys_grads[b], normal);
                                local_mat[a * nloc + b] +=
                                    ds * (-flux_b * va + pen * own.values[b] * va);
                            }
                            for b in 0..n_par {
                                local_mat[a * nloc + n_own + b] -= ds * pen * par.values[b] * va;
                            }
                        }
                    }
                }
            }
            if let Some(globals) = globals {
                let nloc = globals.len();
                for a in 0..nloc {
                    for b in 0..nloc {
                        let v = local_mat[a * nloc + b];
                        if v != 0.0 {
                            self.triplets.push(globals[a], globals[b], v);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn finish(self) -> LinearSystem {
        LinearSystem {
            matrix: self.triplets.to_csr(),
            rhs: self.rhs,
            offsets: self.offsets,
        }
    }
}

/// Assemble the complete DG system for a multipatch problem.
pub fn assemble(mp: &MultiPatch, spec: &ProblemSpec, cfg: &AssemblyConfig) -> Result<LinearSystem> {
    let mut asm = Assembler::new(mp, spec, cfg)?;
    for i in 0..mp.num_patches() {
        asm.volume(i)?;
    }
    for face in mp.dirichlet_faces() {
        asm.dirichlet_face(*face)?;
    }
    for pair_index in 0..mp.interfaces().len() {
        asm.interface_side(pair_index, PairSide::A)?;
        asm.interface_side(pair_index, PairSide::B)?;
    }
    Ok(asm.finish())
}

/// Volume-only stiffness and load of a single patch (no boundary terms);
/// exposed for operator-level verification.
pub fn volume_stiffness(
    patch: &Patch,
    rho: f64,
    source: &ScalarField,
    quadrature: usize,
) -> Result<(CsrMatrix, Vec<f64>)> {
    let rule = QuadRule::gauss(quadrature)?;
    let n = patch.space().num_basis();
    let mut triplets = TripletList::new(n);
    let mut rhs = vec![0.0; n];
    let spans = patch.space().element_spans();
    for elem in ElementIter::new(&spans) {
        let cell: Vec<(f64, f64)> = elem.iter().map(|s| (s.lo, s.hi)).collect();
        for (xhat, w) in cell_points(&cell, &rule) {
            let lb = local_basis(patch, 0, xhat)?;
            let weight = w * lb.jac.det;
            let fval = source(lb.point);
            for a in 0..lb.globals.len() {
                rhs[lb.globals[a]] += weight * fval * lb.values[a];
                for b in 0..lb.globals.len() {
                    triplets.push(
                        lb.globals[a],
                        lb.globals[b],
                        weight * rho * dot(lb.phys_grads[a], lb.phys_grads[b]),
                    );
                }
            }
        }
    }
    Ok((triplets.to_csr(), rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bspline::{KnotVector, TensorSpace};
    use crate::geometry::{InterfacePair, Orientation, PairKind};
    use crate::util::SplitMix64;

    fn constant(value: f64) -> ScalarField {
        Arc::new(move |_| value)
    }

    fn unit_square_space(degree: usize, spans: usize) -> TensorSpace {
        TensorSpace::new(vec![
            KnotVector::open_uniform(degree, spans),
            KnotVector::open_uniform(degree, spans),
        ])
        .unwrap()
    }

    /// Two unit squares glued along x = 1 with all outer faces Dirichlet.
    fn two_squares(degree: usize, spans: usize, kind: PairKind) -> MultiPatch {
        let left = Patch::identity(unit_square_space(degree, spans));
        let right = Patch::from_map(unit_square_space(degree, spans), |x| {
            [x[0] + 1.0, x[1], 0.0]
        });
        let mut pair = InterfacePair::matching(
            FaceId::new(0, 0, Side::Hi),
            FaceId::new(1, 0, Side::Lo),
            Orientation::identity(1),
        );
        pair.kind = kind;
        let mut dirichlet = vec![FaceId::new(0, 0, Side::Lo), FaceId::new(1, 0, Side::Hi)];
        for p in 0..2 {
            dirichlet.push(FaceId::new(p, 1, Side::Lo));
            dirichlet.push(FaceId::new(p, 1, Side::Hi));
        }
        MultiPatch::new(vec![left, right], vec![pair], dirichlet).unwrap()
    }

    fn simple_spec(patches: usize) -> ProblemSpec {
        ProblemSpec {
            diffusion: vec![1.0; patches],
            source: constant(1.0),
            dirichlet_value: constant(0.0),
            exact: None,
            exact_gradient: None,
        }
    }

    #[test]
    fn q1_element_stiffness() {
        // One bilinear element on the unit square: diagonal 2/3,
        // edge-neighbor -1/6, opposite corner -1/3.
        let patch = Patch::identity(unit_square_space(1, 1));
        let (matrix, _) = volume_stiffness(&patch, 1.0, &constant(0.0), 2).unwrap();
        let expect = [
            [2.0 / 3.0, -1.0 / 6.0, -1.0 / 6.0, -1.0 / 3.0],
            [-1.0 / 6.0, 2.0 / 3.0, -1.0 / 3.0, -1.0 / 6.0],
            [-1.0 / 6.0, -1.0 / 3.0, 2.0 / 3.0, -1.0 / 6.0],
            [-1.0 / 3.0, -1.0 / 6.0, -1.0 / 6.0, 2.0 / 3.0],
        ];
        for a in 0..4 {
            for b in 0..4 {
                assert!(
                    (matrix.get(a, b) - expect[a][b]).abs() < 1e-14,
                    "K[{}][{}] = {} expected {}",
                    a,
                    b,
                    matrix.get(a, b),
                    expect[a][b]
                );
            }
        }
    }

    #[test]
    fn unit_load_sums_to_domain_measure() {
        let patch = Patch::identity(unit_square_space(2, 3));
        let (_, rhs) = volume_stiffness(&patch, 1.0, &constant(1.0), 3).unwrap();
        let sum: f64 = rhs.iter().sum();
        assert!((sum - 1.0).abs() < 1e-13);
    }

    #[test]
    fn volume_energy_matches_overkill_quadrature() {
        // v^T A v against an independently coded quadrature loop for
        // ∫ ρ |∇v_h|² on a curved patch. Both sides use the saturated
        // overkill rule (p + 4 points) so the comparison isolates the
        // assembly machinery from quadrature error of the curved geometry.
        let degree = 2;
        let space = unit_square_space(degree, 3);
        let base = Patch::identity(space.clone());
        let cps: Vec<Vec3> = base
            .control_points()
            .iter()
            .map(|&c| {
                [
                    c[0] + 0.07 * (std::f64::consts::PI * c[1]).sin(),
                    c[1] - 0.05 * (std::f64::consts::PI * c[0]).cos() * c[1],
                    0.0,
                ]
            })
            .collect();
        let patch = Patch::new(space.clone(), cps).unwrap();
        let rho = 1.7;
        let (matrix, _) = volume_stiffness(&patch, rho, &constant(0.0), degree + 4).unwrap();

        let mut rng = SplitMix64::new(12);
        let v: Vec<f64> = (0..space.num_basis())
            .map(|_| rng.range(-1.0, 1.0))
            .collect();
        let mut av = vec![0.0; v.len()];
        matrix.mul_vec(&v, &mut av);
        let quadratic: f64 = v.iter().zip(&av).map(|(a, b)| a * b).sum();

        let rule = QuadRule::gauss(degree + 4).unwrap();
        let spans = space.element_spans();
        let mut overkill = 0.0;
        for elem in ElementIter::new(&spans) {
            let cell: Vec<(f64, f64)> = elem.iter().map(|s| (s.lo, s.hi)).collect();
            for (xhat, w) in cell_points(&cell, &rule) {
                let basis = space.eval(xhat, 1).unwrap();
                let jac = patch.jacobian_from_basis(&basis, xhat).unwrap();
                let mut grad = [0.0; 3];
                for local in 0..basis.len() {
                    let c = v[basis.global_index(&space, local)];
                    for k in 0..3 {
                        grad[k] += c * basis.grads[local][k];
                    }
                }
                let phys = jac.to_physical_gradient(grad);
                overkill += w * jac.det * rho * dot(phys, phys);
            }
        }
        assert!(
            (quadratic - overkill).abs() <= 1e-10 * overkill.abs(),
            "{} vs {}",
            quadratic,
            overkill
        );
    }

    #[test]
    fn zero_dirichlet_data_gives_zero_rhs() {
        let mp = two_squares(2, 2, PairKind::Matching);
        let spec = ProblemSpec {
            source: constant(0.0),
            ..simple_spec(2)
        };
        let system = assemble(&mp, &spec, &AssemblyConfig::for_degree(2)).unwrap();
        assert!(system.rhs.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn symmetric_variant_is_symmetric() {
        let mp = two_squares(2, 3, PairKind::Matching)
            .make_overlap(0, 0.07)
            .unwrap();
        let spec = ProblemSpec {
            diffusion: vec![1.3, 0.6],
            ..simple_spec(2)
        };
        let system = assemble(&mp, &spec, &AssemblyConfig::for_degree(2)).unwrap();
        assert!(system.matrix.max_asymmetry() <= 1e-12 * system.matrix.max_abs());
    }

    #[test]
    fn one_sided_variant_is_not_symmetric() {
        let mp = two_squares(2, 3, PairKind::Matching);
        let mut cfg = AssemblyConfig::for_degree(2);
        cfg.variant = FluxVariant::OneSided;
        let system = assemble(&mp, &simple_spec(2), &cfg).unwrap();
        assert!(system.matrix.max_asymmetry() > 1e-6 * system.matrix.max_abs());
    }

    #[test]
    fn zero_width_overlap_equals_matching_assembly() {
        let spec = ProblemSpec {
            diffusion: vec![2.0, 0.5],
            ..simple_spec(2)
        };
        let cfg = AssemblyConfig::for_degree(2);
        let matching = assemble(&two_squares(2, 3, PairKind::Matching), &spec, &cfg).unwrap();
        let overlap = assemble(&two_squares(2, 3, PairKind::Overlap), &spec, &cfg).unwrap();
        let scale = matching.matrix.max_abs();
        for i in 0..matching.dofs() {
            let (cols, vals) = matching.matrix.row(i);
            for (c, v) in cols.iter().zip(vals) {
                assert!((v - overlap.matrix.get(i, *c)).abs() <= 1e-12 * scale);
            }
            let (cols_o, _) = overlap.matrix.row(i);
            assert_eq!(cols, cols_o);
        }
    }

    #[test]
    fn sparsity_bound() {
        let degree = 2;
        let mp = two_squares(degree, 4, PairKind::Matching)
            .make_overlap(0, 0.05)
            .unwrap();
        let system = assemble(&mp, &simple_spec(2), &AssemblyConfig::for_degree(degree)).unwrap();
        let bound = 2 * (2 * degree + 1).pow(2);
        assert!(
            system.matrix.max_row_nnz() <= bound,
            "{} rows exceed {}",
            system.matrix.max_row_nnz(),
            bound
        );
    }

    #[test]
    fn spd_with_default_penalty() {
        let mp = two_squares(2, 2, PairKind::Matching)
            .make_overlap(0, 0.1)
            .unwrap();
        let system = assemble(&mp, &simple_spec(2), &AssemblyConfig::for_degree(2)).unwrap();
        let dense = system.matrix.to_dense();
        assert!(crate::solver::dense_cholesky(&dense).is_ok());
        let lambda_min = crate::solver::smallest_eigenvalue_estimate(&system.matrix, 40).unwrap();
        assert!(lambda_min > 0.0);
    }

    #[test]
    fn rejects_bad_spec() {
        let mp = two_squares(1, 1, PairKind::Matching);
        let mut spec = simple_spec(2);
        spec.diffusion = vec![1.0];
        assert!(assemble(&mp, &spec, &AssemblyConfig::for_degree(1)).is_err());
        let mut spec = simple_spec(2);
        spec.diffusion = vec![1.0, -2.0];
        assert!(assemble(&mp, &spec, &AssemblyConfig::for_degree(1)).is_err());
    }
}
