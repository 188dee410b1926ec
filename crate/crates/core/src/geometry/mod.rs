//! Patch parametrizations, Jacobians and multipatch topology.
//!
//! A patch maps the unit cube to the physical domain through its control
//! points. A multipatch bundles patches with their interface pairs (matching
//! or overlapping) and the outer Dirichlet faces. Overlaps are created by
//! displacing the interface layer of control points of one side; points on
//! the two faces of an overlap are paired by a shared face parameter plus an
//! orientation map, never by inverting a volume parametrization.

mod file;

pub use file::{from_json_str, read_geometry, to_json_string, write_geometry};

use crate::bspline::{Span, TensorBasis, TensorSpace};
use crate::error::Error;
use crate::quadrature::{cell_points, merge_breakpoints, QuadRule};
use crate::util::{add, cross, dot, norm, scale, sub, Vec3};
use crate::Result;

/// Which end of a parametric direction a face sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lo,
    Hi,
}

/// One of the `2d` unit-cube faces of a patch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceId {
    pub patch: usize,
    pub dir: usize,
    pub side: Side,
}

impl FaceId {
    pub fn new(patch: usize, dir: usize, side: Side) -> Self {
        Self { patch, dir, side }
    }

    /// Global parametric directions tangential to this face, ascending.
    pub fn tangential_dirs(&self, dim: usize) -> Vec<usize> {
        (0..dim).filter(|&k| k != self.dir).collect()
    }

    /// Fixed parametric coordinate of the face.
    pub fn coord(&self) -> f64 {
        match self.side {
            Side::Lo => 0.0,
            Side::Hi => 1.0,
        }
    }

    /// Embed face parameters into the full parametric cube.
    pub fn embed(&self, t: &[f64], dim: usize) -> Vec3 {
        let mut x = [0.0; 3];
        x[self.dir] = self.coord();
        for (m, &g) in self.tangential_dirs(dim).iter().enumerate() {
            x[g] = t[m];
        }
        x
    }
}

/// Per-tangential-direction flips and an axis permutation taking face-a
/// parameters to face-b parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Orientation {
    pub flip: Vec<bool>,
    pub perm: Vec<usize>,
}

impl Orientation {
    /// Identity orientation for a face of the given tangential dimension.
    pub fn identity(face_dim: usize) -> Self {
        Self {
            flip: vec![false; face_dim],
            perm: (0..face_dim).collect(),
        }
    }

    fn validate(&self, face_dim: usize) -> Result<()> {
        if self.flip.len() != face_dim || self.perm.len() != face_dim {
            return Err(Error::Topology(format!(
                "orientation arrays must have length {}",
                face_dim
            )));
        }
        let mut seen = vec![false; face_dim];
        for &p in &self.perm {
            if p >= face_dim || seen[p] {
                return Err(Error::Topology("perm is not a permutation".into()));
            }
            seen[p] = true;
        }
        Ok(())
    }

    /// Face-a parameters to face-b parameters.
    pub fn apply(&self, t_a: &[f64]) -> Vec<f64> {
        let mut t_b = vec![0.0; t_a.len()];
        for m in 0..t_a.len() {
            t_b[self.perm[m]] = if self.flip[m] { 1.0 - t_a[m] } else { t_a[m] };
        }
        t_b
    }

    /// Face-b parameters back to face-a parameters.
    pub fn apply_inverse(&self, t_b: &[f64]) -> Vec<f64> {
        let mut t_a = vec![0.0; t_b.len()];
        for m in 0..t_b.len() {
            t_a[m] = if self.flip[m] {
                1.0 - t_b[self.perm[m]]
            } else {
                t_b[self.perm[m]]
            };
        }
        t_a
    }
}

/// Matching interfaces coincide pointwise; overlap interfaces bound a strip
/// of positive width.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    Matching,
    Overlap,
}

/// A coupled pair of faces from two patches.
#[derive(Clone, Debug)]
pub struct InterfacePair {
    pub a: FaceId,
    pub b: FaceId,
    pub orientation: Orientation,
    pub kind: PairKind,
    /// Width requested from [`MultiPatch::make_overlap`]; `None` for pairs
    /// that were never displaced (including file-loaded overlaps).
    pub nominal_width: Option<f64>,
}

impl InterfacePair {
    pub fn matching(a: FaceId, b: FaceId, orientation: Orientation) -> Self {
        Self {
            a,
            b,
            orientation,
            kind: PairKind::Matching,
            nominal_width: None,
        }
    }

    /// The two faces as (owner, partner) seen from one side.
    pub fn sides(&self) -> [(FaceId, FaceId); 2] {
        [(self.a, self.b), (self.b, self.a)]
    }
}

/// Geometry of a face at one face-parametric point.
#[derive(Clone, Copy, Debug)]
pub struct FaceGeometry {
    pub point: Vec3,
    /// Unit outward normal of the owning patch.
    pub normal: Vec3,
    /// Surface measure factor (arc length in 2D, area in 3D).
    pub measure: f64,
}

/// Jacobian data of the patch map at one parametric point.
#[derive(Clone, Copy, Debug)]
pub struct Jacobian {
    pub matrix: [[f64; 3]; 3],
    pub det: f64,
    pub inverse: [[f64; 3]; 3],
}

impl Jacobian {
    /// Map a parametric gradient to a physical one: `J^{-T} g`.
    pub fn to_physical_gradient(&self, g: Vec3) -> Vec3 {
        [
            self.inverse[0][0] * g[0] + self.inverse[1][0] * g[1] + self.inverse[2][0] * g[2],
            self.inverse[0][1] * g[0] + self.inverse[1][1] * g[1] + self.inverse[2][1] * g[2],
            self.inverse[0][2] * g[0] + self.inverse[1][2] * g[1] + self.inverse[2][2] * g[2],
        ]
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn inv3(m: &[[f64; 3]; 3], det: f64) -> [[f64; 3]; 3] {
    let inv_det = 1.0 / det;
    let mut inv = [[0.0; 3]; 3];
    inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det;
    inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det;
    inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det;
    inv
}

const SINGULAR_TOL: f64 = 1e-12;

/// A tensor-product B-spline patch: space plus control points in
/// lexicographic order (first direction fastest).
#[derive(Clone, Debug)]
pub struct Patch {
    space: TensorSpace,
    control_points: Vec<Vec3>,
}

impl Patch {
    pub fn new(space: TensorSpace, control_points: Vec<Vec3>) -> Result<Self> {
        if control_points.len() != space.num_basis() {
            return Err(Error::Geometry(format!(
                "control point count {} does not match basis count {}",
                control_points.len(),
                space.num_basis()
            )));
        }
        Ok(Self {
            space,
            control_points,
        })
    }

    /// Control points at the images of the Greville abscissae.
    ///
    /// Reproduces affine maps exactly (linear precision of the basis).
    pub fn from_map(space: TensorSpace, map: impl Fn(Vec3) -> Vec3) -> Self {
        let cps = (0..space.num_basis())
            .map(|flat| map(space.greville(&space.multi_index(flat))))
            .collect();
        Self {
            control_points: cps,
            space,
        }
    }

    /// The identity patch on the unit square/cube.
    pub fn identity(space: TensorSpace) -> Self {
        Self::from_map(space, |x| x)
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn control_points(&self) -> &[Vec3] {
        &self.control_points
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Physical image of a parametric point: `x = Σ_j C_j B_j(x̂)`.
    pub fn map_point(&self, xhat: Vec3) -> Result<Vec3> {
        let basis = self.space.eval(xhat, 0)?;
        let mut x = [0.0; 3];
        for local in 0..basis.len() {
            let c = self.control_points[basis.global_index(&self.space, local)];
            x = add(x, scale(c, basis.values[local]));
        }
        Ok(x)
    }

    /// Jacobian from an already-evaluated basis (must carry gradients).
    pub fn jacobian_from_basis(&self, basis: &TensorBasis, xhat: Vec3) -> Result<Jacobian> {
        let d = self.dim();
        let mut m = [[0.0; 3]; 3];
        for local in 0..basis.len() {
            let c = self.control_points[basis.global_index(&self.space, local)];
            let g = basis.grads[local];
            for a in 0..d {
                for b in 0..d {
                    m[a][b] += c[a] * g[b];
                }
            }
        }
        for k in d..3 {
            m[k][k] = 1.0;
        }
        let det = det3(&m);
        if det.abs() < SINGULAR_TOL {
            return Err(Error::SingularGeometry {
                patch: usize::MAX,
                point: xhat,
                det,
            });
        }
        Ok(Jacobian {
            matrix: m,
            det,
            inverse: inv3(&m, det),
        })
    }

    /// Jacobian matrix, determinant and inverse at a parametric point.
    pub fn jacobian(&self, xhat: Vec3) -> Result<Jacobian> {
        let basis = self.space.eval(xhat, 1)?;
        self.jacobian_from_basis(&basis, xhat)
    }

    /// Physical point, unit outward normal and surface measure on a face.
    pub fn face_geometry(&self, face: FaceId, t: &[f64]) -> Result<FaceGeometry> {
        let d = self.dim();
        let xhat = face.embed(t, d);
        let basis = self.space.eval(xhat, 1)?;
        let jac = self.jacobian_from_basis(&basis, xhat)?;
        let mut point = [0.0; 3];
        for local in 0..basis.len() {
            let c = self.control_points[basis.global_index(&self.space, local)];
            point = add(point, scale(c, basis.values[local]));
        }
        let tang = face.tangential_dirs(d);
        let column = |b: usize| -> Vec3 { [jac.matrix[0][b], jac.matrix[1][b], jac.matrix[2][b]] };
        let (normal_raw, measure) = match d {
            2 => {
                let v = column(tang[0]);
                ([v[1], -v[0], 0.0], norm(v))
            }
            3 => {
                let n = cross(column(tang[0]), column(tang[1]));
                (n, norm(n))
            }
            _ => {
                return Err(Error::InvalidArgument(
                    "faces exist only for 2D/3D patches".into(),
                ))
            }
        };
        if measure < SINGULAR_TOL {
            return Err(Error::SingularGeometry {
                patch: face.patch,
                point: xhat,
                det: measure,
            });
        }
        let mut normal = scale(normal_raw, 1.0 / norm(normal_raw));
        // Outward: along +∂x/∂x̂_k on the hi side, opposite on lo.
        let orient = dot(normal, column(face.dir));
        let want_positive = matches!(face.side, Side::Hi);
        if (orient > 0.0) != want_positive {
            normal = scale(normal, -1.0);
        }
        Ok(FaceGeometry {
            point,
            normal,
            measure,
        })
    }

    /// Knot breakpoints of the face's tangential directions.
    pub fn face_breakpoints(&self, face: FaceId) -> Vec<Vec<f64>> {
        face.tangential_dirs(self.dim())
            .iter()
            .map(|&g| self.space.knot_vector(g).breakpoints())
            .collect()
    }

    /// Longest parametric knot span over all directions.
    pub fn parametric_mesh_size(&self) -> f64 {
        (0..self.dim())
            .map(|k| self.space.knot_vector(k).max_span())
            .fold(0.0, f64::max)
    }

    /// Longest physical element diameter, estimated from span-box corners.
    pub fn mesh_size(&self) -> f64 {
        let d = self.dim();
        let spans = self.space.element_spans();
        let mut h: f64 = 0.0;
        for elem in ElementIter::new(&spans) {
            let corners: Vec<Vec3> = (0..(1usize << d))
                .map(|bits| {
                    let mut xhat = [0.0; 3];
                    for k in 0..d {
                        let s = &elem[k];
                        xhat[k] = if bits >> k & 1 == 1 { s.hi } else { s.lo };
                    }
                    self.map_point(xhat).expect("corner inside unit cube")
                })
                .collect();
            for i in 0..corners.len() {
                for j in i + 1..corners.len() {
                    h = h.max(norm(sub(corners[i], corners[j])));
                }
            }
        }
        h
    }

    /// det J > 0 at every tensor Gauss point of every element.
    pub fn check_jacobian_positive(&self, patch_index: usize, rule: &QuadRule) -> Result<()> {
        let spans = self.space.element_spans();
        for elem in ElementIter::new(&spans) {
            let cell: Vec<(f64, f64)> = elem.iter().map(|s| (s.lo, s.hi)).collect();
            for (xhat, _) in cell_points(&cell, rule) {
                let jac = self.jacobian(xhat).map_err(|e| match e {
                    Error::SingularGeometry { point, det, .. } => Error::SingularGeometry {
                        patch: patch_index,
                        point,
                        det,
                    },
                    other => other,
                })?;
                if jac.det <= 0.0 {
                    return Err(Error::SingularGeometry {
                        patch: patch_index,
                        point: xhat,
                        det: jac.det,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Iterator over the element grid (one `Span` per direction).
pub struct ElementIter<'a> {
    spans: &'a [Vec<Span>],
    index: Vec<usize>,
    done: bool,
}

impl<'a> ElementIter<'a> {
    pub fn new(spans: &'a [Vec<Span>]) -> Self {
        let done = spans.iter().any(|s| s.is_empty());
        Self {
            spans,
            index: vec![0; spans.len()],
            done,
        }
    }
}

impl<'a> Iterator for ElementIter<'a> {
    type Item = Vec<Span>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self
            .index
            .iter()
            .zip(self.spans)
            .map(|(&i, s)| s[i])
            .collect();
        // Advance odometer, first direction fastest.
        let mut k = 0;
        loop {
            if k == self.index.len() {
                self.done = true;
                break;
            }
            self.index[k] += 1;
            if self.index[k] < self.spans[k].len() {
                break;
            }
            self.index[k] = 0;
            k += 1;
        }
        Some(item)
    }
}

/// Which face of an interface pair is the owner of an integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairSide {
    A,
    B,
}

/// A multipatch domain: patches, interface pairs and outer Dirichlet faces.
#[derive(Clone, Debug)]
pub struct MultiPatch {
    patches: Vec<Patch>,
    interfaces: Vec<InterfacePair>,
    dirichlet: Vec<FaceId>,
}

impl MultiPatch {
    /// Validates the topology: every face of every patch appears in exactly
    /// one interface pair or once on the Dirichlet boundary.
    pub fn new(
        patches: Vec<Patch>,
        interfaces: Vec<InterfacePair>,
        dirichlet: Vec<FaceId>,
    ) -> Result<Self> {
        if patches.is_empty() {
            return Err(Error::Topology(
                "multipatch needs at least one patch".into(),
            ));
        }
        let dim = patches[0].dim();
        if patches.iter().any(|p| p.dim() != dim) {
            return Err(Error::Topology("patches have mixed dimensions".into()));
        }
        let mut seen = vec![0usize; patches.len() * 2 * dim];
        let face_slot = |f: &FaceId| -> Result<usize> {
            if f.patch >= patches.len() || f.dir >= dim {
                return Err(Error::Topology(format!(
                    "face refers to patch {} dir {} outside the multipatch",
                    f.patch, f.dir
                )));
            }
            Ok(f.patch * 2 * dim + f.dir * 2 + matches!(f.side, Side::Hi) as usize)
        };
        for pair in &interfaces {
            pair.orientation.validate(dim - 1)?;
            seen[face_slot(&pair.a)?] += 1;
            seen[face_slot(&pair.b)?] += 1;
        }
        for f in &dirichlet {
            seen[face_slot(f)?] += 1;
        }
        for (slot, &count) in seen.iter().enumerate() {
            if count != 1 {
                let patch = slot / (2 * dim);
                let dir = (slot % (2 * dim)) / 2;
                let side = if slot % 2 == 1 { "hi" } else { "lo" };
                return Err(Error::Topology(format!(
                    "face (patch {}, dir {}, side {}) referenced {} times; every face \
                     must appear exactly once",
                    patch, dir, side, count
                )));
            }
        }
        Ok(Self {
            patches,
            interfaces,
            dirichlet,
        })
    }

    pub fn dim(&self) -> usize {
        self.patches[0].dim()
    }

    pub fn num_patches(&self) -> usize {
        self.patches.len()
    }

    pub fn patch(&self, i: usize) -> &Patch {
        &self.patches[i]
    }

    pub fn patches(&self) -> &[Patch] {
        &self.patches
    }

    pub fn interfaces(&self) -> &[InterfacePair] {
        &self.interfaces
    }

    pub fn dirichlet_faces(&self) -> &[FaceId] {
        &self.dirichlet
    }

    /// Largest physical element diameter over all patches.
    pub fn mesh_size(&self) -> f64 {
        self.patches
            .iter()
            .map(Patch::mesh_size)
            .fold(0.0, f64::max)
    }

    /// Largest parametric knot span over all patches (the mesh size of the
    /// unit-cube meshes, independent of patch scale).
    pub fn parametric_mesh_size(&self) -> f64 {
        self.patches
            .iter()
            .map(Patch::parametric_mesh_size)
            .fold(0.0, f64::max)
    }

    /// Per-patch mesh sizes.
    pub fn patch_mesh_sizes(&self) -> Vec<f64> {
        self.patches.iter().map(Patch::mesh_size).collect()
    }

    fn pair(&self, pair_index: usize) -> Result<&InterfacePair> {
        self.interfaces
            .get(pair_index)
            .ok_or_else(|| Error::Topology(format!("interface pair {} does not exist", pair_index)))
    }

    /// Owner and partner faces of a pair as seen from `side`.
    pub fn pair_faces(&self, pair_index: usize, side: PairSide) -> Result<(FaceId, FaceId)> {
        let pair = self.pair(pair_index)?;
        Ok(match side {
            PairSide::A => (pair.a, pair.b),
            PairSide::B => (pair.b, pair.a),
        })
    }

    /// Partner of a face point: applies the pair's orientation map to the
    /// face parameters and embeds the result on the partner's face.
    ///
    /// Returns the partner patch index, the partner face parameters and the
    /// embedded full parametric point.
    pub fn partner_point(
        &self,
        pair_index: usize,
        side: PairSide,
        t: &[f64],
    ) -> Result<(usize, Vec<f64>, Vec3)> {
        let pair = self.pair(pair_index)?;
        if t.len() != self.dim() - 1 {
            return Err(Error::Topology(format!(
                "face parameter has {} components, expected {}",
                t.len(),
                self.dim() - 1
            )));
        }
        let (partner_face, t_partner) = match side {
            PairSide::A => (pair.b, pair.orientation.apply(t)),
            PairSide::B => (pair.a, pair.orientation.apply_inverse(t)),
        };
        let xhat = partner_face.embed(&t_partner, self.dim());
        Ok((partner_face.patch, t_partner, xhat))
    }

    /// Sampled overlap width: max distance between face-a points and their
    /// partners over a `samples`-per-direction grid (a lower bound of the
    /// true supremum).
    pub fn overlap_width(&self, pair_index: usize, samples: usize) -> Result<f64> {
        let pair = self.pair(pair_index)?;
        let face_a = pair.a;
        let fd = self.dim() - 1;
        let n = samples.max(2);
        let mut width: f64 = 0.0;
        let total = n.pow(fd as u32);
        for flat in 0..total {
            let mut rem = flat;
            let mut t = vec![0.0; fd];
            for v in t.iter_mut() {
                *v = (rem % n) as f64 / (n - 1) as f64;
                rem /= n;
            }
            let x_a = self.patches[face_a.patch].map_point(face_a.embed(&t, self.dim()))?;
            let (pj, _, xhat_b) = self.partner_point(pair_index, PairSide::A, &t)?;
            let x_b = self.patches[pj].map_point(xhat_b)?;
            width = width.max(norm(sub(x_a, x_b)));
        }
        Ok(width)
    }

    /// Displace side-b's interface layer of control points by `width` along
    /// the per-control-point face normal into side-a's territory, turning a
    /// matching pair into an overlap pair.
    ///
    /// Control points whose row also lies on an outer Dirichlet face slide
    /// tangentially to that face, so the overlap stays inside the domain and
    /// the outer boundary is preserved. `width = 0` returns the multipatch
    /// unchanged. Fails if the pair is not matching or if the displacement
    /// flips a Jacobian.
    pub fn make_overlap(&self, pair_index: usize, width: f64) -> Result<MultiPatch> {
        let pair = self.pair(pair_index)?;
        if pair.kind != PairKind::Matching {
            return Err(Error::Geometry(format!(
                "pair {} is already an overlap; displacement starts from a matching pair",
                pair_index
            )));
        }
        if width < 0.0 {
            return Err(Error::Geometry("overlap width must be nonnegative".into()));
        }
        let mut out = self.clone();
        if width == 0.0 {
            return Ok(out);
        }
        let face = pair.b;
        let patch = &self.patches[face.patch];
        let space = patch.space();
        let d = self.dim();
        let layer = match face.side {
            Side::Lo => 0,
            Side::Hi => space.num_basis_dir(face.dir) - 1,
        };
        let tang = face.tangential_dirs(d);
        let is_dirichlet = |f: &FaceId| self.dirichlet.contains(f);
        let mut moved = out.patches[face.patch].control_points.clone();
        for flat in 0..space.num_basis() {
            let multi = space.multi_index(flat);
            if multi[face.dir] != layer {
                continue;
            }
            // Face normal at this control point's Greville face parameter.
            let t: Vec<f64> = tang
                .iter()
                .map(|&g| space.knot_vector(g).greville(multi[g]))
                .collect();
            let fg = patch.face_geometry(face, &t)?;
            let mut displacement = scale(fg.normal, width);
            // Slide along outer boundary faces instead of leaving them.
            for &g in &tang {
                let side = if multi[g] == 0 {
                    Some(Side::Lo)
                } else if multi[g] == space.num_basis_dir(g) - 1 {
                    Some(Side::Hi)
                } else {
                    None
                };
                if let Some(side) = side {
                    let boundary = FaceId::new(face.patch, g, side);
                    if is_dirichlet(&boundary) {
                        let bt: Vec<f64> = boundary
                            .tangential_dirs(d)
                            .iter()
                            .map(|&q| space.knot_vector(q).greville(multi[q]))
                            .collect();
                        let bn = patch.face_geometry(boundary, &bt)?.normal;
                        displacement = sub(displacement, scale(bn, dot(displacement, bn)));
                    }
                }
            }
            moved[flat] = add(moved[flat], displacement);
        }
        out.patches[face.patch] = Patch::new(space.clone(), moved)?;
        let rule = QuadRule::gauss(space.max_degree() + 1)?;
        out.patches[face.patch]
            .check_jacobian_positive(face.patch, &rule)
            .map_err(|e| {
                Error::Geometry(format!(
                    "overlap width {} is too large for pair {}: {}",
                    width, pair_index, e
                ))
            })?;
        out.interfaces[pair_index].kind = PairKind::Overlap;
        out.interfaces[pair_index].nominal_width = Some(width);
        Ok(out)
    }

    /// Relabel a pair's kind without touching geometry; used by the
    /// zero-width reduction check.
    pub(crate) fn set_pair_kind(&mut self, pair_index: usize, kind: PairKind) {
        self.interfaces[pair_index].kind = kind;
    }

    /// Union-mesh quadrature cells for one side of an interface: merged
    /// breakpoints per owner tangential direction, pulling the partner's
    /// knot lines through the orientation map.
    pub fn interface_breakpoints(
        &self,
        pair_index: usize,
        side: PairSide,
    ) -> Result<Vec<Vec<f64>>> {
        let pair = self.pair(pair_index)?;
        let (owner, partner) = match side {
            PairSide::A => (pair.a, pair.b),
            PairSide::B => (pair.b, pair.a),
        };
        let own = self.patches[owner.patch].face_breakpoints(owner);
        let other = self.patches[partner.patch].face_breakpoints(partner);
        let fd = self.dim() - 1;
        let mut merged = Vec::with_capacity(fd);
        for m in 0..fd {
            // Owner tangential direction m corresponds to partner direction
            // perm[m] (side A) or is found through the inverse map (side B).
            let (pdir, flip) = match side {
                PairSide::A => (pair.orientation.perm[m], pair.orientation.flip[m]),
                PairSide::B => {
                    let am = pair.orientation.perm.iter().position(|&q| q == m).unwrap();
                    (am, pair.orientation.flip[am])
                }
            };
            let mapped: Vec<f64> = other[pdir]
                .iter()
                .map(|&z| if flip { 1.0 - z } else { z })
                .collect();
            let mut sorted = mapped;
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            merged.push(merge_breakpoints(&own[m], &sorted, 1e-12));
        }
        Ok(merged)
    }

    /// Geometric sanity checks: positive Jacobians everywhere and pointwise
    /// coincidence of matching interfaces.
    pub fn validate(&self) -> Result<()> {
        for (i, patch) in self.patches.iter().enumerate() {
            let rule = QuadRule::gauss(patch.space().max_degree() + 1)?;
            patch.check_jacobian_positive(i, &rule)?;
        }
        for (idx, pair) in self.interfaces.iter().enumerate() {
            if pair.kind == PairKind::Matching {
                let width = self.overlap_width(idx, 9)?;
                if width > 1e-10 {
                    return Err(Error::Geometry(format!(
                        "matching pair {} has faces {:.3e} apart",
                        idx, width
                    )));
                }
            }
        }
        Ok(())
    }
}
