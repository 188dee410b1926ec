//! JSON geometry files.
//!
//! ```json
//! {
//!   "dim": 2,
//!   "patches": [
//!     { "degree": [2, 2], "knots": [[...], [...]], "control_points": [[x, y], ...] }
//!   ],
//!   "interfaces": [
//!     { "a": {"patch": 0, "dir": 0, "side": "hi"},
//!       "b": {"patch": 1, "dir": 0, "side": "lo"},
//!       "flip": [false], "perm": [0], "kind": "matching" }
//!   ],
//!   "dirichlet": [ {"patch": 0, "dir": 0, "side": "lo"}, ... ]
//! }
//! ```
//!
//! Control points are listed lexicographically, first direction fastest.
//! Directions are 0-based. Parse errors carry line/column positions; schema
//! violations name the offending entry.

use serde::{Deserialize, Serialize};

use super::{FaceId, InterfacePair, MultiPatch, Orientation, PairKind, Patch, Side};
use crate::bspline::{KnotVector, TensorSpace};
use crate::error::Error;
use crate::Result;

#[derive(Serialize, Deserialize)]
struct FileFace {
    patch: usize,
    dir: usize,
    side: String,
}

#[derive(Serialize, Deserialize)]
struct FileInterface {
    a: FileFace,
    b: FileFace,
    flip: Vec<bool>,
    perm: Vec<usize>,
    kind: String,
}

#[derive(Serialize, Deserialize)]
struct FilePatch {
    degree: Vec<usize>,
    knots: Vec<Vec<f64>>,
    control_points: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct FileGeometry {
    dim: usize,
    patches: Vec<FilePatch>,
    interfaces: Vec<FileInterface>,
    dirichlet: Vec<FileFace>,
}

fn face_from_file(f: &FileFace, what: &str, idx: usize) -> Result<FaceId> {
    let side = match f.side.as_str() {
        "lo" => Side::Lo,
        "hi" => Side::Hi,
        other => {
            return Err(Error::GeometryFile(format!(
                "{}[{}]: side must be \"lo\" or \"hi\", got {:?}",
                what, idx, other
            )))
        }
    };
    Ok(FaceId::new(f.patch, f.dir, side))
}

fn face_to_file(f: &FaceId) -> FileFace {
    FileFace {
        patch: f.patch,
        dir: f.dir,
        side: match f.side {
            Side::Lo => "lo".into(),
            Side::Hi => "hi".into(),
        },
    }
}

/// Parse a geometry file from its JSON text.
pub fn from_json_str(text: &str) -> Result<MultiPatch> {
    let file: FileGeometry = serde_json::from_str(text).map_err(|e| {
        Error::GeometryFile(format!(
            "parse error at line {}, column {}: {}",
            e.line(),
            e.column(),
            e
        ))
    })?;
    let dim = file.dim;
    if !(2..=3).contains(&dim) {
        return Err(Error::GeometryFile(format!(
            "dim must be 2 or 3, got {}",
            dim
        )));
    }
    let mut patches = Vec::with_capacity(file.patches.len());
    for (i, fp) in file.patches.iter().enumerate() {
        if fp.degree.len() != dim || fp.knots.len() != dim {
            return Err(Error::GeometryFile(format!(
                "patches[{}]: need {} degree entries and knot vectors",
                i, dim
            )));
        }
        let mut kvs = Vec::with_capacity(dim);
        for (k, knots) in fp.knots.iter().enumerate() {
            let kv = KnotVector::new(fp.degree[k], knots.clone())
                .map_err(|e| Error::GeometryFile(format!("patches[{}].knots[{}]: {}", i, k, e)))?;
            kvs.push(kv);
        }
        let space = TensorSpace::new(kvs)
            .map_err(|e| Error::GeometryFile(format!("patches[{}]: {}", i, e)))?;
        let mut cps = Vec::with_capacity(fp.control_points.len());
        for (j, cp) in fp.control_points.iter().enumerate() {
            if cp.len() != dim {
                return Err(Error::GeometryFile(format!(
                    "patches[{}].control_points[{}]: expected {} coordinates, got {}",
                    i,
                    j,
                    dim,
                    cp.len()
                )));
            }
            let mut point = [0.0; 3];
            point[..dim].copy_from_slice(cp);
            cps.push(point);
        }
        let patch = Patch::new(space, cps)
            .map_err(|e| Error::GeometryFile(format!("patches[{}]: {}", i, e)))?;
        patches.push(patch);
    }
    let mut interfaces = Vec::with_capacity(file.interfaces.len());
    for (i, fi) in file.interfaces.iter().enumerate() {
        let kind = match fi.kind.as_str() {
            "matching" => PairKind::Matching,
            "overlap" => PairKind::Overlap,
            other => {
                return Err(Error::GeometryFile(format!(
                    "interfaces[{}]: kind must be \"matching\" or \"overlap\", got {:?}",
                    i, other
                )))
            }
        };
        interfaces.push(InterfacePair {
            a: face_from_file(&fi.a, "interfaces", i)?,
            b: face_from_file(&fi.b, "interfaces", i)?,
            orientation: Orientation {
                flip: fi.flip.clone(),
                perm: fi.perm.clone(),
            },
            kind,
            nominal_width: None,
        });
    }
    let mut dirichlet = Vec::with_capacity(file.dirichlet.len());
    for (i, f) in file.dirichlet.iter().enumerate() {
        dirichlet.push(face_from_file(f, "dirichlet", i)?);
    }
    MultiPatch::new(patches, interfaces, dirichlet).map_err(|e| Error::GeometryFile(e.to_string()))
}

/// Serialize a multipatch to the JSON schema.
pub fn to_json_string(mp: &MultiPatch) -> String {
    let dim = mp.dim();
    let file = FileGeometry {
        dim,
        patches: mp
            .patches()
            .iter()
            .map(|p| FilePatch {
                degree: p.space().degrees(),
                knots: (0..dim)
                    .map(|k| p.space().knot_vector(k).knots().to_vec())
                    .collect(),
                control_points: p
                    .control_points()
                    .iter()
                    .map(|c| c[..dim].to_vec())
                    .collect(),
            })
            .collect(),
        interfaces: mp
            .interfaces()
            .iter()
            .map(|pair| FileInterface {
                a: face_to_file(&pair.a),
                b: face_to_file(&pair.b),
                flip: pair.orientation.flip.clone(),
                perm: pair.orientation.perm.clone(),
                kind: match pair.kind {
                    PairKind::Matching => "matching".into(),
                    PairKind::Overlap => "overlap".into(),
                },
            })
            .collect(),
        dirichlet: mp.dirichlet_faces().iter().map(face_to_file).collect(),
    };
    serde_json::to_string_pretty(&file).expect("geometry serialization cannot fail")
}

/// Read and validate a geometry file.
pub fn read_geometry(path: &std::path::Path) -> Result<MultiPatch> {
    let text = std::fs::read_to_string(path)?;
    from_json_str(&text)
}

/// Write a multipatch as a geometry file.
pub fn write_geometry(mp: &MultiPatch, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, to_json_string(mp))?;
    Ok(())
}
