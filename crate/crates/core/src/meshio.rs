//! Triangle meshes: a Wavefront-OBJ subset reader/writer plus procedural
//! primitives, so scene generation and every test run without external assets.
//!
//! Conventions: y is up, generated primitives are centered on the y axis with
//! their resting face at `y = 0`, so tray placement needs no per-model offset.

use std::fmt;
use std::path::Path;

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::geometry::Pose;

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("line {line}: malformed {kind} line: {detail}")]
    Parse {
        line: usize,
        kind: &'static str,
        detail: String,
    },
    #[error("line {line}: face index {index} out of range (have {vertex_count} vertices)")]
    IndexOutOfRange {
        line: usize,
        index: i64,
        vertex_count: usize,
    },
    #[error("mesh '{0}' has no triangles")]
    EmptyMesh(String),
    #[error("mesh '{name}' invalid: {detail}")]
    InvalidMesh { name: String, detail: String },
    #[error("primitive dimension must be positive, got {0:?}")]
    NonPositiveDimension([f64; 3]),
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("model repository is empty")]
    EmptyRepository,
}

/// Indexed triangle mesh. Coordinates are meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<Point3<f64>>,
    pub triangles: Vec<[usize; 3]>,
    pub name: String,
}

impl Mesh {
    pub fn new(
        vertices: Vec<Point3<f64>>,
        triangles: Vec<[usize; 3]>,
        name: impl Into<String>,
    ) -> Result<Self, MeshError> {
        let mesh = Self {
            vertices,
            triangles,
            name: name.into(),
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Check the structural invariants: indices in range, at least one
    /// triangle, finite coordinates, and a bounding box with positive extent
    /// on at least two axes.
    pub fn validate(&self) -> Result<(), MeshError> {
        if self.triangles.is_empty() {
            return Err(MeshError::EmptyMesh(self.name.clone()));
        }
        for tri in &self.triangles {
            for &i in tri {
                if i >= self.vertices.len() {
                    return Err(MeshError::InvalidMesh {
                        name: self.name.clone(),
                        detail: format!(
                            "triangle index {i} out of range ({} vertices)",
                            self.vertices.len()
                        ),
                    });
                }
            }
        }
        if self
            .vertices
            .iter()
            .any(|v| !v.coords.iter().all(|c| c.is_finite()))
        {
            return Err(MeshError::InvalidMesh {
                name: self.name.clone(),
                detail: "non-finite vertex coordinate".into(),
            });
        }
        let (lo, hi) = self.aabb();
        let positive_axes = (0..3).filter(|&a| hi[a] - lo[a] > 0.0).count();
        if positive_axes < 2 {
            return Err(MeshError::InvalidMesh {
                name: self.name.clone(),
                detail: "bounding box degenerate on more than one axis".into(),
            });
        }
        Ok(())
    }

    /// Axis-aligned bounding box over all vertices.
    pub fn aabb(&self) -> (Point3<f64>, Point3<f64>) {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            for a in 0..3 {
                lo[a] = lo[a].min(v[a]);
                hi[a] = hi[a].max(v[a]);
            }
        }
        (lo, hi)
    }

    /// Height of the bounding box (y extent).
    pub fn height(&self) -> f64 {
        let (lo, hi) = self.aabb();
        hi.y - lo.y
    }

    /// Mesh with every vertex uniformly scaled then moved by `pose`.
    pub fn transformed(&self, scale: f64, pose: &Pose) -> Mesh {
        Mesh {
            vertices: self
                .vertices
                .iter()
                .map(|v| pose.apply(&Point3::from(v.coords * scale)))
                .collect(),
            triangles: self.triangles.clone(),
            name: self.name.clone(),
        }
    }

    /// Translate so the bounding box is centered on the y axis in x/z and
    /// rests on y = 0. Applied to imported models before placement.
    pub fn rebased(&self) -> Mesh {
        let (lo, hi) = self.aabb();
        let shift = Vector3::new(-(lo.x + hi.x) / 2.0, -lo.y, -(lo.z + hi.z) / 2.0);
        Mesh {
            vertices: self.vertices.iter().map(|v| v + shift).collect(),
            triangles: self.triangles.clone(),
            name: self.name.clone(),
        }
    }

    /// Number of distinct undirected edges.
    pub fn edge_count(&self) -> usize {
        let mut edges = std::collections::HashSet::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }
}

/// Parse the v/f subset of Wavefront OBJ.
///
/// Faces with more than three indices are fan-triangulated; negative indices
/// resolve relative to the vertex count seen so far; `vt`/`vn` components of
/// face tokens (`v/vt/vn`) and all other directives are ignored.
pub fn parse_obj(text: &str) -> Result<Mesh, MeshError> {
    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut name = String::from("obj");

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let mut coords = [0.0f64; 3];
                for (i, slot) in coords.iter_mut().enumerate() {
                    let tok = fields.next().ok_or(MeshError::Parse {
                        line: lineno,
                        kind: "vertex",
                        detail: format!("expected 3 coordinates, got {i}"),
                    })?;
                    *slot = tok.parse().map_err(|_| MeshError::Parse {
                        line: lineno,
                        kind: "vertex",
                        detail: format!("bad coordinate '{tok}'"),
                    })?;
                }
                // A 4th (w) component is legal OBJ; ignore it.
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let mut indices = Vec::new();
                for tok in fields {
                    // take the vertex component of v, v/vt, v//vn, v/vt/vn
                    let vtok = tok.split('/').next().unwrap_or("");
                    let raw: i64 = vtok.parse().map_err(|_| MeshError::Parse {
                        line: lineno,
                        kind: "face",
                        detail: format!("bad index '{tok}'"),
                    })?;
                    let resolved = if raw > 0 {
                        raw - 1
                    } else if raw < 0 {
                        vertices.len() as i64 + raw
                    } else {
                        return Err(MeshError::IndexOutOfRange {
                            line: lineno,
                            index: raw,
                            vertex_count: vertices.len(),
                        });
                    };
                    if resolved < 0 || resolved as usize >= vertices.len() {
                        return Err(MeshError::IndexOutOfRange {
                            line: lineno,
                            index: raw,
                            vertex_count: vertices.len(),
                        });
                    }
                    indices.push(resolved as usize);
                }
                if indices.len() < 3 {
                    return Err(MeshError::Parse {
                        line: lineno,
                        kind: "face",
                        detail: format!("face needs at least 3 indices, got {}", indices.len()),
                    });
                }
                for i in 1..indices.len() - 1 {
                    triangles.push([indices[0], indices[i], indices[i + 1]]);
                }
            }
            Some("o") | Some("g") => {
                if let Some(n) = fields.next() {
                    name = n.to_string();
                }
            }
            // vn, vt, s, mtllib, usemtl, ...
            _ => {}
        }
    }

    if triangles.is_empty() {
        return Err(MeshError::EmptyMesh(name));
    }
    Mesh::new(vertices, triangles, name)
}

/// Write a mesh back out as OBJ text (v/f lines only, 1-based indices).
pub fn serialize_obj(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str(&format!("o {}\n", mesh.name));
    for v in &mesh.vertices {
        out.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
    }
    for t in &mesh.triangles {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    out
}

/// Procedural primitive kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimitiveKind {
    Box,
    Cylinder,
    Capsule,
}

impl fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimitiveKind::Box => write!(f, "box"),
            PrimitiveKind::Cylinder => write!(f, "cylinder"),
            PrimitiveKind::Capsule => write!(f, "capsule"),
        }
    }
}

/// Segment count for cylinder/capsule tessellation. A multiple of 4 puts
/// ring vertices exactly on the ±x/±z extremes, so the bounding box matches
/// the requested dimensions exactly.
pub const PRIMITIVE_SEGMENTS: usize = 16;

/// Build a watertight primitive with the given x/y/z extent, centered on the
/// y axis with its resting face at y = 0.
pub fn make_primitive(kind: PrimitiveKind, dims: [f64; 3]) -> Result<Mesh, MeshError> {
    if dims.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
        return Err(MeshError::NonPositiveDimension(dims));
    }
    let mesh = match kind {
        PrimitiveKind::Box => make_box(dims),
        PrimitiveKind::Cylinder => make_cylinder(dims),
        PrimitiveKind::Capsule => make_capsule(dims),
    };
    mesh.validate()?;
    Ok(mesh)
}

fn make_box([w, h, d]: [f64; 3]) -> Mesh {
    let (x, y, z) = (w / 2.0, h, d / 2.0);
    let v = vec![
        Point3::new(-x, 0.0, -z),
        Point3::new(x, 0.0, -z),
        Point3::new(x, 0.0, z),
        Point3::new(-x, 0.0, z),
        Point3::new(-x, y, -z),
        Point3::new(x, y, -z),
        Point3::new(x, y, z),
        Point3::new(-x, y, z),
    ];
    // Outward-facing CCW winding per face.
    let triangles = vec![
        [0, 1, 2],
        [0, 2, 3], // bottom (y=0, normal -y)
        [4, 7, 6],
        [4, 6, 5], // top
        [0, 4, 5],
        [0, 5, 1], // back (-z)
        [3, 2, 6],
        [3, 6, 7], // front (+z)
        [0, 3, 7],
        [0, 7, 4], // left (-x)
        [1, 5, 6],
        [1, 6, 2], // right (+x)
    ];
    Mesh {
        vertices: v,
        triangles,
        name: "box".into(),
    }
}

fn make_cylinder([w, h, d]: [f64; 3]) -> Mesh {
    let (rx, rz) = (w / 2.0, d / 2.0);
    let n = PRIMITIVE_SEGMENTS;
    let mut vertices = Vec::with_capacity(2 * n + 2);
    for ring in 0..2 {
        let y = ring as f64 * h;
        for k in 0..n {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            vertices.push(Point3::new(rx * a.cos(), y, rz * a.sin()));
        }
    }
    let bottom_center = vertices.len();
    vertices.push(Point3::new(0.0, 0.0, 0.0));
    let top_center = vertices.len();
    vertices.push(Point3::new(0.0, h, 0.0));

    let mut triangles = Vec::with_capacity(4 * n);
    for k in 0..n {
        let k1 = (k + 1) % n;
        let (b0, b1, t0, t1) = (k, k1, n + k, n + k1);
        triangles.push([b0, t0, t1]);
        triangles.push([b0, t1, b1]);
        triangles.push([bottom_center, b1, b0]);
        triangles.push([top_center, t0, t1]);
    }
    Mesh {
        vertices,
        triangles,
        name: "cylinder".into(),
    }
}

/// Capsule: a cylinder with ellipsoidal caps. The cap's vertical semi-axis is
/// half the smallest requested extent, so any aspect ratio yields a valid
/// solid whose bounding box equals `dims`.
fn make_capsule([w, h, d]: [f64; 3]) -> Mesh {
    let (rx, rz) = (w / 2.0, d / 2.0);
    let ry = 0.5 * h.min(w.min(d));
    let body = h - 2.0 * ry; // straight section, >= 0
    let n = PRIMITIVE_SEGMENTS;
    let rings = PRIMITIVE_SEGMENTS / 4; // latitude bands per cap

    let mut vertices = Vec::new();
    // bottom pole
    vertices.push(Point3::new(0.0, 0.0, 0.0));
    // bottom cap rings, from near the pole up to the equator
    for r in 1..=rings {
        let phi = std::f64::consts::FRAC_PI_2 * (1.0 - r as f64 / rings as f64);
        let (s, c) = (phi.sin(), phi.cos());
        for k in 0..n {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            vertices.push(Point3::new(
                rx * c * a.cos(),
                ry - ry * s,
                rz * c * a.sin(),
            ));
        }
    }
    // top cap rings, from the equator toward the pole
    for r in 0..rings {
        let phi = std::f64::consts::FRAC_PI_2 * (r as f64 / rings as f64);
        let (s, c) = (phi.sin(), phi.cos());
        for k in 0..n {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            vertices.push(Point3::new(
                rx * c * a.cos(),
                ry + body + ry * s,
                rz * c * a.sin(),
            ));
        }
    }
    let top_pole = vertices.len();
    vertices.push(Point3::new(0.0, h, 0.0));

    let ring_start = |r: usize| 1 + r * n; // r in 0..2*rings
    let mut triangles = Vec::new();
    // bottom fan
    for k in 0..n {
        let k1 = (k + 1) % n;
        triangles.push([0, ring_start(0) + k1, ring_start(0) + k]);
    }
    // bands (the equator pair at r = rings-1 -> rings forms the straight body)
    for r in 0..2 * rings - 1 {
        let (a0, b0) = (ring_start(r), ring_start(r + 1));
        for k in 0..n {
            let k1 = (k + 1) % n;
            triangles.push([a0 + k, b0 + k, b0 + k1]);
            triangles.push([a0 + k, b0 + k1, a0 + k1]);
        }
    }
    // top fan
    let last = ring_start(2 * rings - 1);
    for k in 0..n {
        let k1 = (k + 1) % n;
        triangles.push([top_pole, last + k, last + k1]);
    }
    Mesh {
        vertices,
        triangles,
        name: "capsule".into(),
    }
}

/// One entry of the object repository: geometry, a class label, and the
/// physical height range the object may take when instanced into a scene.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelEntry {
    pub mesh: Mesh,
    pub label: String,
    pub height_range: (f64, f64),
}

/// The dictionary of 3D models sampled to populate scenes. Its size is an
/// experimental axis: sweeps take nested prefixes of `models`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelRepository {
    pub models: Vec<ModelEntry>,
}

impl ModelRepository {
    pub fn new(models: Vec<ModelEntry>) -> Result<Self, MeshError> {
        if models.is_empty() {
            return Err(MeshError::EmptyRepository);
        }
        for m in &models {
            m.mesh.validate()?;
            if m.label.is_empty() {
                return Err(MeshError::InvalidMesh {
                    name: m.mesh.name.clone(),
                    detail: "empty class label".into(),
                });
            }
        }
        Ok(Self { models })
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Seeded procedural repository of `size` primitive products.
    ///
    /// Kinds rotate through box ("carton"), cylinder ("can"), capsule
    /// ("bottle") with per-model randomized proportions, so any dictionary
    /// size works without external assets.
    pub fn procedural(size: usize, seed: u64) -> Result<Self, MeshError> {
        use rand::Rng;
        use rand::SeedableRng;
        if size == 0 {
            return Err(MeshError::EmptyRepository);
        }
        let mut models = Vec::with_capacity(size);
        for i in 0..size {
            let mut rng =
                rand_chacha::ChaCha8Rng::seed_from_u64(crate::seeds::child_seed(seed, i as u64));
            let (kind, label) = match i % 3 {
                0 => (PrimitiveKind::Box, "carton"),
                1 => (PrimitiveKind::Cylinder, "can"),
                _ => (PrimitiveKind::Capsule, "bottle"),
            };
            let w = rng.gen_range(0.4..=1.0);
            let h = rng.gen_range(0.8..=2.5);
            let d = match kind {
                PrimitiveKind::Box => rng.gen_range(0.4..=1.0),
                _ => w, // round footprint for cans and bottles
            };
            let mut mesh = make_primitive(kind, [w, h, d])?;
            mesh.name = format!("{label}_{i:03}");
            let hmin = rng.gen_range(0.08..0.18);
            let hmax = hmin + rng.gen_range(0.02..0.17);
            models.push(ModelEntry {
                mesh,
                label: label.to_string(),
                height_range: (hmin, hmax),
            });
        }
        Self::new(models)
    }

    /// Load every `.obj` file in a directory (sorted by filename for
    /// determinism), rebasing each mesh onto y = 0.
    pub fn from_obj_dir(
        dir: &Path,
        label: &str,
        height_range: (f64, f64),
    ) -> Result<Self, MeshError> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| MeshError::Io {
                path: dir.display().to_string(),
                source: e,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "obj"))
            .collect();
        paths.sort();
        let mut models = Vec::new();
        for p in paths {
            let text = std::fs::read_to_string(&p).map_err(|e| MeshError::Io {
                path: p.display().to_string(),
                source: e,
            })?;
            let mut mesh = parse_obj(&text)?.rebased();
            if let Some(stem) = p.file_stem().and_then(|s| s.to_str()) {
                mesh.name = stem.to_string();
            }
            models.push(ModelEntry {
                mesh,
                label: label.to_string(),
                height_range,
            });
        }
        Self::new(models)
    }

    /// First `n` models — the nested dictionary-subset used by sweeps.
    pub fn prefix(&self, n: usize) -> Result<Self, MeshError> {
        Self::new(self.models.iter().take(n).cloned().collect())
    }
}
