//! Seeded scene composition: a fridge, 5–25 objects placed on trays by one
//! of three patterns, randomized lights, cameras, and materials.
//!
//! `compose_scene` is a pure function of `(repository, config, seed)`. Each
//! randomization axis draws from its own child RNG (see [`crate::seeds`]),
//! so axes are independently stable. Object footprints are conservative
//! axis-aligned rectangles in the tray plane; all three placement patterns
//! keep them pairwise disjoint and inside the tray.

use nalgebra::{Point3, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::GenerationConfig;
use crate::geometry::{Camera, Pose};
use crate::meshio::{make_primitive, Mesh, ModelRepository, PrimitiveKind};
use crate::seeds::{self, child_seed};

#[derive(Debug, thiserror::Error)]
pub enum ComposeError {
    #[error("could only place {placed} objects, need at least {needed}")]
    Capacity { placed: usize, needed: usize },
    #[error("footprint {index} ({w:.3} x {d:.3} m) exceeds the tray")]
    Oversize { index: usize, w: f64, d: f64 },
    #[error("fridge spec invalid: {0}")]
    BadFridge(String),
    #[error(transparent)]
    Mesh(#[from] crate::meshio::MeshError),
}

/// Wall panel thickness (m) of the generated fridge shell.
pub const WALL_THICKNESS: f64 = 0.02;
/// Tray slab thickness (m).
pub const TRAY_THICKNESS: f64 = 0.015;

/// Fridge interior dimensions, trays, and wall material range.
///
/// Fridge coordinates: the interior spans `x in [-w/2, w/2]`,
/// `y in [0, height]`, `z in [-d/2, d/2]`; the opening faces -z.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FridgeSpec {
    pub interior_width: f64,
    pub interior_depth: f64,
    pub interior_height: f64,
    /// Heights of tray top surfaces, strictly inside the interior.
    pub tray_heights: Vec<f64>,
    pub wall_albedo_min: [f64; 3],
    pub wall_albedo_max: [f64; 3],
}

impl Default for FridgeSpec {
    fn default() -> Self {
        Self {
            interior_width: 0.9,
            interior_depth: 0.6,
            interior_height: 1.5,
            tray_heights: vec![0.25, 0.65, 1.05],
            wall_albedo_min: [0.72, 0.72, 0.75],
            wall_albedo_max: [0.95, 0.95, 1.0],
        }
    }
}

impl FridgeSpec {
    pub fn validate(&self) -> Result<(), ComposeError> {
        if self.interior_width <= 0.0 || self.interior_depth <= 0.0 || self.interior_height <= 0.0
        {
            return Err(ComposeError::BadFridge("interior dims must be positive".into()));
        }
        if self.tray_heights.is_empty() {
            return Err(ComposeError::BadFridge("at least one tray required".into()));
        }
        for &h in &self.tray_heights {
            if h <= 0.0 || h >= self.interior_height {
                return Err(ComposeError::BadFridge(format!(
                    "tray height {h} not strictly inside interior height {}",
                    self.interior_height
                )));
            }
        }
        for c in 0..3 {
            let (lo, hi) = (self.wall_albedo_min[c], self.wall_albedo_max[c]);
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                return Err(ComposeError::BadFridge("wall albedo range invalid".into()));
            }
        }
        Ok(())
    }

    /// Tray top rectangle in fridge x/z coordinates (same for every tray).
    pub fn tray_rect(&self) -> Rect2 {
        Rect2 {
            min: [-self.interior_width / 2.0, -self.interior_depth / 2.0],
            max: [self.interior_width / 2.0, self.interior_depth / 2.0],
        }
    }

    /// Vertical clearance above each tray (up to the next tray slab or the
    /// ceiling).
    pub fn tray_clearances(&self) -> Vec<f64> {
        let mut heights = self.tray_heights.clone();
        heights.sort_by(f64::total_cmp);
        self.tray_heights
            .iter()
            .map(|&h| {
                let above = heights
                    .iter()
                    .copied()
                    .filter(|&o| o > h)
                    .fold(self.interior_height, f64::min);
                above - h - TRAY_THICKNESS
            })
            .collect()
    }

    /// Shell + tray meshes (all rendered with instance id 0).
    pub fn panels(&self) -> Vec<Mesh> {
        let (w, h, d) = (self.interior_width, self.interior_height, self.interior_depth);
        let t = WALL_THICKNESS;
        let mut panels = Vec::new();
        let mut push = |dims: [f64; 3], at: Vector3<f64>, name: &str| {
            let mut m = make_primitive(PrimitiveKind::Box, dims).expect("positive dims");
            m = m.transformed(1.0, &Pose::translate(at));
            m.name = name.into();
            panels.push(m);
        };
        // back wall, inner face at z = d/2
        push([w + 2.0 * t, h + 2.0 * t, t], Vector3::new(0.0, -t, d / 2.0 + t / 2.0), "wall_back");
        // floor and ceiling, front edge flush with the opening
        push([w + 2.0 * t, t, d + t], Vector3::new(0.0, -t, t / 2.0), "wall_floor");
        push([w + 2.0 * t, t, d + t], Vector3::new(0.0, h, t / 2.0), "wall_ceiling");
        // side walls
        push([t, h, d + t], Vector3::new(-w / 2.0 - t / 2.0, 0.0, t / 2.0), "wall_left");
        push([t, h, d + t], Vector3::new(w / 2.0 + t / 2.0, 0.0, t / 2.0), "wall_right");
        for (i, &ty) in self.tray_heights.iter().enumerate() {
            push(
                [w, TRAY_THICKNESS, d],
                Vector3::new(0.0, ty - TRAY_THICKNESS, 0.0),
                &format!("tray_{i}"),
            );
        }
        panels
    }
}

/// How objects are laid out on a tray.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementPattern {
    Grid,
    Random,
    BinPack,
}

/// One placed object instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneObject {
    /// Index into the model repository.
    pub model_index: usize,
    pub pose: Pose,
    pub scale: f64,
    pub albedo: [f64; 3],
    /// Unique within the scene, > 0 (0 is the fridge/background).
    pub instance_id: u16,
    pub class_label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Light {
    pub position: Point3<f64>,
    /// RGB radiant intensity; attenuated as 1/(1 + distance^2).
    pub intensity: [f64; 3],
}

/// A fully specified scene, ready to render.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scene {
    pub fridge: FridgeSpec,
    pub wall_albedo: [f64; 3],
    pub ambient: f64,
    pub pattern: PlacementPattern,
    pub objects: Vec<SceneObject>,
    pub lights: Vec<Light>,
    pub cameras: Vec<Camera>,
    pub seed: u64,
}

/// Version tag embedded in serialized scene documents.
pub const SCENE_FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct SceneDoc<'a> {
    version: u32,
    #[serde(flatten)]
    scene: &'a Scene,
}

impl Scene {
    /// Versioned JSON document (golden-test stable).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SceneDoc {
            version: SCENE_FORMAT_VERSION,
            scene: self,
        })
        .expect("scene serialization cannot fail")
    }

    /// Structural invariants of a composed scene.
    pub fn validate(&self) -> Result<(), ComposeError> {
        self.fridge.validate()?;
        if !(5..=25).contains(&self.objects.len()) {
            return Err(ComposeError::Capacity {
                placed: self.objects.len(),
                needed: 5,
            });
        }
        if self.lights.is_empty() || self.cameras.is_empty() {
            return Err(ComposeError::BadFridge("scene needs lights and cameras".into()));
        }
        let mut ids = std::collections::HashSet::new();
        for o in &self.objects {
            if o.instance_id == 0 || !ids.insert(o.instance_id) {
                return Err(ComposeError::BadFridge("instance ids must be unique and > 0".into()));
            }
        }
        Ok(())
    }
}

/// Axis-aligned rectangle in the tray plane (x, z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect2 {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Rect2 {
    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn depth(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn center(&self) -> [f64; 2] {
        [
            (self.min[0] + self.max[0]) / 2.0,
            (self.min[1] + self.max[1]) / 2.0,
        ]
    }

    pub fn area(&self) -> f64 {
        self.width() * self.depth()
    }
}

/// Object footprint: x/z extents of its scaled, yawed bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint {
    pub w: f64,
    pub d: f64,
}

/// A footprint center position on a specific tray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub footprint_index: usize,
    pub tray_index: usize,
    pub x: f64,
    pub z: f64,
}

const EDGE_EPS: f64 = 1e-9;

fn rects_overlap(c0: [f64; 2], f0: Footprint, c1: [f64; 2], f1: Footprint) -> bool {
    (c0[0] - c1[0]).abs() < (f0.w + f1.w) / 2.0 - EDGE_EPS
        && (c0[1] - c1[1]).abs() < (f0.d + f1.d) / 2.0 - EDGE_EPS
}

/// True if a footprint centered at `c` lies fully inside the tray.
pub fn inside_tray(c: [f64; 2], f: Footprint, tray: &Rect2) -> bool {
    c[0] - f.w / 2.0 >= tray.min[0] - EDGE_EPS
        && c[0] + f.w / 2.0 <= tray.max[0] + EDGE_EPS
        && c[1] - f.d / 2.0 >= tray.min[1] - EDGE_EPS
        && c[1] + f.d / 2.0 <= tray.max[1] + EDGE_EPS
}

/// Place footprints on centered row-major lattices with the given pitch,
/// overflowing to later trays when a tray's lattice is full.
///
/// Each tray's lattice is sized square-ish for the objects it receives and
/// centered on the tray, so n = 9 with capacity to spare yields a 3x3 block
/// around the tray center. Returns a capacity error if objects remain after
/// the last tray.
pub fn place_grid(
    footprints: &[Footprint],
    trays: &[Rect2],
    pitch: f64,
) -> Result<Vec<Placement>, ComposeError> {
    assert!(pitch > 0.0, "pitch must be positive");
    if footprints.is_empty() {
        return Ok(Vec::new());
    }
    let fw_max = footprints.iter().fold(0.0f64, |m, f| m.max(f.w));
    let fd_max = footprints.iter().fold(0.0f64, |m, f| m.max(f.d));

    let mut placements = Vec::with_capacity(footprints.len());
    let mut next = 0usize;
    for (tray_index, tray) in trays.iter().enumerate() {
        if next == footprints.len() {
            break;
        }
        // Largest k with (k-1)*pitch + extent <= tray span.
        let cap_axis = |span: f64, extent: f64| -> usize {
            if extent > span + EDGE_EPS {
                0
            } else {
                ((span - extent) / pitch + EDGE_EPS).floor() as usize + 1
            }
        };
        let cols_cap = cap_axis(tray.width(), fw_max);
        let rows_cap = cap_axis(tray.depth(), fd_max);
        let cap = cols_cap * rows_cap;
        if cap == 0 {
            continue;
        }
        let m = (footprints.len() - next).min(cap);
        let mut cols = (m as f64).sqrt().ceil() as usize;
        cols = cols.clamp(1, cols_cap);
        let mut rows = m.div_ceil(cols);
        if rows > rows_cap {
            cols = m.div_ceil(rows_cap).clamp(1, cols_cap);
            rows = m.div_ceil(cols);
        }
        let [cx, cz] = tray.center();
        for k in 0..m {
            let (row, col) = (k / cols, k % cols);
            placements.push(Placement {
                footprint_index: next + k,
                tray_index,
                x: cx + (col as f64 - (cols as f64 - 1.0) / 2.0) * pitch,
                z: cz + (row as f64 - (rows as f64 - 1.0) / 2.0) * pitch,
            });
        }
        next += m;
    }
    if next < footprints.len() {
        return Err(ComposeError::Capacity {
            placed: next,
            needed: footprints.len(),
        });
    }
    Ok(placements)
}

/// Maximum rejection-sampling attempts per object before it is skipped.
pub const RANDOM_PLACEMENT_ATTEMPTS: usize = 100;

/// Drop footprints at uniformly random tray positions, rejecting any that
/// leave the tray or overlap a previously accepted footprint. Objects that
/// fail all attempts are skipped (absent from the result).
pub fn place_random(
    footprints: &[Footprint],
    tray: &Rect2,
    rng: &mut impl Rng,
) -> Vec<(usize, [f64; 2])> {
    let mut accepted: Vec<(usize, [f64; 2])> = Vec::new();
    'objects: for (i, f) in footprints.iter().enumerate() {
        let (hx, hz) = (f.w / 2.0, f.d / 2.0);
        if tray.min[0] + hx > tray.max[0] - hx || tray.min[1] + hz > tray.max[1] - hz {
            continue; // cannot fit at all
        }
        for _ in 0..RANDOM_PLACEMENT_ATTEMPTS {
            let c = [
                rng.gen_range(tray.min[0] + hx..=tray.max[0] - hx),
                rng.gen_range(tray.min[1] + hz..=tray.max[1] - hz),
            ];
            if accepted
                .iter()
                .all(|&(j, cj)| !rects_overlap(c, *f, cj, footprints[j]))
            {
                accepted.push((i, c));
                continue 'objects;
            }
        }
        // skipped; the caller's minimum-count rule decides if that is fatal
    }
    accepted
}

/// Result of shelf packing: placed centers plus indices that did not fit.
#[derive(Debug, Clone, PartialEq)]
pub struct BinPackOutcome {
    pub placements: Vec<(usize, [f64; 2])>,
    pub overflow: Vec<usize>,
}

/// Shelf next-fit-decreasing-height packing.
///
/// Footprints are sorted by decreasing depth (the shelf dimension) and laid
/// out in rows from the tray's min corner: left to right along x, opening a
/// new row (advanced by the tallest item of the previous row) when the
/// remaining width is exhausted. Items that no longer fit in the remaining
/// depth are returned as overflow. Positions are footprint centers.
pub fn place_binpack(
    footprints: &[Footprint],
    tray: &Rect2,
) -> Result<BinPackOutcome, ComposeError> {
    for (i, f) in footprints.iter().enumerate() {
        if f.w > tray.width() + EDGE_EPS || f.d > tray.depth() + EDGE_EPS {
            return Err(ComposeError::Oversize {
                index: i,
                w: f.w,
                d: f.d,
            });
        }
    }
    let mut order: Vec<usize> = (0..footprints.len()).collect();
    order.sort_by(|&a, &b| {
        footprints[b]
            .d
            .total_cmp(&footprints[a].d)
            .then(footprints[b].w.total_cmp(&footprints[a].w))
            .then(a.cmp(&b))
    });

    let mut placements = Vec::new();
    let mut overflow = Vec::new();
    let mut shelf_z = tray.min[1]; // front edge of the current shelf
    let mut shelf_depth = 0.0f64; // depth of the current shelf (first item)
    let mut cursor_x = tray.min[0];
    for &i in &order {
        let f = footprints[i];
        if cursor_x + f.w > tray.max[0] + EDGE_EPS {
            // row exhausted: open the next shelf
            shelf_z += shelf_depth;
            shelf_depth = 0.0;
            cursor_x = tray.min[0];
        }
        if shelf_z + f.d > tray.max[1] + EDGE_EPS {
            overflow.push(i);
            continue;
        }
        if shelf_depth == 0.0 {
            shelf_depth = f.d; // NFDH: first (deepest) item sets the shelf
        }
        placements.push((i, [cursor_x + f.w / 2.0, shelf_z + f.d / 2.0]));
        cursor_x += f.w;
    }
    Ok(BinPackOutcome {
        placements,
        overflow,
    })
}

/// Packing-density metric: total footprint area over the area of the
/// bounding rectangle enclosing all placed footprints. Higher is tighter.
pub fn utilization(footprints: &[Footprint], placed: &[(usize, [f64; 2])]) -> f64 {
    if placed.is_empty() {
        return 0.0;
    }
    let mut area = 0.0;
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for &(i, c) in placed {
        let f = footprints[i];
        area += f.w * f.d;
        lo[0] = lo[0].min(c[0] - f.w / 2.0);
        lo[1] = lo[1].min(c[1] - f.d / 2.0);
        hi[0] = hi[0].max(c[0] + f.w / 2.0);
        hi[1] = hi[1].max(c[1] + f.d / 2.0);
    }
    area / ((hi[0] - lo[0]) * (hi[1] - lo[1]))
}

/// Sample one of the three patterns according to the configured weights.
fn sample_pattern(rng: &mut impl Rng, w: &crate::config::PatternWeights) -> PlacementPattern {
    let total = w.grid + w.random + w.binpack;
    let x = rng.gen_range(0.0..total);
    if x < w.grid {
        PlacementPattern::Grid
    } else if x < w.grid + w.random {
        PlacementPattern::Random
    } else {
        PlacementPattern::BinPack
    }
}

struct Draft {
    model_index: usize,
    scale: f64,
    yaw: f64,
    albedo: [f64; 3],
    footprint: Footprint,
    label: String,
}

/// Compose a scene deterministically from `(repo, config, seed)`.
///
/// Objects that cannot be placed (full trays, rejection-sampling misses)
/// are dropped, but the result never has fewer than 5; if even 5 cannot be
/// placed the scene fails with a capacity error.
pub fn compose_scene(
    repo: &ModelRepository,
    config: &GenerationConfig,
    seed: u64,
) -> Result<Scene, ComposeError> {
    if repo.is_empty() {
        return Err(crate::meshio::MeshError::EmptyRepository.into());
    }
    config.fridge.validate()?;
    let sc = &config.scene;
    let dict = config.dictionary_size.min(repo.len()).max(1);
    let rng_for = |stream: u64| ChaCha8Rng::seed_from_u64(child_seed(seed, stream));

    let n = rng_for(seeds::STREAM_OBJECT_COUNT).gen_range(sc.min_objects..=sc.max_objects);
    let pattern = sample_pattern(&mut rng_for(seeds::STREAM_PATTERN), &sc.pattern_weights);

    let mut models_rng = rng_for(seeds::STREAM_MODELS);
    let mut scales_rng = rng_for(seeds::STREAM_SCALES);
    let mut albedo_rng = rng_for(seeds::STREAM_ALBEDO);
    let mut yaw_rng = rng_for(seeds::STREAM_YAW);
    let mut place_rng = rng_for(seeds::STREAM_PLACEMENT);

    let clearance_cap = (config
        .fridge
        .tray_clearances()
        .iter()
        .fold(f64::INFINITY, |m, &c| m.min(c))
        * 0.95)
        .max(0.01);

    let mut drafts = Vec::with_capacity(n);
    for _ in 0..n {
        let model_index = models_rng.gen_range(0..dict);
        let entry = &repo.models[model_index];
        let (hmin, hmax) = entry.height_range;
        // keep objects under the tray above them
        let target_h = scales_rng.gen_range(hmin..=hmax).min(clearance_cap);
        let scale = target_h / entry.mesh.height();
        let albedo = [
            albedo_rng.gen_range(sc.albedo_min..=sc.albedo_max),
            albedo_rng.gen_range(sc.albedo_min..=sc.albedo_max),
            albedo_rng.gen_range(sc.albedo_min..=sc.albedo_max),
        ];
        let (lo, hi) = entry.mesh.aabb();
        let (w, d) = ((hi.x - lo.x) * scale, (hi.z - lo.z) * scale);
        // Yaw is restricted to angles that keep the axis-aligned footprint
        // unchanged: quarter turns for square footprints, half turns
        // otherwise.
        let steps = if (w - d).abs() <= 1e-9 * w.max(d) { 4 } else { 2 };
        let yaw = yaw_rng.gen_range(0..steps) as f64 * (2.0 * std::f64::consts::PI / steps as f64);
        drafts.push(Draft {
            model_index,
            scale,
            yaw,
            albedo,
            footprint: Footprint { w, d },
            label: entry.label.clone(),
        });
    }

    let tray_rect = config.fridge.tray_rect();
    let n_trays = config.fridge.tray_heights.len();
    let footprints: Vec<Footprint> = drafts.iter().map(|d| d.footprint).collect();

    let placements: Vec<Placement> = match pattern {
        PlacementPattern::Grid => {
            let trays = vec![tray_rect; n_trays];
            let pitch = footprints
                .iter()
                .fold(sc.grid_pitch, |p, f| p.max(f.w).max(f.d));
            match place_grid(&footprints, &trays, pitch) {
                Ok(p) => p,
                Err(ComposeError::Capacity { placed, .. }) => {
                    // fill to capacity, drop the rest
                    place_grid(&footprints[..placed], &trays, pitch)?
                }
                Err(e) => return Err(e),
            }
        }
        PlacementPattern::Random => {
            // assign each object a tray, then rejection-sample per tray
            let tray_of: Vec<usize> = (0..footprints.len())
                .map(|_| place_rng.gen_range(0..n_trays))
                .collect();
            let mut placements = Vec::new();
            for tray_index in 0..n_trays {
                let member_ids: Vec<usize> = (0..footprints.len())
                    .filter(|&i| tray_of[i] == tray_index)
                    .collect();
                let members: Vec<Footprint> =
                    member_ids.iter().map(|&i| footprints[i]).collect();
                for (local, c) in place_random(&members, &tray_rect, &mut place_rng) {
                    placements.push(Placement {
                        footprint_index: member_ids[local],
                        tray_index,
                        x: c[0],
                        z: c[1],
                    });
                }
            }
            placements.sort_by_key(|p| p.footprint_index);
            placements
        }
        PlacementPattern::BinPack => {
            let mut placements = Vec::new();
            // drop footprints that could never fit instead of erroring
            let mut pending: Vec<usize> = (0..footprints.len())
                .filter(|&i| {
                    footprints[i].w <= tray_rect.width() + EDGE_EPS
                        && footprints[i].d <= tray_rect.depth() + EDGE_EPS
                })
                .collect();
            for tray_index in 0..n_trays {
                if pending.is_empty() {
                    break;
                }
                let members: Vec<Footprint> = pending.iter().map(|&i| footprints[i]).collect();
                let outcome = place_binpack(&members, &tray_rect)?;
                for (local, c) in outcome.placements {
                    placements.push(Placement {
                        footprint_index: pending[local],
                        tray_index,
                        x: c[0],
                        z: c[1],
                    });
                }
                pending = outcome.overflow.into_iter().map(|l| pending[l]).collect();
            }
            placements.sort_by_key(|p| p.footprint_index);
            placements
        }
    };

    if placements.len() < 5 {
        return Err(ComposeError::Capacity {
            placed: placements.len(),
            needed: 5,
        });
    }

    let objects: Vec<SceneObject> = placements
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let d = &drafts[p.footprint_index];
            SceneObject {
                model_index: d.model_index,
                pose: Pose::yaw_then_translate(
                    d.yaw,
                    Vector3::new(p.x, config.fridge.tray_heights[p.tray_index], p.z),
                ),
                scale: d.scale,
                albedo: d.albedo,
                instance_id: (k + 1) as u16,
                class_label: d.label.clone(),
            }
        })
        .collect();

    // lights: positions inside the interior, brightness log-uniform so dim
    // settings are represented
    let mut lights_rng = rng_for(seeds::STREAM_LIGHTS);
    let n_lights = lights_rng.gen_range(sc.min_lights..=sc.max_lights);
    let f = &config.fridge;
    let margin = 0.05;
    let lights: Vec<Light> = (0..n_lights)
        .map(|_| {
            let position = Point3::new(
                lights_rng.gen_range(-f.interior_width / 2.0 + margin..=f.interior_width / 2.0 - margin),
                lights_rng.gen_range(margin..=f.interior_height - margin),
                lights_rng.gen_range(-f.interior_depth / 2.0 + margin..=f.interior_depth / 2.0 - margin),
            );
            let brightness = (lights_rng
                .gen_range(sc.light_brightness_min.ln()..=sc.light_brightness_max.ln()))
            .exp();
            let intensity = [
                brightness * lights_rng.gen_range(0.85..=1.0),
                brightness * lights_rng.gen_range(0.85..=1.0),
                brightness * lights_rng.gen_range(0.85..=1.0),
            ];
            Light {
                position,
                intensity,
            }
        })
        .collect();

    // cameras: in front of the opening, aimed at a random point on a random
    // tray
    let mut cam_rng = rng_for(seeds::STREAM_CAMERAS);
    let n_cams = cam_rng.gen_range(sc.min_cameras..=sc.max_cameras);
    let cc = &config.camera;
    let cameras: Vec<Camera> = (0..n_cams)
        .map(|_| {
            let standoff = cam_rng.gen_range(sc.camera_standoff_min..=sc.camera_standoff_max);
            let eye = Point3::new(
                cam_rng.gen_range(-0.4 * f.interior_width..=0.4 * f.interior_width),
                cam_rng.gen_range(0.3 * f.interior_height..=0.95 * f.interior_height),
                -f.interior_depth / 2.0 - standoff,
            );
            let tray_y = f.tray_heights[cam_rng.gen_range(0..f.tray_heights.len())];
            let target = Point3::new(
                cam_rng.gen_range(-0.4 * f.interior_width..=0.4 * f.interior_width),
                tray_y,
                cam_rng.gen_range(-0.4 * f.interior_depth..=0.4 * f.interior_depth),
            );
            Camera::look_at(eye, target, cc.fx, cc.fy, cc.cx, cc.cy, cc.width, cc.height)
        })
        .collect();

    let mut fridge_rng = rng_for(seeds::STREAM_FRIDGE);
    let wall_albedo = [
        fridge_rng.gen_range(f.wall_albedo_min[0]..=f.wall_albedo_max[0]),
        fridge_rng.gen_range(f.wall_albedo_min[1]..=f.wall_albedo_max[1]),
        fridge_rng.gen_range(f.wall_albedo_min[2]..=f.wall_albedo_max[2]),
    ];

    let scene = Scene {
        fridge: config.fridge.clone(),
        wall_albedo,
        ambient: sc.ambient,
        pattern,
        objects,
        lights,
        cameras,
        seed,
    };
    scene.validate()?;
    Ok(scene)
}

/// World-space footprint rectangle of a placed object (for invariant checks).
pub fn object_footprint(repo: &ModelRepository, obj: &SceneObject) -> Rect2 {
    let mesh = repo.models[obj.model_index]
        .mesh
        .transformed(obj.scale, &obj.pose);
    let (lo, hi) = mesh.aabb();
    Rect2 {
        min: [lo.x, lo.z],
        max: [hi.x, hi.z],
    }
}
