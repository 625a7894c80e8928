//! Derive per-object 2D boxes, truncation, and occlusion from rendered
//! instance maps, apply the neglect rule, and read/write KITTI label files.
//!
//! Occlusion comes from the visibility ratio of full vs solo pixel counts,
//! where the solo render removes every other object (the occlusion oracle).
//! Truncation is measured in image space: the fraction of the object's solo
//! silhouette falling outside the frame, counted on a canvas three times the
//! image size under the same camera.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::composer::Scene;
use crate::config::AnnotateConfig;
use crate::geometry::BBox2D;
use crate::meshio::ModelRepository;
use crate::renderer::{RenderOutput, SceneRenderer};

#[derive(Debug, thiserror::Error)]
pub enum AnnotateError {
    #[error("missing solo render for instance {0}")]
    IncompleteOracle(u16),
    #[error("camera index {0} out of range")]
    BadCameraIndex(usize),
    #[error("solo canvas {got_w}x{got_h} is not the {factor}x extension of {w}x{h}")]
    BadCanvas {
        got_w: u32,
        got_h: u32,
        factor: u32,
        w: u32,
        h: u32,
    },
    #[error(transparent)]
    Render(#[from] crate::renderer::RenderError),
}

#[derive(Debug, thiserror::Error)]
pub enum KittiError {
    #[error("line {line}: expected at least {expected} fields, got {got}")]
    Arity {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}, column {column}: cannot parse '{token}' as a number")]
    NotNumeric {
        line: usize,
        column: usize,
        token: String,
    },
    #[error("line {line}: degenerate bbox ({x1}, {y1}, {x2}, {y2})")]
    BadBBox {
        line: usize,
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
    },
}

/// KITTI occlusion states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Occlusion {
    FullyVisible = 0,
    PartlyOccluded = 1,
    LargelyOccluded = 2,
}

impl Occlusion {
    pub fn as_int(self) -> i64 {
        self as i64
    }

    /// Tolerant mapping from KITTI integers; out-of-range values (KITTI's
    /// "unknown" 3, DontCare's -1) map to largely occluded.
    pub fn from_int(v: i64) -> Occlusion {
        match v {
            0 => Occlusion::FullyVisible,
            1 => Occlusion::PartlyOccluded,
            _ => Occlusion::LargelyOccluded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectAnnotation {
    pub class_label: String,
    pub bbox: BBox2D,
    /// Fraction of the silhouette outside the frame, in [0, 1].
    pub truncation: f64,
    pub occlusion: Occlusion,
    /// Neglected objects are excluded from coverage encoding and evaluated
    /// as don't-care regions.
    pub ignore: bool,
}

/// Canvas scale for the truncation oracle.
pub const EXTENDED_FACTOR: u32 = 3;

struct PixelCounts {
    bounds: Option<(u32, u32, u32, u32)>,
    visible: u64,
    solo_in_frame: u64,
    solo_total: u64,
}

fn annotation_from_counts(
    label: &str,
    counts: &PixelCounts,
    cfg: &AnnotateConfig,
) -> Option<ObjectAnnotation> {
    let (x0, y0, x1, y1) = counts.bounds?;
    if counts.visible == 0 {
        return None;
    }
    // tight box over the object's pixels in the full map; a pixel spans the
    // unit square it owns, so the right/bottom edges are max + 1
    let bbox = BBox2D::new(
        f64::from(x0),
        f64::from(y0),
        f64::from(x1) + 1.0,
        f64::from(y1) + 1.0,
    )
    .expect("pixel bounds are non-degenerate");
    let visibility = (counts.visible as f64 / counts.solo_in_frame.max(1) as f64).clamp(0.0, 1.0);
    let occlusion = if visibility >= cfg.visible_min {
        Occlusion::FullyVisible
    } else if visibility >= cfg.partial_min {
        Occlusion::PartlyOccluded
    } else {
        Occlusion::LargelyOccluded
    };
    let truncation =
        (1.0 - counts.solo_in_frame as f64 / counts.solo_total.max(1) as f64).clamp(0.0, 1.0);
    let ignore = truncation > cfg.max_truncation
        || occlusion == Occlusion::LargelyOccluded
        || counts.visible < cfg.min_pixels;
    Some(ObjectAnnotation {
        class_label: label.to_string(),
        bbox,
        truncation,
        occlusion,
        ignore,
    })
}

fn counts_from_solo(full: &RenderOutput, solo: &RenderOutput, id: u16) -> PixelCounts {
    // the original frame sits centered in the extended canvas
    let ox = (solo.width - full.width) / 2;
    let oy = (solo.height - full.height) / 2;
    PixelCounts {
        bounds: full.instance_bounds(id),
        visible: full.count_instance(id),
        solo_in_frame: solo.count_instance_in(id, ox, oy, ox + full.width, oy + full.height),
        solo_total: solo.count_instance(id),
    }
}

/// Annotate every object of the scene visible from the given camera.
///
/// `full` is the standard-frame render; `solos` maps each instance id to its
/// solo render on the extended (3x) canvas. Objects with zero visible pixels
/// are dropped; the rest come back in instance-id order.
pub fn annotate_scene(
    scene: &Scene,
    camera_index: usize,
    full: &RenderOutput,
    solos: &BTreeMap<u16, RenderOutput>,
    cfg: &AnnotateConfig,
) -> Result<Vec<ObjectAnnotation>, AnnotateError> {
    let camera = scene
        .cameras
        .get(camera_index)
        .ok_or(AnnotateError::BadCameraIndex(camera_index))?;
    let mut out = Vec::new();
    let mut objects: Vec<_> = scene.objects.iter().collect();
    objects.sort_by_key(|o| o.instance_id);
    for o in objects {
        let id = o.instance_id;
        let solo = solos.get(&id).ok_or(AnnotateError::IncompleteOracle(id))?;
        let want = (
            camera.width * EXTENDED_FACTOR,
            camera.height * EXTENDED_FACTOR,
        );
        if (solo.width, solo.height) != want {
            return Err(AnnotateError::BadCanvas {
                got_w: solo.width,
                got_h: solo.height,
                factor: EXTENDED_FACTOR,
                w: camera.width,
                h: camera.height,
            });
        }
        if let Some(a) =
            annotation_from_counts(&o.class_label, &counts_from_solo(full, solo, id), cfg)
        {
            out.push(a);
        }
    }
    Ok(out)
}

/// Render and annotate in one pass, streaming one solo render at a time so
/// peak memory stays at two canvases. Returns the full render for reuse.
pub fn annotate_rendered(
    repo: &ModelRepository,
    scene: &Scene,
    camera_index: usize,
    cfg: &AnnotateConfig,
) -> Result<(RenderOutput, Vec<ObjectAnnotation>), AnnotateError> {
    let camera = scene
        .cameras
        .get(camera_index)
        .cloned()
        .ok_or(AnnotateError::BadCameraIndex(camera_index))?;
    let full = SceneRenderer::new(repo, scene, camera.clone()).full();
    let ext = SceneRenderer::new(repo, scene, camera.extended(EXTENDED_FACTOR));
    let mut out = Vec::new();
    let mut objects: Vec<_> = scene.objects.iter().collect();
    objects.sort_by_key(|o| o.instance_id);
    for o in objects {
        let solo = ext.solo(o.instance_id)?;
        if let Some(a) = annotation_from_counts(
            &o.class_label,
            &counts_from_solo(&full, &solo, o.instance_id),
            cfg,
        ) {
            out.push(a);
        }
    }
    Ok((full, out))
}

/// KITTI class name for neglected objects.
pub const DONT_CARE: &str = "DontCare";

/// Sentinels for the 3D fields this pipeline does not compute.
pub const ALPHA_SENTINEL: f64 = -10.0;
pub const DIMENSION_SENTINEL: f64 = -1.0;
pub const LOCATION_SENTINEL: f64 = -1.0;
pub const ROTATION_Y_SENTINEL: f64 = -10.0;

/// The 15 standard KITTI label fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KittiRecord {
    pub kind: String,
    pub truncated: f64,
    pub occluded: i64,
    pub alpha: f64,
    pub bbox: [f64; 4],
    /// height, width, length (m)
    pub dimensions: [f64; 3],
    /// x, y, z (m) in camera coordinates
    pub location: [f64; 3],
    pub rotation_y: f64,
}

impl KittiRecord {
    pub fn from_annotation(a: &ObjectAnnotation) -> KittiRecord {
        KittiRecord {
            kind: if a.ignore {
                DONT_CARE.to_string()
            } else {
                a.class_label.clone()
            },
            truncated: a.truncation,
            occluded: a.occlusion.as_int(),
            alpha: ALPHA_SENTINEL,
            bbox: a.bbox.corners(),
            dimensions: [DIMENSION_SENTINEL; 3],
            location: [LOCATION_SENTINEL; 3],
            rotation_y: ROTATION_Y_SENTINEL,
        }
    }

    /// One KITTI line: 15 space-separated fields, floats with exactly two
    /// decimals, occlusion as a bare integer.
    pub fn to_line(&self) -> String {
        format!(
            "{} {:.2} {} {:.2} {:.2} {:.2} {:.2} {:.2} {:.2} {:.2} {:.2} {:.2} {:.2} {:.2} {:.2}",
            self.kind,
            self.truncated,
            self.occluded,
            self.alpha,
            self.bbox[0],
            self.bbox[1],
            self.bbox[2],
            self.bbox[3],
            self.dimensions[0],
            self.dimensions[1],
            self.dimensions[2],
            self.location[0],
            self.location[1],
            self.location[2],
            self.rotation_y,
        )
    }

    pub fn to_annotation(&self, line: usize) -> Result<ObjectAnnotation, KittiError> {
        let [x1, y1, x2, y2] = self.bbox;
        let bbox = BBox2D::new(x1, y1, x2, y2).map_err(|_| KittiError::BadBBox {
            line,
            x1,
            y1,
            x2,
            y2,
        })?;
        Ok(ObjectAnnotation {
            class_label: self.kind.clone(),
            bbox,
            truncation: self.truncated.clamp(0.0, 1.0),
            occlusion: Occlusion::from_int(self.occluded),
            ignore: self.kind == DONT_CARE,
        })
    }
}

/// Serialize annotations to KITTI text: one newline-terminated line per
/// object in the given (instance-id) order; neglected objects become
/// `DontCare` records that keep their measured bbox/truncation/occlusion.
pub fn write_kitti(annotations: &[ObjectAnnotation]) -> String {
    let mut out = String::new();
    for a in annotations {
        out.push_str(&KittiRecord::from_annotation(a).to_line());
        out.push('\n');
    }
    out
}

fn parse_f64(tok: &str, line: usize, column: usize) -> Result<f64, KittiError> {
    tok.parse().map_err(|_| KittiError::NotNumeric {
        line,
        column,
        token: tok.to_string(),
    })
}

/// Parse a KITTI record from one line. At least 8 fields (through the bbox)
/// are required; missing trailing fields fall back to sentinels and extra
/// trailing fields are ignored.
pub fn parse_kitti_line(line_text: &str, line: usize) -> Result<KittiRecord, KittiError> {
    let fields: Vec<&str> = line_text.split_whitespace().collect();
    if fields.len() < 8 {
        return Err(KittiError::Arity {
            line,
            expected: 8,
            got: fields.len(),
        });
    }
    let num = |i: usize| parse_f64(fields[i], line, i + 1);
    let opt = |i: usize, sentinel: f64| -> Result<f64, KittiError> {
        if i < fields.len() {
            num(i)
        } else {
            Ok(sentinel)
        }
    };
    let occluded = num(2)? as i64;
    Ok(KittiRecord {
        kind: fields[0].to_string(),
        truncated: num(1)?,
        occluded,
        alpha: num(3)?,
        bbox: [num(4)?, num(5)?, num(6)?, num(7)?],
        dimensions: [
            opt(8, DIMENSION_SENTINEL)?,
            opt(9, DIMENSION_SENTINEL)?,
            opt(10, DIMENSION_SENTINEL)?,
        ],
        location: [
            opt(11, LOCATION_SENTINEL)?,
            opt(12, LOCATION_SENTINEL)?,
            opt(13, LOCATION_SENTINEL)?,
        ],
        rotation_y: opt(14, ROTATION_Y_SENTINEL)?,
    })
}

/// Parse a KITTI label file. `DontCare` records come back with
/// `ignore = true`; blank lines are skipped.
pub fn parse_kitti(text: &str) -> Result<Vec<ObjectAnnotation>, KittiError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        out.push(parse_kitti_line(raw, line)?.to_annotation(line)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composer::{FridgeSpec, Light, PlacementPattern, Scene, SceneObject};
    use crate::geometry::{Camera, Pose};
    use crate::meshio::{make_primitive, ModelEntry, PrimitiveKind};
    use nalgebra::{Point3, Vector3};
    use proptest::prelude::*;

    fn box_repo() -> ModelRepository {
        ModelRepository::new(vec![ModelEntry {
            mesh: make_primitive(PrimitiveKind::Box, [1.0, 1.0, 1.0]).unwrap(),
            label: "product".into(),
            height_range: (1.0, 1.0),
        }])
        .unwrap()
    }

    fn obj(id: u16, scale: f64, at: [f64; 3]) -> SceneObject {
        SceneObject {
            model_index: 0,
            pose: Pose::translate(Vector3::new(at[0], at[1], at[2])),
            scale,
            albedo: [0.7, 0.4, 0.3],
            instance_id: id,
            class_label: "product".into(),
        }
    }

    fn scene_with(objects: Vec<SceneObject>, camera: Camera) -> Scene {
        Scene {
            fridge: FridgeSpec::default(),
            wall_albedo: [0.9, 0.9, 0.92],
            ambient: 0.2,
            pattern: PlacementPattern::Random,
            objects,
            lights: vec![Light {
                position: Point3::new(0.0, 1.3, -0.1),
                intensity: [1.0, 1.0, 1.0],
            }],
            cameras: vec![camera],
            seed: 0,
        }
    }

    fn head_on_camera() -> Camera {
        Camera::look_at(
            Point3::new(0.0, 0.8, -1.2),
            Point3::new(0.0, 0.8, 1.0),
            450.0,
            450.0,
            256.0,
            256.0,
            512,
            512,
        )
    }

    #[test]
    fn fully_visible_object_has_zero_truncation_and_occlusion() {
        let repo = box_repo();
        let scene = scene_with(vec![obj(1, 0.3, [0.0, 0.65, 0.0])], head_on_camera());
        let (_, anns) = annotate_rendered(&repo, &scene, 0, &AnnotateConfig::default()).unwrap();
        assert_eq!(anns.len(), 1);
        let a = &anns[0];
        assert_eq!(a.truncation, 0.0);
        assert_eq!(a.occlusion, Occlusion::FullyVisible);
        assert!(!a.ignore);
    }

    #[test]
    fn half_out_of_frame_truncation_near_half() {
        let repo = box_repo();
        // Slide the box so its silhouette is bisected by the right frame
        // edge: at the front-face depth, the edge ray hits x = (512-cx)z/fx.
        let cam = head_on_camera();
        let depth = 1.2 - 0.15; // camera z to box front face
        let x_edge = (512.0 - cam.cx) * depth / cam.fx;
        let scene = scene_with(vec![obj(1, 0.3, [x_edge, 0.65, 0.0])], cam);
        let (_, anns) = annotate_rendered(&repo, &scene, 0, &AnnotateConfig::default()).unwrap();
        assert_eq!(anns.len(), 1);
        let a = &anns[0];
        assert!(
            (a.truncation - 0.5).abs() <= 0.02,
            "truncation {} not ~0.5",
            a.truncation
        );
        assert!(a.ignore, "truncation above 0.3 must be neglected");
    }

    #[test]
    fn majority_occluded_object_is_state_two_and_ignored() {
        let repo = box_repo();
        // Back box dead-center at camera height; front box covers exactly the
        // left 60% of its silhouette. The back silhouette spans
        // u in [256-50, 256+50] (front face at depth 1.35, half-extent
        // 450*0.15/1.35 = 50); the occluder's right edge at its own near
        // face depth 0.95 must land at u = 206 + 60 = 266.
        let cam = head_on_camera();
        let back = obj(1, 0.3, [0.0, 0.65, 0.3]);
        let dx = 10.0 * 0.95 / 450.0 - 0.15;
        let front = obj(2, 0.3, [dx, 0.62, -0.1]);
        let scene = scene_with(vec![back, front], cam);
        let (full, anns) =
            annotate_rendered(&repo, &scene, 0, &AnnotateConfig::default()).unwrap();
        let solo = SceneRenderer::new(&repo, &scene, scene.cameras[0].extended(EXTENDED_FACTOR))
            .solo(1)
            .unwrap();
        let (ox, oy) = (full.width, full.height); // extended offsets
        let in_frame = solo.count_instance_in(1, ox, oy, 2 * ox, 2 * oy);
        let ratio = full.count_instance(1) as f64 / in_frame as f64;
        assert!(
            (ratio - 0.4).abs() <= 0.02,
            "expected 40% visibility, got {ratio}"
        );
        let a = anns
            .iter()
            .find(|a| a.occlusion == Occlusion::LargelyOccluded)
            .expect("back box should be largely occluded");
        assert!(a.ignore);
    }

    #[test]
    fn occlusion_state_monotone_under_added_occluder() {
        let repo = box_repo();
        let cam = head_on_camera();
        let base = scene_with(vec![obj(1, 0.3, [0.0, 0.65, 0.3])], cam.clone());
        let (_, without) = annotate_rendered(&repo, &base, 0, &AnnotateConfig::default()).unwrap();
        let mut occluded_scene = base.clone();
        occluded_scene.objects.push(obj(2, 0.35, [-0.05, 0.62, -0.15]));
        let (_, with) =
            annotate_rendered(&repo, &occluded_scene, 0, &AnnotateConfig::default()).unwrap();
        // annotations are in instance-id order; object 1 is first in both
        assert!(with[0].occlusion >= without[0].occlusion);
    }

    #[test]
    fn annotate_scene_requires_every_solo() {
        let repo = box_repo();
        let scene = scene_with(vec![obj(1, 0.3, [0.0, 0.65, 0.0])], head_on_camera());
        let full = crate::renderer::render(&repo, &scene, 0).unwrap();
        let err = annotate_scene(&scene, 0, &full, &BTreeMap::new(), &AnnotateConfig::default())
            .unwrap_err();
        assert!(matches!(err, AnnotateError::IncompleteOracle(1)));
    }

    #[test]
    fn annotate_scene_matches_streaming_path() {
        let repo = box_repo();
        let scene = scene_with(
            vec![obj(1, 0.3, [-0.2, 0.65, 0.0]), obj(2, 0.3, [0.2, 0.65, 0.1])],
            head_on_camera(),
        );
        let cfg = AnnotateConfig::default();
        let (full, streamed) = annotate_rendered(&repo, &scene, 0, &cfg).unwrap();
        let ext = SceneRenderer::new(&repo, &scene, scene.cameras[0].extended(EXTENDED_FACTOR));
        let mut solos = BTreeMap::new();
        for id in [1u16, 2u16] {
            solos.insert(id, ext.solo(id).unwrap());
        }
        let batch = annotate_scene(&scene, 0, &full, &solos, &cfg).unwrap();
        assert_eq!(streamed, batch);
    }

    #[test]
    fn bbox_contains_every_instance_pixel() {
        let repo = ModelRepository::procedural(8, 3).unwrap();
        let cfg = crate::config::GenerationConfig::default();
        let scene = crate::composer::compose_scene(&repo, &cfg, 9).unwrap();
        let (full, anns) = annotate_rendered(&repo, &scene, 0, &cfg.annotate).unwrap();
        for a in &anns {
            assert!(a.bbox.x1 >= 0.0 && a.bbox.y1 >= 0.0);
            assert!(a.bbox.x2 <= f64::from(full.width));
            assert!(a.bbox.y2 <= f64::from(full.height));
        }
        for id in scene.objects.iter().map(|o| o.instance_id) {
            if let Some((x0, y0, x1, y1)) = full.instance_bounds(id) {
                let hit = anns.iter().any(|a| {
                    a.bbox.x1 <= f64::from(x0)
                        && a.bbox.y1 <= f64::from(y0)
                        && a.bbox.x2 >= f64::from(x1) + 1.0
                        && a.bbox.y2 >= f64::from(y1) + 1.0
                });
                assert!(hit, "no annotation covers instance {id}");
            }
        }
    }

    #[test]
    fn golden_kitti_line() {
        let a = ObjectAnnotation {
            class_label: "product".into(),
            bbox: BBox2D::new(10.0, 20.0, 110.0, 220.0).unwrap(),
            truncation: 0.0,
            occlusion: Occlusion::FullyVisible,
            ignore: false,
        };
        assert_eq!(
            write_kitti(&[a]),
            "product 0.00 0 -10.00 10.00 20.00 110.00 220.00 -1.00 -1.00 -1.00 -1.00 -1.00 -1.00 -10.00\n"
        );
    }

    #[test]
    fn empty_list_writes_empty_file() {
        assert_eq!(write_kitti(&[]), "");
        assert!(parse_kitti("").unwrap().is_empty());
    }

    #[test]
    fn ignored_objects_become_dont_care() {
        let a = ObjectAnnotation {
            class_label: "product".into(),
            bbox: BBox2D::new(1.0, 2.0, 3.0, 4.0).unwrap(),
            truncation: 0.6,
            occlusion: Occlusion::PartlyOccluded,
            ignore: true,
        };
        let text = write_kitti(&[a]);
        assert!(text.starts_with("DontCare 0.60 1 "), "{text}");
        let back = parse_kitti(&text).unwrap();
        assert!(back[0].ignore);
        assert_eq!(back[0].truncation, 0.6);
    }

    #[test]
    fn seven_fields_is_an_arity_error() {
        let err = parse_kitti("product 0.00 0 -10.00 10.00 20.00 110.00\n").unwrap_err();
        match err {
            KittiError::Arity { line, got, .. } => {
                assert_eq!(line, 1);
                assert_eq!(got, 7);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_numeric_field_names_line_and_column() {
        let err = parse_kitti("product 0.00 0 -10.00 10.00 oops 110.00 220.00\n").unwrap_err();
        match err {
            KittiError::NotNumeric {
                line,
                column,
                token,
            } => {
                assert_eq!(line, 1);
                assert_eq!(column, 6);
                assert_eq!(token, "oops");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dont_care_with_sentinel_fields_parses_ignored() {
        let anns = parse_kitti("DontCare -1 -1 -10 0 0 50 50\n").unwrap();
        assert_eq!(anns.len(), 1);
        assert!(anns[0].ignore);
        assert_eq!(anns[0].truncation, 0.0); // clamped
        assert_eq!(anns[0].bbox, BBox2D::new(0.0, 0.0, 50.0, 50.0).unwrap());
    }

    #[test]
    fn extra_trailing_fields_are_tolerated() {
        let anns = parse_kitti(
            "product 0.00 0 -10.00 10.00 20.00 110.00 220.00 -1 -1 -1 -1 -1 -1 -10 0.87\n",
        )
        .unwrap();
        assert_eq!(anns.len(), 1);
    }

    fn arb_annotation() -> impl Strategy<Value = ObjectAnnotation> {
        (
            0.0f64..400.0,
            0.0f64..400.0,
            1.0f64..100.0,
            1.0f64..100.0,
            0.0f64..1.0,
            0..3i64,
            proptest::bool::ANY,
        )
            .prop_map(|(x, y, w, h, t, occ, ignore)| ObjectAnnotation {
                class_label: "product".into(),
                bbox: BBox2D::new(x, y, x + w, y + h).unwrap(),
                truncation: t,
                occlusion: Occlusion::from_int(occ),
                ignore,
            })
    }

    proptest! {
        #[test]
        fn kitti_round_trip(anns in proptest::collection::vec(arb_annotation(), 0..12)) {
            let text = write_kitti(&anns);
            let back = parse_kitti(&text).unwrap();
            prop_assert_eq!(back.len(), anns.len());
            for (b, a) in back.iter().zip(&anns) {
                prop_assert!((b.bbox.x1 - a.bbox.x1).abs() <= 0.01);
                prop_assert!((b.bbox.y1 - a.bbox.y1).abs() <= 0.01);
                prop_assert!((b.bbox.x2 - a.bbox.x2).abs() <= 0.01);
                prop_assert!((b.bbox.y2 - a.bbox.y2).abs() <= 0.01);
                prop_assert!((b.truncation - a.truncation).abs() <= 0.005 + 1e-9);
                prop_assert_eq!(b.occlusion, a.occlusion);
                prop_assert_eq!(b.ignore, a.ignore);
                if !a.ignore {
                    prop_assert_eq!(&b.class_label, &a.class_label);
                }
            }
        }
    }
}
