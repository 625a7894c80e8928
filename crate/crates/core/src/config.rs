//! Declarative generation configuration.
//!
//! One document drives the whole pipeline: scene randomization ranges,
//! camera intrinsics, annotation/neglect thresholds, coverage-grid stride,
//! decoder parameters, and evaluation threshold. The CLI deserializes it
//! from TOML; defaults here are the documented baseline.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::composer::FridgeSpec;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config invalid: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// Where the object repository comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepositorySource {
    /// Seeded primitive products (cartons, cans, bottles); no assets needed.
    Procedural,
    /// Every `.obj` under `path`, rebased to rest on y = 0.
    ObjDir,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RepositoryConfig {
    pub source: RepositorySource,
    /// Total number of models (procedural source).
    pub size: usize,
    /// Directory of .obj files (obj_dir source).
    pub path: Option<PathBuf>,
    /// Class label for obj_dir models.
    pub label: String,
    /// Physical height range (m) assigned to obj_dir models.
    pub min_height: f64,
    pub max_height: f64,
}

impl Default for RepositoryConfig {
    fn default() -> Self {
        Self {
            source: RepositorySource::Procedural,
            size: 64,
            path: None,
            label: "product".into(),
            min_height: 0.08,
            max_height: 0.3,
        }
    }
}

/// Per-scene randomization ranges.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneConfig {
    pub min_objects: usize,
    pub max_objects: usize,
    /// Relative weights for the grid / random / binpack patterns.
    pub pattern_weights: PatternWeights,
    /// Grid lattice pitch in meters (raised to the widest footprint when
    /// needed so neighbors cannot interpenetrate).
    pub grid_pitch: f64,
    pub min_lights: usize,
    pub max_lights: usize,
    /// Light brightness is log-uniform over this range so dim interiors are
    /// well represented.
    pub light_brightness_min: f64,
    pub light_brightness_max: f64,
    pub min_cameras: usize,
    pub max_cameras: usize,
    /// Camera distance in front of the fridge opening, meters.
    pub camera_standoff_min: f64,
    pub camera_standoff_max: f64,
    /// Constant ambient illumination term.
    pub ambient: f64,
    /// Per-channel object albedo range.
    pub albedo_min: f64,
    pub albedo_max: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct PatternWeights {
    pub grid: f64,
    pub random: f64,
    pub binpack: f64,
}

impl Default for PatternWeights {
    fn default() -> Self {
        Self {
            grid: 1.0,
            random: 1.0,
            binpack: 1.0,
        }
    }
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            min_objects: 5,
            max_objects: 25,
            pattern_weights: PatternWeights::default(),
            grid_pitch: 0.12,
            min_lights: 1,
            max_lights: 3,
            light_brightness_min: 0.05,
            light_brightness_max: 1.5,
            min_cameras: 1,
            max_cameras: 4,
            camera_standoff_min: 0.45,
            camera_standoff_max: 1.1,
            ambient: 0.15,
            albedo_min: 0.05,
            albedo_max: 0.95,
        }
    }
}

/// Pinhole intrinsics used for every generated camera.
///
/// fx = fy = 450 px at 512x512 is roughly a 60 degree horizontal field of
/// view, wide enough that a full tray fits at typical standoff.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CameraConfig {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl Default for CameraConfig {
    fn default() -> Self {
        Self {
            fx: 450.0,
            fy: 450.0,
            cx: 256.0,
            cy: 256.0,
            width: 512,
            height: 512,
        }
    }
}

/// Thresholds for deriving and neglecting annotations.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnotateConfig {
    /// Ignore objects with truncation above this.
    pub max_truncation: f64,
    /// Ignore objects with fewer visible pixels than this.
    pub min_pixels: u64,
    /// Visibility ratio at or above which an object counts as fully visible.
    pub visible_min: f64,
    /// Visibility ratio at or above which an object counts as partly (rather
    /// than largely) occluded. Largely occluded objects are ignored.
    pub partial_min: f64,
}

impl Default for AnnotateConfig {
    fn default() -> Self {
        Self {
            max_truncation: 0.3,
            min_pixels: 25,
            visible_min: 0.9,
            partial_min: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct EncodeConfig {
    /// Coverage-grid cell size in pixels; must divide the image dimensions.
    pub stride: u32,
}

impl Default for EncodeConfig {
    fn default() -> Self {
        Self { stride: 16 }
    }
}

/// Detection-decoder parameters (coverage threshold and clustering).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct DecodeConfig {
    pub coverage_threshold: f64,
    pub cluster_iou: f64,
    pub min_cluster: usize,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self {
            coverage_threshold: 0.6,
            cluster_iou: 0.5,
            min_cluster: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub iou_threshold: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            iou_threshold: 0.5,
        }
    }
}

/// Loss weights for the weighted total loss.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct LossWeights {
    pub coverage: f64,
    pub bbox: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            coverage: 1.0,
            bbox: 2.0,
        }
    }
}

/// The full dataset-generation configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationConfig {
    pub version: u32,
    /// Number of images to generate.
    pub dataset_size: usize,
    /// How many repository models scenes may draw from (a prefix of the
    /// repository, so sweep subsets nest).
    pub dictionary_size: usize,
    /// Master seed; image i derives its scene seed from (seed, i).
    pub seed: u64,
    pub output_dir: PathBuf,
    pub repository: RepositoryConfig,
    pub fridge: FridgeSpec,
    pub scene: SceneConfig,
    pub camera: CameraConfig,
    pub annotate: AnnotateConfig,
    pub encode: EncodeConfig,
    pub decode: DecodeConfig,
    pub eval: EvalConfig,
    pub loss_weights: LossWeights,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            version: 1,
            dataset_size: 10,
            dictionary_size: 64,
            seed: 1,
            output_dir: PathBuf::from("out"),
            repository: RepositoryConfig::default(),
            fridge: FridgeSpec::default(),
            scene: SceneConfig::default(),
            camera: CameraConfig::default(),
            annotate: AnnotateConfig::default(),
            encode: EncodeConfig::default(),
            decode: DecodeConfig::default(),
            eval: EvalConfig::default(),
            loss_weights: LossWeights::default(),
        }
    }
}

impl GenerationConfig {
    /// Validate every range; returns the first violation found.
    pub fn validate(&self, repository_size: usize) -> Result<(), ConfigError> {
        if self.dataset_size < 1 {
            return Err(invalid("dataset_size must be >= 1"));
        }
        if self.dictionary_size < 1 || self.dictionary_size > repository_size {
            return Err(invalid(format!(
                "dictionary_size {} must be in 1..={repository_size}",
                self.dictionary_size
            )));
        }
        self.fridge.validate().map_err(|e| invalid(e.to_string()))?;
        let s = &self.scene;
        if !(5..=25).contains(&s.min_objects)
            || !(5..=25).contains(&s.max_objects)
            || s.min_objects > s.max_objects
        {
            return Err(invalid("object count range must satisfy 5 <= min <= max <= 25"));
        }
        let w = &s.pattern_weights;
        if w.grid < 0.0 || w.random < 0.0 || w.binpack < 0.0 || w.grid + w.random + w.binpack <= 0.0
        {
            return Err(invalid("pattern weights must be nonnegative with positive sum"));
        }
        if s.grid_pitch <= 0.0 {
            return Err(invalid("grid_pitch must be positive"));
        }
        if s.min_lights < 1 || s.min_lights > s.max_lights {
            return Err(invalid("light count range must satisfy 1 <= min <= max"));
        }
        if s.light_brightness_min <= 0.0 || s.light_brightness_min > s.light_brightness_max {
            return Err(invalid("light brightness range must be positive and ordered"));
        }
        if s.min_cameras < 1 || s.min_cameras > s.max_cameras || s.max_cameras > 4 {
            return Err(invalid("camera count range must satisfy 1 <= min <= max <= 4"));
        }
        if s.camera_standoff_min <= 0.0 || s.camera_standoff_min > s.camera_standoff_max {
            return Err(invalid("camera standoff range must be positive and ordered"));
        }
        if !(0.0..=1.0).contains(&s.ambient) {
            return Err(invalid("ambient must be in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&s.albedo_min)
            || !(0.0..=1.0).contains(&s.albedo_max)
            || s.albedo_min > s.albedo_max
        {
            return Err(invalid("albedo range must be ordered within [0, 1]"));
        }
        let c = &self.camera;
        if c.fx <= 0.0 || c.fy <= 0.0 || c.width == 0 || c.height == 0 {
            return Err(invalid("camera intrinsics must be positive"));
        }
        let a = &self.annotate;
        if !(0.0..=1.0).contains(&a.max_truncation)
            || !(0.0..=1.0).contains(&a.visible_min)
            || !(0.0..=1.0).contains(&a.partial_min)
            || a.partial_min > a.visible_min
        {
            return Err(invalid("annotate thresholds must be ratios with partial_min <= visible_min"));
        }
        if self.encode.stride == 0
            || c.width % self.encode.stride != 0
            || c.height % self.encode.stride != 0
        {
            return Err(invalid(format!(
                "stride {} must divide image dims {}x{}",
                self.encode.stride, c.width, c.height
            )));
        }
        let d = &self.decode;
        if !(0.0 < d.coverage_threshold && d.coverage_threshold < 1.0) {
            return Err(invalid("decode.coverage_threshold must be in (0, 1)"));
        }
        if !(0.0 < d.cluster_iou && d.cluster_iou < 1.0) {
            return Err(invalid("decode.cluster_iou must be in (0, 1)"));
        }
        if d.min_cluster < 1 {
            return Err(invalid("decode.min_cluster must be >= 1"));
        }
        if !(0.0 < self.eval.iou_threshold && self.eval.iou_threshold < 1.0) {
            return Err(invalid("eval.iou_threshold must be in (0, 1)"));
        }
        if self.loss_weights.coverage < 0.0 || self.loss_weights.bbox < 0.0 {
            return Err(invalid("loss weights must be nonnegative"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let cfg = GenerationConfig::default();
        cfg.validate(cfg.repository.size).unwrap();
    }

    #[test]
    fn bad_ranges_are_rejected() {
        let mut cfg = GenerationConfig::default();
        cfg.scene.min_objects = 2;
        assert!(cfg.validate(64).is_err());

        let mut cfg = GenerationConfig::default();
        cfg.dictionary_size = 100;
        assert!(cfg.validate(64).is_err());

        let mut cfg = GenerationConfig::default();
        cfg.encode.stride = 17;
        assert!(cfg.validate(64).is_err());

        let mut cfg = GenerationConfig::default();
        cfg.decode.coverage_threshold = 1.5;
        assert!(cfg.validate(64).is_err());
    }
}
