//! Dataset generation: one image per seed-split index, written as PNG +
//! KITTI label + instance/depth maps + sidecar metadata, with a line-per-
//! image manifest.
//!
//! Image `i` is a pure function of `(config-without-dataset_size,
//! child_seed(master, i))`, so re-runs are byte-identical regardless of
//! worker count and a k-image run is a file-level prefix of an n-image run
//! (k <= n): every per-image file matches and `manifest.jsonl` of the
//! smaller run is a byte prefix of the larger one. Only `dataset.json`
//! (which records the run size) differs.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use synthfridge_core::annotate::{annotate_rendered, write_kitti};
use synthfridge_core::composer::compose_scene;
use synthfridge_core::config::GenerationConfig;
use synthfridge_core::geometry::Camera;
use synthfridge_core::meshio::ModelRepository;
use synthfridge_core::renderer::{save_depth_f32, save_instance_png16, save_rgb_png};
use synthfridge_core::seeds::child_seed;

use crate::error::CliError;

pub const DATASET_FORMAT_VERSION: u32 = 1;

/// Run descriptor written once per dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub version: u32,
    /// Lineage hash: SHA-256 of the config with `dataset_size` and
    /// `output_dir` neutralized, so nested sweep datasets share it.
    pub config_hash: String,
    pub dataset_size: usize,
    pub master_seed: u64,
    pub width: u32,
    pub height: u32,
    pub stride: u32,
}

/// One manifest line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub seed: u64,
    pub objects: usize,
    pub labels: usize,
}

/// Per-image sidecar metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImageMeta {
    pub image_id: String,
    pub scene_seed: u64,
    pub width: u32,
    pub height: u32,
    pub camera: Camera,
}

pub fn image_id(index: usize) -> String {
    format!("{index:06}")
}

/// SHA-256 over the canonical JSON of the config with the run-shape fields
/// cleared; identifies the generator lineage shared by nested sweeps.
pub fn config_lineage_hash(config: &GenerationConfig) -> String {
    let mut canon = config.clone();
    canon.dataset_size = 0;
    canon.output_dir = PathBuf::new();
    let doc = serde_json::to_string(&canon).expect("config serializes");
    let mut h = Sha256::new();
    h.update(doc.as_bytes());
    hex_string(&h.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn build_repository(config: &GenerationConfig) -> Result<ModelRepository, CliError> {
    use synthfridge_core::config::RepositorySource;
    match config.repository.source {
        RepositorySource::Procedural => {
            // repository models derive from the master seed, so a sweep over
            // dictionary_size reuses the exact same models
            ModelRepository::procedural(config.repository.size, child_seed(config.seed, u64::MAX))
                .map_err(|e| CliError::Config(e.to_string()))
        }
        RepositorySource::ObjDir => {
            let path = config
                .repository
                .path
                .as_ref()
                .ok_or_else(|| CliError::Config("repository.path required for obj_dir".into()))?;
            ModelRepository::from_obj_dir(
                path,
                &config.repository.label,
                (config.repository.min_height, config.repository.max_height),
            )
            .map_err(|e| CliError::Config(e.to_string()))
        }
    }
}

fn ensure_dirs(root: &Path) -> Result<(), CliError> {
    for sub in ["images", "labels", "maps", "meta"] {
        let p = root.join(sub);
        std::fs::create_dir_all(&p).map_err(|e| CliError::io(&p, e))?;
    }
    Ok(())
}

fn generate_one(
    repo: &ModelRepository,
    config: &GenerationConfig,
    root: &Path,
    index: usize,
) -> Result<ManifestEntry, CliError> {
    let id = image_id(index);
    let seed = child_seed(config.seed, index as u64);
    let scene = compose_scene(repo, config, seed)
        .map_err(|e| CliError::Validation(format!("image {id}: {e}")))?;
    let (full, annotations) = annotate_rendered(repo, &scene, 0, &config.annotate)
        .map_err(|e| CliError::Validation(format!("image {id}: {e}")))?;

    let png = root.join("images").join(format!("{id}.png"));
    save_rgb_png(&full, &png).map_err(|e| CliError::Io(e.to_string()))?;
    let inst = root.join("maps").join(format!("{id}_instance.png"));
    save_instance_png16(&full, &inst).map_err(|e| CliError::Io(e.to_string()))?;
    let depth = root.join("maps").join(format!("{id}_depth.f32"));
    save_depth_f32(&full, &depth).map_err(|e| CliError::Io(e.to_string()))?;

    let label_path = root.join("labels").join(format!("{id}.txt"));
    std::fs::write(&label_path, write_kitti(&annotations))
        .map_err(|e| CliError::io(&label_path, e))?;

    let meta = ImageMeta {
        image_id: id.clone(),
        scene_seed: seed,
        width: full.width,
        height: full.height,
        camera: scene.cameras[0].clone(),
    };
    let meta_path = root.join("meta").join(format!("{id}.json"));
    let meta_doc =
        serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n";
    std::fs::write(&meta_path, meta_doc).map_err(|e| CliError::io(&meta_path, e))?;

    Ok(ManifestEntry {
        id,
        seed,
        objects: scene.objects.len(),
        labels: annotations.len(),
    })
}

/// Generate the whole dataset under `config.output_dir`.
///
/// Images are independent, so they render in parallel across `workers`
/// threads; outputs do not depend on the worker count.
pub fn generate_dataset(
    config: &GenerationConfig,
    workers: usize,
) -> Result<Vec<ManifestEntry>, CliError> {
    let repo = build_repository(config)?;
    config
        .validate(repo.len())
        .map_err(|e| CliError::Config(e.to_string()))?;
    let root = config.output_dir.clone();
    ensure_dirs(&root)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let entries: Result<Vec<ManifestEntry>, CliError> = pool.install(|| {
        (0..config.dataset_size)
            .into_par_iter()
            .map(|i| generate_one(&repo, config, &root, i))
            .collect()
    });
    let entries = entries?;

    let mut manifest = String::new();
    for e in &entries {
        manifest.push_str(&serde_json::to_string(e).expect("entry serializes"));
        manifest.push('\n');
    }
    let manifest_path = root.join("manifest.jsonl");
    std::fs::write(&manifest_path, manifest).map_err(|e| CliError::io(&manifest_path, e))?;

    let info = DatasetInfo {
        version: DATASET_FORMAT_VERSION,
        config_hash: config_lineage_hash(config),
        dataset_size: config.dataset_size,
        master_seed: config.seed,
        width: config.camera.width,
        height: config.camera.height,
        stride: config.encode.stride,
    };
    let info_path = root.join("dataset.json");
    let info_doc = serde_json::to_string_pretty(&info).expect("info serializes") + "\n";
    std::fs::write(&info_path, info_doc).map_err(|e| CliError::io(&info_path, e))?;

    Ok(entries)
}

/// Image ids of a dataset, from the manifest when present, otherwise from
/// the label directory listing.
pub fn dataset_ids(root: &Path) -> Result<Vec<String>, CliError> {
    let manifest = root.join("manifest.jsonl");
    if manifest.exists() {
        let text = std::fs::read_to_string(&manifest).map_err(|e| CliError::io(&manifest, e))?;
        let mut ids = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: ManifestEntry = serde_json::from_str(line).map_err(|e| {
                CliError::Validation(format!("manifest line {}: {e}", i + 1))
            })?;
            ids.push(entry.id);
        }
        return Ok(ids);
    }
    let labels = root.join("labels");
    let mut ids = Vec::new();
    if labels.is_dir() {
        for entry in std::fs::read_dir(&labels).map_err(|e| CliError::io(&labels, e))? {
            let path = entry.map_err(|e| CliError::io(&labels, e))?.path();
            if path.extension().is_some_and(|x| x == "txt") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    ids.push(stem.to_string());
                }
            }
        }
    }
    ids.sort();
    Ok(ids)
}

pub fn read_dataset_info(root: &Path) -> Result<DatasetInfo, CliError> {
    let path = root.join("dataset.json");
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}
