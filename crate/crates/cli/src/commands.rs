//! The four pipeline commands. Each returns `CliError` variants that map to
//! distinct exit codes (config 2, io 3, validation 4).

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use synthfridge_core::annotate::parse_kitti;
use synthfridge_core::config::GenerationConfig;
use synthfridge_core::detector_math::encode_coverage;
use synthfridge_core::evalkit::{evaluate_split, parse_detections, per_image_csv, EvalReport};

use crate::dataset::{dataset_ids, generate_dataset, read_dataset_info, ManifestEntry};
use crate::error::CliError;

/// Environment variable naming the default directory for relative config
/// paths.
pub const CONFIG_DIR_ENV: &str = "SYNTHFRIDGE_CONFIG_DIR";

/// Load a TOML config; a relative path that does not exist is retried under
/// `$SYNTHFRIDGE_CONFIG_DIR`.
pub fn load_config(path: &Path) -> Result<GenerationConfig, CliError> {
    let resolved = if path.exists() || path.is_absolute() {
        path.to_path_buf()
    } else {
        match std::env::var_os(CONFIG_DIR_ENV) {
            Some(dir) => {
                let candidate = PathBuf::from(dir).join(path);
                if candidate.exists() {
                    candidate
                } else {
                    path.to_path_buf()
                }
            }
            None => path.to_path_buf(),
        }
    };
    let text = std::fs::read_to_string(&resolved)
        .map_err(|e| CliError::Config(format!("{}: {e}", resolved.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", resolved.display())))
}

/// Apply command-line overrides on top of the loaded config.
pub fn apply_overrides(
    mut config: GenerationConfig,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> GenerationConfig {
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(o) = out {
        config.output_dir = o;
    }
    config
}

/// Generate a dataset; prints one summary line.
pub fn cmd_generate(config: &GenerationConfig, workers: usize) -> Result<Vec<ManifestEntry>, CliError> {
    let entries = generate_dataset(config, workers)?;
    println!(
        "generated {} images under {}",
        entries.len(),
        config.output_dir.display()
    );
    Ok(entries)
}

/// Encode every label file of a dataset into coverage-grid tensors under
/// `<dataset>/encodings/`. Collects per-file problems and fails with the
/// full report if any occurred.
pub fn cmd_encode(dataset: &Path, stride_override: Option<u32>) -> Result<usize, CliError> {
    let info = read_dataset_info(dataset)?;
    let stride = stride_override.unwrap_or(info.stride);
    let ids = dataset_ids(dataset)?;
    let out_dir = dataset.join("encodings");
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;

    let mut errors: Vec<String> = Vec::new();
    let mut written = 0usize;
    for id in &ids {
        let label_path = dataset.join("labels").join(format!("{id}.txt"));
        let text = match std::fs::read_to_string(&label_path) {
            Ok(t) => t,
            Err(e) => {
                errors.push(format!("{id}: missing label file ({e})"));
                continue;
            }
        };
        let annotations = match parse_kitti(&text) {
            Ok(a) => a,
            Err(e) => {
                errors.push(format!("{id}: {e}"));
                continue;
            }
        };
        let grid = match encode_coverage(&annotations, stride, info.width, info.height) {
            Ok(g) => g,
            Err(e) => {
                errors.push(format!("{id}: {e}"));
                continue;
            }
        };
        let out_path = out_dir.join(format!("{id}.covgrid"));
        if let Err(e) = std::fs::write(&out_path, grid.to_text()) {
            return Err(CliError::io(&out_path, e));
        }
        written += 1;
    }
    if !errors.is_empty() {
        for e in &errors {
            eprintln!("encode: {e}");
        }
        return Err(CliError::Validation(format!(
            "{} of {} label files failed: {}",
            errors.len(),
            ids.len(),
            errors.join("; ")
        )));
    }
    println!("encoded {written} coverage grids under {}", out_dir.display());
    Ok(written)
}

fn txt_stems(dir: &Path) -> Result<BTreeSet<String>, CliError> {
    let mut out = BTreeSet::new();
    for entry in std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "txt") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.insert(stem.to_string());
            }
        }
    }
    Ok(out)
}

/// Score a detection directory against a ground-truth directory. Both hold
/// per-image `<id>.txt` files over the same id set; detections carry a 16th
/// confidence field. Writes `report.json` (and optionally the per-image
/// CSV) under `out_dir`.
pub fn cmd_evaluate(
    gt_dir: &Path,
    det_dir: &Path,
    iou_thresh: f64,
    out_dir: &Path,
    with_csv: bool,
) -> Result<EvalReport, CliError> {
    let gt_ids = txt_stems(gt_dir)?;
    let det_ids = txt_stems(det_dir)?;
    if gt_ids != det_ids {
        let gt_only: Vec<String> = gt_ids.difference(&det_ids).cloned().collect();
        let det_only: Vec<String> = det_ids.difference(&gt_ids).cloned().collect();
        return Err(CliError::Validation(format!(
            "image id mismatch; only in gt: {gt_only:?}, only in det: {det_only:?}"
        )));
    }

    let mut gts = BTreeMap::new();
    let mut dets = BTreeMap::new();
    for id in &gt_ids {
        let gt_path = gt_dir.join(format!("{id}.txt"));
        let gt_text =
            std::fs::read_to_string(&gt_path).map_err(|e| CliError::io(&gt_path, e))?;
        let anns = parse_kitti(&gt_text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", gt_path.display())))?;
        gts.insert(id.clone(), anns);

        let det_path = det_dir.join(format!("{id}.txt"));
        let det_text =
            std::fs::read_to_string(&det_path).map_err(|e| CliError::io(&det_path, e))?;
        let ds = parse_detections(&det_text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", det_path.display())))?;
        dets.insert(id.clone(), ds);
    }

    let report =
        evaluate_split(&dets, &gts, iou_thresh).map_err(|e| CliError::Validation(e.to_string()))?;

    println!(
        "images {}  tp {}  fp {}  fn {}",
        report.per_image.len(),
        report.tp,
        report.fp,
        report.fn_count
    );
    println!(
        "precision {:.4}  recall {:.4}  mAP {:.4} ({:.1})",
        report.precision, report.recall, report.map, report.map_percent
    );

    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let report_path = out_dir.join("report.json");
    let doc = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    std::fs::write(&report_path, doc).map_err(|e| CliError::io(&report_path, e))?;
    if with_csv {
        let csv_path = out_dir.join("per_image.csv");
        std::fs::write(&csv_path, per_image_csv(&report))
            .map_err(|e| CliError::io(&csv_path, e))?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    DatasetSize,
    DictionarySize,
}

/// Generate a family of nested datasets along one experimental axis.
///
/// dataset_size values share seed-split prefixes (a smaller run's files are
/// a subset of a larger run's); dictionary_size values share the model
/// repository, of which each dataset samples a prefix.
pub fn cmd_sweep(
    config: &GenerationConfig,
    axis: SweepAxis,
    values: &[usize],
    workers: usize,
) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Config(format!(
            "sweep values must be strictly ascending, got {values:?}"
        )));
    }
    let base = config.output_dir.clone();
    for &v in values {
        let mut cfg = config.clone();
        let sub = match axis {
            SweepAxis::DatasetSize => {
                cfg.dataset_size = v;
                format!("size_{v}")
            }
            SweepAxis::DictionarySize => {
                cfg.dictionary_size = v;
                format!("dict_{v}")
            }
        };
        cfg.output_dir = base.join(sub);
        cmd_generate(&cfg, workers)?;
    }
    Ok(())
}
