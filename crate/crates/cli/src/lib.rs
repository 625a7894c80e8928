//! synthfridge — config-driven CLI over the synthetic-fridge pipeline:
//! dataset generation, coverage encoding, detection evaluation, and sweeps
//! over dataset size or model-dictionary size.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod dataset;
pub mod error;

pub use commands::{apply_overrides, cmd_encode, cmd_evaluate, cmd_generate, cmd_sweep, load_config};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "synthfridge",
    about = "Procedural fridge-scene datasets with KITTI annotations, coverage encodings, and a detection evaluation harness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SweepAxisArg {
    DatasetSize,
    DictionarySize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a dataset: images, KITTI labels, instance/depth maps, manifest.
    Generate {
        /// TOML config (relative paths retried under $SYNTHFRIDGE_CONFIG_DIR)
        #[arg(long)]
        config: PathBuf,
        /// Override the config's master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default 1; output is identical for any count)
        #[arg(long)]
        workers: Option<usize>,
        /// Override the config's output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode dataset labels into coverage-grid tensors.
    Encode {
        /// Dataset directory (defaults to the config's output_dir)
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Config providing the default dataset path
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the grid stride
        #[arg(long)]
        stride: Option<u32>,
    },
    /// Score detections against ground truth (KITTI-style label dirs).
    Evaluate {
        /// Ground-truth label directory
        #[arg(long)]
        gt: PathBuf,
        /// Detection directory (same ids, 16th field = confidence)
        #[arg(long)]
        det: PathBuf,
        /// IoU threshold for matching
        #[arg(long, default_value_t = 0.5)]
        iou_thresh: f64,
        /// Where report.json goes (default: the detection directory)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write per_image.csv
        #[arg(long)]
        per_image_csv: bool,
    },
    /// Generate nested dataset families along one experimental axis.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        axis: SweepAxisArg,
        /// Strictly ascending values, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate {
            config,
            seed,
            workers,
            out,
        } => {
            let cfg = apply_overrides(load_config(&config)?, seed, out);
            cmd_generate(&cfg, workers.unwrap_or(1))?;
            Ok(())
        }
        Command::Encode {
            dataset,
            config,
            stride,
        } => {
            let dataset = match (dataset, config) {
                (Some(d), _) => d,
                (None, Some(c)) => load_config(&c)?.output_dir,
                (None, None) => {
                    return Err(CliError::Config(
                        "encode needs --dataset or --config".into(),
                    ))
                }
            };
            cmd_encode(&dataset, stride)?;
            Ok(())
        }
        Command::Evaluate {
            gt,
            det,
            iou_thresh,
            out,
            per_image_csv,
        } => {
            if !(0.0 < iou_thresh && iou_thresh < 1.0) {
                return Err(CliError::Config(format!(
                    "--iou-thresh must be in (0, 1), got {iou_thresh}"
                )));
            }
            let out_dir = out.unwrap_or_else(|| det.clone());
            cmd_evaluate(&gt, &det, iou_thresh, &out_dir, per_image_csv)?;
            Ok(())
        }
        Command::Sweep {
            config,
            axis,
            values,
            seed,
            workers,
            out,
        } => {
            let cfg = apply_overrides(load_config(&config)?, seed, out);
            let axis = match axis {
                SweepAxisArg::DatasetSize => commands::SweepAxis::DatasetSize,
                SweepAxisArg::DictionarySize => commands::SweepAxis::DictionarySize,
            };
            cmd_sweep(&cfg, axis, &values, workers.unwrap_or(1))
        }
    }
}
