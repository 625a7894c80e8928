//! synthfridge-core — procedural refrigerator scenes for object detection.
//!
//! The pipeline stages are:
//!
//! 1. **meshio** – Wavefront-OBJ subset reader/writer and procedural
//!    primitives (box, cylinder, capsule) forming the object repository.
//! 2. **geometry** – rigid poses, pinhole cameras, and 2D box math.
//! 3. **composer** – seeded scene generation: 5–25 objects placed on fridge
//!    trays by grid / random / bin-packing patterns, randomized lights,
//!    cameras, and materials.
//! 4. **renderer** – deterministic z-buffered software rasterizer producing
//!    RGB, depth, and per-pixel instance-ID maps.
//! 5. **annotate** – per-object boxes, truncation, and occlusion derived
//!    from instance maps; KITTI label reader/writer.
//! 6. **detector_math** – coverage-grid encoding, the two detection losses
//!    with analytic gradients, and the threshold-and-cluster box decoder.
//! 7. **evalkit** – IoU matching, precision/recall, and the product-form
//!    simplified mAP.
//!
//! Everything downstream of a `(config, seed)` pair is deterministic, so
//! datasets regenerate bit-identically and smaller runs are file-level
//! prefixes of larger ones.

pub mod annotate;
pub mod composer;
pub mod config;
pub mod detector_math;
pub mod evalkit;
pub mod geometry;
pub mod meshio;
pub mod renderer;
pub mod seeds;
