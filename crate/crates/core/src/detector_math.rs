//! Detector-side math: ground-truth coverage-grid encoding, the L2 coverage
//! loss and L1 corner loss with analytic gradients, and the validation-time
//! threshold-and-cluster box decoder.
//!
//! A coverage grid divides the image into stride x stride cells. A cell
//! whose center lies inside a ground-truth box (half-open membership,
//! smallest box wins ties) carries coverage 1 and that box's absolute-pixel
//! corners; every other cell is zero. Batch losses sum over all cells of all
//! grids with the 1/(2N) batch normalization, N being the batch size.
//! Summation order is fixed, so values are bit-reproducible.

use serde::{Deserialize, Serialize};

use crate::annotate::ObjectAnnotation;
use crate::geometry::{iou, BBox2D};

#[derive(Debug, thiserror::Error)]
pub enum GridError {
    #[error("stride {stride} does not divide image dims {width}x{height}")]
    BadStride {
        stride: u32,
        width: u32,
        height: u32,
    },
    #[error("grid shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("batch must contain at least one grid pair")]
    EmptyBatch,
    #[error("batch sizes differ: {0} truth vs {1} pred")]
    BatchSizeMismatch(usize, usize),
    #[error("loss weight must be nonnegative, got {0}")]
    NegativeWeight(f64),
    #[error("coverage value {0} outside [0, 1]")]
    BadCoverage(f64),
    #[error("serialized grid invalid at line {line}: {detail}")]
    BadSerialization { line: usize, detail: String },
}

/// Per-cell coverage probabilities plus regressed box corners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageGrid {
    /// Cell size in pixels.
    pub stride: u32,
    /// Grid width (image width / stride).
    pub gw: usize,
    /// Grid height (image height / stride).
    pub gh: usize,
    /// Row-major coverage values in [0, 1].
    pub coverage: Vec<f64>,
    /// Row-major absolute-pixel corners (x1, y1, x2, y2); all-zero where
    /// coverage is zero.
    pub boxes: Vec<[f64; 4]>,
}

impl CoverageGrid {
    /// All-zero grid; the stride must divide both image dimensions.
    pub fn zeros(stride: u32, width: u32, height: u32) -> Result<Self, GridError> {
        if stride == 0 || width % stride != 0 || height % stride != 0 {
            return Err(GridError::BadStride {
                stride,
                width,
                height,
            });
        }
        let gw = (width / stride) as usize;
        let gh = (height / stride) as usize;
        Ok(Self {
            stride,
            gw,
            gh,
            coverage: vec![0.0; gw * gh],
            boxes: vec![[0.0; 4]; gw * gh],
        })
    }

    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        iy * self.gw + ix
    }

    /// Pixel coordinates of a cell's center.
    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            (ix as f64 + 0.5) * f64::from(self.stride),
            (iy as f64 + 0.5) * f64::from(self.stride),
        )
    }

    pub fn same_shape(&self, other: &CoverageGrid) -> bool {
        self.gw == other.gw && self.gh == other.gh
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if self.coverage.len() != self.gw * self.gh || self.boxes.len() != self.gw * self.gh {
            return Err(GridError::ShapeMismatch(
                self.gw,
                self.gh,
                self.coverage.len(),
                self.boxes.len(),
            ));
        }
        for &c in &self.coverage {
            if !(0.0..=1.0).contains(&c) {
                return Err(GridError::BadCoverage(c));
            }
        }
        Ok(())
    }

    /// Versioned text serialization: a header, then one `coverage x1 y1 x2
    /// y2` line per cell in row-major order. Floats round-trip exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.coverage.len() * 24 + 48);
        out.push_str(&format!(
            "covgrid 1\nstride {}\ngrid {} {}\n",
            self.stride, self.gw, self.gh
        ));
        for i in 0..self.coverage.len() {
            let b = self.boxes[i];
            out.push_str(&format!(
                "{} {} {} {} {}\n",
                self.coverage[i], b[0], b[1], b[2], b[3]
            ));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, GridError> {
        let bad = |line: usize, detail: &str| GridError::BadSerialization {
            line,
            detail: detail.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| bad(1, "empty document"))?;
        if header.trim() != "covgrid 1" {
            return Err(bad(1, "expected header 'covgrid 1'"));
        }
        let (_, stride_line) = lines.next().ok_or_else(|| bad(2, "missing stride"))?;
        let stride: u32 = stride_line
            .strip_prefix("stride ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad(2, "expected 'stride <n>'"))?;
        let (_, grid_line) = lines.next().ok_or_else(|| bad(3, "missing grid dims"))?;
        let dims: Vec<usize> = grid_line
            .strip_prefix("grid ")
            .map(|s| s.split_whitespace().filter_map(|t| t.parse().ok()).collect())
            .unwrap_or_default();
        if dims.len() != 2 {
            return Err(bad(3, "expected 'grid <gw> <gh>'"));
        }
        let (gw, gh) = (dims[0], dims[1]);
        let mut coverage = Vec::with_capacity(gw * gh);
        let mut boxes = Vec::with_capacity(gw * gh);
        for (i, line) in lines {
            let lineno = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad(lineno, "non-numeric value")))
                .collect::<Result<_, _>>()?;
            if vals.len() != 5 {
                return Err(bad(lineno, "expected 5 values per cell"));
            }
            coverage.push(vals[0]);
            boxes.push([vals[1], vals[2], vals[3], vals[4]]);
        }
        if coverage.len() != gw * gh {
            return Err(bad(
                4,
                &format!("expected {} cells, got {}", gw * gh, coverage.len()),
            ));
        }
        let grid = Self {
            stride,
            gw,
            gh,
            coverage,
            boxes,
        };
        grid.validate()?;
        Ok(grid)
    }
}

/// Encode non-ignored annotations into a ground-truth coverage grid.
///
/// Cell membership is half-open (`x1 <= cx < x2`); when a center lies in
/// several boxes the smallest-area box wins (earliest annotation on exact
/// area ties), which favors detectability of small objects.
pub fn encode_coverage(
    annotations: &[ObjectAnnotation],
    stride: u32,
    width: u32,
    height: u32,
) -> Result<CoverageGrid, GridError> {
    let mut grid = CoverageGrid::zeros(stride, width, height)?;
    let active: Vec<&ObjectAnnotation> = annotations.iter().filter(|a| !a.ignore).collect();
    for iy in 0..grid.gh {
        for ix in 0..grid.gw {
            let (cx, cy) = grid.cell_center(ix, iy);
            let mut best: Option<&BBox2D> = None;
            for a in &active {
                if a.bbox.contains_half_open(cx, cy) {
                    best = match best {
                        Some(b) if b.area() <= a.bbox.area() => Some(b),
                        _ => Some(&a.bbox),
                    };
                }
            }
            if let Some(b) = best {
                let i = grid.idx(ix, iy);
                grid.coverage[i] = 1.0;
                grid.boxes[i] = b.corners();
            }
        }
    }
    Ok(grid)
}

/// A batch of matched truth/prediction grids plus loss weights.
#[derive(Debug, Clone)]
pub struct LossBatch {
    pub truth: Vec<CoverageGrid>,
    pub pred: Vec<CoverageGrid>,
    /// (coverage weight, bbox weight)
    pub weights: (f64, f64),
}

impl LossBatch {
    pub fn new(
        truth: Vec<CoverageGrid>,
        pred: Vec<CoverageGrid>,
        weights: (f64, f64),
    ) -> Result<Self, GridError> {
        if truth.is_empty() {
            return Err(GridError::EmptyBatch);
        }
        if truth.len() != pred.len() {
            return Err(GridError::BatchSizeMismatch(truth.len(), pred.len()));
        }
        for (t, p) in truth.iter().zip(&pred) {
            if !t.same_shape(p) {
                return Err(GridError::ShapeMismatch(t.gw, t.gh, p.gw, p.gh));
            }
        }
        Ok(Self {
            truth,
            pred,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.truth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truth.is_empty()
    }
}

/// L2 coverage loss: `1/(2N) * sum |cov_t - cov_p|^2` over every cell of
/// every batch element, with the per-cell gradient `(cov_p - cov_t)/N`
/// with respect to the predicted coverage.
pub fn coverage_loss(batch: &LossBatch) -> (f64, Vec<Vec<f64>>) {
    let n = batch.len() as f64;
    let mut value = 0.0;
    let mut grads = Vec::with_capacity(batch.len());
    for (t, p) in batch.truth.iter().zip(&batch.pred) {
        let mut g = vec![0.0; p.coverage.len()];
        for i in 0..p.coverage.len() {
            let diff = t.coverage[i] - p.coverage[i];
            value += diff * diff;
            g[i] = (p.coverage[i] - t.coverage[i]) / n;
        }
        grads.push(g);
    }
    (value / (2.0 * n), grads)
}

/// L1 corner loss over cells whose truth coverage is exactly 1:
/// `1/(2N) * sum (|x1_t-x1_p| + |y1_t-y1_p| + |x2_t-x2_p| + |y2_t-y2_p|)`,
/// with subgradient `sign(p - t)/(2N)` per active corner (0 at equality)
/// with respect to the predicted corners. Inactive cells contribute nothing
/// and have zero gradient.
pub fn bbox_loss(batch: &LossBatch) -> (f64, Vec<Vec<[f64; 4]>>) {
    let n = batch.len() as f64;
    let mut value = 0.0;
    let mut grads = Vec::with_capacity(batch.len());
    for (t, p) in batch.truth.iter().zip(&batch.pred) {
        let mut g = vec![[0.0; 4]; p.boxes.len()];
        for i in 0..p.boxes.len() {
            if t.coverage[i] != 1.0 {
                continue;
            }
            for c in 0..4 {
                let diff = p.boxes[i][c] - t.boxes[i][c];
                value += diff.abs();
                g[i][c] = if diff == 0.0 {
                    0.0
                } else {
                    diff.signum() / (2.0 * n)
                };
            }
        }
        grads.push(g);
    }
    (value / (2.0 * n), grads)
}

/// Weighted total: `w_cov * coverage_loss + w_bbox * bbox_loss`.
pub fn total_loss(batch: &LossBatch) -> Result<f64, GridError> {
    let (w_cov, w_bbox) = batch.weights;
    if w_cov < 0.0 {
        return Err(GridError::NegativeWeight(w_cov));
    }
    if w_bbox < 0.0 {
        return Err(GridError::NegativeWeight(w_bbox));
    }
    let (cov, _) = coverage_loss(batch);
    let (bb, _) = bbox_loss(batch);
    Ok(w_cov * cov + w_bbox * bb)
}

/// One decoded detection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub bbox: BBox2D,
    /// Mean member coverage, in [0, 1].
    pub confidence: f64,
}

pub use crate::config::DecodeConfig;

#[derive(Debug, Clone)]
struct Candidate {
    cell: usize,
    coverage: f64,
    bbox: BBox2D,
}

/// Threshold the coverage map and cluster the surviving cell boxes.
///
/// Candidates are cells with coverage >= the threshold. Clustering is
/// greedy: seed with the highest-coverage unassigned candidate (row-major
/// index breaks ties), absorb every unassigned candidate whose box IoU with
/// the seed box reaches `cluster_iou`, and repeat. Clusters smaller than
/// `min_cluster` are dropped. Each cluster emits the coverage-weighted mean
/// of its member corners with the unweighted mean coverage as confidence;
/// results are sorted by descending confidence (seed order on ties).
pub fn decode_detections(grid: &CoverageGrid, params: &DecodeConfig) -> Vec<Detection> {
    assert!(
        params.coverage_threshold > 0.0 && params.coverage_threshold < 1.0,
        "coverage threshold must be in (0, 1)"
    );
    assert!(
        params.cluster_iou > 0.0 && params.cluster_iou < 1.0,
        "cluster iou must be in (0, 1)"
    );
    assert!(params.min_cluster >= 1, "min_cluster must be >= 1");

    let mut candidates: Vec<Candidate> = Vec::new();
    for cell in 0..grid.coverage.len() {
        if grid.coverage[cell] < params.coverage_threshold {
            continue;
        }
        let b = grid.boxes[cell];
        // cells carrying degenerate boxes cannot form detections
        if let Ok(bbox) = BBox2D::new(b[0], b[1], b[2], b[3]) {
            candidates.push(Candidate {
                cell,
                coverage: grid.coverage[cell],
                bbox,
            });
        }
    }
    // seed order: highest coverage first, row-major index on ties
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        candidates[b]
            .coverage
            .total_cmp(&candidates[a].coverage)
            .then(candidates[a].cell.cmp(&candidates[b].cell))
    });

    let mut assigned = vec![false; candidates.len()];
    let mut detections: Vec<(Detection, usize)> = Vec::new();
    for &s in &order {
        if assigned[s] {
            continue;
        }
        let seed_box = candidates[s].bbox;
        let mut members = Vec::new();
        for (j, cand) in candidates.iter().enumerate() {
            if !assigned[j] && iou(&cand.bbox, &seed_box) >= params.cluster_iou {
                members.push(j);
            }
        }
        for &m in &members {
            assigned[m] = true;
        }
        if members.len() < params.min_cluster {
            continue;
        }
        let mut corner_sum = [0.0f64; 4];
        let mut weight_sum = 0.0;
        let mut cov_sum = 0.0;
        for &m in &members {
            let c = &candidates[m];
            let w = c.coverage;
            let corners = c.bbox.corners();
            for k in 0..4 {
                corner_sum[k] += w * corners[k];
            }
            weight_sum += w;
            cov_sum += c.coverage;
        }
        let corners = corner_sum.map(|v| v / weight_sum);
        if let Ok(bbox) = BBox2D::new(corners[0], corners[1], corners[2], corners[3]) {
            detections.push((
                Detection {
                    bbox,
                    confidence: cov_sum / members.len() as f64,
                },
                candidates[s].cell,
            ));
        }
    }
    detections.sort_by(|(a, sa), (b, sb)| {
        b.confidence.total_cmp(&a.confidence).then(sa.cmp(sb))
    });
    detections.into_iter().map(|(d, _)| d).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::Occlusion;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ann(x1: f64, y1: f64, x2: f64, y2: f64) -> ObjectAnnotation {
        ObjectAnnotation {
            class_label: "product".into(),
            bbox: BBox2D::new(x1, y1, x2, y2).unwrap(),
            truncation: 0.0,
            occlusion: Occlusion::FullyVisible,
            ignore: false,
        }
    }

    #[test]
    fn encode_empty_is_all_zero() {
        let g = encode_coverage(&[], 16, 512, 512).unwrap();
        assert!(g.coverage.iter().all(|&c| c == 0.0));
        assert!(g.boxes.iter().all(|b| *b == [0.0; 4]));
    }

    #[test]
    fn encode_single_box_covers_36_cells() {
        // centers at 104, 120, ..., 184 fall in [100, 200): 6 per axis
        let g = encode_coverage(&[ann(100.0, 100.0, 200.0, 200.0)], 16, 512, 512).unwrap();
        let count = g.coverage.iter().filter(|&&c| c == 1.0).count();
        assert_eq!(count, 36);
        for iy in 0..g.gh {
            for ix in 0..g.gw {
                let (cx, cy) = g.cell_center(ix, iy);
                let inside = (100.0..200.0).contains(&cx) && (100.0..200.0).contains(&cy);
                let i = g.idx(ix, iy);
                assert_eq!(g.coverage[i] == 1.0, inside);
                if inside {
                    assert_eq!(g.boxes[i], [100.0, 100.0, 200.0, 200.0]);
                } else {
                    assert_eq!(g.boxes[i], [0.0; 4]);
                }
            }
        }
    }

    #[test]
    fn nested_boxes_keep_the_smaller() {
        let outer = ann(64.0, 64.0, 256.0, 256.0);
        let inner = ann(128.0, 128.0, 192.0, 192.0);
        let g = encode_coverage(&[outer, inner], 16, 512, 512).unwrap();
        // a cell inside the inner box carries the inner corners
        let (ix, iy) = (9, 9); // center (152, 152)
        assert_eq!(g.boxes[g.idx(ix, iy)], [128.0, 128.0, 192.0, 192.0]);
        // a cell only in the outer box carries the outer corners
        let (ix, iy) = (5, 5); // center (88, 88)
        assert_eq!(g.boxes[g.idx(ix, iy)], [64.0, 64.0, 256.0, 256.0]);
    }

    #[test]
    fn ignored_annotations_are_skipped() {
        let mut a = ann(100.0, 100.0, 200.0, 200.0);
        a.ignore = true;
        let g = encode_coverage(&[a], 16, 512, 512).unwrap();
        assert!(g.coverage.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn bad_stride_is_an_error() {
        assert!(matches!(
            encode_coverage(&[], 15, 512, 512),
            Err(GridError::BadStride { .. })
        ));
    }

    fn batch_of(t: CoverageGrid, p: CoverageGrid) -> LossBatch {
        LossBatch::new(vec![t], vec![p], (1.0, 2.0)).unwrap()
    }

    #[test]
    fn identical_grids_have_zero_losses() {
        let t = encode_coverage(&[ann(100.0, 100.0, 200.0, 200.0)], 16, 512, 512).unwrap();
        let b = batch_of(t.clone(), t);
        let (cv, cg) = coverage_loss(&b);
        assert_eq!(cv, 0.0);
        assert!(cg[0].iter().all(|&g| g == 0.0));
        let (bv, bg) = bbox_loss(&b);
        assert_eq!(bv, 0.0);
        assert!(bg[0].iter().all(|g| *g == [0.0; 4]));
    }

    #[test]
    fn single_cell_unit_difference_gives_half() {
        let t = CoverageGrid::zeros(16, 512, 512).unwrap();
        let mut p = t.clone();
        p.coverage[100] = 1.0;
        let (v, g) = coverage_loss(&batch_of(t, p));
        assert_eq!(v, 0.5);
        assert_eq!(g[0][100], 1.0);
    }

    #[test]
    fn four_unit_corner_errors_give_two() {
        let t = encode_coverage(&[ann(100.0, 100.0, 200.0, 200.0)], 16, 512, 512).unwrap();
        let mut p = t.clone();
        // active cell: perturb each corner by 1 at exactly one cell, and
        // erase every other active cell's contribution by copying truth
        let active = t.coverage.iter().position(|&c| c == 1.0).unwrap();
        for c in 0..4 {
            p.boxes[active][c] += 1.0;
        }
        let (v, g) = bbox_loss(&batch_of(t, p));
        assert_eq!(v, 2.0);
        assert_eq!(g[0][active], [0.5, 0.5, 0.5, 0.5]);
    }

    #[test]
    fn total_loss_weighting() {
        let t = CoverageGrid::zeros(16, 512, 512).unwrap();
        let b = LossBatch::new(vec![t.clone()], vec![t], (1.0, 2.0)).unwrap();
        assert_eq!(total_loss(&b).unwrap(), 0.0);
        let t2 = CoverageGrid::zeros(16, 512, 512).unwrap();
        let mut p2 = t2.clone();
        p2.coverage[0] = 1.0; // coverage loss 0.5, bbox loss 0
        let b2 = LossBatch::new(vec![t2.clone()], vec![p2.clone()], (1.0, 0.0)).unwrap();
        let (cov_only, _) = coverage_loss(&b2);
        assert_eq!(total_loss(&b2).unwrap(), cov_only);
        let b3 = LossBatch::new(vec![t2], vec![p2], (-1.0, 0.0)).unwrap();
        assert!(matches!(
            total_loss(&b3),
            Err(GridError::NegativeWeight(_))
        ));
    }

    /// Arbitrary grids with prescribed active cells for gradient checks.
    fn random_batch(seed: u64, n: usize) -> LossBatch {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut truth = Vec::new();
        let mut pred = Vec::new();
        for _ in 0..n {
            let mut t = CoverageGrid::zeros(64, 512, 512).unwrap();
            let mut p = t.clone();
            for i in 0..t.coverage.len() {
                t.coverage[i] = if rng.gen_bool(0.3) { 1.0 } else { 0.0 };
                p.coverage[i] = rng.gen_range(0.0..1.0);
                if t.coverage[i] == 1.0 {
                    for c in 0..4 {
                        t.boxes[i][c] = rng.gen_range(0.0..512.0);
                        // keep predictions off the L1 kink
                        let mut v = rng.gen_range(0.0..512.0);
                        while (v - t.boxes[i][c]).abs() < 1e-3 {
                            v = rng.gen_range(0.0..512.0);
                        }
                        p.boxes[i][c] = v;
                    }
                }
            }
            truth.push(t);
            pred.push(p);
        }
        LossBatch::new(truth, pred, (1.0, 2.0)).unwrap()
    }

    #[test]
    fn coverage_gradient_matches_finite_differences() {
        let mut worst: f64 = 0.0;
        for seed in 0..10 {
            let batch = random_batch(seed, 2);
            let (_, grads) = coverage_loss(&batch);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 999);
            for _ in 0..20 {
                let e = rng.gen_range(0..batch.len());
                let i = rng.gen_range(0..batch.pred[e].coverage.len());
                let h = 1e-5;
                let mut plus = batch.clone();
                plus.pred[e].coverage[i] += h;
                let mut minus = batch.clone();
                minus.pred[e].coverage[i] -= h;
                let fd = (coverage_loss(&plus).0 - coverage_loss(&minus).0) / (2.0 * h);
                let g = grads[e][i];
                let rel = (fd - g).abs() / g.abs().max(1e-9);
                worst = worst.max(rel);
            }
        }
        assert!(worst < 1e-6, "worst relative error {worst}");
    }

    #[test]
    fn bbox_gradient_matches_finite_differences() {
        let mut worst: f64 = 0.0;
        for seed in 0..10 {
            let batch = random_batch(seed + 50, 2);
            let (_, grads) = bbox_loss(&batch);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 1717);
            let mut checked = 0;
            while checked < 20 {
                let e = rng.gen_range(0..batch.len());
                let i = rng.gen_range(0..batch.pred[e].boxes.len());
                if batch.truth[e].coverage[i] != 1.0 {
                    continue;
                }
                let c = rng.gen_range(0..4);
                let h = 1e-5;
                let mut plus = batch.clone();
                plus.pred[e].boxes[i][c] += h;
                let mut minus = batch.clone();
                minus.pred[e].boxes[i][c] -= h;
                let fd = (bbox_loss(&plus).0 - bbox_loss(&minus).0) / (2.0 * h);
                let g = grads[e][i][c];
                let rel = (fd - g).abs() / g.abs().max(1e-9);
                worst = worst.max(rel);
                checked += 1;
            }
        }
        assert!(worst < 1e-6, "worst relative error {worst}");
    }

    #[test]
    fn losses_are_nonnegative_and_zero_only_at_equality() {
        for seed in 0..5 {
            let batch = random_batch(seed + 100, 1);
            let (cv, _) = coverage_loss(&batch);
            let (bv, _) = bbox_loss(&batch);
            assert!(cv >= 0.0 && bv >= 0.0);
            // random pred practically never equals truth
            assert!(cv > 0.0);
        }
    }

    #[test]
    fn decode_empty_grid_yields_nothing() {
        let g = CoverageGrid::zeros(16, 512, 512).unwrap();
        assert!(decode_detections(&g, &DecodeConfig::default()).is_empty());
    }

    #[test]
    fn decode_recovers_encoded_box() {
        let gt = ann(100.0, 100.0, 200.0, 200.0);
        let g = encode_coverage(&[gt.clone()], 16, 512, 512).unwrap();
        let dets = decode_detections(
            &g,
            &DecodeConfig {
                coverage_threshold: 0.5,
                ..DecodeConfig::default()
            },
        );
        assert_eq!(dets.len(), 1);
        let d = &dets[0];
        assert_eq!(d.confidence, 1.0);
        for (got, want) in d.bbox.corners().iter().zip(gt.bbox.corners()) {
            assert!((got - want).abs() <= 16.0, "corner {got} vs {want}");
        }
    }

    #[test]
    fn decode_separates_disjoint_boxes() {
        let a = ann(50.0, 50.0, 150.0, 150.0);
        let b = ann(300.0, 300.0, 420.0, 400.0);
        let g = encode_coverage(&[a.clone(), b.clone()], 16, 512, 512).unwrap();
        let dets = decode_detections(&g, &DecodeConfig::default());
        assert_eq!(dets.len(), 2);
        let mut matched = 0;
        for gt in [&a, &b] {
            if dets.iter().any(|d| iou(&d.bbox, &gt.bbox) >= 0.8) {
                matched += 1;
            }
        }
        assert_eq!(matched, 2);
    }

    #[test]
    fn decode_invariant_under_coverage_rescaling() {
        // predicted-style grid: coverages in (tau, 1), identical boxes per
        // blob
        let mut g = CoverageGrid::zeros(16, 512, 512).unwrap();
        let cells = [(5usize, 5usize), (5, 6), (6, 5), (6, 6)];
        for (k, &(ix, iy)) in cells.iter().enumerate() {
            let i = g.idx(ix, iy);
            g.coverage[i] = 0.7 + 0.05 * k as f64;
            g.boxes[i] = [80.0, 80.0, 112.0, 112.0];
        }
        let params = DecodeConfig::default();
        let base = decode_detections(&g, &params);
        let mut scaled = g.clone();
        for c in scaled.coverage.iter_mut() {
            *c *= 1.15; // keeps max 0.85 * 1.15 < 1 and min above tau
        }
        let after = decode_detections(&scaled, &params);
        assert_eq!(base.len(), after.len());
        for (x, y) in base.iter().zip(&after) {
            for (a, b) in x.bbox.corners().iter().zip(y.bbox.corners()) {
                assert!((a - b).abs() < 1e-9, "box geometry changed: {a} vs {b}");
            }
            assert!(y.confidence > x.confidence);
        }
    }

    #[test]
    fn decode_drops_small_clusters() {
        let mut g = CoverageGrid::zeros(16, 512, 512).unwrap();
        let i = g.idx(3, 3);
        g.coverage[i] = 0.9;
        g.boxes[i] = [40.0, 40.0, 70.0, 70.0];
        let dets = decode_detections(&g, &DecodeConfig::default()); // min_cluster 2
        assert!(dets.is_empty());
        let dets = decode_detections(
            &g,
            &DecodeConfig {
                min_cluster: 1,
                ..DecodeConfig::default()
            },
        );
        assert_eq!(dets.len(), 1);
    }

    #[test]
    fn grid_text_round_trip() {
        let g = encode_coverage(&[ann(100.0, 100.0, 200.5, 212.25)], 16, 512, 512).unwrap();
        let back = CoverageGrid::from_text(&g.to_text()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn grid_text_rejects_garbage() {
        assert!(CoverageGrid::from_text("").is_err());
        assert!(CoverageGrid::from_text("covgrid 2\nstride 16\ngrid 2 2\n").is_err());
        let mut text = String::from("covgrid 1\nstride 16\ngrid 2 1\n");
        text.push_str("0 0 0 0 0\n");
        assert!(CoverageGrid::from_text(&text).is_err(), "missing cells");
        text.push_str("2.0 0 0 0 0\n");
        assert!(CoverageGrid::from_text(&text).is_err(), "coverage > 1");
    }

    proptest! {
        #[test]
        fn encoded_grids_are_valid(
            boxes in proptest::collection::vec((0.0f64..400.0, 0.0f64..400.0, 8.0f64..100.0, 8.0f64..100.0), 0..6)
        ) {
            let anns: Vec<ObjectAnnotation> = boxes
                .iter()
                .map(|&(x, y, w, h)| ann(x, y, (x + w).min(512.0), (y + h).min(512.0)))
                .collect();
            let g = encode_coverage(&anns, 16, 512, 512).unwrap();
            g.validate().unwrap();
            // coverage zero implies zero box
            for i in 0..g.coverage.len() {
                if g.coverage[i] == 0.0 {
                    prop_assert_eq!(g.boxes[i], [0.0; 4]);
                }
            }
        }
    }
}
