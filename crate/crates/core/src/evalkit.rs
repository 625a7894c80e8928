//! Score detections against ground truth: greedy IoU matching, micro-
//! averaged precision/recall, and the simplified single-class mAP defined
//! as the product PR x RE.
//!
//! Ignored ground truth (`DontCare` regions, e.g. distractor objects) is
//! excluded from recall, and detections landing on it are discarded rather
//! than penalized — the standard KITTI treatment.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::annotate::ObjectAnnotation;
use crate::detector_math::Detection;
use crate::geometry::{iou, BBox2D};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("image id sets differ; only in ground truth: {gt_only:?}, only in detections: {det_only:?}")]
    KeyMismatch {
        gt_only: Vec<String>,
        det_only: Vec<String>,
    },
    #[error("line {line}: {detail}")]
    BadDetectionLine { line: usize, detail: String },
}

/// How one detection was classified during matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchOutcome {
    /// Matched an unmatched, non-ignored ground-truth box.
    TruePositive { gt_index: usize },
    /// Best overlap was with an ignored ground-truth box: dropped from both
    /// numerator and denominator.
    Discarded { gt_index: usize },
    FalsePositive,
}

/// Matching result for one image. `assignment[i]` refers to `dets[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub tp: usize,
    pub fp: usize,
    pub fn_count: usize,
    pub assignment: Vec<MatchOutcome>,
}

/// Greedily match detections (descending confidence) to ground truth.
///
/// Each detection claims the unmatched non-ignored ground-truth box of
/// highest IoU when that IoU reaches the threshold; failing that, it is
/// discarded if it overlaps an ignored box at the threshold, otherwise it
/// is a false positive. Unmatched non-ignored ground truth counts as false
/// negatives.
pub fn match_detections(
    dets: &[Detection],
    gts: &[ObjectAnnotation],
    iou_thresh: f64,
) -> MatchResult {
    assert!(
        iou_thresh > 0.0 && iou_thresh < 1.0,
        "iou threshold must be in (0, 1)"
    );
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| {
        dets[b]
            .confidence
            .total_cmp(&dets[a].confidence)
            .then(a.cmp(&b))
    });

    let mut gt_matched = vec![false; gts.len()];
    let mut assignment = vec![MatchOutcome::FalsePositive; dets.len()];
    let mut tp = 0;
    let mut fp = 0;
    for &d in &order {
        let mut best: Option<(usize, f64)> = None;
        let mut best_ignored: Option<(usize, f64)> = None;
        for (g, gt) in gts.iter().enumerate() {
            let overlap = iou(&dets[d].bbox, &gt.bbox);
            if overlap < iou_thresh {
                continue;
            }
            if gt.ignore {
                if best_ignored.is_none_or(|(_, v)| overlap > v) {
                    best_ignored = Some((g, overlap));
                }
            } else if !gt_matched[g] && best.is_none_or(|(_, v)| overlap > v) {
                best = Some((g, overlap));
            }
        }
        match (best, best_ignored) {
            (Some((g, _)), _) => {
                gt_matched[g] = true;
                assignment[d] = MatchOutcome::TruePositive { gt_index: g };
                tp += 1;
            }
            (None, Some((g, _))) => {
                assignment[d] = MatchOutcome::Discarded { gt_index: g };
            }
            (None, None) => {
                assignment[d] = MatchOutcome::FalsePositive;
                fp += 1;
            }
        }
    }
    let fn_count = gts
        .iter()
        .enumerate()
        .filter(|(g, gt)| !gt.ignore && !gt_matched[*g])
        .count();
    MatchResult {
        tp,
        fp,
        fn_count,
        assignment,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerImageStats {
    pub id: String,
    pub tp: usize,
    pub fp: usize,
    pub fn_count: usize,
    pub detections: usize,
    pub ground_truths: usize,
}

/// Aggregate scores. Counts are micro-averaged over images before the
/// ratios are formed (per-image macro averaging would differ; micro is the
/// contract here).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub iou_threshold: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_count: usize,
    /// tp/(tp+fp), 0 when no detections.
    pub precision: f64,
    /// tp/(tp+fn), 0 when no ground truth.
    pub recall: f64,
    /// precision x recall (the simplified single-class mAP); also reported
    /// x100.
    pub map: f64,
    pub map_percent: f64,
    pub per_image: Vec<PerImageStats>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Evaluate keyed per-image detection/ground-truth pairs.
pub fn evaluate(
    items: &BTreeMap<String, (Vec<Detection>, Vec<ObjectAnnotation>)>,
    iou_thresh: f64,
) -> EvalReport {
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_count = 0;
    let mut per_image = Vec::with_capacity(items.len());
    for (id, (dets, gts)) in items {
        let m = match_detections(dets, gts, iou_thresh);
        tp += m.tp;
        fp += m.fp;
        fn_count += m.fn_count;
        per_image.push(PerImageStats {
            id: id.clone(),
            tp: m.tp,
            fp: m.fp,
            fn_count: m.fn_count,
            detections: dets.len(),
            ground_truths: gts.len(),
        });
    }
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_count);
    let map = precision * recall;
    EvalReport {
        iou_threshold: iou_thresh,
        tp,
        fp,
        fn_count,
        precision,
        recall,
        map,
        map_percent: map * 100.0,
        per_image,
    }
}

/// Evaluate separately keyed maps, requiring identical image-id sets.
pub fn evaluate_split(
    dets: &BTreeMap<String, Vec<Detection>>,
    gts: &BTreeMap<String, Vec<ObjectAnnotation>>,
    iou_thresh: f64,
) -> Result<EvalReport, EvalError> {
    let gt_only: Vec<String> = gts.keys().filter(|k| !dets.contains_key(*k)).cloned().collect();
    let det_only: Vec<String> = dets.keys().filter(|k| !gts.contains_key(*k)).cloned().collect();
    if !gt_only.is_empty() || !det_only.is_empty() {
        return Err(EvalError::KeyMismatch { gt_only, det_only });
    }
    let items: BTreeMap<String, (Vec<Detection>, Vec<ObjectAnnotation>)> = gts
        .iter()
        .map(|(k, g)| (k.clone(), (dets[k].clone(), g.clone())))
        .collect();
    Ok(evaluate(&items, iou_thresh))
}

/// Serialize detections as KITTI-style lines with a 16th confidence field.
pub fn write_detections(dets: &[Detection], class: &str) -> String {
    let mut out = String::new();
    for d in dets {
        out.push_str(&format!(
            "{class} 0.00 0 -10.00 {:.2} {:.2} {:.2} {:.2} -1.00 -1.00 -1.00 -1.00 -1.00 -1.00 -10.00 {:.4}\n",
            d.bbox.x1, d.bbox.y1, d.bbox.x2, d.bbox.y2, d.confidence
        ));
    }
    out
}

/// Parse KITTI-style detection lines; the 16th field is the confidence
/// (1.0 when absent).
pub fn parse_detections(text: &str) -> Result<Vec<Detection>, EvalError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.len() < 8 {
            return Err(EvalError::BadDetectionLine {
                line,
                detail: format!("expected at least 8 fields, got {}", fields.len()),
            });
        }
        let num = |idx: usize| -> Result<f64, EvalError> {
            fields[idx].parse().map_err(|_| EvalError::BadDetectionLine {
                line,
                detail: format!("field {} '{}' is not numeric", idx + 1, fields[idx]),
            })
        };
        let bbox = BBox2D::new(num(4)?, num(5)?, num(6)?, num(7)?).map_err(|e| {
            EvalError::BadDetectionLine {
                line,
                detail: e.to_string(),
            }
        })?;
        let confidence = if fields.len() >= 16 {
            num(15)?.clamp(0.0, 1.0)
        } else {
            1.0
        };
        out.push(Detection { bbox, confidence });
    }
    Ok(out)
}

/// Per-image breakdown as CSV (id, tp, fp, fn, detections, ground_truths).
pub fn per_image_csv(report: &EvalReport) -> String {
    let mut out = String::from("id,tp,fp,fn,detections,ground_truths\n");
    for row in &report.per_image {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.id, row.tp, row.fp, row.fn_count, row.detections, row.ground_truths
        ));
    }
    out
}
