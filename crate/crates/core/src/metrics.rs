//! Segment-aware evaluation metrics for drift detection scores.
//!
//! Ground truth is a union of drift segments over executions `1..=T`.  A
//! detector emits one suspicion score per execution; thresholding the scores
//! yields predicted drift segments.  The metrics here compare predicted and
//! true segments per threshold and integrate the resulting curve over the
//! false-positive rate, yielding threshold-free quality numbers that respect
//! segment structure (unlike plain point-wise AUC).
//!
//! Score convention: scores are suspicion levels and non-positive scores mean
//! "no suspicion at all".  Threshold sweeps therefore never flag executions
//! whose score is `<= 0`, which keeps warm-up prefixes (scored exactly 0 by
//! every detector) out of the predictions at any threshold.  Explicit
//! single-threshold operations ([`ols`], [`sols`], [`fpr`], [`tpr`]) apply
//! their threshold verbatim.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Ground truth and scores
// ---------------------------------------------------------------------------

/// Drift ground truth: which executions of `1..=T` belong to a drift.
///
/// Segments are stored sorted, non-overlapping, and non-adjacent; overlapping
/// or adjacent input intervals are merged on construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGroundTruth", into = "RawGroundTruth")]
pub struct GroundTruth {
    executions: usize,
    segments: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawGroundTruth {
    #[serde(rename = "T")]
    executions: usize,
    segments: Vec<(usize, usize)>,
}

impl TryFrom<RawGroundTruth> for GroundTruth {
    type Error = Error;
    fn try_from(raw: RawGroundTruth) -> Result<Self> {
        GroundTruth::new(raw.executions, &raw.segments)
    }
}

impl From<GroundTruth> for RawGroundTruth {
    fn from(gt: GroundTruth) -> Self {
        RawGroundTruth {
            executions: gt.executions,
            segments: gt.segments,
        }
    }
}

impl GroundTruth {
    /// Build a ground truth over `1..=executions` from 1-based inclusive
    /// segments, merging overlaps and adjacency.
    pub fn new(executions: usize, segments: &[(usize, usize)]) -> Result<Self> {
        if executions == 0 {
            return Err(Error::config("ground truth needs at least one execution"));
        }
        let mut sorted: Vec<(usize, usize)> = Vec::with_capacity(segments.len());
        for &(lo, hi) in segments {
            if lo == 0 || lo > hi || hi > executions {
                return Err(Error::config(format!(
                    "segment [{lo}, {hi}] out of bounds for 1..={executions}"
                )));
            }
            sorted.push((lo, hi));
        }
        sorted.sort_unstable();
        let mut merged: Vec<(usize, usize)> = Vec::with_capacity(sorted.len());
        for (lo, hi) in sorted {
            match merged.last_mut() {
                Some((_, prev_hi)) if lo <= *prev_hi + 1 => *prev_hi = (*prev_hi).max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(GroundTruth {
            executions,
            segments: merged,
        })
    }

    pub fn executions(&self) -> usize {
        self.executions
    }

    /// Normalized segments, 1-based inclusive, sorted and non-adjacent.
    pub fn segments(&self) -> &[(usize, usize)] {
        &self.segments
    }

    /// Total number of drifting executions.
    pub fn drift_count(&self) -> usize {
        self.segments.iter().map(|(lo, hi)| hi - lo + 1).sum()
    }

    /// No drift at all, or nothing but drift: segment metrics are undefined.
    pub fn is_degenerate(&self) -> bool {
        self.segments.is_empty() || self.drift_count() == self.executions
    }

    /// Indicator over executions, index 0 = execution 1.
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.executions];
        for &(lo, hi) in &self.segments {
            for slot in &mut mask[lo - 1..hi] {
                *slot = true;
            }
        }
        mask
    }

    fn check_usable(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::DegenerateGroundTruth("no drift segments"));
        }
        if self.drift_count() == self.executions {
            return Err(Error::DegenerateGroundTruth(
                "every execution is a drift execution",
            ));
        }
        Ok(())
    }
}

/// One suspicion score per execution; all values finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSeries(Vec<f64>);

impl ScoreSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::config("score series must be non-empty"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::config(format!(
                "score at execution {} is not finite",
                pos + 1
            )));
        }
        Ok(ScoreSeries(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Decompose a set of execution indices into maximal runs of consecutive
/// integers, returned as 1-based inclusive `(lo, hi)` intervals.
pub fn decompose_segments(indices: &[usize]) -> Vec<(usize, usize)> {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out: Vec<(usize, usize)> = Vec::new();
    for idx in sorted {
        match out.last_mut() {
            Some((_, hi)) if idx == *hi + 1 => *hi = idx,
            _ => out.push((idx, idx)),
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Single-threshold metrics
// ---------------------------------------------------------------------------

fn check_compatible(gt: &GroundTruth, scores: &ScoreSeries) -> Result<()> {
    gt.check_usable()?;
    if scores.len() != gt.executions() {
        return Err(Error::LengthMismatch {
            expected: gt.executions(),
            got: scores.len(),
        });
    }
    Ok(())
}

fn plain_mask(scores: &ScoreSeries, threshold: f64) -> Vec<bool> {
    scores.values().iter().map(|&v| v >= threshold).collect()
}

fn mask_segments(mask: &[bool]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    let mut run_start: Option<usize> = None;
    for (idx, &flag) in mask.iter().enumerate() {
        match (flag, run_start) {
            (true, None) => run_start = Some(idx + 1),
            (false, Some(start)) => {
                out.push((start, idx));
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(start) = run_start {
        out.push((start, mask.len()));
    }
    out
}

/// Numerator choice for segment overlap scores.
#[derive(Clone, Copy)]
enum OverlapNumerator {
    /// Count only predicted executions inside the true segment.
    Intersection,
    /// Count every execution of the touching predicted segments.
    PredictedSpan,
}

/// Per-true-segment overlap score, averaged over true segments.
///
/// For true segment `D_i`, let `T_i` be the union of predicted segments that
/// intersect it.  The segment's score is `numerator / extent(T_i ∪ D_i)`
/// where the extent is `max - min + 1`; it is 0 when no predicted segment
/// touches `D_i`.
fn overlap_score(gt: &GroundTruth, pred_mask: &[bool], numerator: OverlapNumerator) -> f64 {
    let predicted = mask_segments(pred_mask);
    let mut total = 0.0;
    for &(dlo, dhi) in gt.segments() {
        let mut span = 0usize;
        let mut intersection = 0usize;
        let mut lo = dlo;
        let mut hi = dhi;
        for &(plo, phi) in &predicted {
            if phi < dlo {
                continue;
            }
            if plo > dhi {
                break;
            }
            span += phi - plo + 1;
            intersection += phi.min(dhi) - plo.max(dlo) + 1;
            lo = lo.min(plo);
            hi = hi.max(phi);
        }
        if span > 0 {
            let num = match numerator {
                OverlapNumerator::Intersection => intersection,
                OverlapNumerator::PredictedSpan => span,
            } as f64;
            total += num / (hi - lo + 1) as f64;
        }
    }
    total / gt.segments().len() as f64
}

fn fpr_of_mask(gt_mask: &[bool], pred_mask: &[bool]) -> f64 {
    let negatives = gt_mask.iter().filter(|&&d| !d).count();
    let false_pos = gt_mask
        .iter()
        .zip(pred_mask)
        .filter(|(&d, &p)| !d && p)
        .count();
    false_pos as f64 / negatives as f64
}

fn tpr_of_mask(gt_mask: &[bool], pred_mask: &[bool]) -> f64 {
    let positives = gt_mask.iter().filter(|&&d| d).count();
    let true_pos = gt_mask
        .iter()
        .zip(pred_mask)
        .filter(|(&d, &p)| d && p)
        .count();
    true_pos as f64 / positives as f64
}

/// Overlap-with-true-segments score at one threshold (predictions are
/// `score >= threshold`).  1 means every true segment is covered exactly.
pub fn ols(gt: &GroundTruth, scores: &ScoreSeries, threshold: f64) -> Result<f64> {
    check_compatible(gt, scores)?;
    Ok(overlap_score(
        gt,
        &plain_mask(scores, threshold),
        OverlapNumerator::Intersection,
    ))
}

/// Lag-tolerant variant of [`ols`]: the numerator counts the full extent of
/// the touching predicted segments, so late-but-overlapping predictions are
/// not penalized twice.
pub fn sols(gt: &GroundTruth, scores: &ScoreSeries, threshold: f64) -> Result<f64> {
    check_compatible(gt, scores)?;
    Ok(overlap_score(
        gt,
        &plain_mask(scores, threshold),
        OverlapNumerator::PredictedSpan,
    ))
}

/// Fraction of non-drift executions flagged at the threshold.
pub fn fpr(gt: &GroundTruth, scores: &ScoreSeries, threshold: f64) -> Result<f64> {
    check_compatible(gt, scores)?;
    Ok(fpr_of_mask(&gt.mask(), &plain_mask(scores, threshold)))
}

/// Fraction of drift executions flagged at the threshold.
pub fn tpr(gt: &GroundTruth, scores: &ScoreSeries, threshold: f64) -> Result<f64> {
    check_compatible(gt, scores)?;
    Ok(tpr_of_mask(&gt.mask(), &plain_mask(scores, threshold)))
}

// ---------------------------------------------------------------------------
// Threshold sweeps and integrated metrics
// ---------------------------------------------------------------------------

/// Which per-threshold value a sweep records against the false-positive rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Ols,
    Sols,
    Tpr,
}

/// Quadrature rule for integrating a threshold curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrationRule {
    /// Left-value rectangles: conservative, ignores interpolated credit.
    Step,
    /// Linear interpolation between recorded points.
    Trapezoid,
}

/// A swept metric curve over the false-positive rate.
///
/// [`points`](Self::points) is the sweep path itself: fpr non-decreasing,
/// starting at fpr 0 (empty prediction) and ending at fpr 1.  Consecutive
/// same-fpr points are vertical moves; they have zero width, so integrating
/// along the path reproduces the classical staircase/tie treatment of ROC
/// analysis exactly.  [`collapsed`](Self::collapsed) reduces the path to a
/// strictly increasing function of fpr (its upper envelope) for plotting and
/// export.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCurve {
    points: Vec<(f64, f64)>,
}

impl ThresholdCurve {
    /// The swept `(fpr, value)` path, fpr non-decreasing from 0 to 1.
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// One point per distinct fpr, keeping the maximum value; strictly
    /// increasing in fpr.
    pub fn collapsed(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.points.len());
        for &(x, value) in &self.points {
            match out.last_mut() {
                Some((px, pv)) if *px == x => *pv = pv.max(value),
                _ => out.push((x, value)),
            }
        }
        out
    }

    /// Area under the swept path according to `rule`.  Vertical moves have
    /// zero width and contribute nothing under either rule.
    pub fn integrate(&self, rule: IntegrationRule) -> f64 {
        self.points
            .windows(2)
            .map(|pair| {
                let (x0, v0) = pair[0];
                let (x1, v1) = pair[1];
                match rule {
                    IntegrationRule::Step => (x1 - x0) * v0,
                    IntegrationRule::Trapezoid => (x1 - x0) * 0.5 * (v0 + v1),
                }
            })
            .sum()
    }
}

/// Sweep thresholds over the descending unique score values (plus a sentinel
/// above the maximum) and record `(fpr, value)` per threshold.
///
/// Executions with non-positive scores are never flagged (see the module
/// docs); if the sweep therefore never reaches fpr 1, the path is closed
/// with `(1, value at the lowest threshold)`.  Thresholds that change no
/// prediction are dropped.
pub fn threshold_curve(
    gt: &GroundTruth,
    scores: &ScoreSeries,
    kind: CurveKind,
) -> Result<ThresholdCurve> {
    check_compatible(gt, scores)?;
    let gt_mask = gt.mask();

    let mut thresholds: Vec<f64> = scores.values().to_vec();
    thresholds.sort_unstable_by(|a, b| b.partial_cmp(a).expect("scores are finite"));
    thresholds.dedup();
    let sentinel = thresholds[0] + 1.0;

    let mut points: Vec<(f64, f64)> = Vec::with_capacity(thresholds.len() + 2);
    for threshold in std::iter::once(sentinel).chain(thresholds) {
        let pred: Vec<bool> = scores
            .values()
            .iter()
            .map(|&v| v >= threshold && v > 0.0)
            .collect();
        let x = fpr_of_mask(&gt_mask, &pred);
        let value = match kind {
            CurveKind::Ols => overlap_score(gt, &pred, OverlapNumerator::Intersection),
            CurveKind::Sols => overlap_score(gt, &pred, OverlapNumerator::PredictedSpan),
            CurveKind::Tpr => tpr_of_mask(&gt_mask, &pred),
        };
        if points.last() != Some(&(x, value)) {
            points.push((x, value));
        }
    }
    let (last_x, last_value) = *points.last().expect("at least the sentinel point");
    if last_x < 1.0 {
        points.push((1.0, last_value));
    }
    Ok(ThresholdCurve { points })
}

/// Area under the swept overlap curve: threshold-free, segment-aware quality.
pub fn tauc(gt: &GroundTruth, scores: &ScoreSeries, rule: IntegrationRule) -> Result<f64> {
    Ok(threshold_curve(gt, scores, CurveKind::Ols)?.integrate(rule))
}

/// Area under the swept lag-tolerant overlap curve.
pub fn stauc(gt: &GroundTruth, scores: &ScoreSeries, rule: IntegrationRule) -> Result<f64> {
    Ok(threshold_curve(gt, scores, CurveKind::Sols)?.integrate(rule))
}

/// Classical area under the ROC curve (trapezoid rule over the TPR sweep).
pub fn auc(gt: &GroundTruth, scores: &ScoreSeries) -> Result<f64> {
    Ok(threshold_curve(gt, scores, CurveKind::Tpr)?.integrate(IntegrationRule::Trapezoid))
}
