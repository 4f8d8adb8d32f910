//! Pixel-level recall, precision and accuracy for binary segmentations.
//!
//! Ratios with an empty denominator are defined as 1: recall when the ground
//! truth has no foreground, precision when the prediction has none. Raw
//! counts are kept so dataset-level numbers can be micro-averaged.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DimensionError, Error, Result};
use crate::raster::BitMask;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PixelMetrics {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
    pub recall: f64,
    pub precision: f64,
    pub accuracy: f64,
}

impl PixelMetrics {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        let ratio = |num: u64, den: u64| if den == 0 { 1.0 } else { num as f64 / den as f64 };
        let total = tp + fp + fn_ + tn;
        PixelMetrics {
            tp,
            fp,
            fn_,
            tn,
            recall: ratio(tp, tp + fn_),
            precision: ratio(tp, tp + fp),
            accuracy: ratio(tp + tn, total),
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

pub fn pixel_metrics(pred: &BitMask, gt: &BitMask) -> Result<PixelMetrics, DimensionError> {
    if !pred.same_dims(gt) {
        return Err(DimensionError::new(format!(
            "prediction is {}x{}, ground truth is {}x{}",
            pred.width(),
            pred.height(),
            gt.width(),
            gt.height()
        )));
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (&p, &g) in pred.bits().iter().zip(gt.bits()) {
        match (p, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    Ok(PixelMetrics::from_counts(tp, fp, fn_, tn))
}

/// Like [`pixel_metrics`] after dilating the ground truth by `radius`
/// pixels (Chebyshev), for offset-tolerance studies.
pub fn pixel_metrics_tolerant(pred: &BitMask, gt: &BitMask, radius: usize) -> Result<PixelMetrics, DimensionError> {
    if radius == 0 {
        pixel_metrics(pred, gt)
    } else {
        pixel_metrics(pred, &gt.dilate(radius))
    }
}

/// Micro-average: sums raw counts, then recomputes the ratios.
pub fn aggregate<'a>(metrics: impl IntoIterator<Item = &'a PixelMetrics>) -> PixelMetrics {
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for m in metrics {
        tp += m.tp;
        fp += m.fp;
        fn_ += m.fn_;
        tn += m.tn;
    }
    PixelMetrics::from_counts(tp, fp, fn_, tn)
}

/// One row of a method comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub method: String,
    pub hyper_parameter: String,
    pub metrics: PixelMetrics,
}

/// CSV `method,hyper_parameter,recall,precision,accuracy`.
pub fn rows_to_csv(rows: &[MetricsRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["method", "hyper_parameter", "recall", "precision", "accuracy"])
        .expect("in-memory write");
    for r in rows {
        w.write_record([
            r.method.as_str(),
            r.hyper_parameter.as_str(),
            &format!("{:.6}", r.metrics.recall),
            &format!("{:.6}", r.metrics.precision),
            &format!("{:.6}", r.metrics.accuracy),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv of UTF-8 fields")
}

/// Scores every `<name>.pgm` mask in `pred_dir` against the same-named file
/// in `gt_dir`. Returns per-file metrics sorted by name and their aggregate.
/// A prediction without a ground-truth counterpart is an error.
pub fn score_mask_dirs(
    pred_dir: &Path,
    gt_dir: &Path,
    dilation: usize,
) -> Result<(Vec<(String, PixelMetrics)>, PixelMetrics)> {
    let mut names = Vec::new();
    let entries = std::fs::read_dir(pred_dir).map_err(|e| Error::io(pred_dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(pred_dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.ends_with(".pgm") {
            names.push(name);
        }
    }
    names.sort();
    let mut per = Vec::with_capacity(names.len());
    for name in names {
        let pred = BitMask::load_pgm(pred_dir.join(&name))?;
        let gt = BitMask::load_pgm(gt_dir.join(&name))?;
        per.push((name, pixel_metrics_tolerant(&pred, &gt, dilation)?));
    }
    let total = aggregate(per.iter().map(|(_, m)| m));
    Ok((per, total))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_masks() {
        let m = BitMask::from_fn(8, 8, |x, y| x == y);
        let r = pixel_metrics(&m, &m).unwrap();
        assert_eq!((r.recall, r.precision, r.accuracy), (1.0, 1.0, 1.0));
    }

    #[test]
    fn empty_prediction() {
        let gt = BitMask::from_fn(10, 10, |x, y| y == 0 && x < 10);
        let r = pixel_metrics(&BitMask::new(10, 10), &gt).unwrap();
        assert_eq!((r.recall, r.precision), (0.0, 1.0));
        assert!((r.accuracy - 0.9).abs() < 1e-12);
    }

    #[test]
    fn shifted_row() {
        // row 1 shifted right: the pixel leaving the grid reappears on row 2
        // so the counts keep one false positive as well as one miss
        let gt = BitMask::from_fn(4, 4, |_, y| y == 1);
        let shifted = BitMask::from_fn(4, 4, |x, y| (y == 1 && x >= 1) || (x == 0 && y == 2));
        let r = pixel_metrics(&shifted, &gt).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_, r.tn), (3, 1, 1, 11));
        assert_eq!((r.recall, r.precision), (0.75, 0.75));
        assert!((r.accuracy - 14.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(pixel_metrics(&BitMask::new(2, 2), &BitMask::new(3, 2)).is_err());
    }

    #[test]
    fn aggregate_example() {
        let a = PixelMetrics::from_counts(3, 1, 1, 11);
        let b = PixelMetrics::from_counts(0, 0, 10, 90);
        let r = aggregate([&a, &b]);
        assert!((r.recall - 3.0 / 14.0).abs() < 1e-12);
        assert!((r.precision - 0.75).abs() < 1e-12);
        assert_eq!(aggregate([&a]), a);
    }

    #[test]
    fn dilation_tolerates_offset() {
        let gt = BitMask::from_fn(10, 10, |_, y| y == 4);
        let pred = BitMask::from_fn(10, 10, |_, y| y == 5);
        assert_eq!(pixel_metrics(&pred, &gt).unwrap().precision, 0.0);
        assert_eq!(pixel_metrics_tolerant(&pred, &gt, 1).unwrap().precision, 1.0);
    }

    #[test]
    fn csv_layout() {
        let rows = [MetricsRow {
            method: "hough".into(),
            hyper_parameter: "max_gap=5".into(),
            metrics: PixelMetrics::from_counts(1, 1, 0, 2),
        }];
        assert_eq!(
            rows_to_csv(&rows),
            "method,hyper_parameter,recall,precision,accuracy\nhough,max_gap=5,1.000000,0.500000,0.750000\n"
        );
    }
}
