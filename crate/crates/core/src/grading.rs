//! Answer scoring, per-sheet results and corpus-level reports.
//!
//! Accuracy of one answer area is `1 - lev(recognized, label) / |label|`,
//! counted in Unicode scalar values and clamped to `[0, 1]`. An area that was
//! not located scores 0. When a sheet's unique ID is wrong every area on it
//! scores 0, since the answers cannot be attributed to the right template.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, GradingError, Result};
use crate::fsutil;

/// Areas at or above this accuracy count as graded correctly enough.
pub const PASS_ACCURACY: f64 = 0.9;
/// Default IoU between the detected and template answer rectangles above
/// which a located area is considered correctly placed.
pub const DEFAULT_LOCATION_IOU: f64 = 0.5;

/// Edit distance with unit insert, delete and substitute costs.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn score_area(located: bool, recognized: &str, label: &str) -> Result<f64, GradingError> {
    if !located {
        return Ok(0.0);
    }
    let n = label.chars().count();
    if n == 0 {
        return Err(GradingError::EmptyLabel);
    }
    let d = levenshtein(recognized, label) as f64;
    Ok((1.0 - d / n as f64).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FailureKind {
    None,
    FailedLocation,
    FailedRecognition,
    Else,
}

impl FailureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureKind::None => "None",
            FailureKind::FailedLocation => "FailedLocation",
            FailureKind::FailedRecognition => "FailedRecognition",
            FailureKind::Else => "Else",
        }
    }
}

impl std::fmt::Display for FailureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaResult {
    pub area_index: u32,
    pub located: bool,
    /// Whether the located area overlaps its template rectangle enough.
    pub location_ok: bool,
    pub recognized_text: String,
    pub label: String,
    pub accuracy: f64,
    pub failure_kind: FailureKind,
}

impl AreaResult {
    /// Scores and classifies one area.
    pub fn grade(
        area_index: u32,
        located: bool,
        location_ok: bool,
        recognized_text: impl Into<String>,
        label: impl Into<String>,
    ) -> Result<Self, GradingError> {
        let recognized_text = recognized_text.into();
        let label = label.into();
        let accuracy = score_area(located, &recognized_text, &label)?;
        let mut a = AreaResult {
            area_index,
            located,
            location_ok: located && location_ok,
            recognized_text,
            label,
            accuracy,
            failure_kind: FailureKind::None,
        };
        a.failure_kind = classify_failure(&a, a.location_ok);
        Ok(a)
    }

    /// An area the detector never found.
    pub fn missed(area_index: u32, label: impl Into<String>) -> Self {
        AreaResult {
            area_index,
            located: false,
            location_ok: false,
            recognized_text: String::new(),
            label: label.into(),
            accuracy: 0.0,
            failure_kind: FailureKind::FailedLocation,
        }
    }
}

pub fn classify_failure(a: &AreaResult, location_ok: bool) -> FailureKind {
    if a.accuracy >= PASS_ACCURACY {
        FailureKind::None
    } else if !a.located {
        FailureKind::FailedLocation
    } else if location_ok && a.recognized_text != a.label {
        FailureKind::FailedRecognition
    } else {
        FailureKind::Else
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetResult {
    pub image_id: String,
    pub sheet_id_recognized: String,
    pub id_correct: bool,
    pub areas: Vec<AreaResult>,
}

impl SheetResult {
    /// Builds a sheet result, zeroing every area when the ID is wrong.
    pub fn new(
        image_id: impl Into<String>,
        sheet_id_recognized: impl Into<String>,
        id_correct: bool,
        mut areas: Vec<AreaResult>,
    ) -> Self {
        if !id_correct {
            for a in &mut areas {
                a.accuracy = 0.0;
                a.failure_kind = classify_failure(a, a.location_ok);
            }
        }
        areas.sort_by_key(|a| a.area_index);
        SheetResult {
            image_id: image_id.into(),
            sheet_id_recognized: sheet_id_recognized.into(),
            id_correct,
            areas,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureBreakdown {
    pub failed_location: usize,
    pub failed_recognition: usize,
    #[serde(rename = "else")]
    pub other: usize,
}

impl FailureBreakdown {
    pub fn total(&self) -> usize {
        self.failed_location + self.failed_recognition + self.other
    }
}

/// Corpus-level summary. Reports combine with [`EvalReport::merge`], which is
/// associative and commutative.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub sheets: usize,
    pub total_areas: usize,
    pub count_exact: usize,
    pub count_partial: usize,
    pub count_failed: usize,
    pub failures: FailureBreakdown,
    pub accuracy_sum: f64,
    pub mean_accuracy: f64,
}

impl EvalReport {
    fn add_area(&mut self, a: &AreaResult) {
        self.total_areas += 1;
        self.accuracy_sum += a.accuracy;
        if a.accuracy >= 1.0 {
            self.count_exact += 1;
        } else if a.accuracy >= PASS_ACCURACY {
            self.count_partial += 1;
        } else {
            self.count_failed += 1;
            // a sub-threshold area is always a failure of some kind
            match a.failure_kind {
                FailureKind::FailedLocation => self.failures.failed_location += 1,
                FailureKind::FailedRecognition => self.failures.failed_recognition += 1,
                FailureKind::Else | FailureKind::None => self.failures.other += 1,
            }
        }
    }

    fn finish(&mut self) {
        self.mean_accuracy = if self.total_areas == 0 {
            0.0
        } else {
            self.accuracy_sum / self.total_areas as f64
        };
    }

    pub fn merge(&self, other: &EvalReport) -> EvalReport {
        let mut r = EvalReport {
            sheets: self.sheets + other.sheets,
            total_areas: self.total_areas + other.total_areas,
            count_exact: self.count_exact + other.count_exact,
            count_partial: self.count_partial + other.count_partial,
            count_failed: self.count_failed + other.count_failed,
            failures: FailureBreakdown {
                failed_location: self.failures.failed_location + other.failures.failed_location,
                failed_recognition: self.failures.failed_recognition + other.failures.failed_recognition,
                other: self.failures.other + other.failures.other,
            },
            accuracy_sum: self.accuracy_sum + other.accuracy_sum,
            mean_accuracy: 0.0,
        };
        r.finish();
        r
    }

    pub fn exact_fraction(&self) -> f64 {
        if self.total_areas == 0 {
            0.0
        } else {
            self.count_exact as f64 / self.total_areas as f64
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let pct = |n: usize| {
            if self.total_areas == 0 {
                0.0
            } else {
                100.0 * n as f64 / self.total_areas as f64
            }
        };
        let rows = [
            ("exact (acc = 1)", self.count_exact),
            ("partial (0.9 <= acc < 1)", self.count_partial),
            ("failed (acc < 0.9)", self.count_failed),
            ("  failed location", self.failures.failed_location),
            ("  failed recognition", self.failures.failed_recognition),
            ("  else", self.failures.other),
        ];
        let mut out = String::new();
        let _ = writeln!(out, "{:<26} {:>8} {:>8}", "bucket", "areas", "percent");
        let _ = writeln!(out, "{}", "-".repeat(44));
        for (name, n) in rows {
            let _ = writeln!(out, "{name:<26} {n:>8} {:>7.2}%", pct(n));
        }
        let _ = writeln!(out, "{}", "-".repeat(44));
        let _ = writeln!(out, "{:<26} {:>8}", "sheets", self.sheets);
        let _ = writeln!(out, "{:<26} {:>8}", "total areas", self.total_areas);
        let _ = writeln!(out, "{:<26} {:>8.4}", "mean accuracy", self.mean_accuracy);
        out
    }
}

pub fn build_report(sheets: &[SheetResult]) -> EvalReport {
    let mut r = EvalReport {
        sheets: sheets.len(),
        ..EvalReport::default()
    };
    let mut accuracies = Vec::new();
    for s in sheets {
        for a in &s.areas {
            r.add_area(a);
            accuracies.push(a.accuracy);
        }
    }
    // summing in sorted order makes the total independent of sheet order
    accuracies.sort_by(f64::total_cmp);
    r.accuracy_sum = accuracies.iter().sum();
    r.finish();
    r
}

/// Per-area CSV with header `image_id,area_index,located,recognized,label,accuracy,failure_kind`.
pub fn areas_to_csv(sheets: &[SheetResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["image_id", "area_index", "located", "recognized", "label", "accuracy", "failure_kind"])
        .expect("in-memory write");
    for s in sheets {
        for a in &s.areas {
            w.write_record([
                s.image_id.as_str(),
                &a.area_index.to_string(),
                if a.located { "true" } else { "false" },
                &a.recognized_text,
                &a.label,
                &format!("{:.6}", a.accuracy),
                a.failure_kind.as_str(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv of UTF-8 fields")
}

/// Writes `<stem>.json`, `<stem>.txt` and `<stem>.areas.csv` next to `path`,
/// where `path` names the JSON report.
pub fn write_reports(path: &Path, report: &EvalReport, sheets: &[SheetResult]) -> Result<()> {
    fsutil::write_atomic(path, report.to_json().as_bytes())?;
    fsutil::write_atomic(&path.with_extension("txt"), report.to_table().as_bytes())?;
    fsutil::write_atomic(&path.with_extension("areas.csv"), areas_to_csv(sheets).as_bytes())?;
    Ok(())
}

pub fn report_from_json(text: &str) -> Result<EvalReport> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("report json: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("é", "e"), 1);
    }

    #[test]
    fn score_examples() {
        assert_eq!(score_area(false, "apple", "apple").unwrap(), 0.0);
        assert_eq!(score_area(true, "apple", "apple").unwrap(), 1.0);
        assert!((score_area(true, "aple", "apple").unwrap() - 0.8).abs() < 1e-12);
        assert_eq!(score_area(true, "xyzzy", "ab").unwrap(), 0.0);
        assert_eq!(score_area(true, "x", ""), Err(GradingError::EmptyLabel));
        assert_eq!(score_area(false, "x", "").unwrap(), 0.0);
    }

    #[test]
    fn classification() {
        let ok = AreaResult::grade(0, true, true, "cat", "cat").unwrap();
        assert_eq!(ok.failure_kind, FailureKind::None);
        let miss = AreaResult::missed(1, "cat");
        assert_eq!(miss.failure_kind, FailureKind::FailedLocation);
        assert_eq!(classify_failure(&miss, false), FailureKind::FailedLocation);
        let rec = AreaResult::grade(2, true, 0.9 >= DEFAULT_LOCATION_IOU, "cat", "dog").unwrap();
        assert_eq!(rec.failure_kind, FailureKind::FailedRecognition);
        let misplaced = AreaResult::grade(3, true, false, "cat", "dog").unwrap();
        assert_eq!(misplaced.failure_kind, FailureKind::Else);
    }

    #[test]
    fn buckets() {
        assert_eq!(build_report(&[]), EvalReport::default());
        let areas = vec![
            AreaResult::grade(0, true, true, "abcdefghijklmnopqrst", "abcdefghijklmnopqrst").unwrap(),
            AreaResult::grade(1, true, true, "abcdefghijklmnopqrsX", "abcdefghijklmnopqrst").unwrap(),
            AreaResult::grade(2, true, true, "ab", "cd").unwrap(),
        ];
        assert!((areas[1].accuracy - 0.95).abs() < 1e-12);
        let r = build_report(&[SheetResult::new("img", "1", true, areas)]);
        assert_eq!((r.count_exact, r.count_partial, r.count_failed), (1, 1, 1));
        assert_eq!(r.failures.failed_recognition, 1);
    }

    #[test]
    fn wrong_id_zeroes_sheet() {
        let areas: Vec<_> = (0..5).map(|i| AreaResult::grade(i, true, true, "a", "a").unwrap()).collect();
        let s = SheetResult::new("img", "999", false, areas);
        assert!(s.areas.iter().all(|a| a.accuracy == 0.0 && a.failure_kind != FailureKind::None));
        let r = build_report(&[s]);
        assert_eq!(r.count_failed, 5);
        assert_eq!(r.failures.total(), 5);
    }

    #[test]
    fn csv_and_json_output() {
        let s = SheetResult::new("img0", "42", true, vec![AreaResult::grade(0, true, true, "a,b", "a,b").unwrap()]);
        let csv = areas_to_csv(std::slice::from_ref(&s));
        assert_eq!(
            csv,
            "image_id,area_index,located,recognized,label,accuracy,failure_kind\nimg0,0,true,\"a,b\",\"a,b\",1.000000,None\n"
        );
        let r = build_report(&[s]);
        assert_eq!(report_from_json(&r.to_json()).unwrap(), r);
        assert!(r.to_table().contains("mean accuracy"));
    }
}
