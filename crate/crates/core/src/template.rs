//! Standard answer sheets: underline layout, answer-area expansion, the
//! unique-ID box and the standard answers, plus position-based matching of
//! detected underlines to template entries.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DimensionError, Error, ParseError, Result, TemplateError};
use crate::fsutil;
use crate::linedet::{Segment, SegmentSource};
use crate::raster::GrayImage;

/// Integer pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

impl Rect {
    pub fn new(x: i64, y: i64, w: i64, h: i64) -> Self {
        Rect { x, y, w, h }
    }

    pub fn right(&self) -> i64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> i64 {
        self.y + self.h
    }

    pub fn area(&self) -> i64 {
        self.w.max(0) * self.h.max(0)
    }

    pub fn fits_within(&self, width: usize, height: usize) -> bool {
        self.w >= 1 && self.h >= 1 && self.x >= 0 && self.y >= 0 && self.right() <= width as i64 && self.bottom() <= height as i64
    }

    /// Intersection with `[0, width) × [0, height)`; `None` if empty.
    pub fn clamp_to(&self, width: usize, height: usize) -> Option<Rect> {
        let x0 = self.x.max(0);
        let y0 = self.y.max(0);
        let x1 = self.right().min(width as i64);
        let y1 = self.bottom().min(height as i64);
        (x1 > x0 && y1 > y0).then(|| Rect::new(x0, y0, x1 - x0, y1 - y0))
    }

    pub fn intersection_area(&self, other: &Rect) -> i64 {
        let w = self.right().min(other.right()) - self.x.max(other.x);
        let h = self.bottom().min(other.bottom()) - self.y.max(other.y);
        w.max(0) * h.max(0)
    }

    pub fn iou(&self, other: &Rect) -> f64 {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union <= 0 {
            0.0
        } else {
            inter as f64 / union as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdCorner {
    LeftBottom,
    RightBottom,
}

/// One answer blank: its underline plus the band `m` pixels above and `n`
/// below that forms the complete answer area.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateArea {
    pub index: usize,
    pub aau: Segment,
    pub m: u32,
    pub n: u32,
    pub standard_answer: String,
}

impl TemplateArea {
    /// `{x: x0, y: y − m, w: x1 − x0, h: m + n}`, coordinates rounded to pixels.
    pub fn answer_rect(&self) -> Rect {
        answer_rect_for(&self.aau, self.m, self.n)
    }
}

/// Answer rectangle for an arbitrary underline with the given margins.
pub fn answer_rect_for(aau: &Segment, m: u32, n: u32) -> Rect {
    let x = aau.x0.round() as i64;
    let w = (aau.x1.round() as i64 - x).max(1);
    let y = aau.y.round() as i64 - m as i64;
    Rect::new(x, y, w, (m + n) as i64)
}

/// Expands an area to its full answer rectangle, checking it against the
/// canonical sheet bounds.
pub fn expand_area(area: &TemplateArea, canonical_w: usize, canonical_h: usize) -> Result<Rect, TemplateError> {
    let r = area.answer_rect();
    if r.fits_within(canonical_w, canonical_h) {
        Ok(r)
    } else {
        Err(TemplateError::AreaOutOfBounds { index: area.index })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnswerSheetTemplate {
    pub sheet_id: String,
    pub canonical_w: usize,
    pub canonical_h: usize,
    pub id_box: Rect,
    pub id_corner: IdCorner,
    pub areas: Vec<TemplateArea>,
}

impl AnswerSheetTemplate {
    pub fn validate(&self) -> Result<(), TemplateError> {
        if self.sheet_id.is_empty() {
            return Err(TemplateError::Invalid("sheet_id is empty".into()));
        }
        if self.canonical_w == 0 || self.canonical_h == 0 {
            return Err(TemplateError::Invalid("canonical size must be positive".into()));
        }
        if !self.id_box.fits_within(self.canonical_w, self.canonical_h) {
            return Err(TemplateError::Invalid("id_box lies outside the sheet".into()));
        }
        if self.areas.is_empty() {
            return Err(TemplateError::Invalid("template has no answer areas".into()));
        }
        for a in &self.areas {
            if a.m < 1 {
                return Err(TemplateError::Invalid(format!("area {}: m must be at least 1", a.index)));
            }
            if a.aau.length() < 1.0 {
                return Err(TemplateError::Invalid(format!("area {}: underline shorter than 1 px", a.index)));
            }
            expand_area(a, self.canonical_w, self.canonical_h)?;
        }
        Ok(())
    }

    pub fn aau_segments(&self) -> Vec<Segment> {
        self.areas.iter().map(|a| a.aau).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AreaRecord {
    index: usize,
    x0: f64,
    x1: f64,
    y: f64,
    m: u32,
    n: u32,
    standard_answer: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateRecord {
    sheet_id: String,
    canonical_w: usize,
    canonical_h: usize,
    id_box: Rect,
    id_corner: IdCorner,
    areas: Vec<AreaRecord>,
}

impl From<&AnswerSheetTemplate> for TemplateRecord {
    fn from(t: &AnswerSheetTemplate) -> Self {
        TemplateRecord {
            sheet_id: t.sheet_id.clone(),
            canonical_w: t.canonical_w,
            canonical_h: t.canonical_h,
            id_box: t.id_box,
            id_corner: t.id_corner,
            areas: t
                .areas
                .iter()
                .map(|a| AreaRecord {
                    index: a.index,
                    x0: a.aau.x0,
                    x1: a.aau.x1,
                    y: a.aau.y,
                    m: a.m,
                    n: a.n,
                    standard_answer: a.standard_answer.clone(),
                })
                .collect(),
        }
    }
}

/// Pulls the field name out of serde's "missing field `x`" style messages.
fn serde_field(msg: &str) -> String {
    msg.split('`').nth(1).unwrap_or("json").to_string()
}

/// Parses the JSON template format.
pub fn template_from_json(text: &str, source_name: &str) -> Result<AnswerSheetTemplate, ParseError> {
    let rec: TemplateRecord = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        ParseError::new(source_name, Some(e.line()), serde_field(&msg), msg)
    })?;
    let mut areas = Vec::with_capacity(rec.areas.len());
    for a in rec.areas {
        let aau = Segment::new(a.x0, a.x1, a.y, SegmentSource::Template).ok_or_else(|| {
            ParseError::new(source_name, None, format!("areas[{}].x1", a.index), "underline shorter than 1 px")
        })?;
        areas.push(TemplateArea {
            index: a.index,
            aau,
            m: a.m,
            n: a.n,
            standard_answer: a.standard_answer,
        });
    }
    let t = AnswerSheetTemplate {
        sheet_id: rec.sheet_id,
        canonical_w: rec.canonical_w,
        canonical_h: rec.canonical_h,
        id_box: rec.id_box,
        id_corner: rec.id_corner,
        areas,
    };
    t.validate()
        .map_err(|e| ParseError::new(source_name, None, "template", e.to_string()))?;
    Ok(t)
}

pub fn template_to_json(t: &AnswerSheetTemplate) -> String {
    let mut s = serde_json::to_string_pretty(&TemplateRecord::from(t)).expect("template serialises");
    s.push('\n');
    s
}

pub fn load_template(path: impl AsRef<Path>) -> Result<AnswerSheetTemplate> {
    let path = path.as_ref();
    let text = fsutil::read_to_string(path)?;
    Ok(template_from_json(&text, &path.display().to_string())?)
}

pub fn store_template(t: &AnswerSheetTemplate, path: impl AsRef<Path>) -> Result<()> {
    fsutil::write_atomic(path.as_ref(), template_to_json(t).as_bytes())
}

/// Read-only `sheet_id → template` lookup backed by a directory of
/// `<sheet_id>.json` files.
#[derive(Debug, Clone, Default)]
pub struct TemplateStore {
    templates: BTreeMap<String, AnswerSheetTemplate>,
}

impl TemplateStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut store = TemplateStore::new();
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths: Vec<_> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for p in paths {
            let t = load_template(&p)?;
            let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
            if stem != t.sheet_id {
                return Err(ParseError::new(
                    p.display().to_string(),
                    None,
                    "sheet_id",
                    format!("file is named {stem:?} but holds sheet {:?}", t.sheet_id),
                )
                .into());
            }
            store.insert(t);
        }
        Ok(store)
    }

    pub fn insert(&mut self, t: AnswerSheetTemplate) {
        self.templates.insert(t.sheet_id.clone(), t);
    }

    pub fn get(&self, sheet_id: &str) -> Option<&AnswerSheetTemplate> {
        self.templates.get(sheet_id)
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Match {
    /// Position in the detected segment list.
    pub detection: usize,
    /// Position in the template's `areas` list.
    pub area: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Assignment {
    /// Ordered by template position.
    pub matched: Vec<Match>,
    pub missed_template_indices: Vec<usize>,
    pub spurious_detection_indices: Vec<usize>,
}

impl Assignment {
    pub fn for_area(&self, area: usize) -> Option<&Match> {
        self.matched.iter().find(|m| m.area == area)
    }
}

/// Default matching radius at canonical scale.
pub const DEFAULT_MAX_DIST: f64 = 15.0;

/// Distance between two underlines: the larger of their vertical offset and
/// the gap between their column intervals (0 when they overlap).
pub fn segment_distance(a: &Segment, b: &Segment) -> f64 {
    let dy = (a.y - b.y).abs();
    let gap = (a.x0.max(b.x0) - a.x1.min(b.x1)).max(0.0);
    dy.max(gap)
}

/// Greedy global-nearest matching of detected underlines to template areas.
///
/// Every pair within `max_dist` is ranked by distance, ties broken by
/// template position then detection position, and pairs are accepted in
/// that order while both members are still free.
pub fn match_segments(detected: &[Segment], template: &AnswerSheetTemplate, max_dist: f64) -> Assignment {
    let mut pairs: Vec<Match> = Vec::new();
    for (ai, area) in template.areas.iter().enumerate() {
        for (di, det) in detected.iter().enumerate() {
            let d = segment_distance(det, &area.aau);
            if d <= max_dist {
                pairs.push(Match {
                    detection: di,
                    area: ai,
                    distance: d,
                });
            }
        }
    }
    pairs.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then(a.area.cmp(&b.area))
            .then(a.detection.cmp(&b.detection))
    });
    let mut area_used = vec![false; template.areas.len()];
    let mut det_used = vec![false; detected.len()];
    let mut matched = Vec::new();
    for p in pairs {
        if !area_used[p.area] && !det_used[p.detection] {
            area_used[p.area] = true;
            det_used[p.detection] = true;
            matched.push(p);
        }
    }
    matched.sort_by_key(|m| m.area);
    Assignment {
        matched,
        missed_template_indices: (0..area_used.len()).filter(|&i| !area_used[i]).collect(),
        spurious_detection_indices: (0..det_used.len()).filter(|&i| !det_used[i]).collect(),
    }
}

/// Exact sub-image copy.
pub fn crop(img: &GrayImage, r: &Rect) -> Result<GrayImage, DimensionError> {
    if !r.fits_within(img.width(), img.height()) {
        return Err(DimensionError(format!(
            "crop {r:?} exceeds {}x{} image",
            img.width(),
            img.height()
        )));
    }
    let (x, y) = (r.x as usize, r.y as usize);
    GrayImage::from_fn(r.w as usize, r.h as usize, |cx, cy| img.get(x + cx, y + cy))
}
