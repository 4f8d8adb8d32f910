//! Deterministic synthetic answer sheets with exact ground truth.
//!
//! A sheet has a rectangular borderline, a printed title, a grid of
//! labelled answer underlines with handwritten-style answers above them and
//! a printed unique ID in one of the bottom corners. [`distort`] then places
//! the sheet in a larger photo through a random perspective warp and adds
//! clutter that only touches the photo, never the masks.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, GenerationError, ParseError, Result};
use crate::font::{self, Jitter, GLYPH_H};
use crate::fsutil;
use crate::linedet::{Segment, SegmentSource};
use crate::raster::{BitMask, GrayImage};
use crate::rectify::{estimate_homography, warp, warp_mask, Homography, Point, Quad};
use crate::template::{store_template, AnswerSheetTemplate, IdCorner, Rect, TemplateArea};

/// Distance from the sheet edge to the centre line of the borderline.
pub const BORDER_MARGIN: usize = 10;
const PAPER: u8 = 255;
const PRINT_INK: u8 = 20;
const TABLE: u8 = 90;
const AREA_M: u32 = 24;
const AREA_N: u32 = 3;
const ID_PAD: i64 = 4;
/// Gap between the bottom of handwritten glyphs and the underline.
const WRITING_GAP: i64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SheetSpec {
    pub canonical_w: usize,
    pub canonical_h: usize,
    pub rows: usize,
    pub cols: usize,
    pub stroke_thickness: usize,
    pub id_digits: usize,
    pub glyph_scale: usize,
    pub seed: u64,
}

impl Default for SheetSpec {
    fn default() -> Self {
        SheetSpec {
            canonical_w: 640,
            canonical_h: 640,
            rows: 8,
            cols: 2,
            stroke_thickness: 2,
            id_digits: 6,
            glyph_scale: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistortionSpec {
    /// Maximum displacement of each photo corner, in pixels.
    pub max_perspective_jitter: f64,
    pub background_line_count: usize,
    /// Darkening of background lines, in `[0, 1]`.
    pub background_line_intensity: f64,
    pub auxiliary_stroke_count: usize,
    /// Fraction of photo pixels replaced by salt or pepper.
    pub noise_level: f64,
    pub seed: u64,
    /// Fixed corner displacements (top-left, top-right, bottom-right,
    /// bottom-left) replacing the random jitter.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corner_offsets: Option<[(f64, f64); 4]>,
}

impl Default for DistortionSpec {
    fn default() -> Self {
        DistortionSpec::none()
    }
}

impl DistortionSpec {
    pub fn none() -> Self {
        DistortionSpec {
            max_perspective_jitter: 0.0,
            background_line_count: 0,
            background_line_intensity: 0.0,
            auxiliary_stroke_count: 0,
            noise_level: 0.0,
            seed: 0,
            corner_offsets: None,
        }
    }

    pub fn light() -> Self {
        DistortionSpec {
            max_perspective_jitter: 10.0,
            background_line_count: 3,
            background_line_intensity: 0.15,
            auxiliary_stroke_count: 2,
            noise_level: 0.002,
            ..DistortionSpec::none()
        }
    }

    pub fn standard() -> Self {
        DistortionSpec {
            max_perspective_jitter: 25.0,
            background_line_count: 6,
            background_line_intensity: 0.25,
            auxiliary_stroke_count: 4,
            noise_level: 0.005,
            ..DistortionSpec::none()
        }
    }

    /// `none`, `light` or `standard`.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "none" => Some(Self::none()),
            "light" => Some(Self::light()),
            "standard" => Some(Self::standard()),
            _ => None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.max_perspective_jitter == 0.0
            && self.corner_offsets.is_none()
            && (self.background_line_count == 0 || self.background_line_intensity == 0.0)
            && self.auxiliary_stroke_count == 0
            && self.noise_level == 0.0
    }

    fn validate(&self) -> Result<(), GenerationError> {
        let bad = |m: &str| Err(GenerationError::InvalidDistortion(m.into()));
        if !(self.max_perspective_jitter.is_finite() && self.max_perspective_jitter >= 0.0) {
            return bad("max_perspective_jitter must be finite and non-negative");
        }
        if !(0.0..=1.0).contains(&self.background_line_intensity) {
            return bad("background_line_intensity must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.noise_level) {
            return bad("noise_level must lie in [0, 1]");
        }
        if let Some(off) = self.corner_offsets {
            if off.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                return bad("corner_offsets must be finite");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSample {
    pub image_id: String,
    pub photo: GrayImage,
    pub template: AnswerSheetTemplate,
    pub gt_borderline_mask: BitMask,
    pub gt_aau_mask: BitMask,
    /// Maps photo coordinates to canonical sheet coordinates.
    pub gt_homography: Homography,
    /// Handwritten answer per template area, in area order.
    pub gt_answers: Vec<String>,
}

/// Corners of the borderline centre lines for a sheet inset by `margin`
/// with strokes `thickness` pixels wide. An even thickness puts the centre
/// line half a pixel past the margin, matching how strokes are rasterised.
pub fn border_corners(canonical_w: usize, canonical_h: usize, margin: usize, thickness: usize) -> [Point; 4] {
    let c = (thickness.max(1) as f64 - 1.0) / 2.0;
    let (x0, y0) = (margin as f64 + c, margin as f64 + c);
    let (x1, y1) = ((canonical_w - 1 - margin) as f64 + c, (canonical_h - 1 - margin) as f64 + c);
    [Point::new(x0, y0), Point::new(x1, y0), Point::new(x1, y1), Point::new(x0, y1)]
}

/// Candidate ID boxes for a layout: left-bottom then right-bottom.
pub fn id_box_candidates(spec: &SheetSpec) -> [Rect; 2] {
    let s = spec.glyph_scale as i64;
    let w = font::text_width(spec.id_digits, spec.glyph_scale) as i64 + 2 * ID_PAD;
    let h = (GLYPH_H as i64) * s + 2 * ID_PAD;
    let y = spec.canonical_h as i64 - 40 + (22 - h).min(0);
    [
        Rect::new(20, y, w, h),
        Rect::new(spec.canonical_w as i64 - 20 - w, y, w, h),
    ]
}

struct Layout {
    aau: Vec<(i64, i64, i64)>,
    label_x: Vec<i64>,
    max_chars: usize,
}

fn layout(spec: &SheetSpec) -> Result<Layout, GenerationError> {
    let overflow = |m: String| Err(GenerationError::LayoutOverflow(m));
    let (w, h) = (spec.canonical_w as i64, spec.canonical_h as i64);
    let s = spec.glyph_scale as i64;
    let (left, right, top, bottom) = (40, w - 40, 80, h - 80);
    let col_w = (right - left) / spec.cols as i64;
    let underline_len = col_w - 70;
    let writing = (GLYPH_H as i64) * s + WRITING_GAP + 1;
    if writing > AREA_M as i64 {
        return overflow(format!("glyph scale {} is too tall for the answer area", spec.glyph_scale));
    }
    let max_chars = ((underline_len - 16 + 2 * s) / (font::ADVANCE as i64 * s)).max(0) as usize;
    if underline_len < 40 || max_chars < 1 {
        return overflow(format!("{} columns leave underlines too short", spec.cols));
    }
    let pitch = if spec.rows > 1 {
        ((bottom - top) / (spec.rows as i64 - 1)).min(60)
    } else {
        60
    };
    if pitch < (AREA_M + AREA_N) as i64 + 12 {
        return overflow(format!("{} rows do not fit the sheet height", spec.rows));
    }
    let mut aau = Vec::with_capacity(spec.rows * spec.cols);
    let mut label_x = Vec::with_capacity(spec.rows * spec.cols);
    for r in 0..spec.rows as i64 {
        for c in 0..spec.cols as i64 {
            let xc = left + c * col_w;
            aau.push((xc + 50, xc + 50 + underline_len, top + r * pitch));
            label_x.push(xc);
        }
    }
    Ok(Layout { aau, label_x, max_chars })
}

fn validate_spec(spec: &SheetSpec) -> Result<(), GenerationError> {
    let bad = |m: &str| Err(GenerationError::InvalidSpec(m.into()));
    if spec.rows == 0 || spec.cols == 0 {
        return bad("rows and cols must be positive");
    }
    if spec.stroke_thickness == 0 || spec.stroke_thickness > 6 {
        return bad("stroke_thickness must be between 1 and 6");
    }
    if spec.glyph_scale == 0 {
        return bad("glyph_scale must be positive");
    }
    if spec.id_digits == 0 || spec.id_digits > 18 {
        return bad("id_digits must be between 1 and 18");
    }
    if spec.canonical_w < 200 || spec.canonical_h < 200 {
        return bad("canonical sheet must be at least 200x200");
    }
    Ok(())
}

/// Sheet ID derived from a seed: the seed modulo 10^digits, zero padded.
pub fn sheet_id_for_seed(seed: u64, digits: usize) -> String {
    let modulus = 10u64.pow(digits as u32);
    format!("{:0digits$}", seed % modulus)
}

fn random_word<R: Rng>(rng: &mut R, len: usize) -> String {
    const CHARS: &[u8] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
    (0..len).map(|_| *CHARS.choose(rng).expect("non-empty") as char).collect()
}

/// One or two words, never with leading or trailing spaces.
fn random_answer<R: Rng>(rng: &mut R, max_chars: usize) -> String {
    let max_chars = max_chars.max(1);
    if max_chars >= 5 && rng.gen_bool(0.25) {
        let a = rng.gen_range(1..=(max_chars - 2).min(5));
        let b = rng.gen_range(1..=(max_chars - 1 - a).min(5));
        format!("{} {}", random_word(rng, a), random_word(rng, b))
    } else {
        let n = rng.gen_range(1..=max_chars.min(8));
        random_word(rng, n)
    }
}

fn fill_rect_img(img: &mut GrayImage, x0: i64, y0: i64, x1: i64, y1: i64, v: u8) {
    for y in y0.max(0)..=y1.min(img.height() as i64 - 1) {
        for x in x0.max(0)..=x1.min(img.width() as i64 - 1) {
            img.set(x as usize, y as usize, v);
        }
    }
}

fn fill_rect_mask(m: &mut BitMask, x0: i64, y0: i64, x1: i64, y1: i64) {
    for y in y0.max(0)..=y1.min(m.height() as i64 - 1) {
        for x in x0.max(0)..=x1.min(m.width() as i64 - 1) {
            m.set(x as usize, y as usize, true);
        }
    }
}

fn stroke_start(c: f64, t: usize) -> i64 {
    crate::linedet::bar_top_row(c, t)
}

/// Renders the canonical, undistorted sheet for `spec`.
pub fn generate_sheet(spec: &SheetSpec) -> Result<GeneratedSample> {
    validate_spec(spec)?;
    let lay = layout(spec)?;
    let (w, h) = (spec.canonical_w, spec.canonical_h);
    let t = spec.stroke_thickness;
    let ti = t as i64;
    let s = spec.glyph_scale;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut photo = GrayImage::new(w, h, PAPER)?;
    let mut border = BitMask::new(w, h);
    let mut aau_mask = BitMask::new(w, h);

    // borderline: strokes starting on the margin-inset rectangle
    let m = BORDER_MARGIN as f64;
    let (lo_x, hi_x) = (stroke_start(m, 1), stroke_start((w - 1) as f64 - m, 1));
    let (lo_y, hi_y) = (stroke_start(m, 1), stroke_start((h - 1) as f64 - m, 1));
    for (x0, y0, x1, y1) in [
        (lo_x, lo_y, hi_x + ti - 1, lo_y + ti - 1),
        (lo_x, hi_y, hi_x + ti - 1, hi_y + ti - 1),
        (lo_x, lo_y, lo_x + ti - 1, hi_y + ti - 1),
        (hi_x, lo_y, hi_x + ti - 1, hi_y + ti - 1),
    ] {
        fill_rect_img(&mut photo, x0, y0, x1, y1, PRINT_INK);
        fill_rect_mask(&mut border, x0, y0, x1, y1);
    }

    let no_jitter: Option<(Jitter, &mut ChaCha8Rng)> = None;
    font::draw_text(&mut photo, 40, 30, "ANSWER SHEET", s, PRINT_INK, no_jitter);

    let sheet_id = sheet_id_for_seed(spec.seed, spec.id_digits);
    let id_corner = if rng.gen_bool(0.5) {
        IdCorner::LeftBottom
    } else {
        IdCorner::RightBottom
    };
    let [left_box, right_box] = id_box_candidates(spec);
    let id_box = match id_corner {
        IdCorner::LeftBottom => left_box,
        IdCorner::RightBottom => right_box,
    };
    font::draw_text::<ChaCha8Rng>(&mut photo, id_box.x + ID_PAD, id_box.y + ID_PAD, &sheet_id, s, PRINT_INK, None);

    let mut areas = Vec::with_capacity(lay.aau.len());
    let mut answers = Vec::with_capacity(lay.aau.len());
    let centre_offset = (t as f64 - 1.0) / 2.0;
    for (i, (&(x0, x1, top), &lx)) in lay.aau.iter().zip(&lay.label_x).enumerate() {
        fill_rect_img(&mut photo, x0, top, x1, top + ti - 1, PRINT_INK);
        fill_rect_mask(&mut aau_mask, x0, top, x1, top + ti - 1);
        let label = format!("Q{}", i + 1);
        let label_y = top + ti - (GLYPH_H * s) as i64;
        font::draw_text::<ChaCha8Rng>(&mut photo, lx, label_y, &label, s, PRINT_INK, None);

        let standard = random_answer(&mut rng, lay.max_chars);
        let written = if rng.gen_bool(0.7) {
            standard.clone()
        } else {
            random_answer(&mut rng, lay.max_chars)
        };
        let ink = rng.gen_range(30..=80);
        let text_y = top - WRITING_GAP - (GLYPH_H * s) as i64;
        let jitter = Jitter { max_offset: 1 };
        font::draw_text(&mut photo, x0 + 8, text_y, &written, s, ink, Some((jitter, &mut rng)));

        let aau = Segment::new(x0 as f64, x1 as f64, top as f64 + centre_offset, SegmentSource::Template)
            .ok_or_else(|| GenerationError::LayoutOverflow("degenerate underline".into()))?;
        areas.push(TemplateArea {
            index: i,
            aau,
            m: AREA_M,
            n: AREA_N,
            standard_answer: standard,
        });
        answers.push(written);
    }

    let template = AnswerSheetTemplate {
        sheet_id,
        canonical_w: w,
        canonical_h: h,
        id_box,
        id_corner,
        areas,
    };
    template
        .validate()
        .map_err(|e| GenerationError::LayoutOverflow(e.to_string()))?;
    Ok(GeneratedSample {
        image_id: format!("sheet{}", spec.seed),
        photo,
        template,
        gt_borderline_mask: border,
        gt_aau_mask: aau_mask,
        gt_homography: Homography::IDENTITY,
        gt_answers: answers,
    })
}

/// Canonical-frame regions that clutter must not touch: answer crops and
/// the ID box, each grown by a safety band.
fn protected_rects(t: &AnswerSheetTemplate) -> Vec<Rect> {
    let grow = |r: Rect, d: i64| Rect::new(r.x - d, r.y - d, r.w + 2 * d, r.h + 2 * d);
    let mut v: Vec<Rect> = t.areas.iter().map(|a| grow(a.answer_rect(), 6)).collect();
    v.push(grow(t.id_box, 6));
    v
}

/// Short pen strokes a student might add under an answer, drawn on the
/// canonical sheet before it is photographed.
fn draw_auxiliary_strokes<R: Rng>(img: &mut GrayImage, t: &AnswerSheetTemplate, count: usize, rng: &mut R) {
    let protected = protected_rects(t);
    let mut placed = 0;
    let mut attempts = 0;
    while placed < count && attempts < count * 20 {
        attempts += 1;
        let a = &t.areas[rng.gen_range(0..t.areas.len())];
        let r = a.answer_rect();
        let y = r.bottom() + 6 + rng.gen_range(0..=8);
        let len = rng.gen_range(30..=(r.w - 20).max(31));
        let x0 = r.x + rng.gen_range(0..=(r.w - len).max(0));
        let thickness = rng.gen_range(1..=2);
        let slope: f64 = rng.gen_range(-0.03..=0.03);
        let bbox = Rect::new(x0, y - 3, len, thickness + 6);
        if protected.iter().any(|p| p.intersection_area(&bbox) > 0) {
            continue;
        }
        let ink = rng.gen_range(20..=90);
        for dx in 0..len {
            let yy = y + (slope * dx as f64).round() as i64;
            for k in 0..thickness {
                let (px, py) = (x0 + dx, yy + k);
                if px >= 0 && py >= 0 && (px as usize) < img.width() && (py as usize) < img.height() {
                    img.set(px as usize, py as usize, ink);
                }
            }
        }
        placed += 1;
    }
}

/// Places the sample in a perspective photo and adds clutter. The sample's
/// GT masks are warped with the photo; strokes, texture and noise are not
/// added to them.
pub fn distort(sample: &GeneratedSample, d: &DistortionSpec) -> Result<GeneratedSample> {
    d.validate()?;
    if d.is_identity() {
        return Ok(sample.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(d.seed);
    let mut out = sample.clone();

    if d.auxiliary_stroke_count > 0 {
        // strokes live on the paper, so they go on before the warp
        let to_canon = sample.gt_homography;
        if to_canon == Homography::IDENTITY {
            draw_auxiliary_strokes(&mut out.photo, &sample.template, d.auxiliary_stroke_count, &mut rng);
        } else {
            let (cw, ch) = (sample.template.canonical_w, sample.template.canonical_h);
            let mut canon = warp(&sample.photo, &to_canon, cw, ch)?;
            let before = canon.clone();
            draw_auxiliary_strokes(&mut canon, &sample.template, d.auxiliary_stroke_count, &mut rng);
            let back = to_canon.inverse()?;
            let stroke_mask = BitMask::from_fn(cw, ch, |x, y| canon.get(x, y) != before.get(x, y));
            let stroke_photo = warp_mask(&stroke_mask, &back, out.photo.width(), out.photo.height())?;
            let inked = warp(&canon, &back, out.photo.width(), out.photo.height())?;
            for y in 0..out.photo.height() {
                for x in 0..out.photo.width() {
                    if stroke_photo.get(x, y) {
                        out.photo.set(x, y, inked.get(x, y));
                    }
                }
            }
        }
    }

    let jitter = d.max_perspective_jitter;
    if jitter > 0.0 || d.corner_offsets.is_some() {
        let max_off = d
            .corner_offsets
            .map(|o| o.iter().map(|(x, y)| x.abs().max(y.abs())).fold(0.0, f64::max))
            .unwrap_or(jitter);
        let pad = max_off.ceil() as usize;
        let (sw, sh) = (out.photo.width(), out.photo.height());
        let (pw, ph) = (sw + 2 * pad, sh + 2 * pad);
        let src = Quad::rect(0.0, 0.0, (sw - 1) as f64, (sh - 1) as f64)?;
        let base = [(0.0, 0.0), ((sw - 1) as f64, 0.0), ((sw - 1) as f64, (sh - 1) as f64), (0.0, (sh - 1) as f64)];
        let mut dst = None;
        for _ in 0..100 {
            let offsets = d.corner_offsets.unwrap_or_else(|| {
                [0; 4].map(|_| (rng.gen_range(-jitter..=jitter), rng.gen_range(-jitter..=jitter)))
            });
            let pts = [0, 1, 2, 3].map(|i| Point::new(base[i].0 + pad as f64 + offsets[i].0, base[i].1 + pad as f64 + offsets[i].1));
            if let Ok(q) = Quad::new(pts) {
                dst = Some(q);
                break;
            }
            if d.corner_offsets.is_some() {
                break;
            }
        }
        let dst = dst.ok_or_else(|| GenerationError::InvalidDistortion("corner offsets give a degenerate quad".into()))?;
        let h_cp = estimate_homography(&src, &dst)?;
        let mut photo = warp(&out.photo, &h_cp, pw, ph)?;
        let all = BitMask::from_fn(sw, sh, |_, _| true);
        let coverage = warp_mask(&all, &h_cp, pw, ph)?;
        for y in 0..ph {
            for x in 0..pw {
                if !coverage.get(x, y) {
                    photo.set(x, y, TABLE);
                }
            }
        }
        out.photo = photo;
        out.gt_borderline_mask = warp_mask(&out.gt_borderline_mask, &h_cp, pw, ph)?;
        out.gt_aau_mask = warp_mask(&out.gt_aau_mask, &h_cp, pw, ph)?;
        out.gt_homography = h_cp.inverse()?.then(&sample.gt_homography)?;
    }

    if d.background_line_count > 0 && d.background_line_intensity > 0.0 {
        let (pw, ph) = (out.photo.width() as i64, out.photo.height() as i64);
        for _ in 0..d.background_line_count {
            let y0 = rng.gen_range(0.0..ph as f64);
            let slope: f64 = rng.gen_range(-0.05..=0.05);
            let thickness = rng.gen_range(1..=2);
            let keep = 1.0 - d.background_line_intensity;
            for x in 0..pw {
                let yc = (y0 + slope * x as f64).round() as i64;
                for k in 0..thickness {
                    let y = yc + k;
                    if y >= 0 && y < ph {
                        let v = out.photo.get(x as usize, y as usize) as f64 * keep;
                        out.photo.set(x as usize, y as usize, v.round() as u8);
                    }
                }
            }
        }
    }

    if d.noise_level > 0.0 {
        for y in 0..out.photo.height() {
            for x in 0..out.photo.width() {
                if rng.gen_bool(d.noise_level) {
                    out.photo.set(x, y, if rng.gen_bool(0.5) { 0 } else { 255 });
                }
            }
        }
    }
    Ok(out)
}

/// One row of `manifest.tsv`; paths are relative to the corpus root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub image_id: String,
    pub sheet_id: String,
    pub image: PathBuf,
    pub border_mask: PathBuf,
    pub aau_mask: PathBuf,
    pub template: PathBuf,
    pub homography: PathBuf,
    pub answers: PathBuf,
}

impl CorpusEntry {
    fn for_ids(image_id: &str, sheet_id: &str) -> Self {
        CorpusEntry {
            image_id: image_id.to_owned(),
            sheet_id: sheet_id.to_owned(),
            image: format!("images/{image_id}.pgm").into(),
            border_mask: format!("masks/{image_id}.border.pgm").into(),
            aau_mask: format!("masks/{image_id}.aau.pgm").into(),
            template: format!("templates/{sheet_id}.json").into(),
            homography: format!("gt/{image_id}.homography.txt").into(),
            answers: format!("gt/{image_id}.answers.tsv").into(),
        }
    }
}

const MANIFEST_HEADER: &str = "image_id\tsheet_id\timage\tborder_mask\taau_mask\ttemplate\thomography\tanswers";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusManifest {
    pub entries: Vec<CorpusEntry>,
}

impl CorpusManifest {
    pub fn to_tsv(&self) -> String {
        let mut s = String::from(MANIFEST_HEADER);
        s.push('\n');
        for e in &self.entries {
            let cols = [
                e.image_id.clone(),
                e.sheet_id.clone(),
                e.image.display().to_string(),
                e.border_mask.display().to_string(),
                e.aau_mask.display().to_string(),
                e.template.display().to_string(),
                e.homography.display().to_string(),
                e.answers.display().to_string(),
            ];
            s.push_str(&cols.join("\t"));
            s.push('\n');
        }
        s
    }

    pub fn from_tsv(text: &str, source_name: &str) -> Result<Self, ParseError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == MANIFEST_HEADER => {}
            _ => return Err(ParseError::new(source_name, Some(1), "header", format!("expected `{MANIFEST_HEADER}`"))),
        }
        let mut entries = Vec::new();
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 8 {
                return Err(ParseError::new(source_name, Some(i + 1), "record", format!("expected 8 fields, found {}", f.len())));
            }
            if f[0].is_empty() || f[1].is_empty() {
                return Err(ParseError::new(source_name, Some(i + 1), "image_id", "empty identifier"));
            }
            entries.push(CorpusEntry {
                image_id: f[0].into(),
                sheet_id: f[1].into(),
                image: f[2].into(),
                border_mask: f[3].into(),
                aau_mask: f[4].into(),
                template: f[5].into(),
                homography: f[6].into(),
                answers: f[7].into(),
            });
        }
        Ok(CorpusManifest { entries })
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let path = dir.as_ref().join("manifest.tsv");
        let text = fsutil::read_to_string(&path)?;
        Ok(Self::from_tsv(&text, &path.display().to_string())?)
    }
}

/// `area_index\tanswer` per line.
pub fn answers_to_tsv(answers: &[String]) -> String {
    answers.iter().enumerate().map(|(i, a)| format!("{i}\t{a}\n")).collect()
}

pub fn answers_from_tsv(text: &str, source_name: &str) -> Result<Vec<String>, ParseError> {
    let mut out: Vec<(usize, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (idx, ans) = line
            .split_once('\t')
            .ok_or_else(|| ParseError::new(source_name, Some(i + 1), "record", "expected `area_index<TAB>answer`"))?;
        let idx: usize = idx
            .parse()
            .map_err(|_| ParseError::new(source_name, Some(i + 1), "area_index", format!("not an integer: {idx:?}")))?;
        out.push((idx, ans.to_owned()));
    }
    out.sort_by_key(|(i, _)| *i);
    for (k, (i, _)) in out.iter().enumerate() {
        if *i != k {
            return Err(ParseError::new(source_name, None, "area_index", format!("indices must be 0..n without gaps; missing {k}")));
        }
    }
    Ok(out.into_iter().map(|(_, a)| a).collect())
}

/// Writes every file of one sample under `dir` using `entry`'s paths.
pub fn write_sample(dir: &Path, entry: &CorpusEntry, s: &GeneratedSample) -> Result<()> {
    s.photo.store_pgm(dir.join(&entry.image))?;
    s.gt_borderline_mask.store_pgm(dir.join(&entry.border_mask))?;
    s.gt_aau_mask.store_pgm(dir.join(&entry.aau_mask))?;
    store_template(&s.template, dir.join(&entry.template))?;
    fsutil::write_atomic(&dir.join(&entry.homography), s.gt_homography.to_text().as_bytes())?;
    fsutil::write_atomic(&dir.join(&entry.answers), answers_to_tsv(&s.gt_answers).as_bytes())?;
    Ok(())
}

/// Sample `i` of a corpus: sheet seed `spec.seed + i`, distortion seed
/// `d.seed + i`.
pub fn corpus_sample(i: usize, spec: &SheetSpec, d: &DistortionSpec) -> Result<GeneratedSample> {
    let sheet_spec = SheetSpec {
        seed: spec.seed.wrapping_add(i as u64),
        ..*spec
    };
    let mut sample = generate_sheet(&sheet_spec)?;
    if !d.is_identity() {
        sample = distort(&sample, &d.with_seed(d.seed.wrapping_add(i as u64)))?;
    }
    sample.image_id = format!("img{i:05}");
    Ok(sample)
}

/// Generates `count` samples into `out_dir` and writes `manifest.tsv`.
pub fn generate_corpus(count: usize, spec: &SheetSpec, d: &DistortionSpec, out_dir: impl AsRef<Path>) -> Result<CorpusManifest> {
    let dir = out_dir.as_ref();
    validate_spec(spec)?;
    d.validate()?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let entries: Vec<CorpusEntry> = (0..count)
        .into_par_iter()
        .map(|i| -> Result<CorpusEntry> {
            let sample = corpus_sample(i, spec, d)?;
            let entry = CorpusEntry::for_ids(&sample.image_id, &sample.template.sheet_id);
            write_sample(dir, &entry, &sample)?;
            Ok(entry)
        })
        .collect::<Result<_>>()?;
    let manifest = CorpusManifest { entries };
    fsutil::write_atomic(&dir.join("manifest.tsv"), manifest.to_tsv().as_bytes())?;
    Ok(manifest)
}
