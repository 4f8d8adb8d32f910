//! Character recognition boundary.
//!
//! A [`Recognizer`] turns a cropped region into text. Two implementations
//! ship here: [`StubRecognizer`], a template matcher for the built-in 5×7
//! font, and [`FileRecognizer`], which replays results produced elsewhere
//! from a tab-separated manifest.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{ParseError, Result};
use crate::font::{self, Glyph, ADVANCE, GLYPH_H, GLYPH_W};
use crate::fsutil;
use crate::raster::GrayImage;

/// Which region of a sheet a crop came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    /// The printed unique-ID box.
    Id,
    /// An answer area, by template index.
    Area(u32),
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Id => f.write_str("id"),
            Region::Area(i) => write!(f, "{i}"),
        }
    }
}

impl FromStr for Region {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "id" {
            return Ok(Region::Id);
        }
        s.parse::<u32>()
            .map(Region::Area)
            .map_err(|_| format!("expected `id` or a non-negative integer, got {s:?}"))
    }
}

/// Identifies a crop so recognizers backed by precomputed results can look
/// it up. Pure image recognizers ignore it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionKey<'a> {
    pub image_id: &'a str,
    pub region: Region,
}

impl<'a> RegionKey<'a> {
    pub fn new(image_id: &'a str, region: Region) -> Self {
        RegionKey { image_id, region }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionResult {
    pub text: String,
    /// In `[0, 1]`.
    pub confidence: f64,
}

impl RecognitionResult {
    pub fn new(text: impl Into<String>, confidence: f64) -> Self {
        RecognitionResult {
            text: text.into(),
            confidence: confidence.clamp(0.0, 1.0),
        }
    }
}

/// Recognizers are immutable; calls must be pure so crops can be processed
/// in parallel.
pub trait Recognizer: Send + Sync {
    fn recognize(&self, img: &GrayImage, key: RegionKey<'_>) -> RecognitionResult;
}

/// Glyphs whose best normalised distance exceeds this decode to `?`.
pub const MAX_GLYPH_DISTANCE: f64 = 0.3;
const INK_LEVEL: u8 = 128;
const MAX_AUTO_SCALE: usize = 4;

/// Template matcher for text set in the built-in font.
///
/// The crop is binarised, full-width ruled lines are erased, glyphs are cut
/// on blank columns and each is scored against every font glyph. Leading
/// and trailing spaces carry no ink and are never reported.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StubRecognizer {
    /// Glyph scale in pixels per font pixel. `None` tries 1 through 4 and
    /// keeps the most confident reading.
    pub scale: Option<usize>,
}

impl StubRecognizer {
    pub fn with_scale(scale: usize) -> Self {
        StubRecognizer {
            scale: Some(scale.max(1)),
        }
    }

    pub fn read(&self, img: &GrayImage) -> RecognitionResult {
        let ink = InkMap::from_image(img);
        match self.scale {
            Some(s) => read_at_scale(&ink, s),
            None => {
                let mut best: Option<RecognitionResult> = None;
                for s in 1..=MAX_AUTO_SCALE {
                    let r = read_at_scale(&ink, s);
                    if best.as_ref().is_none_or(|b| r.confidence > b.confidence) {
                        best = Some(r);
                    }
                }
                best.expect("at least one scale tried")
            }
        }
    }
}

impl Recognizer for StubRecognizer {
    fn recognize(&self, img: &GrayImage, _key: RegionKey<'_>) -> RecognitionResult {
        self.read(img)
    }
}

/// Auto-scaled [`StubRecognizer`] on a single image.
pub fn stub_recognize(img: &GrayImage) -> RecognitionResult {
    StubRecognizer::default().read(img)
}

/// Minimum contrast between paper and ink for a crop to hold any ink.
const MIN_CONTRAST: f64 = 40.0;
/// Values this close to the paper level carry no soft ink.
const PAPER_SLACK: f64 = 10.0;

#[derive(Clone)]
struct InkMap {
    w: usize,
    h: usize,
    /// Thresholded ink, used for cutting glyphs apart.
    ink: Vec<bool>,
    /// Graded ink in `[0, 1]`, used for scoring.
    soft: Vec<f64>,
}

impl InkMap {
    /// Normalises the crop between its own paper and ink levels, so faint or
    /// resampled handwriting binarises like crisp print.
    fn from_image(img: &GrayImage) -> Self {
        let (w, h) = (img.width(), img.height());
        let data = img.data();
        // ruled lines are found at a fixed level; they are printed dark
        let mut ruled = vec![false; h];
        if w >= 40 {
            for (y, r) in ruled.iter_mut().enumerate() {
                let n = data[y * w..(y + 1) * w].iter().filter(|&&v| v < INK_LEVEL).count();
                *r = n * 10 >= w * 9;
            }
        }
        let near_ruled = |y: usize| (y.saturating_sub(1)..=(y + 1).min(h.saturating_sub(1))).any(|r| ruled[r]);
        let mut sorted = data.to_vec();
        sorted.sort_unstable();
        let paper = sorted.get(sorted.len() / 2).copied().unwrap_or(255) as f64;
        let mut dark: Vec<u8> = (0..h)
            .filter(|&y| !near_ruled(y))
            .flat_map(|y| data[y * w..(y + 1) * w].iter().copied())
            .filter(|&v| (v as f64) + MIN_CONTRAST < paper)
            .collect();
        dark.sort_unstable();
        let mut map = InkMap {
            w,
            h,
            ink: vec![false; w * h],
            soft: vec![0.0; w * h],
        };
        let Some(&level) = dark.get(dark.len() / 20) else {
            return map;
        };
        let level = level as f64;
        let cut = (paper + level) / 2.0;
        let top = paper - PAPER_SLACK;
        for (i, &v) in data.iter().enumerate() {
            let v = v as f64;
            map.ink[i] = v < cut;
            map.soft[i] = ((top - v) / (top - level)).clamp(0.0, 1.0);
        }
        for (y, &is_ruled) in ruled.iter().enumerate() {
            let n = map.ink[y * w..(y + 1) * w].iter().filter(|&&b| b).count();
            if is_ruled || (w >= 40 && n * 10 >= w * 9) {
                map.clear_row_span(y, 0, w);
            }
        }
        map
    }

    fn clear_row_span(&mut self, y: usize, x0: usize, x1: usize) {
        let row = y * self.w;
        self.ink[row + x0..row + x1].fill(false);
        self.soft[row + x0..row + x1].fill(0.0);
        // the blurred fringe of an erased line is not glyph ink either
        for yy in [y.wrapping_sub(1), y + 1] {
            if yy < self.h {
                for x in x0..x1 {
                    if !self.ink[yy * self.w + x] {
                        self.soft[yy * self.w + x] = 0.0;
                    }
                }
            }
        }
    }

    #[inline]
    fn at(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.w && (y as usize) < self.h && self.ink[y as usize * self.w + x as usize]
    }

    /// Erases horizontal ink runs longer than any glyph row can produce,
    /// such as fragments of a slightly tilted underline.
    fn without_long_runs(&self, max_run: usize) -> InkMap {
        let mut out = self.clone();
        for y in 0..self.h {
            let mut x = 0;
            while x < self.w {
                if !self.ink[y * self.w + x] {
                    x += 1;
                    continue;
                }
                let start = x;
                while x < self.w && self.ink[y * self.w + x] {
                    x += 1;
                }
                if x - start > max_run {
                    out.clear_row_span(y, start, x);
                }
            }
        }
        out
    }

    /// Drops ink pixels with fewer than two inked 8-neighbours.
    fn denoised(&self) -> InkMap {
        let mut out = self.clone();
        for y in 0..self.h as i64 {
            for x in 0..self.w as i64 {
                if !self.at(x, y) {
                    continue;
                }
                let mut n = 0;
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        if (dx, dy) != (0, 0) && self.at(x + dx, y + dy) {
                            n += 1;
                        }
                    }
                }
                if n < 2 {
                    let i = y as usize * self.w + x as usize;
                    out.ink[i] = false;
                    out.soft[i] = 0.0;
                }
            }
        }
        out
    }
}

/// Summed-area tables of the soft ink sampled at the four half-pixel
/// phases, so block means at any half-pixel origin cost O(1).
struct PhaseSums {
    w: usize,
    h: usize,
    /// Index `hy * 2 + hx`; each table is `(w + 1) * (h + 1)`.
    tables: [Vec<f64>; 4],
    /// Same layout, counting thresholded ink.
    binary: Vec<usize>,
}

impl PhaseSums {
    fn new(ink: &InkMap) -> Self {
        let (w, h) = (ink.w, ink.h);
        let v = |x: usize, y: usize| if x < w && y < h { ink.soft[y * w + x] } else { 0.0 };
        let tables = [(0, 0), (1, 0), (0, 1), (1, 1)].map(|(hx, hy): (usize, usize)| {
            let mut t = vec![0.0; (w + 1) * (h + 1)];
            for y in 0..h {
                let mut row = 0.0;
                for x in 0..w {
                    let sample = match (hx, hy) {
                        (0, 0) => v(x, y),
                        (1, 0) => (v(x, y) + v(x + 1, y)) / 2.0,
                        (0, 1) => (v(x, y) + v(x, y + 1)) / 2.0,
                        _ => (v(x, y) + v(x + 1, y) + v(x, y + 1) + v(x + 1, y + 1)) / 4.0,
                    };
                    row += sample;
                    t[(y + 1) * (w + 1) + x + 1] = t[y * (w + 1) + x + 1] + row;
                }
            }
            t
        });
        let mut binary = vec![0; (w + 1) * (h + 1)];
        for y in 0..h {
            let mut row = 0;
            for x in 0..w {
                row += ink.ink[y * w + x] as usize;
                binary[(y + 1) * (w + 1) + x + 1] = binary[y * (w + 1) + x + 1] + row;
            }
        }
        PhaseSums { w, h, tables, binary }
    }

    /// Thresholded ink in `[x0, x1) × [y0, y1)`, which must lie inside the
    /// image.
    fn ink_count(&self, x0: i64, y0: i64, x1: i64, y1: i64) -> usize {
        let stride = self.w + 1;
        let at = |x: i64, y: i64| self.binary[y as usize * stride + x as usize];
        at(x1, y1) + at(x0, y0) - at(x0, y1) - at(x1, y0)
    }

    /// Sum over the `s`×`s` block at integer origin `(x, y)` in phase `p`,
    /// clipped to the image.
    fn block(&self, p: usize, x: i64, y: i64, s: i64) -> f64 {
        let (w, h) = (self.w as i64, self.h as i64);
        let (x0, y0) = (x.clamp(0, w), y.clamp(0, h));
        let (x1, y1) = ((x + s).clamp(0, w), (y + s).clamp(0, h));
        if x0 >= x1 || y0 >= y1 {
            return 0.0;
        }
        let t = &self.tables[p];
        let stride = self.w + 1;
        let at = |x: i64, y: i64| t[y as usize * stride + x as usize];
        at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0)
    }
}

struct Reading {
    ch: char,
    origin_x: f64,
    confidence: f64,
}

/// Candidate placements searched around the ink-box alignment, in
/// half-pixel steps.
const HALF_STEPS: std::ops::RangeInclusive<i64> = -2..=2;

fn read_at_scale(raw: &InkMap, s: usize) -> RecognitionResult {
    let si = s as i64;
    let trimmed = raw.without_long_runs(12 * s);
    let ink = if s >= 2 { trimmed.denoised() } else { trimmed };
    let sums = PhaseSums::new(&ink);
    let pieces = glyph_pieces(&ink, s);
    let font: Vec<Glyph> = font::glyphs().collect();
    let min_rows = font.iter().map(|g| g.ink_y1 - g.ink_y0 + 1).min().expect("font is non-empty");
    let steps: Vec<i64> = if s >= 2 { HALF_STEPS.collect() } else { vec![0] };
    let pieces_seen = pieces.len();
    let mut readings = Vec::with_capacity(pieces.len());
    for (a, b) in pieces {
        let rows: Vec<usize> = (0..ink.h)
            .filter(|&y| (a..=b).any(|x| ink.ink[y * ink.w + x]))
            .collect();
        let (Some(&r0), Some(&r1)) = (rows.first(), rows.last()) else {
            continue;
        };
        // shorter than any glyph: residue of a ruled or background line
        if r1 - r0 + 1 + s < min_rows * s {
            continue;
        }
        let ink_px = sums.ink_count(a as i64, r0 as i64, b as i64 + 1, r1 as i64 + 1);
        let piece = Piece {
            a: a as i64,
            b: b as i64,
            r0: r0 as i64,
            r1: r1 as i64,
            ink: ink_px,
        };
        let mut best: Option<(f64, char, f64)> = None;
        for g in &font {
            let bx = 2 * (a as i64 - g.ink_x0 as i64 * si);
            let by = 2 * (r0 as i64 - g.ink_y0 as i64 * si);
            for &dy in &steps {
                for &dx in &steps {
                    let d = glyph_distance(&sums, g, s, bx + dx, by + dy, &piece);
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, g.ch, (bx + dx) as f64 / 2.0));
                    }
                }
            }
        }
        let (d, ch, ox) = best.expect("font is non-empty");
        readings.push(if d <= MAX_GLYPH_DISTANCE {
            Reading {
                ch,
                origin_x: ox,
                confidence: 1.0 - d,
            }
        } else {
            Reading {
                ch: '?',
                origin_x: a as f64,
                confidence: 0.0,
            }
        });
    }
    if readings.is_empty() {
        // nothing but specks at this scale is a poor fit, not a blank crop
        let blank = pieces_seen == 0;
        return RecognitionResult::new("", if blank { 1.0 } else { 0.0 });
    }
    let pitch = (ADVANCE * s) as f64;
    let mut text = String::new();
    for (i, r) in readings.iter().enumerate() {
        if i > 0 {
            let advance = r.origin_x - readings[i - 1].origin_x;
            let spaces = ((advance + 2.0 * s as f64) / pitch).floor() as i64 - 1;
            text.extend(std::iter::repeat_n(' ', spaces.max(0) as usize));
        }
        text.push(r.ch);
    }
    let confidence = readings.iter().map(|r| r.confidence).sum::<f64>() / readings.len() as f64;
    RecognitionResult::new(text, confidence)
}

/// Column ranges holding one glyph each. Runs wider than one glyph cell are
/// split on the font pitch; specks smaller than one font pixel are dropped.
fn glyph_pieces(ink: &InkMap, s: usize) -> Vec<(usize, usize)> {
    let col_ink: Vec<usize> = (0..ink.w)
        .map(|x| (0..ink.h).filter(|&y| ink.ink[y * ink.w + x]).count())
        .collect();
    let mut runs = Vec::new();
    let mut x = 0;
    while x < ink.w {
        if col_ink[x] == 0 {
            x += 1;
            continue;
        }
        let start = x;
        while x < ink.w && col_ink[x] > 0 {
            x += 1;
        }
        if col_ink[start..x].iter().sum::<usize>() >= s * s {
            runs.push((start, x - 1));
        }
    }
    let mut pieces = Vec::new();
    for (a, b) in runs {
        let w = b - a + 1;
        if w <= (GLYPH_W + 1) * s {
            pieces.push((a, b));
            continue;
        }
        let pitch = ADVANCE * s;
        let k = ((w + 2 * s) as f64 / pitch as f64).round().max(1.0) as usize;
        let step = (w + 2 * s) as f64 / k as f64;
        for i in 0..k {
            let lo = a + (i as f64 * step).round() as usize;
            let hi = (lo + GLYPH_W * s - 1).min(b);
            // re-trim to the inked columns inside the slot
            let inked: Vec<usize> = (lo..=hi).filter(|&c| col_ink[c] > 0).collect();
            if let (Some(&l), Some(&h)) = (inked.first(), inked.last()) {
                pieces.push((l, h));
            }
        }
    }
    pieces
}

struct Piece {
    a: i64,
    b: i64,
    r0: i64,
    r1: i64,
    /// Thresholded ink pixels inside the piece box.
    ink: usize,
}

/// Normalised mismatch between glyph `g` with its cell origin at
/// `(hx2 / 2, hy2 / 2)` (half-pixel units) and the ink. Thresholded ink of
/// the piece that falls outside the cell counts against the candidate.
fn glyph_distance(sums: &PhaseSums, g: &Glyph, s: usize, hx2: i64, hy2: i64, piece: &Piece) -> f64 {
    let si = s as i64;
    let area = (s * s) as f64;
    let phase = (hy2.rem_euclid(2) * 2 + hx2.rem_euclid(2)) as usize;
    let (ox, oy) = (hx2.div_euclid(2), hy2.div_euclid(2));
    let mut mismatch = 0.0;
    for gy in 0..GLYPH_H {
        for gx in 0..GLYPH_W {
            let frac = (sums.block(phase, ox + gx as i64 * si, oy + gy as i64 * si, si) / area).min(1.0);
            mismatch += if g.bit(gx, gy) { 1.0 - frac } else { frac };
        }
    }
    // pixels whose centres fall inside the cell
    let cell_w = (GLYPH_W * s) as i64;
    let cell_h = (GLYPH_H * s) as i64;
    let (x0, x1) = (hx2.div_euclid(2).max(piece.a), (hx2 + 2 * cell_w + 1).div_euclid(2).min(piece.b + 1));
    let (y0, y1) = (hy2.div_euclid(2).max(piece.r0), (hy2 + 2 * cell_h + 1).div_euclid(2).min(piece.r1 + 1));
    let inside = if x0 < x1 && y0 < y1 { sums.ink_count(x0, y0, x1, y1) } else { 0 };
    let outside = piece.ink - inside;
    (mismatch + outside as f64 / area) / (GLYPH_W * GLYPH_H) as f64
}

/// Replays recognition results keyed by image and region.
///
/// Manifest format is one record per line, `image_id`, region and text
/// separated by tabs. The region is an area index or `id`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileRecognizer {
    entries: BTreeMap<(String, Region), String>,
}

impl FileRecognizer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces an entry. Text containing a line break cannot be
    /// represented in the manifest and is rejected.
    pub fn insert(&mut self, image_id: &str, region: Region, text: &str) -> Result<(), ParseError> {
        if image_id.is_empty() || image_id.contains(['\t', '\n', '\r']) {
            return Err(ParseError::new("manifest", None, "image_id", "must be non-empty without tabs or line breaks"));
        }
        if text.contains(['\n', '\r']) {
            return Err(ParseError::new("manifest", None, "text", "must not contain line breaks"));
        }
        self.entries.insert((image_id.to_owned(), region), text.to_owned());
        Ok(())
    }

    pub fn get(&self, image_id: &str, region: Region) -> Option<&str> {
        self.entries.get(&(image_id.to_owned(), region)).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn from_manifest_str(text: &str, source_name: &str) -> Result<Self, ParseError> {
        let mut out = FileRecognizer::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let lineno = Some(i + 1);
            let mut fields = line.splitn(3, '\t');
            let (Some(id), Some(region), Some(value)) = (fields.next(), fields.next(), fields.next()) else {
                return Err(ParseError::new(source_name, lineno, "record", "expected three tab-separated fields"));
            };
            if id.is_empty() {
                return Err(ParseError::new(source_name, lineno, "image_id", "empty"));
            }
            let region: Region = region
                .parse()
                .map_err(|m| ParseError::new(source_name, lineno, "area_index", m))?;
            out.entries.insert((id.to_owned(), region), value.to_owned());
        }
        Ok(out)
    }

    /// Serialises entries sorted by image id, then region.
    pub fn to_manifest_string(&self) -> String {
        let mut s = String::new();
        for ((id, region), text) in &self.entries {
            s.push_str(&format!("{id}\t{region}\t{text}\n"));
        }
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fsutil::read_to_string(path)?;
        Ok(Self::from_manifest_str(&text, &path.display().to_string())?)
    }

    pub fn store(&self, path: impl AsRef<Path>) -> Result<()> {
        fsutil::write_atomic(path.as_ref(), self.to_manifest_string().as_bytes())
    }
}

impl Recognizer for FileRecognizer {
    fn recognize(&self, _img: &GrayImage, key: RegionKey<'_>) -> RecognitionResult {
        match self.get(key.image_id, key.region) {
            Some(t) => RecognitionResult::new(t, 1.0),
            None => RecognitionResult::new("", 0.0),
        }
    }
}

/// Loads a [`FileRecognizer`] from a manifest path.
pub fn file_recognizer(manifest_path: impl AsRef<Path>) -> Result<FileRecognizer> {
    FileRecognizer::load(manifest_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::font::render_text;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn key() -> RegionKey<'static> {
        RegionKey::new("img", Region::Area(0))
    }

    #[test]
    fn blank_image_reads_empty() {
        let img = GrayImage::new(40, 20, 255).unwrap();
        assert_eq!(stub_recognize(&img), RecognitionResult::new("", 1.0));
    }

    #[test]
    fn clean_render_round_trips() {
        for text in ["42", "Hello World", "a  b", "Il1", "0O8B", "pP qQ gy"] {
            let r = stub_recognize(&render_text(text, 2));
            assert_eq!(r.text, text);
            assert_eq!(r.confidence, 1.0);
        }
    }

    #[test]
    fn other_scales_round_trip() {
        for s in 1..=4 {
            let r = stub_recognize(&render_text("Zx9 k", s));
            assert_eq!(r.text, "Zx9 k", "scale {s}");
        }
    }

    #[test]
    fn salt_and_pepper_noise_keeps_text() {
        let mut img = render_text("42", 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for y in 0..img.height() {
            for x in 0..img.width() {
                if rng.gen_bool(0.05) {
                    img.set(x, y, if rng.gen_bool(0.5) { 0 } else { 255 });
                }
            }
        }
        let r = stub_recognize(&img);
        assert_eq!(r.text, "42");
        assert!(r.confidence < 1.0);
    }

    #[test]
    fn ruled_line_is_ignored() {
        let mut img = render_text("cat", 2);
        let mut wide = GrayImage::new(80, img.height() + 6, 255).unwrap();
        for y in 0..img.height() {
            for x in 0..img.width() {
                wide.set(x + 4, y, img.get(x, y));
            }
        }
        for y in img.height() + 2..img.height() + 4 {
            for x in 0..80 {
                wide.set(x, y, 0);
            }
        }
        img = wide;
        assert_eq!(stub_recognize(&img).text, "cat");
    }

    #[test]
    fn unknown_blob_is_question_mark() {
        let img = GrayImage::from_fn(30, 30, |x, y| if (5..15).contains(&x) && (5..19).contains(&y) { 0 } else { 255 }).unwrap();
        let r = StubRecognizer::with_scale(2).read(&img);
        assert_eq!(r.text, "?");
        assert_eq!(r.confidence, 0.0);
    }

    #[test]
    fn deterministic() {
        let img = render_text("abc", 2);
        assert_eq!(stub_recognize(&img), stub_recognize(&img));
    }

    #[test]
    fn file_recognizer_lookup_and_round_trip() {
        let mut fr = FileRecognizer::new();
        fr.insert("img1", Region::Area(0), "cat").unwrap();
        fr.insert("img1", Region::Id, "004217").unwrap();
        fr.insert("img0", Region::Area(3), "a\tb").unwrap();
        let img = GrayImage::new(1, 1, 255).unwrap();
        assert_eq!(fr.recognize(&img, RegionKey::new("img1", Region::Area(0))), RecognitionResult::new("cat", 1.0));
        assert_eq!(fr.recognize(&img, key()), RecognitionResult::new("", 0.0));
        let text = fr.to_manifest_string();
        let back = FileRecognizer::from_manifest_str(&text, "m").unwrap();
        assert_eq!(back, fr);
        assert_eq!(back.to_manifest_string(), text);
        assert!(fr.insert("img", Region::Id, "x\ny").is_err());
    }

    #[test]
    fn malformed_manifest_reports_line() {
        let err = FileRecognizer::from_manifest_str("a\t0\tok\nb\tx\tbad\n", "m.tsv").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert_eq!(err.field, "area_index");
        let err = FileRecognizer::from_manifest_str("only-one-field\n", "m.tsv").unwrap_err();
        assert_eq!(err.line, Some(1));
    }
}
