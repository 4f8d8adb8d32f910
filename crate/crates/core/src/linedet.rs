//! Horizontal segment extraction: from segmentation masks, and with two
//! classic baselines (Sobel + Hough, and an LSD-style region grower).
//!
//! All detectors return segments sorted by `(y, x0)`. Column extents are
//! inclusive pixel columns.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;
use crate::raster::{
    connected_components, sobel_horizontal, sobel_vertical, BitMask, Connectivity, GrayImage,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentSource {
    Mask,
    Hough,
    Lsd,
    Template,
}

impl fmt::Display for SegmentSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SegmentSource::Mask => "mask",
            SegmentSource::Hough => "hough",
            SegmentSource::Lsd => "lsd",
            SegmentSource::Template => "template",
        })
    }
}

impl FromStr for SegmentSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mask" => Ok(SegmentSource::Mask),
            "hough" => Ok(SegmentSource::Hough),
            "lsd" => Ok(SegmentSource::Lsd),
            "template" => Ok(SegmentSource::Template),
            other => Err(format!("unknown segment source {other:?}")),
        }
    }
}

/// A horizontal line segment, e.g. an answer-area underline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub x0: f64,
    pub x1: f64,
    pub y: f64,
    pub source: SegmentSource,
}

impl Segment {
    /// `None` unless `x1 - x0 >= 1` and all coordinates are finite.
    pub fn new(x0: f64, x1: f64, y: f64, source: SegmentSource) -> Option<Self> {
        (x0.is_finite() && x1.is_finite() && y.is_finite() && x1 - x0 >= 1.0).then_some(Segment {
            x0,
            x1,
            y,
            source,
        })
    }

    pub fn length(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Segment {
        Segment {
            x0: self.x0 + dx,
            x1: self.x1 + dx,
            y: self.y + dy,
            source: self.source,
        }
    }
}

fn sort_segments(segs: &mut [Segment]) {
    segs.sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x0.total_cmp(&b.x0)).then(a.x1.total_cmp(&b.x1)));
}

/// Speckle floor for [`mask_to_segments`].
pub const DEFAULT_MIN_COMPONENT_PX: usize = 10;

/// Summarises each 8-connected mask component with at least
/// `min_component_px` pixels as one segment: `y` is the mean row of its
/// pixels, `x0`/`x1` its extreme columns.
pub fn mask_to_segments(mask: &BitMask, min_component_px: usize) -> Vec<Segment> {
    let cc = connected_components(mask, Connectivity::Eight);
    let mut segs: Vec<Segment> = cc
        .stats
        .iter()
        .filter(|s| s.pixel_count >= min_component_px)
        .filter_map(|s| Segment::new(s.min_x as f64, s.max_x as f64, s.mean_y(), SegmentSource::Mask))
        .collect();
    sort_segments(&mut segs);
    segs
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoughParams {
    /// Largest run of missing columns bridged inside one segment.
    pub max_gap: usize,
    /// Sobel magnitude an edge pixel must reach.
    pub edge_threshold: f64,
    /// Accumulator votes a row needs before its segments are emitted.
    pub min_votes: usize,
}

impl Default for HoughParams {
    fn default() -> Self {
        HoughParams {
            max_gap: 5,
            edge_threshold: 32.0,
            min_votes: 20,
        }
    }
}

/// Light-to-dark horizontal edges (top boundaries of dark strokes), thinned
/// to one row by vertical non-maximum suppression.
fn upper_edges(img: &GrayImage, edge_threshold: f64) -> BitMask {
    let g = sobel_horizontal(img);
    let (w, h) = (img.width(), img.height());
    BitMask::from_fn(w, h, |x, y| {
        let v = g.get(x, y);
        if v > -edge_threshold {
            return false;
        }
        // strongest response is the most negative; plateaus keep their top row
        let above = if y > 0 { g.get(x, y - 1) } else { f64::INFINITY };
        let below = if y + 1 < h { g.get(x, y + 1) } else { f64::INFINITY };
        v < above && v <= below
    })
}

/// Sobel + Hough detector restricted to horizontal lines.
///
/// For θ = 90° the Hough accumulator cell of a line at row `ρ` counts
/// exactly the edge pixels on that row, so voting reduces to per-row pixel
/// counts and segment extraction to linking the row's edge runs across gaps
/// of at most `max_gap` columns. Rows with fewer than `min_votes` edge
/// pixels have no line. Isolated single-pixel edges are discarded before
/// voting.
///
/// Because the vote threshold is applied per row and linking only merges,
/// raising `max_gap` never increases the segment count and never shrinks
/// the covered columns.
pub fn hough_horizontal(img: &GrayImage, p: &HoughParams) -> Vec<Segment> {
    let edges = upper_edges(img, p.edge_threshold);
    let (w, h) = (img.width(), img.height());
    let mut segs = Vec::new();
    for y in 0..h {
        let mut runs: Vec<(usize, usize)> = Vec::new();
        let mut x = 0;
        while x < w {
            if !edges.get(x, y) {
                x += 1;
                continue;
            }
            let start = x;
            while x < w && edges.get(x, y) {
                x += 1;
            }
            if x - start >= 2 {
                runs.push((start, x - 1));
            }
        }
        let votes: usize = runs.iter().map(|(a, b)| b - a + 1).sum();
        if votes < p.min_votes.max(1) {
            continue;
        }
        let mut linked: Vec<(usize, usize)> = Vec::new();
        for (a, b) in runs {
            match linked.last_mut() {
                Some(last) if a - last.1 - 1 <= p.max_gap => last.1 = b,
                _ => linked.push((a, b)),
            }
        }
        segs.extend(
            linked
                .into_iter()
                .filter_map(|(a, b)| Segment::new(a as f64, b as f64, y as f64, SegmentSource::Hough)),
        );
    }
    sort_segments(&mut segs);
    segs
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LsdParams {
    pub min_length: f64,
    /// Degrees from horizontal accepted for pixels and fitted segments.
    pub angle_tolerance: f64,
    /// Sobel gradient magnitude a pixel must reach to join a region.
    pub gradient_threshold: f64,
}

impl Default for LsdParams {
    fn default() -> Self {
        LsdParams {
            min_length: 20.0,
            angle_tolerance: 10.0,
            gradient_threshold: 32.0,
        }
    }
}

/// Simplified horizontal-only line segment detector.
///
/// Pixels whose gradient is strong enough and whose level-line runs within
/// `angle_tolerance` of horizontal are grown into 8-connected regions of
/// equal gradient polarity (the two sides of a stroke form separate
/// regions, as in LSD). Each region is fitted by its gradient-weighted
/// principal axis; regions whose axis is steeper than the tolerance or
/// whose horizontal extent is shorter than `min_length` are dropped.
pub fn lsd_horizontal(img: &GrayImage, p: &LsdParams) -> Vec<Segment> {
    let (w, h) = (img.width(), img.height());
    let gx = sobel_vertical(img);
    let gy = sobel_horizontal(img);
    let tol = p.angle_tolerance.to_radians();
    // polarity per pixel: +1 / -1 for aligned pixels, 0 otherwise
    let polarity: Vec<i8> = (0..w * h)
        .map(|i| {
            let (dx, dy) = (gx.values()[i], gy.values()[i]);
            let mag = dx.hypot(dy);
            if mag < p.gradient_threshold || mag == 0.0 {
                return 0;
            }
            // angle between the gradient and the vertical axis
            if dx.abs().atan2(dy.abs()) > tol {
                return 0;
            }
            if dy > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();

    let mut segs = Vec::new();
    for sign in [-1i8, 1] {
        let mask = BitMask::from_bits(w, h, polarity.iter().map(|&s| s == sign).collect())
            .expect("polarity plane matches image size");
        let cc = connected_components(&mask, Connectivity::Eight);
        let mut moments = vec![[0.0f64; 6]; cc.count];
        for y in 0..h {
            for x in 0..w {
                let l = cc.label_at(x, y);
                if l == 0 {
                    continue;
                }
                let i = y * w + x;
                let wgt = gx.values()[i].hypot(gy.values()[i]);
                let (fx, fy) = (x as f64, y as f64);
                let m = &mut moments[l as usize - 1];
                m[0] += wgt;
                m[1] += wgt * fx;
                m[2] += wgt * fy;
                m[3] += wgt * fx * fx;
                m[4] += wgt * fy * fy;
                m[5] += wgt * fx * fy;
            }
        }
        for (st, m) in cc.stats.iter().zip(&moments) {
            if st.pixel_count < 2 {
                continue;
            }
            let (cx, cy) = (m[1] / m[0], m[2] / m[0]);
            let sxx = m[3] / m[0] - cx * cx;
            let syy = m[4] / m[0] - cy * cy;
            let sxy = m[5] / m[0] - cx * cy;
            let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
            if theta.abs() > tol {
                continue;
            }
            let (x0, x1) = (st.min_x as f64, st.max_x as f64);
            if x1 - x0 < p.min_length {
                continue;
            }
            if let Some(s) = Segment::new(x0, x1, cy, SegmentSource::Lsd) {
                segs.push(s);
            }
        }
    }
    sort_segments(&mut segs);
    segs
}

/// First row of a bar of `thickness` rows centred on `y`.
pub fn bar_top_row(y: f64, thickness: usize) -> i64 {
    (y - (thickness as f64 - 1.0) / 2.0 + 0.5).floor() as i64
}

/// Rasterises segments as horizontal bars `thickness` rows tall, centred on
/// each segment's `y`, spanning columns `round(x0)..=round(x1)`.
pub fn segments_to_mask(segs: &[Segment], width: usize, height: usize, thickness: usize) -> BitMask {
    let thickness = thickness.max(1);
    let mut mask = BitMask::new(width, height);
    for s in segs {
        let top = bar_top_row(s.y, thickness);
        let (c0, c1) = (s.x0.round() as i64, s.x1.round() as i64);
        for r in top..top + thickness as i64 {
            if r < 0 || r >= height as i64 {
                continue;
            }
            for c in c0.max(0)..=c1.min(width as i64 - 1) {
                mask.set(c as usize, r as usize, true);
            }
        }
    }
    mask
}

/// One `y x0 x1 source` line per segment, three decimals.
pub fn segments_to_text(segs: &[Segment]) -> String {
    segs.iter()
        .map(|s| format!("{:.3} {:.3} {:.3} {}\n", s.y, s.x0, s.x1, s.source))
        .collect()
}

pub fn segments_from_text(text: &str, source_name: &str) -> Result<Vec<Segment>, ParseError> {
    let mut segs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |field: &str, msg: String| ParseError::new(source_name, Some(i + 1), field, msg);
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(err("segment", format!("expected 4 fields, found {}", fields.len())));
        }
        let num = |idx: usize, name: &str| {
            fields[idx]
                .parse::<f64>()
                .map_err(|_| err(name, format!("not a number: {:?}", fields[idx])))
        };
        let (y, x0, x1) = (num(0, "y")?, num(1, "x0")?, num(2, "x1")?);
        let source = fields[3].parse().map_err(|e| err("source", e))?;
        segs.push(Segment::new(x0, x1, y, source).ok_or_else(|| err("x1", "segment shorter than 1 px".into()))?);
    }
    Ok(segs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn white(w: usize, h: usize) -> GrayImage {
        GrayImage::new(w, h, 255).unwrap()
    }

    fn draw_row(img: &mut GrayImage, y: usize, x0: usize, x1: usize) {
        for x in x0..=x1 {
            img.set(x, y, 0);
        }
    }

    #[test]
    fn mask_to_segments_basic_cases() {
        assert!(mask_to_segments(&BitMask::new(80, 80), 10).is_empty());

        let run = BitMask::from_fn(80, 80, |x, y| y == 40 && (10..=60).contains(&x));
        let segs = mask_to_segments(&run, 10);
        assert_eq!(segs.len(), 1);
        assert_eq!((segs[0].x0, segs[0].x1, segs[0].y), (10.0, 60.0, 40.0));

        let band = BitMask::from_fn(80, 80, |x, y| (39..=41).contains(&y) && (10..=60).contains(&x));
        let segs = mask_to_segments(&band, 10);
        assert_eq!(segs[0].y, 40.0);
    }

    #[test]
    fn mask_to_segments_drops_specks_and_sorts() {
        let m = BitMask::from_fn(100, 60, |x, y| {
            (y == 30 && (50..=90).contains(&x)) || (y == 10 && (5..=40).contains(&x)) || (x == 3 && y == 50)
        });
        let segs = mask_to_segments(&m, 10);
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].y, 10.0);
        assert_eq!(segs[1].y, 30.0);
    }

    #[test]
    fn hough_on_blank_image_is_empty() {
        assert!(hough_horizontal(&white(60, 40), &HoughParams::default()).is_empty());
    }

    #[test]
    fn hough_finds_single_dark_line() {
        let mut img = white(60, 40);
        draw_row(&mut img, 20, 5, 50);
        let segs = hough_horizontal(&img, &HoughParams::default());
        assert_eq!(segs.len(), 1, "{segs:?}");
        let s = segs[0];
        assert!((s.y - 20.0).abs() <= 1.0);
        assert!(s.x0 <= 5.0 && s.x0 >= 4.0 && s.x1 >= 50.0 && s.x1 <= 51.0, "{s:?}");
    }

    #[test]
    fn hough_bridges_small_gaps_only_when_allowed() {
        let mut img = white(60, 40);
        draw_row(&mut img, 20, 5, 24);
        draw_row(&mut img, 20, 28, 50);
        let gap5 = hough_horizontal(&img, &HoughParams { max_gap: 5, ..Default::default() });
        let gap0 = hough_horizontal(&img, &HoughParams { max_gap: 0, ..Default::default() });
        assert_eq!(gap5.len(), 1);
        assert_eq!(gap0.len(), 2);
    }

    #[test]
    fn lsd_cases() {
        assert!(lsd_horizontal(&white(80, 60), &LsdParams::default()).is_empty());

        let mut img = white(80, 60);
        draw_row(&mut img, 30, 20, 49);
        let short = lsd_horizontal(&img, &LsdParams { min_length: 20.0, ..Default::default() });
        assert!(!short.is_empty());
        assert!(short.iter().all(|s| (s.y - 30.0).abs() <= 1.5));
        let long = lsd_horizontal(&img, &LsdParams { min_length: 40.0, ..Default::default() });
        assert!(long.is_empty());
    }

    #[test]
    fn lsd_rejects_steep_lines() {
        let mut img = white(80, 60);
        let angle = 30f64.to_radians();
        for i in 0..60 {
            let t = i as f64 * 0.5;
            let (x, y) = (20.0 + t * angle.cos(), 15.0 + t * angle.sin());
            img.set(x.round() as usize, y.round() as usize, 0);
        }
        let p = LsdParams { angle_tolerance: 5.0, ..Default::default() };
        assert!(lsd_horizontal(&img, &p).is_empty());
    }

    #[test]
    fn segments_to_mask_counts() {
        assert!(segments_to_mask(&[], 80, 80, 2).is_empty());
        let s = Segment::new(10.0, 60.0, 40.0, SegmentSource::Mask).unwrap();
        let m = segments_to_mask(&[s], 80, 80, 1);
        assert_eq!(m.count(), 51);
        assert!((10..=60).all(|x| m.get(x, 40)));

        let a = Segment::new(10.0, 40.0, 20.0, SegmentSource::Mask).unwrap();
        let b = Segment::new(30.0, 50.0, 20.0, SegmentSource::Mask).unwrap();
        let m = segments_to_mask(&[a, b], 80, 80, 2);
        let brute = (0..80)
            .flat_map(|y| (0..80).map(move |x| (x, y)))
            .filter(|&(x, y)| (10..=50).contains(&x) && (20..=21).contains(&y))
            .count();
        assert_eq!(m.count(), brute);
    }

    #[test]
    fn segments_clip_to_image() {
        let s = Segment::new(-5.0, 200.0, 0.0, SegmentSource::Hough).unwrap();
        let m = segments_to_mask(&[s], 50, 10, 3);
        assert_eq!(m.count(), 50 * 2);
    }

    #[test]
    fn text_round_trip() {
        let segs = vec![
            Segment::new(1.25, 30.5, 4.0, SegmentSource::Lsd).unwrap(),
            Segment::new(0.0, 9.0, 12.125, SegmentSource::Mask).unwrap(),
        ];
        let text = segments_to_text(&segs);
        assert_eq!(text, "4.000 1.250 30.500 lsd\n12.125 0.000 9.000 mask\n");
        assert_eq!(segments_from_text(&text, "mem").unwrap(), segs);
        let e = segments_from_text("1 2 x mask\n", "mem").unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (Some(1), "x1"));
    }
}
