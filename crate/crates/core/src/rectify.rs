//! Sheet localisation and perspective rectification.
//!
//! The four vertices of the printed border are found with a Harris corner
//! detector run over the borderline mask. Those vertices define an exact
//! four-point homography onto the canonical sheet, which is then used to
//! resample the photo (bilinear) or a mask (nearest neighbour).

use serde::{Deserialize, Serialize};

use crate::error::{DetectionError, DimensionError, GeometryError, ParseError};
use crate::raster::{sobel_horizontal, sobel_vertical, BitMask, GradientMap, GrayImage};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point { x, y }
    }
}

/// Four vertices in top-left, top-right, bottom-right, bottom-left order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    vertices: [Point; 4],
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn shoelace(v: &[Point; 4]) -> f64 {
    (0..4)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % 4]);
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
        / 2.0
}

impl Quad {
    /// Validates that the vertices are convex, non-degenerate and wound
    /// TL -> TR -> BR -> BL (clockwise on screen, y pointing down).
    pub fn new(vertices: [Point; 4]) -> Result<Self, GeometryError> {
        let convex = (0..4).all(|i| cross(vertices[i], vertices[(i + 1) % 4], vertices[(i + 2) % 4]) > 0.0);
        if !convex || shoelace(&vertices) <= 1e-9 || vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(GeometryError::DegenerateQuad);
        }
        Ok(Quad { vertices })
    }

    /// Orders four arbitrary points with the x±y rule: TL = min(x+y),
    /// BR = max(x+y), TR = max(x−y), BL = min(x−y).
    ///
    /// The rule is only reliable for sheets rotated well below 45°.
    pub fn from_unordered(points: [Point; 4]) -> Result<Self, GeometryError> {
        let pick = |key: &dyn Fn(&Point) -> f64, max: bool| -> usize {
            let mut best = 0;
            for i in 1..4 {
                let (a, b) = (key(&points[i]), key(&points[best]));
                if (max && a > b) || (!max && a < b) {
                    best = i;
                }
            }
            best
        };
        let tl = pick(&|p| p.x + p.y, false);
        let br = pick(&|p| p.x + p.y, true);
        let tr = pick(&|p| p.x - p.y, true);
        let bl = pick(&|p| p.x - p.y, false);
        let mut seen = [false; 4];
        for i in [tl, tr, br, bl] {
            if seen[i] {
                return Err(GeometryError::DegenerateQuad);
            }
            seen[i] = true;
        }
        Quad::new([points[tl], points[tr], points[br], points[bl]])
    }

    /// Axis-aligned rectangle with the given corners.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, GeometryError> {
        Quad::new([
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    pub fn vertices(&self) -> &[Point; 4] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn top_left(&self) -> Point {
        self.vertices[0]
    }

    pub fn top_right(&self) -> Point {
        self.vertices[1]
    }

    pub fn bottom_right(&self) -> Point {
        self.vertices[2]
    }

    pub fn bottom_left(&self) -> Point {
        self.vertices[3]
    }
}

/// 3×3 projective transform, stored with `m[2][2] == 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    m: [[f64; 3]; 3],
}

const DET_TOLERANCE: f64 = 1e-9;

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn matmul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

impl Homography {
    pub const IDENTITY: Homography = Homography {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Normalises so the bottom-right entry is 1 and checks invertibility.
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self, GeometryError> {
        let s = m[2][2];
        if !s.is_finite() || s.abs() < 1e-12 {
            return Err(GeometryError::SingularHomography);
        }
        let mut n = m;
        for row in n.iter_mut() {
            for v in row.iter_mut() {
                *v /= s;
            }
        }
        let det = det3(&n);
        if !det.is_finite() || det.abs() < DET_TOLERANCE {
            return Err(GeometryError::SingularHomography);
        }
        Ok(Homography { m: n })
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        Homography {
            m: [[1.0, 0.0, dx], [0.0, 1.0, dy], [0.0, 0.0, 1.0]],
        }
    }

    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    pub fn determinant(&self) -> f64 {
        det3(&self.m)
    }

    /// Maps a point; `None` when it lands on the line at infinity.
    pub fn apply(&self, p: Point) -> Option<Point> {
        let m = &self.m;
        let w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
        if w.abs() < 1e-15 {
            return None;
        }
        Some(Point::new(
            (m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w,
            (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w,
        ))
    }

    pub fn inverse(&self) -> Result<Homography, GeometryError> {
        let m = &self.m;
        let det = det3(m);
        if det.abs() < 1e-300 {
            return Err(GeometryError::SingularHomography);
        }
        let adj = [
            [
                m[1][1] * m[2][2] - m[1][2] * m[2][1],
                m[0][2] * m[2][1] - m[0][1] * m[2][2],
                m[0][1] * m[1][2] - m[0][2] * m[1][1],
            ],
            [
                m[1][2] * m[2][0] - m[1][0] * m[2][2],
                m[0][0] * m[2][2] - m[0][2] * m[2][0],
                m[0][2] * m[1][0] - m[0][0] * m[1][2],
            ],
            [
                m[1][0] * m[2][1] - m[1][1] * m[2][0],
                m[0][1] * m[2][0] - m[0][0] * m[2][1],
                m[0][0] * m[1][1] - m[0][1] * m[1][0],
            ],
        ];
        Homography::from_matrix(adj.map(|row| row.map(|v| v / det)))
    }

    /// `self` followed by `next`, i.e. the matrix product `next · self`.
    pub fn then(&self, next: &Homography) -> Result<Homography, GeometryError> {
        Homography::from_matrix(matmul(&next.m, &self.m))
    }

    /// Nine numbers, row-major, space separated, newline terminated.
    pub fn to_text(&self) -> String {
        let nums: Vec<String> = self.m.iter().flatten().map(|v| format!("{v:.12e}")).collect();
        format!("{}\n", nums.join(" "))
    }

    pub fn from_text(text: &str, source_name: &str) -> Result<Homography, ParseError> {
        let nums: Vec<f64> = text
            .split_whitespace()
            .enumerate()
            .map(|(i, t)| {
                t.parse::<f64>().map_err(|_| {
                    ParseError::new(source_name, None, format!("h[{i}]"), format!("not a number: {t:?}"))
                })
            })
            .collect::<Result<_, _>>()?;
        if nums.len() != 9 {
            return Err(ParseError::new(
                source_name,
                None,
                "homography",
                format!("expected 9 numbers, found {}", nums.len()),
            ));
        }
        let m = [
            [nums[0], nums[1], nums[2]],
            [nums[3], nums[4], nums[5]],
            [nums[6], nums[7], nums[8]],
        ];
        Homography::from_matrix(m).map_err(|e| ParseError::new(source_name, None, "homography", e.to_string()))
    }
}

/// Similarity that moves the centroid to the origin with mean distance √2.
fn normalizing_transform(points: &[Point; 4]) -> [[f64; 3]; 3] {
    let cx = points.iter().map(|p| p.x).sum::<f64>() / 4.0;
    let cy = points.iter().map(|p| p.y).sum::<f64>() / 4.0;
    let mean = points.iter().map(|p| (p.x - cx).hypot(p.y - cy)).sum::<f64>() / 4.0;
    let s = if mean > 0.0 { std::f64::consts::SQRT_2 / mean } else { 1.0 };
    [[s, 0.0, -s * cx], [0.0, s, -s * cy], [0.0, 0.0, 1.0]]
}

fn apply_raw(m: &[[f64; 3]; 3], p: Point) -> Point {
    let w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
    Point::new(
        (m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w,
        (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w,
    )
}

/// Gaussian elimination with partial pivoting on an 8×8 system.
fn solve8(mut a: [[f64; 9]; 8]) -> Option<[f64; 8]> {
    for col in 0..8 {
        let pivot = (col..8).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        for row in col + 1..8 {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                let (upper, lower) = a.split_at_mut(row);
                for (x, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    let mut x = [0.0; 8];
    for row in (0..8).rev() {
        let s: f64 = (row + 1..8).map(|k| a[row][k] * x[k]).sum();
        x[row] = (a[row][8] - s) / a[row][row];
    }
    Some(x)
}

/// Exact four-point direct linear transform mapping each `src` vertex onto
/// the matching `dst` vertex. Points are normalised before solving.
pub fn estimate_homography(src: &Quad, dst: &Quad) -> Result<Homography, GeometryError> {
    let ts = normalizing_transform(&src.vertices);
    let td = normalizing_transform(&dst.vertices);
    let mut a = [[0.0; 9]; 8];
    for i in 0..4 {
        let p = apply_raw(&ts, src.vertices[i]);
        let q = apply_raw(&td, dst.vertices[i]);
        a[2 * i] = [p.x, p.y, 1.0, 0.0, 0.0, 0.0, -p.x * q.x, -p.y * q.x, q.x];
        a[2 * i + 1] = [0.0, 0.0, 0.0, p.x, p.y, 1.0, -p.x * q.y, -p.y * q.y, q.y];
    }
    let h = solve8(a).ok_or(GeometryError::SingularHomography)?;
    let hn = [[h[0], h[1], h[2]], [h[3], h[4], h[5]], [h[6], h[7], 1.0]];
    let td_inv = Homography::from_matrix(td)?.inverse()?;
    Homography::from_matrix(matmul(&td_inv.m, &matmul(&hn, &ts)))
}

/// Harris detector settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarrisParams {
    /// Corner-response constant.
    pub k: f64,
    /// Gaussian window radius in pixels; sigma is half the radius.
    pub window: usize,
    pub nms_radius: usize,
    /// Peaks below this fraction of the strongest response are dropped.
    pub response_floor: f64,
}

impl Default for HarrisParams {
    fn default() -> Self {
        HarrisParams {
            k: 0.04,
            window: 2,
            nms_radius: 10,
            response_floor: 0.1,
        }
    }
}

fn gaussian_kernel(radius: usize) -> Vec<f64> {
    let sigma = (radius as f64 / 2.0).max(0.5);
    let r = radius as isize;
    let raw: Vec<f64> = (-r..=r)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Separable convolution with edge replication.
fn smooth(values: &[f64], w: usize, h: usize, kernel: &[f64]) -> Vec<f64> {
    let r = (kernel.len() / 2) as isize;
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, k) in kernel.iter().enumerate() {
                let xx = (x as isize + i as isize - r).clamp(0, w as isize - 1) as usize;
                acc += k * values[y * w + xx];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, k) in kernel.iter().enumerate() {
                let yy = (y as isize + i as isize - r).clamp(0, h as isize - 1) as usize;
                acc += k * tmp[yy * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// Harris corner response `det(M) − k·trace(M)²` where `M` is the
/// Gaussian-windowed structure tensor of the Sobel gradients. Intensities
/// are scaled to `[0, 1]` first, so responses are resolution-independent in
/// magnitude.
pub fn harris_response(img: &GrayImage, params: &HarrisParams) -> Result<GradientMap, DimensionError> {
    let (w, h) = (img.width(), img.height());
    if w < 3 || h < 3 {
        return Err(DimensionError(format!(
            "harris needs at least a 3x3 image, got {w}x{h}"
        )));
    }
    let scale = 1.0 / (8.0 * 255.0);
    let gx = sobel_vertical(img);
    let gy = sobel_horizontal(img);
    let n = w * h;
    let (mut xx, mut yy, mut xy) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        let (dx, dy) = (gx.values()[i] * scale, gy.values()[i] * scale);
        xx[i] = dx * dx;
        yy[i] = dy * dy;
        xy[i] = dx * dy;
    }
    let kernel = gaussian_kernel(params.window.max(1));
    let (xx, yy, xy) = (smooth(&xx, w, h, &kernel), smooth(&yy, w, h, &kernel), smooth(&xy, w, h, &kernel));
    let response = (0..n)
        .map(|i| {
            let det = xx[i] * yy[i] - xy[i] * xy[i];
            let tr = xx[i] + yy[i];
            det - params.k * tr * tr
        })
        .collect();
    GradientMap::from_values(w, h, response)
}

/// A non-max-suppressed response peak, refined to sub-pixel precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerPeak {
    pub position: Point,
    pub response: f64,
}

/// Local maxima of a response map above `floor × max`, strongest first.
pub fn response_peaks(map: &GradientMap, params: &HarrisParams) -> Vec<CornerPeak> {
    let (w, h) = (map.width(), map.height());
    let (_, _, max) = map.argmax();
    if max.is_nan() || max <= 0.0 {
        return Vec::new();
    }
    let floor = params.response_floor * max;
    let r = params.nms_radius as isize;
    let mut peaks = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let v = map.get(x, y);
            if v < floor || v <= 0.0 {
                continue;
            }
            let idx = y * w + x;
            let mut is_peak = true;
            'scan: for dy in -r..=r {
                for dx in -r..=r {
                    let (nx, ny) = (x as isize + dx, y as isize + dy);
                    if (dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                        continue;
                    }
                    let nv = map.get(nx as usize, ny as usize);
                    let nidx = ny as usize * w + nx as usize;
                    // plateau ties go to the earliest pixel in raster order
                    if nv > v || (nv == v && nidx < idx) {
                        is_peak = false;
                        break 'scan;
                    }
                }
            }
            if is_peak {
                peaks.push(CornerPeak {
                    position: refine_peak(map, x, y, params.window.max(1) + 1),
                    response: v,
                });
            }
        }
    }
    peaks.sort_by(|a, b| {
        b.response
            .total_cmp(&a.response)
            .then(a.position.y.total_cmp(&b.position.y))
            .then(a.position.x.total_cmp(&b.position.x))
    });
    peaks
}

/// Response-weighted centroid of the positive responses around a peak.
fn refine_peak(map: &GradientMap, x: usize, y: usize, radius: usize) -> Point {
    let r = radius as isize;
    let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for dy in -r..=r {
        for dx in -r..=r {
            let (nx, ny) = (x as isize + dx, y as isize + dy);
            if nx < 0 || ny < 0 || nx as usize >= map.width() || ny as usize >= map.height() {
                continue;
            }
            let v = map.get(nx as usize, ny as usize);
            if v > 0.0 {
                sw += v;
                sx += v * nx as f64;
                sy += v * ny as f64;
            }
        }
    }
    if sw > 0.0 {
        Point::new(sx / sw, sy / sw)
    } else {
        Point::new(x as f64, y as f64)
    }
}

/// Peaks considered when searching for the largest quadrilateral.
const MAX_QUAD_CANDIDATES: usize = 24;

/// Locates the four sheet vertices in a borderline mask.
///
/// Harris peaks are collected from the mask rendered at 0/255, and the four
/// peaks enclosing the largest convex quadrilateral are kept. Small partial
/// sheets elsewhere in the frame therefore lose to the complete border.
pub fn extract_quad(borderline_mask: &BitMask, params: &HarrisParams) -> Result<Quad, DetectionError> {
    if borderline_mask.is_empty() {
        return Err(DetectionError::EmptyMask);
    }
    let img = borderline_mask.to_image()?;
    let response = harris_response(&img, params)?;
    let mut peaks = response_peaks(&response, params);
    if peaks.len() < 4 {
        return Err(DetectionError::InsufficientCorners { found: peaks.len() });
    }
    peaks.truncate(MAX_QUAD_CANDIDATES);
    let n = peaks.len();
    let mut best: Option<(f64, Quad)> = None;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let pts = [peaks[a].position, peaks[b].position, peaks[c].position, peaks[d].position];
                    if let Ok(q) = Quad::from_unordered(pts) {
                        let area = q.area();
                        if best.as_ref().is_none_or(|(ba, _)| area > *ba) {
                            best = Some((area, q));
                        }
                    }
                }
            }
        }
    }
    let coarse = best.map(|(_, q)| q).ok_or(DetectionError::DegenerateQuad)?;
    let mut q = coarse;
    for _ in 0..2 {
        q = refine_quad(borderline_mask, &q);
    }
    Ok(q)
}

/// Band around a coarse side, in pixels, searched for that side's stroke.
const SIDE_BAND: f64 = 5.0;

/// Moves each side onto the centre line of its stroke and re-intersects
/// the sides. Harris peaks on a thick outline sit inside the stroke
/// corner; the fitted lines do not depend on stroke thickness. Sides with
/// too little support keep their coarse position.
fn refine_quad(mask: &BitMask, q: &Quad) -> Quad {
    let v = q.vertices();
    // per side: sum of weights, x, y, xx, xy, yy
    let mut acc = [[0.0f64; 6]; 4];
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if !mask.get(x, y) {
                continue;
            }
            let p = Point::new(x as f64, y as f64);
            for (i, a) in acc.iter_mut().enumerate() {
                let (s, e) = (v[i], v[(i + 1) % 4]);
                let (dx, dy) = (e.x - s.x, e.y - s.y);
                let len2 = dx * dx + dy * dy;
                let t = ((p.x - s.x) * dx + (p.y - s.y) * dy) / len2;
                if !(0.1..=0.9).contains(&t) {
                    continue;
                }
                let dist = ((p.x - s.x) * dy - (p.y - s.y) * dx).abs() / len2.sqrt();
                if dist <= SIDE_BAND {
                    *a = [a[0] + 1.0, a[1] + p.x, a[2] + p.y, a[3] + p.x * p.x, a[4] + p.x * p.y, a[5] + p.y * p.y];
                }
            }
        }
    }
    // each line as (point on line, unit direction)
    let mut lines = [(Point::new(0.0, 0.0), (0.0, 0.0)); 4];
    for i in 0..4 {
        let (s, e) = (v[i], v[(i + 1) % 4]);
        let coarse_dir = (e.x - s.x, e.y - s.y);
        let a = acc[i];
        let min_support = 0.2 * s.distance(e);
        if a[0] < min_support.max(8.0) {
            lines[i] = (s, coarse_dir);
            continue;
        }
        let (mx, my) = (a[1] / a[0], a[2] / a[0]);
        let sxx = a[3] / a[0] - mx * mx;
        let sxy = a[4] / a[0] - mx * my;
        let syy = a[5] / a[0] - my * my;
        let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
        let mut dir = (theta.cos(), theta.sin());
        if dir.0 * coarse_dir.0 + dir.1 * coarse_dir.1 < 0.0 {
            dir = (-dir.0, -dir.1);
        }
        lines[i] = (Point::new(mx, my), dir);
    }
    let mut out = *v;
    for (i, corner) in out.iter_mut().enumerate() {
        // vertex i joins side i-1 and side i
        let (p1, d1) = lines[(i + 3) % 4];
        let (p2, d2) = lines[i];
        let den = d1.0 * d2.1 - d1.1 * d2.0;
        if den.abs() < 1e-9 {
            return *q;
        }
        let t = ((p2.x - p1.x) * d2.1 - (p2.y - p1.y) * d2.0) / den;
        *corner = Point::new(p1.x + t * d1.0, p1.y + t * d1.1);
    }
    match Quad::new(out) {
        Ok(r) if (0..4).all(|i| r.vertices()[i].distance(v[i]) <= 2.0 * SIDE_BAND) => r,
        _ => *q,
    }
}

/// Source coordinates where `[0, size-1]` accepts a small rounding slack.
const EDGE_SLACK: f64 = 1e-6;

/// Resamples `img` through `h`: each output pixel reads the source at
/// `h⁻¹·(x, y)` with bilinear interpolation. Samples outside the source are 0.
pub fn warp(img: &GrayImage, h: &Homography, out_w: usize, out_h: usize) -> Result<GrayImage, GeometryError> {
    let inv = h.inverse()?;
    let (w, hgt) = (img.width() as f64, img.height() as f64);
    let mut out = GrayImage::new(out_w, out_h, 0).map_err(|_| GeometryError::DegenerateQuad)?;
    for y in 0..out_h {
        for x in 0..out_w {
            let Some(s) = inv.apply(Point::new(x as f64, y as f64)) else {
                continue;
            };
            if s.x < -EDGE_SLACK || s.y < -EDGE_SLACK || s.x > w - 1.0 + EDGE_SLACK || s.y > hgt - 1.0 + EDGE_SLACK {
                continue;
            }
            out.set(x, y, bilinear(img, s));
        }
    }
    Ok(out)
}

fn bilinear(img: &GrayImage, s: Point) -> u8 {
    let (w, h) = (img.width(), img.height());
    let x0 = (s.x.floor().max(0.0) as usize).min(w - 1);
    let y0 = (s.y.floor().max(0.0) as usize).min(h - 1);
    let fx = (s.x - x0 as f64).clamp(0.0, 1.0);
    let fy = (s.y - y0 as f64).clamp(0.0, 1.0);
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let top = img.get(x0, y0) as f64 * (1.0 - fx) + img.get(x1, y0) as f64 * fx;
    let bottom = img.get(x0, y1) as f64 * (1.0 - fx) + img.get(x1, y1) as f64 * fx;
    let v = top * (1.0 - fy) + bottom * fy;
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Nearest-neighbour counterpart of [`warp`] for masks.
pub fn warp_mask(mask: &BitMask, h: &Homography, out_w: usize, out_h: usize) -> Result<BitMask, GeometryError> {
    let inv = h.inverse()?;
    let (w, hgt) = (mask.width() as isize, mask.height() as isize);
    let mut out = BitMask::new(out_w, out_h);
    for y in 0..out_h {
        for x in 0..out_w {
            let Some(s) = inv.apply(Point::new(x as f64, y as f64)) else {
                continue;
            };
            let (sx, sy) = ((s.x + 0.5).floor(), (s.y + 0.5).floor());
            if sx < 0.0 || sy < 0.0 || sx >= w as f64 || sy >= hgt as f64 {
                continue;
            }
            if mask.get(sx as usize, sy as usize) {
                out.set(x, y, true);
            }
        }
    }
    Ok(out)
}
