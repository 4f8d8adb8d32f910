//! Independent reference implementations shared by the integration suites.
//!
//! Nothing here calls into the library code it is used to check.

#![allow(dead_code)]

use bags::raster::{BitMask, GrayImage};
use bags::rectify::{Point, Quad};
use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::Rng;

/// Textbook full-matrix edit distance over Unicode scalar values.
pub fn levenshtein_oracle(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

/// The accuracy formula written out directly from the edit distance.
pub fn accuracy_oracle(located: bool, recognized: &str, label: &str) -> f64 {
    if !located {
        return 0.0;
    }
    let n = label.chars().count() as f64;
    let v = 1.0 - levenshtein_oracle(recognized, label) as f64 / n;
    v.max(0.0)
}

/// (tp, fp, fn, tn) by visiting every pixel through the public accessor.
pub fn brute_counts(pred: &BitMask, gt: &BitMask) -> (u64, u64, u64, u64) {
    let mut c = (0, 0, 0, 0);
    for y in 0..gt.height() {
        for x in 0..gt.width() {
            match (pred.get(x, y), gt.get(x, y)) {
                (true, true) => c.0 += 1,
                (true, false) => c.1 += 1,
                (false, true) => c.2 += 1,
                (false, false) => c.3 += 1,
            }
        }
    }
    c
}

pub fn random_mask<R: Rng>(rng: &mut R, w: usize, h: usize, density: f64) -> BitMask {
    BitMask::from_fn(w, h, |_, _| rng.gen_bool(density))
}

/// Homography by SVD of the normalised DLT system, solved with nalgebra.
pub fn homography_oracle(src: &[Point; 4], dst: &[Point; 4]) -> Matrix3<f64> {
    let norm = |p: &[Point; 4]| {
        let cx = p.iter().map(|q| q.x).sum::<f64>() / 4.0;
        let cy = p.iter().map(|q| q.y).sum::<f64>() / 4.0;
        let mean = p.iter().map(|q| ((q.x - cx).powi(2) + (q.y - cy).powi(2)).sqrt()).sum::<f64>() / 4.0;
        let s = std::f64::consts::SQRT_2 / mean;
        Matrix3::new(s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0)
    };
    let (ts, td) = (norm(src), norm(dst));
    let mut a = DMatrix::<f64>::zeros(9, 9);
    for i in 0..4 {
        let s = ts * Vector3::new(src[i].x, src[i].y, 1.0);
        let d = td * Vector3::new(dst[i].x, dst[i].y, 1.0);
        let (x, y, u, v) = (s.x / s.z, s.y / s.z, d.x / d.z, d.y / d.z);
        let r1 = [-x, -y, -1.0, 0.0, 0.0, 0.0, u * x, u * y, u];
        let r2 = [0.0, 0.0, 0.0, -x, -y, -1.0, v * x, v * y, v];
        for j in 0..9 {
            a[(2 * i, j)] = r1[j];
            a[(2 * i + 1, j)] = r2[j];
        }
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let k = (0..9)
        .min_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))
        .expect("nine singular values");
    let h = vt.row(k);
    let hn = Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8]);
    let m = td.try_inverse().expect("scaling is invertible") * hn * ts;
    m / m[(2, 2)]
}

pub fn apply_matrix(m: &Matrix3<f64>, p: Point) -> Point {
    let v = m * Vector3::new(p.x, p.y, 1.0);
    Point::new(v.x / v.z, v.y / v.z)
}

/// A convex quad near the rectangle `[x, x+w] × [y, y+h]` with each corner
/// displaced by at most `jitter` (a fraction of the side length).
pub fn random_quad<R: Rng>(rng: &mut R, jitter: f64) -> Quad {
    loop {
        let x = rng.gen_range(-200.0..800.0);
        let y = rng.gen_range(-200.0..800.0);
        let w = rng.gen_range(50.0..900.0);
        let h = rng.gen_range(50.0..900.0);
        let mut j = |s: f64| rng.gen_range(-jitter * s..=jitter * s);
        let pts = [
            Point::new(x + j(w), y + j(h)),
            Point::new(x + w + j(w), y + j(h)),
            Point::new(x + w + j(w), y + h + j(h)),
            Point::new(x + j(w), y + h + j(h)),
        ];
        if let Ok(q) = Quad::new(pts) {
            return q;
        }
    }
}

/// White image with dark horizontal strokes; returns the image and the
/// stroke list `(x0, x1, y, thickness)`.
pub fn line_image<R: Rng>(rng: &mut R, w: usize, h: usize) -> (GrayImage, Vec<(usize, usize, usize, usize)>) {
    let mut strokes = Vec::new();
    let mut img = GrayImage::new(w, h, 255).expect("positive size");
    let n = rng.gen_range(1..=6);
    for _ in 0..n {
        let len = rng.gen_range(10..w - 4);
        let x0 = rng.gen_range(2..w - len - 1);
        let y = rng.gen_range(3..h - 5);
        let t = rng.gen_range(1..=3);
        let ink = rng.gen_range(0..100);
        for yy in y..y + t {
            for x in x0..x0 + len {
                img.set(x, yy, ink);
            }
        }
        // broken strokes exercise gap bridging
        if rng.gen_bool(0.5) {
            let gap_at = rng.gen_range(x0..x0 + len);
            let gap = rng.gen_range(1..=12).min(x0 + len - gap_at);
            for yy in y..y + t {
                for x in gap_at..gap_at + gap {
                    img.set(x, yy, 255);
                }
            }
        }
        strokes.push((x0, x0 + len - 1, y, t));
    }
    (img, strokes)
}
