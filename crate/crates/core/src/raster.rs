//! Single-channel rasters, binary masks and the low-level operations the
//! rest of the pipeline is built on.
//!
//! Images are 8-bit, row-major. Masks are row-major boolean planes. Both
//! load from and store to binary PGM (`P5`).

use std::collections::VecDeque;
use std::path::Path;

use crate::error::{DimensionError, Error, ParseError, Result};
use crate::fsutil;

/// 8-bit grayscale raster.
#[derive(Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GrayImage({}x{})", self.width, self.height)
    }
}

impl GrayImage {
    /// Image of the given size filled with `value`.
    pub fn new(width: usize, height: usize, value: u8) -> Result<Self, DimensionError> {
        if width == 0 || height == 0 {
            return Err(DimensionError::new(format!(
                "image must be at least 1x1, got {width}x{height}"
            )));
        }
        Ok(GrayImage {
            width,
            height,
            data: vec![value; width * height],
        })
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self, DimensionError> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(DimensionError::new(format!(
                "{} bytes do not describe a {width}x{height} image",
                data.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self, DimensionError> {
        let mut img = GrayImage::new(width, height, 0)?;
        for y in 0..height {
            for x in 0..width {
                img.data[y * width + x] = f(x, y);
            }
        }
        Ok(img)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.data[y * self.width + x] = value;
    }

    /// Pixel lookup with edge replication for out-of-range coordinates.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> u8 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.data[y * self.width + x]
    }

    pub fn transpose(&self) -> GrayImage {
        let mut out = vec![0u8; self.data.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                out[x * self.height + y] = self.data[y * self.width + x];
            }
        }
        GrayImage {
            width: self.height,
            height: self.width,
            data: out,
        }
    }

    pub fn load_pgm(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(decode_pgm(&bytes, &path.display().to_string())?)
    }

    pub fn store_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        fsutil::write_atomic(path.as_ref(), &encode_pgm(self))
    }
}

/// Binary foreground mask.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl std::fmt::Debug for BitMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "BitMask({}x{}, {} set)",
            self.width,
            self.height,
            self.count()
        )
    }
}

impl BitMask {
    /// Empty mask.
    pub fn new(width: usize, height: usize) -> Self {
        BitMask {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(
        width: usize,
        height: usize,
        bits: Vec<bool>,
    ) -> Result<Self, DimensionError> {
        if bits.len() != width * height {
            return Err(DimensionError::new(format!(
                "{} bits do not describe a {width}x{height} mask",
                bits.len()
            )));
        }
        Ok(BitMask {
            width,
            height,
            bits,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = BitMask::new(width, height);
        for y in 0..height {
            for x in 0..width {
                m.bits[y * width + x] = f(x, y);
            }
        }
        m
    }

    /// Pixels `>= 128` are foreground.
    pub fn from_image(img: &GrayImage) -> Self {
        BitMask {
            width: img.width,
            height: img.height,
            bits: img.data.iter().map(|&v| v >= 128).collect(),
        }
    }

    /// Foreground = 255, background = 0.
    pub fn to_image(&self) -> Result<GrayImage, DimensionError> {
        GrayImage::from_raw(
            self.width,
            self.height,
            self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect(),
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    /// Number of foreground pixels.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn same_dims(&self, other: &BitMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// In-place union with a mask of equal size.
    pub fn union_with(&mut self, other: &BitMask) -> Result<(), DimensionError> {
        if !self.same_dims(other) {
            return Err(DimensionError::new("mask union needs equal dimensions"));
        }
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        Ok(())
    }

    pub fn transpose(&self) -> BitMask {
        let mut out = vec![false; self.bits.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                out[x * self.height + y] = self.bits[y * self.width + x];
            }
        }
        BitMask {
            width: self.height,
            height: self.width,
            bits: out,
        }
    }

    /// Square dilation with the given radius (Chebyshev distance).
    pub fn dilate(&self, radius: usize) -> BitMask {
        if radius == 0 {
            return self.clone();
        }
        let r = radius as isize;
        let mut out = BitMask::new(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                if !self.get(x, y) {
                    continue;
                }
                for dy in -r..=r {
                    for dx in -r..=r {
                        let (nx, ny) = (x as isize + dx, y as isize + dy);
                        if nx >= 0
                            && ny >= 0
                            && (nx as usize) < self.width
                            && (ny as usize) < self.height
                        {
                            out.set(nx as usize, ny as usize, true);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn load_pgm(path: impl AsRef<Path>) -> Result<Self> {
        Ok(BitMask::from_image(&GrayImage::load_pgm(path)?))
    }

    pub fn store_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_image()?.store_pgm(path)
    }
}

/// Signed per-pixel magnitudes (gradients, corner responses).
#[derive(Clone, PartialEq)]
pub struct GradientMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl std::fmt::Debug for GradientMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GradientMap({}x{})", self.width, self.height)
    }
}

impl GradientMap {
    pub fn from_values(
        width: usize,
        height: usize,
        values: Vec<f64>,
    ) -> Result<Self, DimensionError> {
        if values.len() != width * height {
            return Err(DimensionError::new(format!(
                "{} values do not describe a {width}x{height} map",
                values.len()
            )));
        }
        Ok(GradientMap {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Largest absolute value, 0 for an all-zero map.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Position and value of the largest entry; ties resolve to the first in raster order.
    pub fn argmax(&self) -> (usize, usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, &v) in self.values.iter().enumerate() {
            if v > best.1 {
                best = (i, v);
            }
        }
        (best.0 % self.width, best.0 / self.width, best.1)
    }
}

fn sobel(img: &GrayImage, kernel: &[[i32; 3]; 3]) -> GradientMap {
    let (w, h) = (img.width, img.height);
    let mut values = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut acc = 0i32;
            for (ky, row) in kernel.iter().enumerate() {
                for (kx, &k) in row.iter().enumerate() {
                    if k != 0 {
                        acc += k * img.get_clamped(x + kx as isize - 1, y + ky as isize - 1) as i32;
                    }
                }
            }
            values.push(acc as f64);
        }
    }
    GradientMap {
        width: w,
        height: h,
        values,
    }
}

const SOBEL_Y: [[i32; 3]; 3] = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]];
const SOBEL_X: [[i32; 3]; 3] = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]];

/// Vertical derivative (responds to horizontal edges). Positive where
/// intensity increases downwards. Borders replicate edge pixels.
pub fn sobel_horizontal(img: &GrayImage) -> GradientMap {
    sobel(img, &SOBEL_Y)
}

/// Horizontal derivative (responds to vertical edges).
pub fn sobel_vertical(img: &GrayImage) -> GradientMap {
    sobel(img, &SOBEL_X)
}

/// Sets bits where `|value| >= t`.
pub fn threshold(map: &GradientMap, t: f64) -> BitMask {
    BitMask {
        width: map.width,
        height: map.height,
        bits: map.values.iter().map(|v| v.abs() >= t).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
            Connectivity::Eight => &[
                (1, 0),
                (-1, 0),
                (0, 1),
                (0, -1),
                (1, 1),
                (1, -1),
                (-1, 1),
                (-1, -1),
            ],
        }
    }
}

/// Bounding box and moments of one connected component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentStats {
    pub label: u32,
    pub min_x: usize,
    pub min_y: usize,
    pub max_x: usize,
    pub max_y: usize,
    pub pixel_count: usize,
    pub sum_x: u64,
    pub sum_y: u64,
}

impl ComponentStats {
    pub fn mean_x(&self) -> f64 {
        self.sum_x as f64 / self.pixel_count as f64
    }

    pub fn mean_y(&self) -> f64 {
        self.sum_y as f64 / self.pixel_count as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledComponents {
    pub width: usize,
    pub height: usize,
    /// Component index per pixel, 0 = background.
    pub labels: Vec<u32>,
    pub count: usize,
    /// `stats[i]` describes label `i + 1`.
    pub stats: Vec<ComponentStats>,
}

impl LabeledComponents {
    #[inline]
    pub fn label_at(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Mask holding only the given component.
    pub fn component_mask(&self, label: u32) -> BitMask {
        BitMask {
            width: self.width,
            height: self.height,
            bits: self.labels.iter().map(|&l| l == label).collect(),
        }
    }
}

/// Labels maximal connected foreground regions. Labels are assigned in
/// raster-scan order of each component's first pixel.
pub fn connected_components(mask: &BitMask, connectivity: Connectivity) -> LabeledComponents {
    let (w, h) = (mask.width, mask.height);
    let mut labels = vec![0u32; w * h];
    let mut stats = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !mask.bits[start] || labels[start] != 0 {
            continue;
        }
        let label = stats.len() as u32 + 1;
        let mut st = ComponentStats {
            label,
            min_x: usize::MAX,
            min_y: usize::MAX,
            max_x: 0,
            max_y: 0,
            pixel_count: 0,
            sum_x: 0,
            sum_y: 0,
        };
        labels[start] = label;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            let (x, y) = (idx % w, idx / w);
            st.min_x = st.min_x.min(x);
            st.max_x = st.max_x.max(x);
            st.min_y = st.min_y.min(y);
            st.max_y = st.max_y.max(y);
            st.pixel_count += 1;
            st.sum_x += x as u64;
            st.sum_y += y as u64;
            for &(dx, dy) in connectivity.offsets() {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                    continue;
                }
                let n = ny as usize * w + nx as usize;
                if mask.bits[n] && labels[n] == 0 {
                    labels[n] = label;
                    queue.push_back(n);
                }
            }
        }
        stats.push(st);
    }
    LabeledComponents {
        width: w,
        height: h,
        labels,
        count: stats.len(),
        stats,
    }
}

/// Binary PGM (`P5`, maxval <= 255) encoding.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

/// Decodes binary PGM. Sample values are kept as stored (no maxval rescaling).
pub fn decode_pgm(bytes: &[u8], source_name: &str) -> Result<GrayImage, ParseError> {
    let err = |field: &str, msg: &str| ParseError::new(source_name, None, field, msg);
    let mut pos = 0usize;
    let next_token = |pos: &mut usize| -> Option<String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
            *pos += 1;
        }
        (start < *pos).then(|| String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    match next_token(&mut pos).as_deref() {
        Some("P5") => {}
        _ => return Err(err("magic", "expected binary PGM (P5)")),
    }
    let mut number = |field: &str| -> Result<usize, ParseError> {
        next_token(&mut pos)
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| err(field, "missing or non-numeric header value"))
    };
    let width = number("width")?;
    let height = number("height")?;
    let maxval = number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(err("maxval", "only 8-bit PGM is supported"));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(err("raster", "missing header terminator"));
    }
    pos += 1;
    let need = width * height;
    if bytes.len() - pos < need {
        return Err(err(
            "raster",
            &format!("expected {need} bytes, found {}", bytes.len() - pos),
        ));
    }
    GrayImage::from_raw(width, height, bytes[pos..pos + need].to_vec())
        .map_err(|e| err("dimensions", &e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_rows() -> GrayImage {
        GrayImage::from_fn(20, 20, |_, y| if y < 10 { 0 } else { 255 }).unwrap()
    }

    #[test]
    fn constant_image_has_no_gradient() {
        let img = GrayImage::new(16, 12, 128).unwrap();
        assert!(sobel_horizontal(&img).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn horizontal_step_peaks_on_boundary_rows() {
        let g = sobel_horizontal(&step_rows());
        // hand-applied kernel: rows 9 and 10 see (1+2+1) * 255 below minus 0 above
        for x in 0..20 {
            for y in 0..20 {
                let expected = if y == 9 || y == 10 { 1020.0 } else { 0.0 };
                assert_eq!(g.get(x, y), expected, "({x},{y})");
            }
        }
    }

    #[test]
    fn vertical_step_gives_no_horizontal_edge_response() {
        let img = GrayImage::from_fn(20, 20, |x, _| if x < 10 { 0 } else { 255 }).unwrap();
        assert!(sobel_horizontal(&img).values().iter().all(|&v| v == 0.0));
        assert!(sobel_vertical(&img).max_abs() > 0.0);
    }

    #[test]
    fn threshold_is_inclusive() {
        let mut values = vec![0.0; 36];
        values[3 * 6 + 3] = 10.0;
        let map = GradientMap::from_values(6, 6, values).unwrap();
        let m = threshold(&map, 10.0);
        assert_eq!(m.count(), 1);
        assert!(m.get(3, 3));
        let zero = GradientMap::from_values(6, 6, vec![0.0; 36]).unwrap();
        assert!(threshold(&zero, 1.0).is_empty());
    }

    #[test]
    fn threshold_half_max_keeps_only_edge_band() {
        let g = sobel_horizontal(&step_rows());
        let t = g.max_abs() / 2.0;
        let brute = g.values().iter().filter(|v| v.abs() >= t).count();
        let m = threshold(&g, t);
        assert_eq!(m.count(), brute);
        assert_eq!(brute, 40);
        for y in 0..20 {
            for x in 0..20 {
                assert_eq!(m.get(x, y), y == 9 || y == 10);
            }
        }
    }

    #[test]
    fn components_of_small_masks() {
        let empty = BitMask::new(8, 8);
        assert_eq!(connected_components(&empty, Connectivity::Eight).count, 0);

        let mut far = BitMask::new(8, 8);
        far.set(0, 0, true);
        far.set(5, 5, true);
        for c in [Connectivity::Four, Connectivity::Eight] {
            assert_eq!(connected_components(&far, c).count, 2);
        }

        let mut diag = BitMask::new(4, 4);
        diag.set(0, 0, true);
        diag.set(1, 1, true);
        assert_eq!(connected_components(&diag, Connectivity::Eight).count, 1);
        assert_eq!(connected_components(&diag, Connectivity::Four).count, 2);
    }

    #[test]
    fn labels_follow_raster_order() {
        let mut m = BitMask::new(10, 4);
        m.set(8, 0, true);
        m.set(1, 2, true);
        m.set(2, 2, true);
        let cc = connected_components(&m, Connectivity::Four);
        assert_eq!(cc.label_at(8, 0), 1);
        assert_eq!(cc.label_at(1, 2), 2);
        assert_eq!(cc.stats[1].pixel_count, 2);
        assert_eq!((cc.stats[1].min_x, cc.stats[1].max_x), (1, 2));
    }

    #[test]
    fn pgm_round_trip_is_bit_exact() {
        let img = GrayImage::from_fn(7, 5, |x, y| (x * 31 + y * 7) as u8).unwrap();
        let bytes = encode_pgm(&img);
        assert_eq!(decode_pgm(&bytes, "mem").unwrap(), img);
    }

    #[test]
    fn pgm_header_comments_are_skipped() {
        let mut bytes = b"P5\n# made by hand\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[7, 200]);
        let img = decode_pgm(&bytes, "mem").unwrap();
        assert_eq!(img.data(), &[7, 200]);
    }

    #[test]
    fn pgm_rejects_truncated_raster() {
        let bytes = b"P5\n4 4\n255\n\x00\x00".to_vec();
        let e = decode_pgm(&bytes, "mem").unwrap_err();
        assert_eq!(e.field, "raster");
        assert!(decode_pgm(b"P2\n1 1\n255\n0", "mem").is_err());
    }

    #[test]
    fn mask_loads_high_values_as_foreground() {
        let img = GrayImage::from_raw(4, 1, vec![0, 127, 128, 255]).unwrap();
        let m = BitMask::from_image(&img);
        assert_eq!(m.bits(), &[false, false, true, true]);
        assert_eq!(BitMask::from_image(&m.to_image().unwrap()), m);
    }

    #[test]
    fn zero_sized_images_are_rejected() {
        assert!(GrayImage::new(0, 3, 0).is_err());
        assert!(GrayImage::from_raw(2, 2, vec![0; 3]).is_err());
    }
}
