//! 5×7 bitmap font shared by the sheet generator and the stub recognizer.
//!
//! Glyphs cover digits, ASCII letters and space. Every glyph's ink columns
//! are contiguous, so glyphs separate cleanly on blank columns. Text is set
//! on a pitch of [`ADVANCE`] font pixels (5 ink columns + 2 blank).

use rand::Rng;

use crate::raster::GrayImage;

pub const GLYPH_W: usize = 5;
pub const GLYPH_H: usize = 7;
/// Horizontal pitch in font pixels.
pub const ADVANCE: usize = 7;

/// Row bitmaps, most significant of the low five bits is the leftmost column.
const GLYPHS: &[(char, [u8; 7])] = &[
    ('0', [0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110]),
    ('1', [0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110]),
    ('2', [0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111]),
    ('3', [0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110]),
    ('4', [0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010]),
    ('5', [0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110]),
    ('6', [0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110]),
    ('7', [0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000]),
    ('8', [0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110]),
    ('9', [0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100]),
    ('A', [0b01110, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001]),
    ('B', [0b11110, 0b10001, 0b10001, 0b11110, 0b10001, 0b10001, 0b11110]),
    ('C', [0b01110, 0b10001, 0b10000, 0b10000, 0b10000, 0b10001, 0b01110]),
    ('D', [0b11100, 0b10010, 0b10001, 0b10001, 0b10001, 0b10010, 0b11100]),
    ('E', [0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b11111]),
    ('F', [0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b10000]),
    ('G', [0b01110, 0b10001, 0b10000, 0b10111, 0b10001, 0b10001, 0b01111]),
    ('H', [0b10001, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001]),
    ('I', [0b01110, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110]),
    ('J', [0b00111, 0b00010, 0b00010, 0b00010, 0b00010, 0b10010, 0b01100]),
    ('K', [0b10001, 0b10010, 0b10100, 0b11000, 0b10100, 0b10010, 0b10001]),
    ('L', [0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b11111]),
    ('M', [0b10001, 0b11011, 0b10101, 0b10101, 0b10001, 0b10001, 0b10001]),
    ('N', [0b10001, 0b10001, 0b11001, 0b10101, 0b10011, 0b10001, 0b10001]),
    ('O', [0b01110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110]),
    ('P', [0b11110, 0b10001, 0b10001, 0b11110, 0b10000, 0b10000, 0b10000]),
    ('Q', [0b01110, 0b10001, 0b10001, 0b10001, 0b10101, 0b10010, 0b01101]),
    ('R', [0b11110, 0b10001, 0b10001, 0b11110, 0b10100, 0b10010, 0b10001]),
    ('S', [0b01111, 0b10000, 0b10000, 0b01110, 0b00001, 0b00001, 0b11110]),
    ('T', [0b11111, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100]),
    ('U', [0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110]),
    ('V', [0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01010, 0b00100]),
    ('W', [0b10001, 0b10001, 0b10001, 0b10101, 0b10101, 0b10101, 0b01010]),
    ('X', [0b10001, 0b10001, 0b01010, 0b00100, 0b01010, 0b10001, 0b10001]),
    ('Y', [0b10001, 0b10001, 0b10001, 0b01010, 0b00100, 0b00100, 0b00100]),
    ('Z', [0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b10000, 0b11111]),
    ('a', [0b00000, 0b00000, 0b01110, 0b00001, 0b01111, 0b10001, 0b01111]),
    ('b', [0b10000, 0b10000, 0b10110, 0b11001, 0b10001, 0b10001, 0b11110]),
    ('c', [0b00000, 0b00000, 0b01110, 0b10000, 0b10000, 0b10001, 0b01110]),
    ('d', [0b00001, 0b00001, 0b01101, 0b10011, 0b10001, 0b10001, 0b01111]),
    ('e', [0b00000, 0b00000, 0b01110, 0b10001, 0b11111, 0b10000, 0b01110]),
    ('f', [0b00110, 0b01001, 0b01000, 0b11100, 0b01000, 0b01000, 0b01000]),
    ('g', [0b00000, 0b01111, 0b10001, 0b10001, 0b01111, 0b00001, 0b01110]),
    ('h', [0b10000, 0b10000, 0b10110, 0b11001, 0b10001, 0b10001, 0b10001]),
    ('i', [0b00100, 0b00000, 0b01100, 0b00100, 0b00100, 0b00100, 0b01110]),
    ('j', [0b00010, 0b00000, 0b00110, 0b00010, 0b00010, 0b10010, 0b01100]),
    ('k', [0b10000, 0b10000, 0b10010, 0b10100, 0b11000, 0b10100, 0b10010]),
    ('l', [0b11000, 0b01000, 0b01000, 0b01000, 0b01000, 0b01000, 0b00111]),
    ('m', [0b00000, 0b00000, 0b11010, 0b10101, 0b10101, 0b10001, 0b10001]),
    ('n', [0b00000, 0b00000, 0b10110, 0b11001, 0b10001, 0b10001, 0b10001]),
    ('o', [0b00000, 0b00000, 0b01110, 0b10001, 0b10001, 0b10001, 0b01110]),
    ('p', [0b00000, 0b00000, 0b11110, 0b10001, 0b11110, 0b10000, 0b10000]),
    ('q', [0b00000, 0b01101, 0b10011, 0b10001, 0b01111, 0b00001, 0b00001]),
    ('r', [0b00000, 0b00000, 0b10110, 0b11001, 0b10000, 0b10000, 0b10000]),
    ('s', [0b00000, 0b00000, 0b01110, 0b10000, 0b01110, 0b00001, 0b11110]),
    ('t', [0b01000, 0b01000, 0b11100, 0b01000, 0b01000, 0b01001, 0b00110]),
    ('u', [0b00000, 0b00000, 0b10001, 0b10001, 0b10001, 0b10011, 0b01101]),
    ('v', [0b00000, 0b00000, 0b10001, 0b10001, 0b10001, 0b01010, 0b00100]),
    ('w', [0b00000, 0b00000, 0b10001, 0b10001, 0b10101, 0b10101, 0b01010]),
    ('x', [0b00000, 0b00000, 0b10001, 0b01010, 0b00100, 0b01010, 0b10001]),
    ('y', [0b00000, 0b10001, 0b10001, 0b10001, 0b01111, 0b00001, 0b01110]),
    ('z', [0b00000, 0b00000, 0b11111, 0b00010, 0b00100, 0b01000, 0b11111]),
];

/// A glyph bitmap with its ink bounding box in font pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Glyph {
    pub ch: char,
    rows: [u8; 7],
    pub ink_x0: usize,
    pub ink_x1: usize,
    pub ink_y0: usize,
    pub ink_y1: usize,
}

impl Glyph {
    fn from_rows(ch: char, rows: [u8; 7]) -> Glyph {
        let (mut x0, mut x1, mut y0, mut y1) = (GLYPH_W, 0, GLYPH_H, 0);
        for (y, row) in rows.iter().enumerate() {
            for x in 0..GLYPH_W {
                if row >> (GLYPH_W - 1 - x) & 1 == 1 {
                    x0 = x0.min(x);
                    x1 = x1.max(x);
                    y0 = y0.min(y);
                    y1 = y1.max(y);
                }
            }
        }
        Glyph {
            ch,
            rows,
            ink_x0: x0,
            ink_x1: x1,
            ink_y0: y0,
            ink_y1: y1,
        }
    }

    #[inline]
    pub fn bit(&self, x: usize, y: usize) -> bool {
        self.rows[y] >> (GLYPH_W - 1 - x) & 1 == 1
    }

    pub fn ink_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }
}

/// All inked glyphs (space excluded).
pub fn glyphs() -> impl Iterator<Item = Glyph> {
    GLYPHS.iter().map(|&(c, rows)| Glyph::from_rows(c, rows))
}

pub fn glyph(ch: char) -> Option<Glyph> {
    GLYPHS
        .iter()
        .find(|(c, _)| *c == ch)
        .map(|&(c, rows)| Glyph::from_rows(c, rows))
}

/// Characters the font can set: digits, ASCII letters and space.
pub fn in_alphabet(ch: char) -> bool {
    ch == ' ' || ch.is_ascii_alphanumeric()
}

pub fn alphabet() -> Vec<char> {
    let mut chars: Vec<char> = GLYPHS.iter().map(|(c, _)| *c).collect();
    chars.push(' ');
    chars
}

/// Pixel width of `len` characters set at `scale`.
pub fn text_width(len: usize, scale: usize) -> usize {
    if len == 0 {
        0
    } else {
        (len * ADVANCE - (ADVANCE - GLYPH_W)) * scale
    }
}

/// Per-glyph placement noise for simulated handwriting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Jitter {
    /// Maximum offset in pixels, applied independently in x and y.
    pub max_offset: i64,
}

/// Draws `text` with its first cell's top-left corner at `(x, y)`.
/// Characters outside the alphabet are left blank. Pixels falling outside
/// the image are clipped.
pub fn draw_text<R: Rng>(
    img: &mut GrayImage,
    x: i64,
    y: i64,
    text: &str,
    scale: usize,
    ink: u8,
    jitter: Option<(Jitter, &mut R)>,
) {
    let s = scale as i64;
    let mut jitter = jitter;
    for (i, ch) in text.chars().enumerate() {
        let Some(g) = glyph(ch) else { continue };
        let (dx, dy) = match jitter.as_mut() {
            Some((j, rng)) if j.max_offset > 0 => (
                rng.gen_range(-j.max_offset..=j.max_offset),
                rng.gen_range(-j.max_offset..=j.max_offset),
            ),
            _ => (0, 0),
        };
        let ox = x + (i * ADVANCE) as i64 * s + dx;
        let oy = y + dy;
        for gy in 0..GLYPH_H {
            for gx in 0..GLYPH_W {
                if !g.bit(gx, gy) {
                    continue;
                }
                for py in 0..s {
                    for px in 0..s {
                        let (ix, iy) = (ox + gx as i64 * s + px, oy + gy as i64 * s + py);
                        if ix >= 0 && iy >= 0 && (ix as usize) < img.width() && (iy as usize) < img.height() {
                            img.set(ix as usize, iy as usize, ink);
                        }
                    }
                }
            }
        }
    }
}

/// Renders `text` black on white with a margin of two font pixels.
pub fn render_text(text: &str, scale: usize) -> GrayImage {
    let scale = scale.max(1);
    let margin = 2 * scale;
    let n = text.chars().count();
    let w = text_width(n, scale).max(1) + 2 * margin;
    let h = GLYPH_H * scale + 2 * margin;
    let mut img = GrayImage::new(w, h, 255).expect("non-empty canvas");
    draw_text::<rand::rngs::ThreadRng>(&mut img, margin as i64, margin as i64, text, scale, 0, None);
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_is_complete_and_unique() {
        let chars: Vec<char> = glyphs().map(|g| g.ch).collect();
        assert_eq!(chars.len(), 62);
        let mut sorted = chars.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 62);
        assert!(('0'..='9').chain('A'..='Z').chain('a'..='z').all(|c| glyph(c).is_some()));
    }

    #[test]
    fn ink_columns_are_contiguous() {
        for g in glyphs() {
            for x in g.ink_x0..=g.ink_x1 {
                assert!((0..GLYPH_H).any(|y| g.bit(x, y)), "{:?} has a blank column {x}", g.ch);
            }
        }
    }

    #[test]
    fn glyphs_differ_after_ink_alignment() {
        // the recognizer aligns candidates on the ink box, so compare that way
        let all: Vec<Glyph> = glyphs().collect();
        let mut bad = Vec::new();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                let mut diff = 0;
                for y in 0..GLYPH_H + 2 {
                    for x in 0..GLYPH_W + 2 {
                        let pa = |g: &Glyph| {
                            let (gx, gy) = (x + g.ink_x0, y + g.ink_y0);
                            gx < GLYPH_W && gy < GLYPH_H && g.bit(gx, gy)
                        };
                        if pa(a) != pa(b) {
                            diff += 1;
                        }
                    }
                }
                if diff < 2 {
                    bad.push((a.ch, b.ch, diff));
                }
            }
        }
        assert!(bad.is_empty(), "confusable glyph pairs: {bad:?}");
    }

    #[test]
    fn render_dimensions() {
        let img = render_text("42", 2);
        assert_eq!(img.width(), (2 * 7 - 2) * 2 + 8);
        assert_eq!(img.height(), 14 + 8);
        assert!(img.data().contains(&0));
    }
}
