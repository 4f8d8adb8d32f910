mod common;

use bags::raster::{BitMask, GrayImage};
use bags::rectify::{estimate_homography, extract_quad, harris_response, HarrisParams, Point, Quad};
use common::{apply_matrix, homography_oracle, random_quad};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn quad_pair() -> impl Strategy<Value = (Quad, Quad)> {
    any::<u64>().prop_map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (random_quad(&mut rng, 0.2), random_quad(&mut rng, 0.2))
    })
}

/// Thick outline of `q` shifted by `(dx, dy)`.
fn outline(q: &Quad, w: usize, h: usize, dx: f64, dy: f64) -> BitMask {
    let v = q.vertices();
    let mut m = BitMask::new(w, h);
    for i in 0..4 {
        let (a, b) = (v[i], v[(i + 1) % 4]);
        let steps = (a.distance(b) * 2.0).ceil() as usize;
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            let (x, y) = (a.x + t * (b.x - a.x) + dx, a.y + t * (b.y - a.y) + dy);
            for oy in 0..2 {
                for ox in 0..2 {
                    let (px, py) = (x.round() as i64 + ox, y.round() as i64 + oy);
                    if px >= 0 && py >= 0 && (px as usize) < w && (py as usize) < h {
                        m.set(px as usize, py as usize, true);
                    }
                }
            }
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn vertices_map_onto_targets((src, dst) in quad_pair()) {
        let h = estimate_homography(&src, &dst).unwrap();
        for (s, d) in src.vertices().iter().zip(dst.vertices()) {
            prop_assert!(h.apply(*s).unwrap().distance(*d) < 1e-6);
        }
    }

    #[test]
    fn agrees_with_svd_oracle((src, dst) in quad_pair(), u in 0.05f64..0.95, v in 0.05f64..0.95) {
        let h = estimate_homography(&src, &dst).unwrap();
        let oracle = homography_oracle(src.vertices(), dst.vertices());
        let [a, b, c, d] = *src.vertices();
        // bilinear interior point of the source quad
        let top = Point::new(a.x + u * (b.x - a.x), a.y + u * (b.y - a.y));
        let bottom = Point::new(d.x + u * (c.x - d.x), d.y + u * (c.y - d.y));
        let p = Point::new(top.x + v * (bottom.x - top.x), top.y + v * (bottom.y - top.y));
        prop_assert!(h.apply(p).unwrap().distance(apply_matrix(&oracle, p)) < 1e-6);
    }

    #[test]
    fn composition_matches_direct_estimate(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (random_quad(&mut rng, 0.2), random_quad(&mut rng, 0.2), random_quad(&mut rng, 0.2));
        let ab = estimate_homography(&a, &b).unwrap();
        let bc = estimate_homography(&b, &c).unwrap();
        let composed = ab.then(&bc).unwrap();
        let direct = estimate_homography(&a, &c).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((composed.matrix()[i][j] - direct.matrix()[i][j]).abs() < 1e-6,
                    "entry {i},{j}: {} vs {}", composed.matrix()[i][j], direct.matrix()[i][j]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn quad_order_follows_translation(
        offs in proptest::collection::vec(-12.0f64..12.0, 8),
        dx in 0i64..40,
        dy in 0i64..40,
    ) {
        let base = [(40.0, 40.0), (200.0, 40.0), (200.0, 220.0), (40.0, 220.0)];
        let pts = [0, 1, 2, 3].map(|i| Point::new(base[i].0 + offs[2 * i], base[i].1 + offs[2 * i + 1]));
        let q = Quad::new(pts).unwrap();
        let p = HarrisParams::default();
        let a = extract_quad(&outline(&q, 300, 300, 0.0, 0.0), &p).unwrap();
        let b = extract_quad(&outline(&q, 300, 300, dx as f64, dy as f64), &p).unwrap();
        for (u, v) in a.vertices().iter().zip(b.vertices()) {
            prop_assert!((v.x - u.x - dx as f64).abs() < 1e-6 && (v.y - u.y - dy as f64).abs() < 1e-6,
                "{u:?} then {v:?} for shift ({dx}, {dy})");
        }
    }

    #[test]
    fn corner_response_beats_edge_response(x0 in 6usize..20, y0 in 6usize..20, side in 10usize..20) {
        let img = GrayImage::from_fn(48, 48, |x, y| {
            if x >= x0 && x < x0 + side && y >= y0 && y < y0 + side { 0 } else { 255 }
        }).unwrap();
        let r = harris_response(&img, &HarrisParams::default()).unwrap();
        let corner = (x0..x0 + 3).flat_map(|x| (y0..y0 + 3).map(move |y| (x, y)))
            .chain((x0.saturating_sub(2)..x0).flat_map(|x| (y0.saturating_sub(2)..y0).map(move |y| (x, y))))
            .map(|(x, y)| r.get(x, y))
            .fold(f64::MIN, f64::max);
        let mid = x0 + side / 2;
        for y in y0 - 2..y0 + 2 {
            prop_assert!(r.get(mid, y) <= corner);
        }
    }
}
