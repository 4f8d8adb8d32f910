mod common;

use bags::linedet::{
    hough_horizontal, lsd_horizontal, mask_to_segments, segments_to_mask, HoughParams, LsdParams, Segment,
    SegmentSource,
};
use common::line_image;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn covered_columns(segs: &[Segment]) -> usize {
    segs.iter().map(|s| (s.x1 - s.x0).round() as usize + 1).sum()
}

fn is_sorted(segs: &[Segment]) -> bool {
    segs.windows(2)
        .all(|w| (w[0].y, w[0].x0) <= (w[1].y, w[1].x0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hough_is_monotone_in_max_gap(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (img, _) = line_image(&mut rng, 120, 60);
        let mut prev: Option<Vec<Segment>> = None;
        for gap in 0..=12 {
            let segs = hough_horizontal(&img, &HoughParams { max_gap: gap, ..HoughParams::default() });
            prop_assert!(is_sorted(&segs));
            if let Some(p) = &prev {
                prop_assert!(segs.len() <= p.len(), "gap {gap}: {} > {}", segs.len(), p.len());
                prop_assert!(covered_columns(&segs) >= covered_columns(p));
            }
            prev = Some(segs);
        }
    }

    #[test]
    fn lsd_longer_minimum_gives_subset(seed in any::<u64>(), a in 5.0f64..60.0, extra in 0.0f64..60.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (img, _) = line_image(&mut rng, 120, 60);
        let short = lsd_horizontal(&img, &LsdParams { min_length: a, ..LsdParams::default() });
        let long = lsd_horizontal(&img, &LsdParams { min_length: a + extra, ..LsdParams::default() });
        prop_assert!(is_sorted(&short) && is_sorted(&long));
        for s in &long {
            prop_assert!(short.contains(s), "{s:?} missing at min_length {a}");
        }
    }

    #[test]
    fn detectors_are_deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (img, _) = line_image(&mut rng, 100, 50);
        prop_assert_eq!(hough_horizontal(&img, &HoughParams::default()), hough_horizontal(&img, &HoughParams::default()));
        prop_assert_eq!(lsd_horizontal(&img, &LsdParams::default()), lsd_horizontal(&img, &LsdParams::default()));
    }

    #[test]
    fn mask_round_trip_within_half_pixel(
        rows in proptest::collection::btree_set(0usize..20, 1..8),
        spans in proptest::collection::vec((0usize..60, 2usize..60), 8),
    ) {
        // one segment per row, rows at least two apart so bars never touch
        let segs: Vec<Segment> = rows
            .iter()
            .map(|r| r * 3 + 1)
            .zip(&spans)
            .map(|(y, &(x0, len))| {
                let x1 = (x0 + len).min(99);
                Segment::new(x0 as f64, x1 as f64, y as f64, SegmentSource::Template).unwrap()
            })
            .collect();
        let mask = segments_to_mask(&segs, 100, 64, 1);
        let back = mask_to_segments(&mask, 1);
        prop_assert!(is_sorted(&back));
        prop_assert_eq!(back.len(), segs.len());
        for (a, b) in segs.iter().zip(&back) {
            prop_assert!((a.x0 - b.x0).abs() <= 0.5 && (a.x1 - b.x1).abs() <= 0.5 && (a.y - b.y).abs() <= 0.5,
                "{a:?} came back as {b:?}");
        }
    }
}

#[test]
fn gap_bridging_at_paper_settings() {
    // one dark line broken by gaps of 3 and 8 columns
    let mut img = bags::raster::GrayImage::new(120, 20, 255).unwrap();
    for x in 10..110 {
        if !(40..43).contains(&x) && !(70..78).contains(&x) {
            img.set(x, 10, 0);
            img.set(x, 11, 0);
        }
    }
    let count = |g| hough_horizontal(&img, &HoughParams { max_gap: g, ..HoughParams::default() }).len();
    assert_eq!(count(0), 3);
    assert_eq!(count(5), 2);
    assert_eq!(count(10), 1);
}
