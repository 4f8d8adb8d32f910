use bags::raster::{connected_components, sobel_horizontal, threshold, BitMask, Connectivity, GrayImage};
use proptest::prelude::*;

fn image_strategy(max: usize) -> impl Strategy<Value = GrayImage> {
    (4..max, 4..max).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<u8>(), w * h)
            .prop_map(move |data| GrayImage::from_raw(w, h, data).expect("sized to fit"))
    })
}

fn mask_strategy(max: usize) -> impl Strategy<Value = BitMask> {
    (1..max, 1..max).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<bool>(), w * h)
            .prop_map(move |bits| BitMask::from_bits(w, h, bits).expect("sized to fit"))
    })
}

proptest! {
    #[test]
    fn sobel_follows_a_one_row_shift(img in image_strategy(24)) {
        let (w, h) = (img.width(), img.height());
        let shifted = GrayImage::from_fn(w, h, |x, y| img.get(x, y.saturating_sub(1))).unwrap();
        let (a, b) = (sobel_horizontal(&img), sobel_horizontal(&shifted));
        for y in 1..h - 2 {
            for x in 1..w - 1 {
                prop_assert_eq!(a.get(x, y), b.get(x, y + 1));
            }
        }
    }

    #[test]
    fn raising_the_threshold_never_adds_pixels(img in image_strategy(20), t in 0.0f64..800.0, dt in 0.0f64..200.0) {
        let g = sobel_horizontal(&img);
        let (lo, hi) = (threshold(&g, t), threshold(&g, t + dt));
        for (l, h) in lo.bits().iter().zip(hi.bits()) {
            prop_assert!(*l || !*h);
        }
    }

    #[test]
    fn components_partition_the_mask(m in mask_strategy(20), eight in any::<bool>()) {
        let conn = if eight { Connectivity::Eight } else { Connectivity::Four };
        let cc = connected_components(&m, conn);
        for y in 0..m.height() {
            for x in 0..m.width() {
                prop_assert_eq!(cc.label_at(x, y) != 0, m.get(x, y));
            }
        }
        prop_assert_eq!(cc.stats.iter().map(|s| s.pixel_count).sum::<usize>(), m.count());
        let mut union = BitMask::new(m.width(), m.height());
        for s in &cc.stats {
            let part = cc.component_mask(s.label);
            prop_assert_eq!(part.count(), s.pixel_count);
            for (u, p) in union.bits().iter().zip(part.bits()) {
                prop_assert!(!(*u && *p), "components overlap");
            }
            union.union_with(&part).unwrap();
        }
        prop_assert_eq!(&union, &m);
        let again = connected_components(&m, conn);
        prop_assert_eq!(&again.labels, &cc.labels);
    }

    #[test]
    fn pgm_round_trip(img in image_strategy(16)) {
        let bytes = bags::raster::encode_pgm(&img);
        prop_assert_eq!(bags::raster::decode_pgm(&bytes, "mem").unwrap(), img);
    }
}
