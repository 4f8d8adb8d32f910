use bags::linedet::{Segment, SegmentSource};
use bags::template::{expand_area, match_segments, AnswerSheetTemplate, IdCorner, Rect, TemplateArea};
use proptest::prelude::*;

fn seg(x0: f64, len: f64, y: f64, source: SegmentSource) -> Segment {
    Segment::new(x0, x0 + len, y, source).unwrap()
}

fn template(areas: &[(f64, f64, f64)], m: u32, n: u32) -> AnswerSheetTemplate {
    AnswerSheetTemplate {
        sheet_id: "T".into(),
        canonical_w: 2000,
        canonical_h: 2000,
        id_box: Rect::new(0, 0, 10, 10),
        id_corner: IdCorner::LeftBottom,
        areas: areas
            .iter()
            .enumerate()
            .map(|(i, &(x0, len, y))| TemplateArea {
                index: i,
                aau: seg(x0, len, y, SegmentSource::Template),
                m,
                n,
                standard_answer: "a".into(),
            })
            .collect(),
    }
}

fn areas() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    proptest::collection::vec((100.0f64..900.0, 5.0f64..300.0, 100.0f64..900.0), 1..10)
}

fn detections() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    proptest::collection::vec((100.0f64..900.0, 5.0f64..300.0, 100.0f64..900.0), 0..12)
}

proptest! {
    #[test]
    fn matching_respects_radius_and_partitions(a in areas(), d in detections(), max_dist in 0.0f64..80.0) {
        let t = template(&a, 20, 3);
        let det: Vec<Segment> = d.iter().map(|&(x, l, y)| seg(x, l, y, SegmentSource::Mask)).collect();
        let r = match_segments(&det, &t, max_dist);
        prop_assert!(r.matched.iter().all(|m| m.distance <= max_dist));
        let mut areas: Vec<usize> = r.matched.iter().map(|m| m.area).chain(r.missed_template_indices.iter().copied()).collect();
        areas.sort();
        prop_assert_eq!(areas, (0..t.areas.len()).collect::<Vec<_>>());
        let mut dets: Vec<usize> = r.matched.iter().map(|m| m.detection).chain(r.spurious_detection_indices.iter().copied()).collect();
        dets.sort();
        prop_assert_eq!(dets, (0..det.len()).collect::<Vec<_>>());
        prop_assert_eq!(match_segments(&det, &t, max_dist), r);
    }

    #[test]
    fn matching_ignores_common_translation(a in areas(), d in detections(), dx in -90.0f64..90.0, dy in -90.0f64..90.0) {
        let t = template(&a, 20, 3);
        let det: Vec<Segment> = d.iter().map(|&(x, l, y)| seg(x, l, y, SegmentSource::Mask)).collect();
        let moved_t = template(&a.iter().map(|&(x, l, y)| (x + dx, l, y + dy)).collect::<Vec<_>>(), 20, 3);
        let moved_d: Vec<Segment> = det.iter().map(|s| s.translated(dx, dy)).collect();
        let r1 = match_segments(&det, &t, 25.0);
        let r2 = match_segments(&moved_d, &moved_t, 25.0);
        prop_assert_eq!(&r1.missed_template_indices, &r2.missed_template_indices);
        prop_assert_eq!(&r1.spurious_detection_indices, &r2.spurious_detection_indices);
        prop_assert_eq!(r1.matched.len(), r2.matched.len());
        for (p, q) in r1.matched.iter().zip(&r2.matched) {
            prop_assert_eq!((p.area, p.detection), (q.area, q.detection));
            prop_assert!((p.distance - q.distance).abs() < 1e-9);
        }
    }

    #[test]
    fn ties_go_to_lower_indices(n in 1usize..6) {
        // n identical detections over n identical areas: pairs are made in index order
        let t = template(&vec![(200.0, 100.0, 300.0); n], 10, 2);
        let det = vec![seg(200.0, 100.0, 300.0, SegmentSource::Mask); n];
        let r = match_segments(&det, &t, 5.0);
        for (i, m) in r.matched.iter().enumerate() {
            prop_assert_eq!((m.area, m.detection), (i, i));
        }
    }

    #[test]
    fn expanded_height_is_m_plus_n(x0 in 50.0f64..500.0, len in 5.0f64..400.0, y in 200.0f64..800.0, m in 1u32..60, n in 0u32..20) {
        let t = template(&[(x0, len, y)], m, n);
        let r = expand_area(&t.areas[0], t.canonical_w, t.canonical_h).unwrap();
        prop_assert_eq!(r.h, (m + n) as i64);
    }
}
