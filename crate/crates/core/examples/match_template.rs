//! Pairs detected underlines with a template's answer areas, including a
//! missing detection and a stray one.

use bags::linedet::{Segment, SegmentSource};
use bags::synthgen::{generate_sheet, SheetSpec};
use bags::template::{expand_area, match_segments, DEFAULT_MAX_DIST};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let template = generate_sheet(&SheetSpec::default())?.template;

    // template underlines nudged by a few pixels, minus the second one,
    // plus a line that belongs to nothing
    let mut detected: Vec<Segment> = template
        .aau_segments()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != 1)
        .map(|(_, s)| s.translated(2.5, -1.0))
        .collect();
    detected.push(Segment::new(30.0, 90.0, 600.0, SegmentSource::Mask).ok_or("bad segment")?);

    let a = match_segments(&detected, &template, DEFAULT_MAX_DIST);
    for m in &a.matched {
        let area = &template.areas[m.area];
        let r = expand_area(area, template.canonical_w, template.canonical_h)?;
        println!(
            "area {:2} <- detection {:2}  distance {:.2}  answer box {}x{} at ({}, {})",
            area.index, m.detection, m.distance, r.w, r.h, r.x, r.y
        );
    }
    println!("missed areas: {:?}", a.missed_template_indices);
    println!("spurious detections: {:?}", a.spurious_detection_indices);
    Ok(())
}
