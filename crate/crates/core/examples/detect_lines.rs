//! Runs both line-detector baselines on a rectified sheet and scores each
//! against the ground-truth underline mask.

use bags::linedet::{hough_horizontal, lsd_horizontal, mask_to_segments, segments_to_mask, HoughParams, LsdParams};
use bags::rectify::{warp, warp_mask};
use bags::segmetrics::pixel_metrics;
use bags::synthgen::{corpus_sample, DistortionSpec, SheetSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SheetSpec::default();
    let s = corpus_sample(1, &spec, &DistortionSpec::standard())?;
    let (w, h) = (spec.canonical_w, spec.canonical_h);
    let img = warp(&s.photo, &s.gt_homography, w, h)?;
    let gt = warp_mask(&s.gt_aau_mask, &s.gt_homography, w, h)?;

    println!("{} underlines in the ground-truth mask", mask_to_segments(&gt, 2).len());
    for gap in [0, 5, 10] {
        let segs = hough_horizontal(&img, &HoughParams { max_gap: gap, ..HoughParams::default() });
        let m = pixel_metrics(&segments_to_mask(&segs, w, h, 2), &gt)?;
        println!("hough max_gap={gap:<3} {:3} segments  recall {:.3}  precision {:.3}", segs.len(), m.recall, m.precision);
    }
    for len in [20.0, 40.0, 60.0] {
        let segs = lsd_horizontal(&img, &LsdParams { min_length: len, ..LsdParams::default() });
        let m = pixel_metrics(&segments_to_mask(&segs, w, h, 2), &gt)?;
        println!("lsd min_length={len:<3} {:3} segments  recall {:.3}  precision {:.3}", segs.len(), m.recall, m.precision);
    }
    Ok(())
}
