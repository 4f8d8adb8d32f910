//! Finds the borderline quad in a distorted photo and maps it back to the
//! canonical frame, then compares the result with the generator's own
//! homography.

use bags::pipeline::rectify;
use bags::rectify::{extract_quad, HarrisParams};
use bags::synthgen::{corpus_sample, DistortionSpec, SheetSpec, BORDER_MARGIN};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SheetSpec::default();
    let sample = corpus_sample(0, &spec, &DistortionSpec::standard())?;

    let quad = extract_quad(&sample.gt_borderline_mask, &HarrisParams::default())?;
    println!("border corners in the photo:");
    for v in quad.vertices() {
        println!("  ({:7.2}, {:7.2})", v.x, v.y);
    }

    let r = rectify(&sample.photo, &quad, spec.canonical_w, spec.canonical_h, BORDER_MARGIN, spec.stroke_thickness)?;
    let worst = quad
        .vertices()
        .iter()
        .filter_map(|&v| Some(r.homography.apply(v)?.distance(sample.gt_homography.apply(v)?)))
        .fold(0.0, f64::max);
    println!("largest corner disagreement with ground truth: {worst:.3} px");

    let out = std::env::temp_dir().join("bags-rectified.pgm");
    r.image.store_pgm(&out)?;
    println!("rectified sheet written to {}", out.display());
    Ok(())
}
