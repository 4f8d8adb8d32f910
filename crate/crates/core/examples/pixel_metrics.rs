//! Pixel-level recall, precision and accuracy of a predicted mask, exactly
//! and with a small tolerance around the ground truth.

use bags::raster::BitMask;
use bags::segmetrics::{aggregate, pixel_metrics, pixel_metrics_tolerant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a two-row underline and a prediction sitting one row too low
    let gt = BitMask::from_fn(40, 12, |x, y| (5..35).contains(&x) && (5..7).contains(&y));
    let pred = BitMask::from_fn(40, 12, |x, y| (8..35).contains(&x) && (6..8).contains(&y));

    let exact = pixel_metrics(&pred, &gt)?;
    let loose = pixel_metrics_tolerant(&pred, &gt, 1)?;
    for (name, m) in [("exact", exact), ("1 px tolerance", loose)] {
        println!(
            "{name:<15} tp {:3} fp {:3} fn {:3}  recall {:.3} precision {:.3} accuracy {:.3}",
            m.tp, m.fp, m.fn_, m.recall, m.precision, m.accuracy
        );
    }
    let both = aggregate([&exact, &loose]);
    println!("pooled counts give recall {:.3}", both.recall);
    Ok(())
}
