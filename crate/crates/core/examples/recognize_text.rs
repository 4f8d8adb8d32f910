//! Renders text in the built-in bitmap font and reads it back, clean and
//! after a slight perspective warp.

use bags::font::render_text;
use bags::recognize::stub_recognize;
use bags::rectify::{estimate_homography, warp, Point, Quad};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = "Area 51 ok";
    let img = render_text(text, 2);
    let clean = stub_recognize(&img);
    println!("clean:  {:?} (confidence {:.2})", clean.text, clean.confidence);

    let (w, h) = (img.width() as f64, img.height() as f64);
    let src = Quad::rect(0.0, 0.0, w - 1.0, h - 1.0)?;
    let dst = Quad::new([
        // corners pushed outward so every output pixel samples the source
        Point::new(-0.6, -0.3),
        Point::new(w - 0.2, -0.5),
        Point::new(w - 0.4, h + 0.1),
        Point::new(-0.3, h - 0.2),
    ])?;
    let warped = warp(&img, &estimate_homography(&src, &dst)?, img.width(), img.height())?;
    let r = stub_recognize(&warped);
    println!("warped: {:?} (confidence {:.2})", r.text, r.confidence);
    Ok(())
}
