//! Writes a small synthetic corpus and lists what ended up on disk.
//!
//! Usage: `cargo run --example generate_corpus -- [OUT_DIR] [COUNT]`

use bags::synthgen::{generate_corpus, DistortionSpec, SheetSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = args.next().map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("bags-corpus"));
    let count: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);

    let manifest = generate_corpus(count, &SheetSpec::default(), &DistortionSpec::standard(), &out)?;
    println!("{} sheets in {}", manifest.entries.len(), out.display());
    for e in &manifest.entries {
        println!("  {}  sheet {}  photo {}", e.image_id, e.sheet_id, e.image.display());
    }
    Ok(())
}
