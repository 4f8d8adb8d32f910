//! Edit-distance scoring of individual answers and a corpus-style summary.

use bags::grading::{build_report, levenshtein, AreaResult, SheetResult};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [("x=12", "x=12"), ("x=12", "x=13"), ("3a+b", "3a"), ("", "42"), ("hello", "helo")];
    let mut areas = Vec::new();
    for (i, (read, label)) in cases.iter().enumerate() {
        let a = AreaResult::grade(i as u32, true, true, *read, *label)?;
        println!(
            "{:>8} vs {:<8} distance {}  accuracy {:.3}  {}",
            format!("{read:?}"),
            format!("{label:?}"),
            levenshtein(read, label),
            a.accuracy,
            a.failure_kind
        );
        areas.push(a);
    }
    areas.push(AreaResult::missed(cases.len() as u32, "7"));

    let sheets = [SheetResult::new("photo-1", "S1", true, areas.clone()), SheetResult::new("photo-2", "S9", false, areas)];
    println!("\n{}", build_report(&sheets).to_table());
    Ok(())
}
