//! Grades one photographed sheet end to end with oracle masks and the
//! built-in glyph recognizer.

use bags::pipeline::{Pipeline, PipelineConfig, SheetInput};
use bags::synthgen::{corpus_sample, DistortionSpec, SheetSpec};
use bags::template::TemplateStore;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = corpus_sample(2, &SheetSpec::default(), &DistortionSpec::standard())?;
    let mut store = TemplateStore::new();
    store.insert(s.template.clone());
    let pipeline = Pipeline::new(PipelineConfig::default(), store)?;

    let input = SheetInput {
        image_id: s.image_id.clone(),
        photo: Some(s.photo.clone()),
        oracle_border: Some(s.gt_borderline_mask.clone()),
        oracle_aau: Some(s.gt_aau_mask.clone()),
        expected_sheet_id: Some(s.template.sheet_id.clone()),
        gt_answers: Some(s.gt_answers.clone()),
    };
    let r = pipeline.grade_image(&input)?;
    println!("sheet id read as {:?} (correct: {})", r.sheet_id_recognized, r.id_correct);
    for a in &r.areas {
        println!(
            "{:2}  {:<14} read {:<16} accuracy {:.2}  {}",
            a.area_index,
            format!("{:?}", a.label),
            format!("{:?}", a.recognized_text),
            a.accuracy,
            a.failure_kind
        );
    }
    Ok(())
}
