//! End-to-end grading: segment, rectify, identify, locate, read, score.
//!
//! The two segmentation stages (sheet border and answer underlines) are
//! pluggable. Oracle masks come from the corpus, external masks from a
//! directory written by another tool, and the Hough and LSD baselines run
//! directly on the image. Failures inside one sheet degrade to scored
//! failures; only IO and parse problems abort a batch.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grading::{build_report, AreaResult, EvalReport, SheetResult, DEFAULT_LOCATION_IOU};
use crate::linedet::{
    hough_horizontal, lsd_horizontal, mask_to_segments, segments_to_mask, HoughParams, LsdParams, Segment,
    DEFAULT_MIN_COMPONENT_PX,
};
use crate::raster::{BitMask, GrayImage};
use crate::recognize::{FileRecognizer, Recognizer, Region, RegionKey, StubRecognizer};
use crate::rectify::{estimate_homography, extract_quad, warp, warp_mask, HarrisParams, Homography, Quad};
use crate::segmetrics::{aggregate, pixel_metrics, MetricsRow, PixelMetrics};
use crate::synthgen::{answers_from_tsv, border_corners, id_box_candidates, CorpusEntry, CorpusManifest, SheetSpec, BORDER_MARGIN};
use crate::template::{answer_rect_for, crop, match_segments, AnswerSheetTemplate, Rect, TemplateStore, DEFAULT_MAX_DIST};
use crate::fsutil;

/// Where a segmentation stage gets its mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmenterChoice {
    /// Ground-truth masks shipped with the corpus.
    Oracle,
    /// `<dir>/<image_id>.border.pgm` and `<dir>/<image_id>.aau.pgm`, in
    /// photo coordinates.
    External(PathBuf),
    Hough(HoughParams),
    Lsd(LsdParams),
}

impl SegmenterChoice {
    pub fn method_name(&self) -> &'static str {
        match self {
            SegmenterChoice::Oracle => "oracle",
            SegmenterChoice::External(_) => "external",
            SegmenterChoice::Hough(_) => "hough",
            SegmenterChoice::Lsd(_) => "lsd",
        }
    }

    /// Hyper-parameter column for metric tables.
    pub fn hyper_parameter(&self) -> String {
        match self {
            SegmenterChoice::Oracle | SegmenterChoice::External(_) => "-".into(),
            SegmenterChoice::Hough(p) => format!("max_gap={}", p.max_gap),
            SegmenterChoice::Lsd(p) => format!("min_length={}", p.min_length),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecognizerChoice {
    /// Font matcher; `scale` of `None` auto-detects.
    Stub { scale: Option<usize> },
    /// Manifest of precomputed results.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Rectified frame used before the template is known.
    pub canonical_w: usize,
    pub canonical_h: usize,
    /// Inset of the borderline from the sheet edge.
    pub margin: usize,
    pub segmenter_border: SegmenterChoice,
    pub segmenter_aau: SegmenterChoice,
    pub recognizer: RecognizerChoice,
    /// Defaults to `<corpus>/templates` in corpus runs.
    pub template_dir: Option<PathBuf>,
    pub max_dist: f64,
    /// Minimum IoU of detected and template answer rectangles for an area to
    /// count as correctly placed.
    pub location_iou: f64,
    /// Bar thickness when rendering detected segments to masks.
    pub mask_thickness: usize,
    pub min_component_px: usize,
    /// Places the unique ID may be printed, tried in order.
    pub id_boxes: Vec<Rect>,
    pub harris: HarrisParams,
    pub output_dir: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let spec = SheetSpec::default();
        PipelineConfig {
            canonical_w: spec.canonical_w,
            canonical_h: spec.canonical_h,
            margin: BORDER_MARGIN,
            segmenter_border: SegmenterChoice::Oracle,
            segmenter_aau: SegmenterChoice::Oracle,
            recognizer: RecognizerChoice::Stub { scale: None },
            template_dir: None,
            max_dist: DEFAULT_MAX_DIST,
            location_iou: DEFAULT_LOCATION_IOU,
            mask_thickness: spec.stroke_thickness,
            min_component_px: DEFAULT_MIN_COMPONENT_PX,
            id_boxes: id_box_candidates(&spec).to_vec(),
            harris: HarrisParams::default(),
            output_dir: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.canonical_w <= 2 * self.margin + 2 || self.canonical_h <= 2 * self.margin + 2 {
            return bad("canonical size must exceed twice the margin");
        }
        if self.max_dist.is_nan() || self.max_dist <= 0.0 {
            return bad("max_dist must be positive");
        }
        if !(self.location_iou > 0.0 && self.location_iou <= 1.0) {
            return bad("location_iou must lie in (0, 1]");
        }
        if self.mask_thickness == 0 || self.min_component_px == 0 {
            return bad("mask_thickness and min_component_px must be positive");
        }
        if self.id_boxes.is_empty() {
            return bad("at least one id box is required");
        }
        for choice in [&self.segmenter_border, &self.segmenter_aau] {
            if let SegmenterChoice::External(dir) = choice {
                if !dir.is_dir() {
                    return Err(Error::Config(format!("mask directory {} does not exist", dir.display())));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("pipeline config: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&fsutil::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serialises");
        s.push('\n');
        s
    }
}

/// One photo plus whatever ground truth is available for it.
#[derive(Debug, Clone, Default)]
pub struct SheetInput {
    pub image_id: String,
    pub photo: Option<GrayImage>,
    /// Required when a stage uses [`SegmenterChoice::Oracle`].
    pub oracle_border: Option<BitMask>,
    pub oracle_aau: Option<BitMask>,
    /// Sheet the photo is known to show, for evaluation.
    pub expected_sheet_id: Option<String>,
    /// Handwritten answers by area index; labels fall back to the
    /// template's standard answers when absent.
    pub gt_answers: Option<Vec<String>>,
}

/// Photo-to-frame mapping and the resampled photo.
#[derive(Debug, Clone, PartialEq)]
pub struct Rectified {
    pub homography: Homography,
    pub image: GrayImage,
}

/// Destination of the detected border: the centre lines of strokes
/// `thickness` wide drawn on the sheet rectangle inset by `margin`.
pub fn canonical_quad(w: usize, h: usize, margin: usize, thickness: usize) -> Quad {
    let [tl, _, br, _] = border_corners(w, h, margin, thickness);
    Quad::rect(tl.x, tl.y, br.x, br.y).expect("validated frame")
}

/// Warps `photo` so that `quad` lands on the border centre lines of a
/// `w`×`h` sheet.
pub fn rectify(photo: &GrayImage, quad: &Quad, w: usize, h: usize, margin: usize, thickness: usize) -> Result<Rectified> {
    let homography = estimate_homography(quad, &canonical_quad(w, h, margin, thickness))?;
    let image = warp(photo, &homography, w, h)?;
    Ok(Rectified { homography, image })
}

/// Border mask built from line detections on the image and its transpose.
fn border_mask_from_lines(photo: &GrayImage, choice: &SegmenterChoice, thickness: usize) -> BitMask {
    let detect = |img: &GrayImage| -> Vec<Segment> {
        match choice {
            SegmenterChoice::Hough(p) => hough_horizontal(img, p),
            SegmenterChoice::Lsd(p) => lsd_horizontal(img, p),
            _ => Vec::new(),
        }
    };
    let (w, h) = (photo.width(), photo.height());
    let mut mask = segments_to_mask(&detect(photo), w, h, thickness);
    let vertical = segments_to_mask(&detect(&photo.transpose()), h, w, thickness).transpose();
    mask.union_with(&vertical).expect("same dimensions");
    mask
}

pub struct Pipeline {
    cfg: PipelineConfig,
    store: TemplateStore,
    recognizer: Box<dyn Recognizer>,
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig, store: TemplateStore) -> Result<Self> {
        cfg.validate()?;
        let recognizer: Box<dyn Recognizer> = match &cfg.recognizer {
            RecognizerChoice::Stub { scale } => Box::new(StubRecognizer { scale: *scale }),
            RecognizerChoice::File(path) => Box::new(FileRecognizer::load(path)?),
        };
        Ok(Pipeline { cfg, store, recognizer })
    }

    pub fn with_recognizer(cfg: PipelineConfig, store: TemplateStore, recognizer: Box<dyn Recognizer>) -> Result<Self> {
        cfg.validate()?;
        Ok(Pipeline { cfg, store, recognizer })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn templates(&self) -> &TemplateStore {
        &self.store
    }

    fn external_mask(dir: &Path, image_id: &str, kind: &str) -> Result<BitMask> {
        BitMask::load_pgm(dir.join(format!("{image_id}.{kind}.pgm")))
    }

    fn border_mask(&self, input: &SheetInput, photo: &GrayImage) -> Result<BitMask> {
        match &self.cfg.segmenter_border {
            SegmenterChoice::Oracle => input
                .oracle_border
                .clone()
                .ok_or_else(|| Error::Config(format!("{}: oracle border mask not supplied", input.image_id))),
            SegmenterChoice::External(dir) => Self::external_mask(dir, &input.image_id, "border"),
            other => Ok(border_mask_from_lines(photo, other, self.cfg.mask_thickness)),
        }
    }

    /// Detects the sheet border and rectifies to a `w`×`h` frame. `Ok(None)`
    /// means the border could not be located.
    pub fn rectify_input(&self, input: &SheetInput, w: usize, h: usize) -> Result<Option<Rectified>> {
        let photo = input
            .photo
            .as_ref()
            .ok_or_else(|| Error::Config(format!("{}: no photo supplied", input.image_id)))?;
        let mask = self.border_mask(input, photo)?;
        let Ok(quad) = extract_quad(&mask, &self.cfg.harris) else {
            return Ok(None);
        };
        match rectify(photo, &quad, w, h, self.cfg.margin, self.cfg.mask_thickness) {
            Ok(r) => Ok(Some(r)),
            Err(Error::Geometry(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Underlines in the rectified frame, from the configured AAU stage.
    pub fn detect_aau(&self, input: &SheetInput, rect: &Rectified) -> Result<Vec<Segment>> {
        let (w, h) = (rect.image.width(), rect.image.height());
        let from_mask = |m: &BitMask| -> Result<Vec<Segment>> {
            let warped = warp_mask(m, &rect.homography, w, h)?;
            Ok(mask_to_segments(&warped, self.cfg.min_component_px))
        };
        match &self.cfg.segmenter_aau {
            SegmenterChoice::Oracle => {
                let m = input
                    .oracle_aau
                    .as_ref()
                    .ok_or_else(|| Error::Config(format!("{}: oracle AAU mask not supplied", input.image_id)))?;
                from_mask(m)
            }
            SegmenterChoice::External(dir) => from_mask(&Self::external_mask(dir, &input.image_id, "aau")?),
            SegmenterChoice::Hough(p) => Ok(hough_horizontal(&rect.image, p)),
            SegmenterChoice::Lsd(p) => Ok(lsd_horizontal(&rect.image, p)),
        }
    }

    /// Reads the unique ID; returns the text of the first box naming a known
    /// template, or the first non-empty reading when none does.
    fn read_id(&self, image_id: &str, img: &GrayImage) -> (String, Option<&AnswerSheetTemplate>) {
        let mut first = String::new();
        for b in &self.cfg.id_boxes {
            let Some(r) = b.clamp_to(img.width(), img.height()) else {
                continue;
            };
            let Ok(c) = crop(img, &r) else { continue };
            let text = self.recognizer.recognize(&c, RegionKey::new(image_id, Region::Id)).text;
            let text = text.trim().to_owned();
            if let Some(t) = self.store.get(&text) {
                return (text, Some(t));
            }
            if first.is_empty() {
                first = text;
            }
        }
        (first, None)
    }

    fn label_for(input: &SheetInput, t: &AnswerSheetTemplate, pos: usize) -> String {
        let area = &t.areas[pos];
        input
            .gt_answers
            .as_ref()
            .and_then(|a| a.get(area.index).cloned())
            .unwrap_or_else(|| area.standard_answer.clone())
    }

    fn all_missed(input: &SheetInput, t: &AnswerSheetTemplate) -> Vec<AreaResult> {
        (0..t.areas.len())
            .map(|i| AreaResult::missed(t.areas[i].index as u32, Self::label_for(input, t, i)))
            .collect()
    }

    /// Runs every stage on one photo.
    pub fn grade_image(&self, input: &SheetInput) -> Result<SheetResult> {
        let expected = input.expected_sheet_id.as_deref().and_then(|id| self.store.get(id));
        let id = input.image_id.clone();

        let Some(mut rect) = self.rectify_input(input, self.cfg.canonical_w, self.cfg.canonical_h)? else {
            let areas = expected.map(|t| Self::all_missed(input, t)).unwrap_or_default();
            return Ok(SheetResult::new(id, "", expected.is_some(), areas));
        };

        let (recognized_id, found) = self.read_id(&id, &rect.image);
        let id_correct = match (found, &input.expected_sheet_id) {
            (Some(t), Some(e)) => &t.sheet_id == e,
            (Some(_), None) => true,
            (None, _) => false,
        };
        // areas are reported against the sheet the photo really shows when
        // that is known, so a misread ID still yields a full area list
        let Some(template) = expected.or(found) else {
            return Ok(SheetResult::new(id, recognized_id, false, Vec::new()));
        };
        if (template.canonical_w, template.canonical_h) != (rect.image.width(), rect.image.height()) {
            match self.rectify_input(input, template.canonical_w, template.canonical_h)? {
                Some(r) => rect = r,
                None => {
                    return Ok(SheetResult::new(id, recognized_id, id_correct, Self::all_missed(input, template)));
                }
            }
        }

        let detected = self.detect_aau(input, &rect)?;
        let assignment = match_segments(&detected, template, self.cfg.max_dist);
        let mut areas = Vec::with_capacity(template.areas.len());
        for (pos, area) in template.areas.iter().enumerate() {
            let label = Self::label_for(input, template, pos);
            let Some(m) = assignment.for_area(pos) else {
                areas.push(AreaResult::missed(area.index as u32, label));
                continue;
            };
            let seg = detected[m.detection];
            let found_rect = answer_rect_for(&seg, area.m, area.n);
            let Some(clamped) = found_rect.clamp_to(rect.image.width(), rect.image.height()) else {
                areas.push(AreaResult::missed(area.index as u32, label));
                continue;
            };
            let img = crop(&rect.image, &clamped)?;
            let text = self
                .recognizer
                .recognize(&img, RegionKey::new(&id, Region::Area(area.index as u32)))
                .text;
            let location_ok = found_rect.iou(&area.answer_rect()) >= self.cfg.location_iou;
            areas.push(AreaResult::grade(area.index as u32, true, location_ok, text, label)?);
        }
        Ok(SheetResult::new(id, recognized_id, id_correct, areas))
    }
}

/// A corpus on disk with its manifest loaded.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub root: PathBuf,
    pub manifest: CorpusManifest,
}

impl Corpus {
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        let manifest = CorpusManifest::load(&root)?;
        Ok(Corpus { root, manifest })
    }

    pub fn templates(&self) -> Result<TemplateStore> {
        TemplateStore::load_dir(self.root.join("templates"))
    }

    /// Loads the photo and ground truth for one entry.
    pub fn input(&self, e: &CorpusEntry) -> Result<SheetInput> {
        let answers_path = self.root.join(&e.answers);
        let answers = answers_from_tsv(&fsutil::read_to_string(&answers_path)?, &answers_path.display().to_string())?;
        Ok(SheetInput {
            image_id: e.image_id.clone(),
            photo: Some(GrayImage::load_pgm(self.root.join(&e.image))?),
            oracle_border: Some(BitMask::load_pgm(self.root.join(&e.border_mask))?),
            oracle_aau: Some(BitMask::load_pgm(self.root.join(&e.aau_mask))?),
            expected_sheet_id: Some(e.sheet_id.clone()),
            gt_answers: Some(answers),
        })
    }

    pub fn gt_homography(&self, e: &CorpusEntry) -> Result<Homography> {
        let p = self.root.join(&e.homography);
        Ok(Homography::from_text(&fsutil::read_to_string(&p)?, &p.display().to_string())?)
    }
}

fn store_for(corpus: &Corpus, cfg: &PipelineConfig) -> Result<TemplateStore> {
    match &cfg.template_dir {
        Some(dir) => TemplateStore::load_dir(dir),
        None => corpus.templates(),
    }
}

/// Grades every sheet of a corpus. Results are ordered by image id.
pub fn evaluate_grading(corpus: &Corpus, cfg: &PipelineConfig) -> Result<(EvalReport, Vec<SheetResult>)> {
    let pipeline = Pipeline::new(cfg.clone(), store_for(corpus, cfg)?)?;
    evaluate_grading_with(corpus, &pipeline)
}

pub fn evaluate_grading_with(corpus: &Corpus, pipeline: &Pipeline) -> Result<(EvalReport, Vec<SheetResult>)> {
    let mut sheets: Vec<SheetResult> = corpus
        .manifest
        .entries
        .par_iter()
        .map(|e| pipeline.grade_image(&corpus.input(e)?))
        .collect::<Result<_>>()?;
    sheets.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    Ok((build_report(&sheets), sheets))
}

/// Standard method grid: Hough at three gap settings, LSD at three
/// minimum lengths.
pub fn default_detection_cells() -> Vec<SegmenterChoice> {
    let mut cells = vec![SegmenterChoice::Oracle];
    for g in [0, 5, 10] {
        cells.push(SegmenterChoice::Hough(HoughParams {
            max_gap: g,
            ..HoughParams::default()
        }));
    }
    for l in [20.0, 40.0, 60.0] {
        cells.push(SegmenterChoice::Lsd(LsdParams {
            min_length: l,
            ..LsdParams::default()
        }));
    }
    cells
}

/// Pixel metrics of each AAU detection method against the GT underline mask,
/// both in the rectified frame.
///
/// Rectification uses `cfg.segmenter_border`. If the border cannot be found
/// the corpus homography is used instead, so every image is scored.
pub fn evaluate_detection(corpus: &Corpus, cells: &[SegmenterChoice], cfg: &PipelineConfig) -> Result<Vec<MetricsRow>> {
    let pipeline = Pipeline::with_recognizer(cfg.clone(), TemplateStore::new(), Box::new(StubRecognizer::default()))?;
    let (w, h) = (cfg.canonical_w, cfg.canonical_h);
    let per_image: Vec<Vec<PixelMetrics>> = corpus
        .manifest
        .entries
        .par_iter()
        .map(|e| -> Result<Vec<PixelMetrics>> {
            let input = corpus.input(e)?;
            let rect = match pipeline.rectify_input(&input, w, h)? {
                Some(r) => r,
                None => {
                    let hgt = corpus.gt_homography(e)?;
                    let photo = input.photo.as_ref().expect("loaded");
                    Rectified {
                        image: warp(photo, &hgt, w, h)?,
                        homography: hgt,
                    }
                }
            };
            let gt = warp_mask(input.oracle_aau.as_ref().expect("loaded"), &rect.homography, w, h)?;
            cells
                .iter()
                .map(|cell| {
                    let pred = match cell {
                        SegmenterChoice::Oracle => gt.clone(),
                        SegmenterChoice::External(dir) => {
                            let m = Pipeline::external_mask(dir, &input.image_id, "aau")?;
                            warp_mask(&m, &rect.homography, w, h)?
                        }
                        SegmenterChoice::Hough(p) => {
                            segments_to_mask(&hough_horizontal(&rect.image, p), w, h, cfg.mask_thickness)
                        }
                        SegmenterChoice::Lsd(p) => {
                            segments_to_mask(&lsd_horizontal(&rect.image, p), w, h, cfg.mask_thickness)
                        }
                    };
                    Ok(pixel_metrics(&pred, &gt)?)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(cells
        .iter()
        .enumerate()
        .map(|(i, cell)| MetricsRow {
            method: cell.method_name().into(),
            hyper_parameter: cell.hyper_parameter(),
            metrics: aggregate(per_image.iter().map(|m| &m[i])),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::FailureKind;
    use crate::synthgen::{distort, generate_sheet, DistortionSpec, GeneratedSample};

    fn input_for(s: &GeneratedSample) -> SheetInput {
        SheetInput {
            image_id: s.image_id.clone(),
            photo: Some(s.photo.clone()),
            oracle_border: Some(s.gt_borderline_mask.clone()),
            oracle_aau: Some(s.gt_aau_mask.clone()),
            expected_sheet_id: Some(s.template.sheet_id.clone()),
            gt_answers: Some(s.gt_answers.clone()),
        }
    }

    fn pipeline_for(s: &GeneratedSample) -> Pipeline {
        let mut store = TemplateStore::new();
        store.insert(s.template.clone());
        Pipeline::new(PipelineConfig::default(), store).unwrap()
    }

    #[test]
    fn clean_sheet_grades_perfectly() {
        let s = generate_sheet(&SheetSpec { seed: 21, ..SheetSpec::default() }).unwrap();
        let r = pipeline_for(&s).grade_image(&input_for(&s)).unwrap();
        assert!(r.id_correct);
        assert_eq!(r.areas.len(), 16);
        assert!(r.areas.iter().all(|a| a.accuracy == 1.0), "{:?}", r.areas);
    }

    #[test]
    fn blanked_id_zeroes_sheet() {
        let mut s = generate_sheet(&SheetSpec { seed: 22, ..SheetSpec::default() }).unwrap();
        let b = s.template.id_box;
        for y in b.y..b.bottom() {
            for x in b.x..b.right() {
                s.photo.set(x as usize, y as usize, 255);
            }
        }
        let r = pipeline_for(&s).grade_image(&input_for(&s)).unwrap();
        assert!(!r.id_correct);
        assert_eq!(r.areas.len(), 16);
        assert!(r.areas.iter().all(|a| a.accuracy == 0.0));
    }

    #[test]
    fn distorted_sheet_matches_closely() {
        let s = generate_sheet(&SheetSpec { seed: 23, ..SheetSpec::default() }).unwrap();
        let d = distort(&s, &DistortionSpec::standard().with_seed(5)).unwrap();
        let p = pipeline_for(&d);
        let input = input_for(&d);
        let rect = p.rectify_input(&input, 640, 640).unwrap().unwrap();
        let segs = p.detect_aau(&input, &rect).unwrap();
        let a = match_segments(&segs, &d.template, DEFAULT_MAX_DIST);
        assert_eq!(a.matched.len(), 16);
        assert!(a.matched.iter().all(|m| m.distance <= 2.0), "{:?}", a.matched);
        let r = p.grade_image(&input).unwrap();
        assert!(r.id_correct);
    }

    #[test]
    fn deleted_underline_is_failed_location() {
        let mut s = generate_sheet(&SheetSpec { seed: 24, ..SheetSpec::default() }).unwrap();
        let r = s.template.areas[3].answer_rect();
        for y in r.y..r.bottom() + 3 {
            for x in r.x - 1..r.right() + 2 {
                s.gt_aau_mask.set(x as usize, y as usize, false);
            }
        }
        let res = pipeline_for(&s).grade_image(&input_for(&s)).unwrap();
        let failed: Vec<_> = res.areas.iter().filter(|a| a.failure_kind != FailureKind::None).collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].area_index, 3);
        assert_eq!(failed[0].failure_kind, FailureKind::FailedLocation);
    }

    #[test]
    fn missing_border_marks_all_failed_location() {
        let s = generate_sheet(&SheetSpec { seed: 25, ..SheetSpec::default() }).unwrap();
        let mut input = input_for(&s);
        input.oracle_border = Some(BitMask::new(640, 640));
        let r = pipeline_for(&s).grade_image(&input).unwrap();
        assert_eq!(r.areas.len(), 16);
        assert!(r.areas.iter().all(|a| a.failure_kind == FailureKind::FailedLocation));
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = PipelineConfig {
            segmenter_aau: SegmenterChoice::Hough(HoughParams::default()),
            ..PipelineConfig::default()
        };
        assert_eq!(PipelineConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        assert!(PipelineConfig::from_json(r#"{"bogus": 1}"#).is_err());
        let partial = PipelineConfig::from_json(r#"{"segmenter_aau": {"lsd": {"min_length": 40, "angle_tolerance": 10, "gradient_threshold": 32}}}"#).unwrap();
        assert_eq!(partial.segmenter_border, SegmenterChoice::Oracle);
    }
}
