//! Command-line front end for the grading library.
//!
//! Exit status is 0 on success, 1 when the command line is malformed and 2
//! when input data cannot be read or processed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bags::error::{Error, Result};
use bags::grading::write_reports;
use bags::linedet::{HoughParams, LsdParams};
use bags::pipeline::{evaluate_detection, evaluate_grading, rectify, Corpus, PipelineConfig, SegmenterChoice};
use bags::raster::{BitMask, GrayImage};
use bags::rectify::extract_quad;
use bags::segmetrics::{rows_to_csv, score_mask_dirs, PixelMetrics};
use bags::synthgen::{generate_corpus, DistortionSpec, SheetSpec, BORDER_MARGIN};

#[derive(Parser)]
#[command(name = "bags", version, about = "Grade photographed answer sheets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic corpus with ground-truth masks and answers.
    Generate {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Distortion preset: none, light or standard.
        #[arg(long, default_value = "none")]
        distort: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rectify one photo given its borderline mask.
    Rectify {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        border_mask: PathBuf,
        /// Canonical sheet size, e.g. 640x640.
        #[arg(long, value_parser = parse_size)]
        template_size: (usize, usize),
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = BORDER_MARGIN)]
        margin: usize,
        /// Borderline stroke width in the canonical frame.
        #[arg(long, default_value_t = 2)]
        thickness: usize,
    },
    /// Score one underline detector over a corpus and write a CSV row.
    Detect {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        max_gap: Option<usize>,
        #[arg(long)]
        min_length: Option<f64>,
        /// Directory of `<image_id>.aau.pgm` masks for `external`.
        #[arg(long)]
        mask_dir: Option<PathBuf>,
        /// Pipeline config used for rectification.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        report: PathBuf,
    },
    /// Grade every sheet of a corpus.
    Grade {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// JSON report path; `.txt` and `.areas.csv` are written beside it.
        #[arg(long)]
        report: PathBuf,
    },
    /// Pixel metrics of predicted masks against ground-truth masks.
    Metrics {
        #[arg(long)]
        pred_dir: PathBuf,
        #[arg(long)]
        gt_dir: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Dilate ground truth by this many pixels before scoring.
        #[arg(long, default_value_t = 0)]
        dilation: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Oracle,
    Hough,
    Lsd,
    External,
}

fn parse_size(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    let w: usize = w.parse().map_err(|_| format!("bad width {w:?}"))?;
    let h: usize = h.parse().map_err(|_| format!("bad height {h:?}"))?;
    if w == 0 || h == 0 {
        return Err("size must be positive".into());
    }
    Ok((w, h))
}

/// Failures split by exit status.
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::Config(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn run(cmd: Command) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Generate { count, seed, distort, out } => {
            let d = DistortionSpec::preset(&distort)
                .ok_or_else(|| Failure::Usage(format!("unknown distortion preset {distort:?}")))?
                .with_seed(seed);
            let spec = SheetSpec { seed, ..SheetSpec::default() };
            let manifest = generate_corpus(count, &spec, &d, &out)?;
            println!("wrote {} samples to {}", manifest.entries.len(), out.display());
        }
        Command::Rectify { image, border_mask, template_size: (w, h), out, margin, thickness } => {
            if 2 * margin >= w.min(h) {
                return Err(Failure::Usage("margin leaves no room inside the template".into()));
            }
            let photo = GrayImage::load_pgm(&image)?;
            let mask = BitMask::load_pgm(&border_mask)?;
            let quad = extract_quad(&mask, &Default::default()).map_err(Error::from)?;
            let r = rectify(&photo, &quad, w, h, margin, thickness)?;
            r.image.store_pgm(&out)?;
            print!("{}", r.homography.to_text());
        }
        Command::Detect { corpus, method, max_gap, min_length, mask_dir, config, report } => {
            let cell = match method {
                Method::Oracle => SegmenterChoice::Oracle,
                Method::Hough => SegmenterChoice::Hough(HoughParams {
                    max_gap: max_gap.unwrap_or(HoughParams::default().max_gap),
                    ..HoughParams::default()
                }),
                Method::Lsd => SegmenterChoice::Lsd(LsdParams {
                    min_length: min_length.unwrap_or(LsdParams::default().min_length),
                    ..LsdParams::default()
                }),
                Method::External => SegmenterChoice::External(
                    mask_dir.ok_or_else(|| Failure::Usage("--method external needs --mask-dir".into()))?,
                ),
            };
            let cfg = match config {
                Some(p) => PipelineConfig::load(p)?,
                None => PipelineConfig::default(),
            };
            let corpus = Corpus::open(&corpus)?;
            let rows = evaluate_detection(&corpus, &[cell], &cfg)?;
            let csv = rows_to_csv(&rows);
            write_text(&report, &csv)?;
            print!("{csv}");
        }
        Command::Grade { corpus, config, report } => {
            let cfg = PipelineConfig::load(config)?;
            let corpus = Corpus::open(&corpus)?;
            let (summary, sheets) = evaluate_grading(&corpus, &cfg)?;
            write_reports(&report, &summary, &sheets)?;
            print!("{}", summary.to_table());
        }
        Command::Metrics { pred_dir, gt_dir, report, dilation } => {
            let (per, total) = score_mask_dirs(&pred_dir, &gt_dir, dilation)?;
            let csv = metrics_csv(&per, &total);
            write_text(&report, &csv)?;
            print!("{csv}");
        }
    }
    Ok(())
}

fn metrics_csv(per: &[(String, PixelMetrics)], total: &PixelMetrics) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["file", "tp", "fp", "fn", "tn", "recall", "precision", "accuracy"])
        .expect("in-memory write");
    for (name, m) in per.iter().map(|(n, m)| (n.as_str(), m)).chain([("total", total)]) {
        w.write_record([
            name.to_string(),
            m.tp.to_string(),
            m.fp.to_string(),
            m.fn_.to_string(),
            m.tn.to_string(),
            format!("{:.6}", m.recall),
            format!("{:.6}", m.precision),
            format!("{:.6}", m.accuracy),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv of UTF-8 fields")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
