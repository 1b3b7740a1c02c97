//! Command-line surface: single-step commands and the pipeline runner.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 a processing
//! step failed, 4 I/O failure (including unreadable input images or
//! landmark files).

pub mod config;
pub mod pipeline;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::compare::{
    asymmetry_map, blend, eye_size_ratio, feature_vector, landmark_similarity, mean_asymmetry,
    side_by_side, BlendMode, DEFAULT_ALPHA,
};
use crate::geometry::{apply_transform, SimilarityTransform, DEFAULT_FILL};
use crate::multiscale::{atrous_decompose, wavelet_filter, FilterSpec, DEFAULT_LEVELS};
use crate::raster::to_grayscale;
use crate::restore::{restore, InkPolarity, Neighborhood, RestoreParams, DEFAULT_MAX_PASSES, DEFAULT_THRESHOLD};

pub use config::PipelineConfig;
pub use pipeline::{load_config, run_pipeline, PipelineOutcome};
pub use report::Report;

use pipeline::{read_landmarks, read_raster, write_raster};
use report::join_floats;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("step {step} ({name}) failed: {source}")]
    Stage {
        step: usize,
        name: String,
        #[source]
        source: crate::Error,
    },
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Stage { .. } => 3,
            CliError::Io(_) => 4,
        }
    }
}

fn module(name: &str) -> impl FnOnce(crate::Error) -> CliError + '_ {
    move |source| CliError::Stage {
        step: 1,
        name: name.to_string(),
        source,
    }
}

#[derive(Debug, Parser)]
#[command(name = "sfumato", version, about = "Ink removal, wavelet filtering and portrait comparison")]
pub struct Cli {
    /// Worker threads for data-parallel steps (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Reserved; no step is stochastic, so the value is ignored.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the machine-readable key=value report here.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Write plain-text P2/P3 instead of binary P5/P6.
    #[arg(long, global = true)]
    pub ascii: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolarityArg {
    Darker,
    Lighter,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Normal,
    Multiply,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Flip about the vertical center line (applied first).
    #[arg(long)]
    pub reflect: bool,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Counterclockwise rotation in degrees about the image center.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub rotation: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub dx: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub dy: f64,
}

impl TransformArgs {
    fn transform(&self) -> SimilarityTransform {
        SimilarityTransform {
            reflect: self.reflect,
            scale: self.scale,
            rotation_deg: self.rotation,
            dx: self.dx,
            dy: self.dy,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Remove ink by threshold masking and neighbour inpainting.
    Restore {
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long, value_enum, default_value_t = PolarityArg::Darker)]
        polarity: PolarityArg,
        /// 4 or 8.
        #[arg(long, default_value_t = 8, value_parser = parse_neighborhood)]
        neighborhood: u8,
        #[arg(long, default_value_t = DEFAULT_MAX_PASSES)]
        max_passes: usize,
        input: PathBuf,
        output: PathBuf,
    },
    /// À trous wavelet filter of a gray image.
    Wavelet {
        #[arg(long, default_value_t = DEFAULT_LEVELS)]
        levels: usize,
        /// Comma-separated per-level gains (default all 1).
        #[arg(long, value_delimiter = ',')]
        gains: Option<Vec<f64>>,
        /// Comma-separated per-level soft thresholds (default all 0).
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<f64>>,
        /// Also dump detail planes (offset-encoded) and the residual here.
        #[arg(long)]
        dump_planes: Option<PathBuf>,
        input: PathBuf,
        output: PathBuf,
    },
    /// Reflect, scale, rotate and translate an image.
    Transform {
        #[command(flatten)]
        geometry: TransformArgs,
        /// Intensity for pixels with no source.
        #[arg(long, default_value_t = DEFAULT_FILL)]
        fill: f64,
        input: PathBuf,
        output: PathBuf,
    },
    /// Merge an overlay onto a base image.
    Blend {
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Normal)]
        mode: ModeArg,
        #[command(flatten)]
        geometry: TransformArgs,
        base: PathBuf,
        overlay: PathBuf,
        output: PathBuf,
    },
    /// Place two images side by side.
    Sbs {
        #[arg(long, default_value_t = config::DEFAULT_GUTTER)]
        gutter: usize,
        #[arg(long, default_value_t = 1.0)]
        gutter_value: f64,
        left: PathBuf,
        right: PathBuf,
        output: PathBuf,
    },
    /// Compare two landmark files.
    Compare { a: PathBuf, b: PathBuf },
    /// Bilateral asymmetry map about a column.
    Asym {
        /// Symmetry column (default: center column).
        #[arg(long)]
        axis: Option<usize>,
        input: PathBuf,
        output: PathBuf,
    },
    /// Run a pipeline configuration file.
    Run { config: PathBuf },
}

fn parse_neighborhood(s: &str) -> Result<u8, String> {
    match s {
        "4" => Ok(4),
        "8" => Ok(8),
        _ => Err(format!("`{s}` is not 4 or 8")),
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    // buffered so the work can run inside the pool
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let result = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool.install(|| execute(&cli, &mut out, &mut err)),
        Err(e) => Err(CliError::Usage(format!("thread pool: {e}"))),
    };
    let _ = stdout.write_all(&out);
    let _ = stderr.write_all(&err);
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn write_report(path: &Option<PathBuf>, report: &Report) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, report.render()).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn execute(cli: &Cli, stdout: &mut Vec<u8>, stderr: &mut Vec<u8>) -> Result<(), CliError> {
    let binary = !cli.ascii;
    let mut report = Report::new();
    let out_err = |e: std::io::Error| CliError::Io(e.to_string());
    match &cli.command {
        Command::Restore {
            threshold,
            polarity,
            neighborhood,
            max_passes,
            input,
            output,
        } => {
            let params = RestoreParams {
                threshold: *threshold,
                polarity: match polarity {
                    PolarityArg::Darker => InkPolarity::Darker,
                    PolarityArg::Lighter => InkPolarity::Lighter,
                },
                max_passes: *max_passes,
                neighborhood: if *neighborhood == 4 { Neighborhood::Four } else { Neighborhood::Eight },
            };
            let img = read_raster(input)?;
            let out = restore(&img, &params).map_err(module("restore"))?;
            write!(stderr, "{}", out.diagnostics).map_err(out_err)?;
            write_raster(output, &out.image, binary)?;
            let d = out.diagnostics;
            report.push("masked_before", d.masked_before);
            report.push("masked_after", d.masked_after);
            report.push("passes_used", d.passes_used);
            writeln!(
                stdout,
                "restored {} of {} ink pixels in {} passes -> {}",
                d.masked_before - d.masked_after,
                d.masked_before,
                d.passes_used,
                output.display()
            )
            .map_err(out_err)?;
        }
        Command::Wavelet {
            levels,
            gains,
            thresholds,
            dump_planes,
            input,
            output,
        } => {
            let neutral = FilterSpec::neutral(*levels);
            let spec = FilterSpec {
                gains: gains.clone().unwrap_or(neutral.gains),
                soft_thresholds: thresholds.clone().unwrap_or(neutral.soft_thresholds),
            };
            let img = read_raster(input)?;
            let out = wavelet_filter(&img, *levels, &spec).map_err(module("wavelet"))?;
            if let Some(dir) = dump_planes {
                let stack = atrous_decompose(&img, *levels).map_err(module("wavelet"))?;
                for (j, d) in stack.details.iter().enumerate() {
                    let r = d.to_offset_raster().map_err(module("wavelet"))?;
                    write_raster(&dir.join(format!("detail_{}.pgm", j + 1)), &r, binary)?;
                }
                let r = stack.residual.to_raster().map_err(module("wavelet"))?;
                write_raster(&dir.join("residual.pgm"), &r, binary)?;
            }
            write_raster(output, &out, binary)?;
            report.push("levels", levels);
            report.push("gains", join_floats(&spec.gains));
            report.push("thresholds", join_floats(&spec.soft_thresholds));
            writeln!(stdout, "filtered {} levels -> {}", levels, output.display()).map_err(out_err)?;
        }
        Command::Transform {
            geometry,
            fill,
            input,
            output,
        } => {
            let img = read_raster(input)?;
            let t = geometry.transform();
            let out = apply_transform(&img, &t, *fill).map_err(module("transform"))?;
            write_raster(output, &out, binary)?;
            report.push("reflect", t.reflect);
            report.push("scale", t.scale);
            report.push("rotation_deg", t.rotation_deg);
            report.push("dx", t.dx);
            report.push("dy", t.dy);
            writeln!(stdout, "transformed -> {}", output.display()).map_err(out_err)?;
        }
        Command::Blend {
            alpha,
            mode,
            geometry,
            base,
            overlay,
            output,
        } => {
            let b = read_raster(base)?;
            let o = read_raster(overlay)?;
            let mode = match mode {
                ModeArg::Normal => BlendMode::Normal,
                ModeArg::Multiply => BlendMode::Multiply,
            };
            let out = blend(&b, &o, &geometry.transform(), *alpha, mode).map_err(module("blend"))?;
            write_raster(output, &out, binary)?;
            report.push("alpha", alpha);
            writeln!(stdout, "blended -> {}", output.display()).map_err(out_err)?;
        }
        Command::Sbs {
            gutter,
            gutter_value,
            left,
            right,
            output,
        } => {
            let a = read_raster(left)?;
            let b = read_raster(right)?;
            let out = side_by_side(&a, &b, *gutter, *gutter_value).map_err(module("sbs"))?;
            write_raster(output, &out, binary)?;
            report.push("size", format!("{}x{}", out.width(), out.height()));
            writeln!(stdout, "composed {}x{} -> {}", out.width(), out.height(), output.display())
                .map_err(out_err)?;
        }
        Command::Compare { a, b } => {
            let la = read_landmarks(a)?;
            let lb = read_landmarks(b)?;
            let va = feature_vector(&la).map_err(module("compare"))?;
            let vb = feature_vector(&lb).map_err(module("compare"))?;
            let score = landmark_similarity(&va, &vb);
            report.push("a.features", join_floats(&va.0));
            report.push("b.features", join_floats(&vb.0));
            report.push("similarity", score);
            for (tag, lm) in [("a", &la), ("b", &lb)] {
                if let Ok(r) = eye_size_ratio(lm) {
                    report.push(format!("{tag}.eye_ratio"), r);
                }
            }
            write!(stdout, "{}", report.render()).map_err(out_err)?;
        }
        Command::Asym { axis, input, output } => {
            let img = to_grayscale(&read_raster(input)?);
            let axis = axis.unwrap_or(img.width() / 2);
            let map = asymmetry_map(&img, axis).map_err(module("asym"))?;
            let mean = mean_asymmetry(&img, axis).map_err(module("asym"))?;
            write_raster(output, &map, binary)?;
            report.push("axis_x", axis);
            report.push("mean_asymmetry", mean);
            writeln!(stdout, "mean asymmetry about column {axis}: {mean}").map_err(out_err)?;
        }
        Command::Run { config } => {
            let cfg = load_config(config)?;
            let base = config.parent().unwrap_or(Path::new("."));
            let outcome = run_pipeline(&cfg, base, cli.report.as_deref())?;
            writeln!(
                stdout,
                "ran {} step(s); wrote {} file(s); report {}",
                cfg.steps.len(),
                outcome.written.len(),
                outcome.report_path.display()
            )
            .map_err(out_err)?;
            if let Some(score) = outcome.report.get("similarity") {
                writeln!(stdout, "landmark similarity {score}").map_err(out_err)?;
            }
            return Ok(());
        }
    }
    write_report(&cli.report, &report)
}
