use std::fs;
use std::path::{Path, PathBuf};

use crate::compare::{
    align_by_landmarks, blend, eye_size_ratio, feature_vector, landmark_similarity,
    mean_asymmetry, side_by_side, asymmetry_map, BlendMode, LandmarkSet, LEFT_EYE, RIGHT_EYE,
};
use crate::geometry::{mirror_policy, resample_into, PortraitKind, SimilarityTransform, DEFAULT_FILL};
use crate::multiscale::wavelet_filter;
use crate::raster::{load_pnm, save_pnm, to_grayscale, Raster};
use crate::restore::{restore, InkPolarity, Neighborhood, RestoreParams};

use super::config::{ModeName, PipelineConfig, PolarityName, Step};
use super::report::{join_floats, Report};
use super::CliError;

/// An image in the working set with what is known about it.
#[derive(Debug, Clone)]
pub struct WorkingImage {
    pub raster: Raster,
    pub landmarks: Option<LandmarkSet>,
    pub kind: Option<PortraitKind>,
}

/// Everything a finished pipeline produced.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub images: Vec<WorkingImage>,
    pub report: Report,
    pub written: Vec<PathBuf>,
    pub report_path: PathBuf,
}

pub fn read_raster(path: &Path) -> Result<Raster, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    load_pnm(&bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_landmarks(path: &Path) -> Result<LandmarkSet, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    LandmarkSet::parse(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_raster(path: &Path, img: &Raster, binary: bool) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, save_pnm(img, binary)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Loads a pipeline file and validates it; nothing is written on failure.
pub fn load_config(path: &Path) -> Result<PipelineConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    PipelineConfig::parse(&text)
}

fn stage(step: usize, name: &str, e: crate::Error) -> CliError {
    CliError::Stage {
        step,
        name: name.to_string(),
        source: e,
    }
}

fn targets(explicit: Option<usize>, len: usize) -> Vec<usize> {
    match explicit {
        Some(t) => vec![t],
        None => (0..len).collect(),
    }
}

/// Executes `config`, resolving relative paths against `base_dir`.
/// `report_override` replaces the configured report path.
pub fn run_pipeline(
    config: &PipelineConfig,
    base_dir: &Path,
    report_override: Option<&Path>,
) -> Result<PipelineOutcome, CliError> {
    let resolve = |p: &str| base_dir.join(p);
    let mut report = Report::new();
    let mut written = Vec::new();

    let mut images = Vec::with_capacity(config.inputs.len());
    for (i, input) in config.inputs.iter().enumerate() {
        let raster = read_raster(&resolve(&input.path))?;
        let landmarks = match &input.landmarks {
            Some(p) => Some(read_landmarks(&resolve(p))?),
            None => None,
        };
        report.push(format!("input.{i}.path"), &input.path);
        report.push(format!("input.{i}.size"), format!("{}x{}x{}", raster.width(), raster.height(), raster.channels()));
        images.push(WorkingImage {
            raster,
            landmarks,
            kind: input.kind.map(Into::into),
        });
    }

    let mut last_similarity = None;
    for (n, spanned) in config.steps.iter().enumerate() {
        let step_no = n + 1;
        let step = spanned.get_ref();
        let name = step.name();
        let key = |k: &str| format!("step.{step_no}.{k}");
        report.push(key("kind"), name);
        let mut step_output: Option<(&str, Raster)> = None;

        match step {
            Step::Restore(s) => {
                let params = RestoreParams {
                    threshold: s.threshold,
                    polarity: match s.polarity {
                        PolarityName::Darker => InkPolarity::Darker,
                        PolarityName::Lighter => InkPolarity::Lighter,
                    },
                    max_passes: s.max_passes,
                    neighborhood: if s.neighborhood == 4 { Neighborhood::Four } else { Neighborhood::Eight },
                };
                for t in targets(s.target, images.len()) {
                    let out = restore(&images[t].raster, &params).map_err(|e| stage(step_no, name, e))?;
                    let d = out.diagnostics;
                    report.push(key(&format!("image.{t}.masked_before")), d.masked_before);
                    report.push(key(&format!("image.{t}.masked_after")), d.masked_after);
                    report.push(key(&format!("image.{t}.passes_used")), d.passes_used);
                    images[t].raster = out.image;
                }
                if let (Some(path), Some(t)) = (&s.output, s.target.or((images.len() == 1).then_some(0))) {
                    step_output = Some((path, images[t].raster.clone()));
                }
            }
            Step::Wavelet(s) => {
                let spec = s.filter_spec();
                for t in targets(s.target, images.len()) {
                    images[t].raster =
                        wavelet_filter(&images[t].raster, s.levels, &spec).map_err(|e| stage(step_no, name, e))?;
                }
                report.push(key("levels"), s.levels);
                report.push(key("gains"), join_floats(&spec.gains));
                report.push(key("thresholds"), join_floats(&spec.soft_thresholds));
                if let (Some(path), Some(t)) = (&s.output, s.target.or((images.len() == 1).then_some(0))) {
                    step_output = Some((path, images[t].raster.clone()));
                }
            }
            Step::Grayscale(s) => {
                for t in targets(s.target, images.len()) {
                    images[t].raster = to_grayscale(&images[t].raster);
                }
                if let (Some(path), Some(t)) = (&s.output, s.target.or((images.len() == 1).then_some(0))) {
                    step_output = Some((path, images[t].raster.clone()));
                }
            }
            Step::Transform(s) => {
                let fill = s.fill.unwrap_or(DEFAULT_FILL);
                if s.paired() {
                    let target = s.target.unwrap_or(1);
                    let reference = s.reference.unwrap_or(0);
                    let (t, frame) = if s.mirror_policy {
                        let (a, b) = (images[reference].kind, images[target].kind);
                        let flip = mirror_policy(a.expect("validated"), b.expect("validated"));
                        report.push(key("mirror_policy"), flip);
                        let t = if flip { SimilarityTransform::reflection() } else { SimilarityTransform::IDENTITY };
                        (t, images[target].raster.dims())
                    } else {
                        let src = images[target].landmarks.as_ref().expect("validated");
                        let dst = images[reference].landmarks.as_ref().expect("validated");
                        let fit = align_by_landmarks(src, dst, s.allow_reflection).map_err(|e| stage(step_no, name, e))?;
                        report.push(key("residual_rms"), fit.residual_rms);
                        let (w, h) = images[target].raster.dims();
                        (fit.transform_for(w, h), images[reference].raster.dims())
                    };
                    push_transform(&mut report, &key, &t);
                    apply_to(&mut images[target], &t, fill, frame).map_err(|e| stage(step_no, name, e))?;
                    if let Some(path) = &s.output {
                        step_output = Some((path, images[target].raster.clone()));
                    }
                } else {
                    let t = SimilarityTransform {
                        reflect: s.reflect.unwrap_or(false),
                        scale: s.scale.unwrap_or(1.0),
                        rotation_deg: s.rotation_deg.unwrap_or(0.0),
                        dx: s.dx.unwrap_or(0.0),
                        dy: s.dy.unwrap_or(0.0),
                    };
                    push_transform(&mut report, &key, &t);
                    for i in targets(s.target, images.len()) {
                        let frame = images[i].raster.dims();
                        apply_to(&mut images[i], &t, fill, frame).map_err(|e| stage(step_no, name, e))?;
                    }
                    if let (Some(path), Some(t)) = (&s.output, s.target.or((images.len() == 1).then_some(0))) {
                        step_output = Some((path, images[t].raster.clone()));
                    }
                }
            }
            Step::Blend(s) => {
                let t = if s.align {
                    let src = images[s.overlay].landmarks.as_ref().expect("validated");
                    let dst = images[s.base].landmarks.as_ref().expect("validated");
                    let fit = align_by_landmarks(src, dst, false).map_err(|e| stage(step_no, name, e))?;
                    report.push(key("residual_rms"), fit.residual_rms);
                    let (w, h) = images[s.overlay].raster.dims();
                    fit.transform_for(w, h)
                } else {
                    SimilarityTransform {
                        reflect: s.reflect,
                        scale: s.scale,
                        rotation_deg: s.rotation_deg,
                        dx: s.dx,
                        dy: s.dy,
                    }
                };
                push_transform(&mut report, &key, &t);
                let mode = match s.mode {
                    ModeName::Normal => BlendMode::Normal,
                    ModeName::Multiply => BlendMode::Multiply,
                };
                report.push(key("alpha"), s.alpha);
                report.push(key("mode"), if mode == BlendMode::Normal { "normal" } else { "multiply" });
                let merged = blend(&images[s.base].raster, &images[s.overlay].raster, &t, s.alpha, mode)
                    .map_err(|e| stage(step_no, name, e))?;
                let keep = WorkingImage {
                    raster: merged,
                    landmarks: images[s.base].landmarks.clone(),
                    kind: images[s.base].kind,
                };
                merge_slots(&mut images, s.base, s.overlay, keep);
                if let Some(path) = &s.output {
                    step_output = Some((path, images[s.base.min(s.overlay)].raster.clone()));
                }
            }
            Step::SideBySide(s) => {
                let canvas = side_by_side(&images[s.left].raster, &images[s.right].raster, s.gutter, s.gutter_value)
                    .map_err(|e| stage(step_no, name, e))?;
                report.push(key("size"), format!("{}x{}", canvas.width(), canvas.height()));
                let keep = WorkingImage {
                    raster: canvas,
                    landmarks: None,
                    kind: None,
                };
                merge_slots(&mut images, s.left, s.right, keep);
                if let Some(path) = &s.output {
                    step_output = Some((path, images[s.left.min(s.right)].raster.clone()));
                }
            }
            Step::FeatureCompare(s) => {
                let la = images[s.a].landmarks.as_ref().expect("validated");
                let lb = images[s.b].landmarks.as_ref().expect("validated");
                let va = feature_vector(la).map_err(|e| stage(step_no, name, e))?;
                let vb = feature_vector(lb).map_err(|e| stage(step_no, name, e))?;
                let score = landmark_similarity(&va, &vb);
                report.push(key("a.features"), join_floats(&va.0));
                report.push(key("b.features"), join_floats(&vb.0));
                report.push(key("similarity"), score);
                for (tag, lm) in [("a", la), ("b", lb)] {
                    if let Ok(r) = eye_size_ratio(lm) {
                        report.push(key(&format!("{tag}.eye_ratio")), r);
                    }
                }
                last_similarity = Some(score);
            }
            Step::Asymmetry(s) => {
                let img = &images[s.target];
                let gray = to_grayscale(&img.raster);
                let axis = s.axis_x.unwrap_or_else(|| default_axis(img));
                let map = asymmetry_map(&gray, axis).map_err(|e| stage(step_no, name, e))?;
                report.push(key("axis_x"), axis);
                report.push(
                    key("mean_asymmetry"),
                    mean_asymmetry(&gray, axis).map_err(|e| stage(step_no, name, e))?,
                );
                match &s.output {
                    Some(path) => step_output = Some((path, map)),
                    None => {
                        let slot = &mut images[s.target];
                        slot.raster = map;
                    }
                }
            }
        }

        if let Some((path, raster)) = step_output {
            let full = resolve(path);
            write_raster(&full, &raster, config.binary)?;
            report.push(key("output"), path);
            written.push(full);
        }
    }

    for (i, (path, img)) in config.outputs.iter().zip(&images).enumerate() {
        let full = resolve(path);
        write_raster(&full, &img.raster, config.binary)?;
        report.push(format!("output.{i}.path"), path);
        report.push(format!("output.{i}.size"), format!("{}x{}x{}", img.raster.width(), img.raster.height(), img.raster.channels()));
        written.push(full);
    }

    report.summary("steps", config.steps.len());
    report.summary("outputs", config.outputs.len());
    if let Some(score) = last_similarity {
        report.summary("similarity", score);
    }
    report.summary("status", "ok");

    let report_path = match (report_override, &config.report) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => resolve(p),
        (None, None) => {
            let mut p = resolve(&config.outputs[0]).into_os_string();
            p.push(".report");
            PathBuf::from(p)
        }
    };
    if let Some(parent) = report_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    fs::write(&report_path, report.render()).map_err(|e| CliError::Io(format!("{}: {e}", report_path.display())))?;

    Ok(PipelineOutcome {
        images,
        report,
        written,
        report_path,
    })
}

fn push_transform(report: &mut Report, key: &impl Fn(&str) -> String, t: &SimilarityTransform) {
    report.push(key("reflect"), t.reflect);
    report.push(key("scale"), t.scale);
    report.push(key("rotation_deg"), t.rotation_deg);
    report.push(key("dx"), t.dx);
    report.push(key("dy"), t.dy);
}

/// Resamples the image (and moves its landmarks) into a `frame`-sized output.
fn apply_to(
    img: &mut WorkingImage,
    t: &SimilarityTransform,
    fill: f64,
    frame: (usize, usize),
) -> crate::Result<()> {
    let (w, h) = img.raster.dims();
    let (out, _) = resample_into(&img.raster, t, fill, frame.0, frame.1)?;
    img.landmarks = img.landmarks.as_ref().map(|lm| lm.transformed(t, w, h));
    img.raster = out;
    Ok(())
}

fn merge_slots(images: &mut Vec<WorkingImage>, a: usize, b: usize, keep: WorkingImage) {
    let (lo, hi) = (a.min(b), a.max(b));
    images.remove(hi);
    images[lo] = keep;
}

/// Eye midpoint column when landmarks are known, else the center column.
fn default_axis(img: &WorkingImage) -> usize {
    let w = img.raster.width();
    let from_eyes = img.landmarks.as_ref().and_then(|lm| {
        let (l, r) = (lm.point(LEFT_EYE)?, lm.point(RIGHT_EYE)?);
        let mid = ((l.x + r.x) / 2.0).round();
        (mid >= 0.0 && mid < w as f64).then_some(mid as usize)
    });
    from_eyes.unwrap_or(w / 2)
}
