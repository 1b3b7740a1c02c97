//! Pipeline configuration: a TOML document with `[[inputs]]`, `outputs`
//! and an ordered list of `[[steps]]` tables, each tagged by `kind`.
//!
//! Images live in an ordered working set, indexed from 0 in input order.
//! Merging steps (`blend`, `side_by_side`) replace their two operands with
//! the result at the lower index. Validation replays the whole plan on
//! image counts, landmark availability and portrait kinds before any file
//! is read.

use std::ops::Range;

use serde::Deserialize;
use toml::Spanned;

use crate::geometry::PortraitKind;
use crate::multiscale::{FilterSpec, DEFAULT_LEVELS};
use crate::restore::{DEFAULT_MAX_PASSES, DEFAULT_THRESHOLD};

use super::CliError;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub inputs: Vec<InputSpec>,
    #[serde(default)]
    pub outputs: Vec<String>,
    /// Report path; defaults to the first output with `.report` appended.
    pub report: Option<String>,
    /// Write P5/P6 (true) or P2/P3 (false).
    #[serde(default = "default_true")]
    pub binary: bool,
    #[serde(default)]
    pub steps: Vec<Spanned<Step>>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub path: String,
    pub landmarks: Option<String>,
    pub kind: Option<KindName>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum KindName {
    SelfPortrait,
    Portrait,
}

impl From<KindName> for PortraitKind {
    fn from(k: KindName) -> Self {
        match k {
            KindName::SelfPortrait => PortraitKind::SelfPortrait,
            KindName::Portrait => PortraitKind::Portrait,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum PolarityName {
    #[default]
    Darker,
    Lighter,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    #[default]
    Normal,
    Multiply,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    Restore(RestoreStep),
    Wavelet(WaveletStep),
    Grayscale(GrayscaleStep),
    Transform(TransformStep),
    Blend(BlendStep),
    SideBySide(SideBySideStep),
    FeatureCompare(CompareStep),
    Asymmetry(AsymmetryStep),
}

impl Step {
    pub fn name(&self) -> &'static str {
        match self {
            Step::Restore(_) => "restore",
            Step::Wavelet(_) => "wavelet",
            Step::Grayscale(_) => "grayscale",
            Step::Transform(_) => "transform",
            Step::Blend(_) => "blend",
            Step::SideBySide(_) => "side_by_side",
            Step::FeatureCompare(_) => "feature_compare",
            Step::Asymmetry(_) => "asymmetry",
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RestoreStep {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub polarity: PolarityName,
    #[serde(default = "default_neighborhood")]
    pub neighborhood: u8,
    #[serde(default = "default_max_passes")]
    pub max_passes: usize,
    pub target: Option<usize>,
    pub output: Option<String>,
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}
fn default_neighborhood() -> u8 {
    8
}
fn default_max_passes() -> usize {
    DEFAULT_MAX_PASSES
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WaveletStep {
    #[serde(default = "default_levels")]
    pub levels: usize,
    pub gains: Option<Vec<f64>>,
    pub thresholds: Option<Vec<f64>>,
    pub target: Option<usize>,
    pub output: Option<String>,
}

fn default_levels() -> usize {
    DEFAULT_LEVELS
}

impl WaveletStep {
    pub fn filter_spec(&self) -> FilterSpec {
        let neutral = FilterSpec::neutral(self.levels);
        FilterSpec {
            gains: self.gains.clone().unwrap_or(neutral.gains),
            soft_thresholds: self.thresholds.clone().unwrap_or(neutral.soft_thresholds),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GrayscaleStep {
    pub target: Option<usize>,
    pub output: Option<String>,
}

#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct TransformStep {
    pub reflect: Option<bool>,
    pub scale: Option<f64>,
    pub rotation_deg: Option<f64>,
    pub dx: Option<f64>,
    pub dy: Option<f64>,
    pub fill: Option<f64>,
    /// Reflect `target` iff the portrait kinds of `reference` and `target` differ.
    #[serde(default)]
    pub mirror_policy: bool,
    /// Align `target` onto `reference` by landmarks, resampling into the
    /// reference frame.
    #[serde(default)]
    pub align: bool,
    #[serde(default)]
    pub allow_reflection: bool,
    pub target: Option<usize>,
    pub reference: Option<usize>,
    pub output: Option<String>,
}

impl TransformStep {
    fn has_explicit_geometry(&self) -> bool {
        self.reflect.is_some()
            || self.scale.is_some()
            || self.rotation_deg.is_some()
            || self.dx.is_some()
            || self.dy.is_some()
    }

    /// Default target: every image for explicit transforms, image 1 otherwise.
    pub fn paired(&self) -> bool {
        self.mirror_policy || self.align
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BlendStep {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub mode: ModeName,
    #[serde(default)]
    pub base: usize,
    #[serde(default = "one")]
    pub overlay: usize,
    #[serde(default)]
    pub align: bool,
    #[serde(default)]
    pub reflect: bool,
    #[serde(default = "one_f")]
    pub scale: f64,
    #[serde(default)]
    pub rotation_deg: f64,
    #[serde(default)]
    pub dx: f64,
    #[serde(default)]
    pub dy: f64,
    pub output: Option<String>,
}

fn default_alpha() -> f64 {
    crate::compare::DEFAULT_ALPHA
}
fn one() -> usize {
    1
}
fn one_f() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SideBySideStep {
    #[serde(default = "default_gutter")]
    pub gutter: usize,
    #[serde(default = "one_f")]
    pub gutter_value: f64,
    #[serde(default)]
    pub left: usize,
    #[serde(default = "one")]
    pub right: usize,
    pub output: Option<String>,
}

pub const DEFAULT_GUTTER: usize = 8;

fn default_gutter() -> usize {
    DEFAULT_GUTTER
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CompareStep {
    #[serde(default)]
    pub a: usize,
    #[serde(default = "one")]
    pub b: usize,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AsymmetryStep {
    /// Symmetry column; defaults to the eye midpoint when landmarks are
    /// known, else the center column.
    pub axis_x: Option<usize>,
    #[serde(default)]
    pub target: usize,
    /// When set, the map is written here and the working image is kept;
    /// otherwise the map replaces it.
    pub output: Option<String>,
}

/// Line number (1-based) of byte `offset` in `text`.
fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    landmarks: bool,
    kind: Option<PortraitKind>,
}

struct Checker<'a> {
    text: &'a str,
    slots: Vec<Slot>,
}

impl Checker<'_> {
    fn fail(&self, span: &Range<usize>, step: usize, kind: &str, field: &str, msg: impl AsRef<str>) -> CliError {
        CliError::Config(format!(
            "line {}: step {step} ({kind}): field `{field}`: {}",
            line_of(self.text, span.start),
            msg.as_ref()
        ))
    }

    fn index(&self, span: &Range<usize>, step: usize, kind: &str, field: &str, i: usize) -> Result<(), CliError> {
        if i < self.slots.len() {
            Ok(())
        } else {
            Err(self.fail(
                span,
                step,
                kind,
                field,
                format!("image {i} does not exist ({} in the working set)", self.slots.len()),
            ))
        }
    }

    fn pair(&self, span: &Range<usize>, step: usize, kind: &str, fields: (&str, &str), a: usize, b: usize) -> Result<(), CliError> {
        self.index(span, step, kind, fields.0, a)?;
        self.index(span, step, kind, fields.1, b)?;
        if a == b {
            return Err(self.fail(span, step, kind, fields.1, format!("must differ from `{}`", fields.0)));
        }
        Ok(())
    }

    fn landmarks(&self, span: &Range<usize>, step: usize, kind: &str, field: &str, i: usize) -> Result<(), CliError> {
        if self.slots[i].landmarks {
            Ok(())
        } else {
            Err(self.fail(span, step, kind, field, format!("image {i} has no landmarks at this point")))
        }
    }

    fn unit(&self, span: &Range<usize>, step: usize, kind: &str, field: &str, v: f64) -> Result<(), CliError> {
        if (0.0..=1.0).contains(&v) {
            Ok(())
        } else {
            Err(self.fail(span, step, kind, field, format!("{v} must lie in [0, 1]")))
        }
    }

    fn single_output(&self, span: &Range<usize>, step: usize, kind: &str, target: Option<usize>, output: &Option<String>) -> Result<(), CliError> {
        if output.is_some() && target.is_none() && self.slots.len() > 1 {
            return Err(self.fail(span, step, kind, "output", "needs `target` when several images are in the working set"));
        }
        Ok(())
    }

    fn merge(&mut self, a: usize, b: usize, keep: Slot) {
        let (lo, hi) = (a.min(b), a.max(b));
        self.slots.remove(hi);
        self.slots[lo] = keep;
    }
}

impl PipelineConfig {
    /// Parses and validates; errors carry the offending line and field.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: PipelineConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of(text, s.start));
            match line {
                Some(l) => CliError::Config(format!("line {l}: {}", e.message())),
                None => CliError::Config(e.message().to_string()),
            }
        })?;
        config.validate(text)?;
        Ok(config)
    }

    /// Number of images left after every step.
    pub fn validate(&self, text: &str) -> Result<usize, CliError> {
        if self.inputs.is_empty() {
            return Err(CliError::Config("field `inputs`: at least one input is required".into()));
        }
        let mut ck = Checker {
            text,
            slots: self
                .inputs
                .iter()
                .map(|i| Slot {
                    landmarks: i.landmarks.is_some(),
                    kind: i.kind.map(Into::into),
                })
                .collect(),
        };
        for (n, spanned) in self.steps.iter().enumerate() {
            let step_no = n + 1;
            let span = spanned.span();
            let step = spanned.get_ref();
            let name = step.name();
            match step {
                Step::Restore(s) => {
                    ck.unit(&span, step_no, name, "threshold", s.threshold)?;
                    if s.neighborhood != 4 && s.neighborhood != 8 {
                        return Err(ck.fail(&span, step_no, name, "neighborhood", "must be 4 or 8"));
                    }
                    if s.max_passes == 0 {
                        return Err(ck.fail(&span, step_no, name, "max_passes", "must be at least 1"));
                    }
                    if let Some(t) = s.target {
                        ck.index(&span, step_no, name, "target", t)?;
                    }
                    ck.single_output(&span, step_no, name, s.target, &s.output)?;
                }
                Step::Wavelet(s) => {
                    if s.levels == 0 {
                        return Err(ck.fail(&span, step_no, name, "levels", "must be at least 1"));
                    }
                    s.filter_spec()
                        .validate(s.levels)
                        .map_err(|e| ck.fail(&span, step_no, name, "gains/thresholds", e.to_string()))?;
                    if let Some(t) = s.target {
                        ck.index(&span, step_no, name, "target", t)?;
                    }
                    ck.single_output(&span, step_no, name, s.target, &s.output)?;
                }
                Step::Grayscale(s) => {
                    if let Some(t) = s.target {
                        ck.index(&span, step_no, name, "target", t)?;
                    }
                    ck.single_output(&span, step_no, name, s.target, &s.output)?;
                }
                Step::Transform(s) => {
                    if s.mirror_policy && s.align {
                        return Err(ck.fail(&span, step_no, name, "align", "cannot be combined with `mirror_policy` in one step"));
                    }
                    if s.paired() {
                        if s.has_explicit_geometry() {
                            return Err(ck.fail(&span, step_no, name, "reflect/scale/rotation_deg/dx/dy", "not allowed with `mirror_policy` or `align`"));
                        }
                        let target = s.target.unwrap_or(1);
                        let reference = s.reference.unwrap_or(0);
                        ck.pair(&span, step_no, name, ("reference", "target"), reference, target)?;
                        if s.mirror_policy {
                            for (field, i) in [("reference", reference), ("target", target)] {
                                if ck.slots[i].kind.is_none() {
                                    return Err(ck.fail(&span, step_no, name, field, format!("image {i} has no portrait `kind`")));
                                }
                            }
                        } else {
                            ck.landmarks(&span, step_no, name, "reference", reference)?;
                            ck.landmarks(&span, step_no, name, "target", target)?;
                        }
                    } else {
                        if let Some(scale) = s.scale {
                            if !(scale > 0.0) || !scale.is_finite() {
                                return Err(ck.fail(&span, step_no, name, "scale", "must be positive"));
                            }
                        }
                        if s.reference.is_some() {
                            return Err(ck.fail(&span, step_no, name, "reference", "only used with `mirror_policy` or `align`"));
                        }
                        if let Some(t) = s.target {
                            ck.index(&span, step_no, name, "target", t)?;
                        }
                        ck.single_output(&span, step_no, name, s.target, &s.output)?;
                    }
                    if let Some(fill) = s.fill {
                        ck.unit(&span, step_no, name, "fill", fill)?;
                    }
                }
                Step::Blend(s) => {
                    ck.unit(&span, step_no, name, "alpha", s.alpha)?;
                    ck.pair(&span, step_no, name, ("base", "overlay"), s.base, s.overlay)?;
                    if !(s.scale > 0.0) || !s.scale.is_finite() {
                        return Err(ck.fail(&span, step_no, name, "scale", "must be positive"));
                    }
                    if s.align {
                        ck.landmarks(&span, step_no, name, "base", s.base)?;
                        ck.landmarks(&span, step_no, name, "overlay", s.overlay)?;
                    }
                    let keep = ck.slots[s.base];
                    ck.merge(s.base, s.overlay, keep);
                }
                Step::SideBySide(s) => {
                    ck.unit(&span, step_no, name, "gutter_value", s.gutter_value)?;
                    ck.pair(&span, step_no, name, ("left", "right"), s.left, s.right)?;
                    ck.merge(s.left, s.right, Slot { landmarks: false, kind: None });
                }
                Step::FeatureCompare(s) => {
                    ck.pair(&span, step_no, name, ("a", "b"), s.a, s.b)?;
                    ck.landmarks(&span, step_no, name, "a", s.a)?;
                    ck.landmarks(&span, step_no, name, "b", s.b)?;
                }
                Step::Asymmetry(s) => {
                    ck.index(&span, step_no, name, "target", s.target)?;
                }
            }
        }
        let remaining = ck.slots.len();
        if self.outputs.len() != remaining {
            return Err(CliError::Config(format!(
                "field `outputs`: {} path(s) given but the pipeline ends with {remaining} image(s)",
                self.outputs.len()
            )));
        }
        Ok(remaining)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> String {
        match PipelineConfig::parse(text) {
            Err(CliError::Config(m)) => m,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    const TWO: &str = r#"
outputs = ["out.pgm"]

[[inputs]]
path = "a.pgm"
landmarks = "a.landmarks"
kind = "self_portrait"

[[inputs]]
path = "b.pgm"
landmarks = "b.landmarks"
kind = "portrait"
"#;

    #[test]
    fn empty_pipeline() {
        let c = PipelineConfig::parse("outputs = [\"o.pgm\"]\n[[inputs]]\npath = \"i.pgm\"\n").unwrap();
        assert!(c.steps.is_empty());
        assert!(c.binary);
    }

    #[test]
    fn defaults_follow_module_defaults() {
        let c = PipelineConfig::parse(
            "outputs = [\"o.pgm\"]\n[[inputs]]\npath = \"i.pgm\"\n[[steps]]\nkind = \"restore\"\n[[steps]]\nkind = \"wavelet\"\n",
        )
        .unwrap();
        match c.steps[0].get_ref() {
            Step::Restore(r) => {
                assert_eq!(r.threshold, 0.2);
                assert_eq!(r.neighborhood, 8);
                assert_eq!(r.max_passes, 1024);
                assert_eq!(r.polarity, PolarityName::Darker);
            }
            other => panic!("{other:?}"),
        }
        match c.steps[1].get_ref() {
            Step::Wavelet(w) => assert_eq!(w.filter_spec(), FilterSpec::neutral(4)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn field_errors_name_line_and_field() {
        let m = err("outputs = [\"o.pgm\"]\n[[inputs]]\npath = \"i.pgm\"\n\n[[steps]]\nkind = \"restore\"\nthreshold = 1.5\n");
        assert!(m.contains("line 5") || m.contains("line 6"), "{m}");
        assert!(m.contains("threshold"), "{m}");

        let m = err("outputs = [\"o.pgm\"]\n[[inputs]]\npath = \"i.pgm\"\n[[steps]]\nkind = \"restore\"\nthreshhold = 0.1\n");
        assert!(m.contains("line") && m.contains("threshhold"), "{m}");

        let m = err("outputs = [\"o.pgm\"]\n[[inputs]]\npath = \"i.pgm\"\n[[steps]]\nkind = \"sharpen\"\n");
        assert!(m.contains("sharpen"), "{m}");
    }

    #[test]
    fn output_count_must_match_plan() {
        let m = err(&TWO.replace("outputs = [\"out.pgm\"]", "outputs = []"));
        assert!(m.contains("outputs"), "{m}");
        let merged = format!("{TWO}\n[[steps]]\nkind = \"side_by_side\"\n");
        assert!(PipelineConfig::parse(&merged).is_ok());
    }

    #[test]
    fn landmarks_and_kinds_are_tracked() {
        let ok = format!(
            "{TWO}\n[[steps]]\nkind = \"transform\"\nmirror_policy = true\n[[steps]]\nkind = \"transform\"\nalign = true\n[[steps]]\nkind = \"feature_compare\"\n[[steps]]\nkind = \"side_by_side\"\n"
        );
        assert_eq!(PipelineConfig::parse(&ok).unwrap().steps.len(), 4);

        let lost = format!(
            "{TWO}\n[[steps]]\nkind = \"blend\"\n[[steps]]\nkind = \"feature_compare\"\n"
        );
        // one image left after blending: index 1 no longer exists
        assert!(err(&lost.replace("[\"out.pgm\"]", "[\"o.pgm\"]")).contains("image 1"));

        let no_kind = TWO.replace("kind = \"portrait\"\n", "");
        let m = err(&format!("{no_kind}\n[[steps]]\nkind = \"transform\"\nmirror_policy = true\n"));
        assert!(m.contains("portrait `kind`"), "{m}");
    }

    #[test]
    fn paired_transform_rejects_explicit_geometry() {
        let m = err(&format!("{TWO}\n[[steps]]\nkind = \"transform\"\nalign = true\nrotation_deg = 3.0\n"));
        assert!(m.contains("rotation_deg"), "{m}");
        let m = err(&format!("{TWO}\n[[steps]]\nkind = \"transform\"\nalign = true\nmirror_policy = true\n"));
        assert!(m.contains("mirror_policy"), "{m}");
    }

    #[test]
    fn step_output_needs_single_target() {
        let two_out = TWO.replace("[\"out.pgm\"]", "[\"x.pgm\", \"y.pgm\"]");
        let m = err(&format!("{two_out}\n[[steps]]\nkind = \"grayscale\"\noutput = \"g.pgm\"\n"));
        assert!(m.contains("output"), "{m}");
        assert!(PipelineConfig::parse(&format!(
            "{two_out}\n[[steps]]\nkind = \"grayscale\"\ntarget = 0\noutput = \"g.pgm\"\n"
        ))
        .is_ok());
    }

    #[test]
    fn line_numbers() {
        assert_eq!(line_of("a\nb\nc", 0), 1);
        assert_eq!(line_of("a\nb\nc", 2), 2);
        assert_eq!(line_of("a\nb\nc", 4), 3);
    }
}
