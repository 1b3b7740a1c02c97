use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{Point, SimilarityTransform};

pub const LEFT_EYE: &str = "left_eye";
pub const RIGHT_EYE: &str = "right_eye";
pub const NOSE_TIP: &str = "nose_tip";
pub const MOUTH_CENTER: &str = "mouth_center";
pub const LEFT_EYE_WIDTH: &str = "left_eye_width";
pub const RIGHT_EYE_WIDTH: &str = "right_eye_width";

/// The four points every feature vector is built from, in canonical order.
pub const REQUIRED: [&str; 4] = [LEFT_EYE, RIGHT_EYE, NOSE_TIP, MOUTH_CENTER];

/// Named facial points in pixel coordinates plus optional scalar
/// measurements (eye widths). Names are treated as anatomical labels:
/// transforming the set moves the points but never renames them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LandmarkSet {
    points: BTreeMap<String, Point>,
    measurements: BTreeMap<String, f64>,
}

impl LandmarkSet {
    /// A set with just the four required points.
    pub fn new(left_eye: Point, right_eye: Point, nose_tip: Point, mouth_center: Point) -> Result<Self> {
        let mut set = Self::default();
        set.insert_point(LEFT_EYE, left_eye);
        set.insert_point(RIGHT_EYE, right_eye);
        set.insert_point(NOSE_TIP, nose_tip);
        set.insert_point(MOUTH_CENTER, mouth_center);
        set.validate()?;
        Ok(set)
    }

    pub fn with_eye_widths(mut self, left: f64, right: f64) -> Self {
        self.measurements.insert(LEFT_EYE_WIDTH.into(), left);
        self.measurements.insert(RIGHT_EYE_WIDTH.into(), right);
        self
    }

    pub fn insert_point(&mut self, name: &str, p: Point) {
        self.points.insert(name.to_string(), p);
    }

    pub fn insert_measurement(&mut self, name: &str, value: f64) {
        self.measurements.insert(name.to_string(), value);
    }

    pub fn point(&self, name: &str) -> Option<Point> {
        self.points.get(name).copied()
    }

    pub fn measurement(&self, name: &str) -> Option<f64> {
        self.measurements.get(name).copied()
    }

    pub fn points(&self) -> impl Iterator<Item = (&str, Point)> {
        self.points.iter().map(|(k, v)| (k.as_str(), *v))
    }

    fn required(&self, name: &str) -> Result<Point> {
        self.point(name)
            .ok_or_else(|| Error::DegenerateLandmarks(format!("missing required landmark `{name}`")))
    }

    /// The four required points in canonical order.
    pub fn core_points(&self) -> Result<[Point; 4]> {
        Ok([
            self.required(LEFT_EYE)?,
            self.required(RIGHT_EYE)?,
            self.required(NOSE_TIP)?,
            self.required(MOUTH_CENTER)?,
        ])
    }

    pub fn interocular(&self) -> Result<f64> {
        let [l, r, ..] = self.core_points()?;
        Ok(l.distance(r))
    }

    pub fn validate(&self) -> Result<()> {
        if self.interocular()? > 0.0 {
            Ok(())
        } else {
            Err(Error::DegenerateLandmarks("interocular distance is zero".into()))
        }
    }

    /// Moves every point as `t` would move the pixels of a `width × height`
    /// image. Lengths are multiplied by the scale.
    pub fn transformed(&self, t: &SimilarityTransform, width: usize, height: usize) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|(k, &p)| (k.clone(), t.apply_point(p, width, height)))
                .collect(),
            measurements: self
                .measurements
                .iter()
                .map(|(k, &v)| (k.clone(), v * t.scale))
                .collect(),
        }
    }

    /// Applies `f` to every point.
    pub fn map_points(&self, mut f: impl FnMut(Point) -> Point) -> Self {
        Self {
            points: self.points.iter().map(|(k, &p)| (k.clone(), f(p))).collect(),
            measurements: self.measurements.clone(),
        }
    }

    /// Exchanges every `left_*` entry with its `right_*` counterpart.
    pub fn swap_sides(&self) -> Self {
        fn swap(name: &str) -> String {
            if let Some(rest) = name.strip_prefix("left_") {
                format!("right_{rest}")
            } else if let Some(rest) = name.strip_prefix("right_") {
                format!("left_{rest}")
            } else {
                name.to_string()
            }
        }
        Self {
            points: self.points.iter().map(|(k, &p)| (swap(k), p)).collect(),
            measurements: self.measurements.iter().map(|(k, &v)| (swap(k), v)).collect(),
        }
    }

    /// Parses the sidecar format: `name x y` or `name value` per line,
    /// `#` starts a comment. Unknown names are kept.
    pub fn parse(text: &str) -> Result<Self> {
        let mut set = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let number = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::LandmarkSyntax {
                        line: line_no,
                        message: format!("`{s}` is not a finite number"),
                    })
            };
            match fields.as_slice() {
                [name, x, y] => set.insert_point(name, Point::new(number(x)?, number(y)?)),
                [name, v] => set.insert_measurement(name, number(v)?),
                _ => {
                    return Err(Error::LandmarkSyntax {
                        line: line_no,
                        message: "expected `name x y` or `name value`".into(),
                    })
                }
            }
        }
        set.validate()?;
        Ok(set)
    }

    /// Serializes in the sidecar format, sorted by name.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, p) in &self.points {
            let _ = writeln!(out, "{k} {} {}", p.x, p.y);
        }
        for (k, v) in &self.measurements {
            let _ = writeln!(out, "{k} {v}");
        }
        out
    }
}

/// Labels of the six normalized distances, in order.
pub const FEATURE_LABELS: [&str; 6] = [
    "eyes",
    "left_eye-nose",
    "right_eye-nose",
    "left_eye-mouth",
    "right_eye-mouth",
    "nose-mouth",
];

/// Pairwise distances among the four required landmarks divided by the
/// interocular distance. The first component is always 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; 6]);

impl FeatureVector {
    pub fn components(&self) -> &[f64; 6] {
        &self.0
    }
}

pub fn feature_vector(lm: &LandmarkSet) -> Result<FeatureVector> {
    let [le, re, nose, mouth] = lm.core_points()?;
    let iod = le.distance(re);
    if !(iod > 0.0) {
        return Err(Error::DegenerateLandmarks("interocular distance is zero".into()));
    }
    Ok(FeatureVector([
        1.0,
        le.distance(nose) / iod,
        re.distance(nose) / iod,
        le.distance(mouth) / iod,
        re.distance(mouth) / iod,
        nose.distance(mouth) / iod,
    ]))
}

/// `1 / (1 + RMS(a − b))`: 1 for identical vectors, falling toward 0.
pub fn landmark_similarity(a: &FeatureVector, b: &FeatureVector) -> f64 {
    let mse = a
        .0
        .iter()
        .zip(&b.0)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / 6.0;
    1.0 / (1.0 + mse.sqrt())
}
