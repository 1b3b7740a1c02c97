//! Synthetic, seedable test material: smooth "portrait" shading, overwriting
//! ink strokes, and landmark sets with a known face geometry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::compare::LandmarkSet;
use crate::geometry::{Point, SimilarityTransform};
use crate::raster::{save_pnm, BitMask, Raster};

/// Smooth gray shading between roughly 0.3 and 0.9: a lit oval on a
/// gently graded background.
pub fn smooth_portrait(width: usize, height: usize) -> Raster {
    let sx = (width.max(2) - 1) as f64;
    let sy = (height.max(2) - 1) as f64;
    Raster::from_fn(width, height, 1, |x, y, _| {
        let u = x as f64 / sx;
        let v = y as f64 / sy;
        let wave = 0.15 * (1.5 * PI * u + 0.3).sin() * (1.2 * PI * v).cos();
        let glow = 0.1 * (-((u - 0.5).powi(2) + (v - 0.45).powi(2)) / 0.05).exp();
        0.6 + wave + glow - 0.1 * (v - 0.5)
    })
    .expect("positive dimensions")
}

/// Smooth diagonal ramp from 0.1 to 0.9.
pub fn gradient(width: usize, height: usize) -> Raster {
    let sx = (width.max(2) - 1) as f64;
    let sy = (height.max(2) - 1) as f64;
    Raster::from_fn(width, height, 1, |x, y, _| 0.1 + 0.8 * (0.6 * x as f64 / sx + 0.4 * y as f64 / sy))
        .expect("positive dimensions")
}

/// Handwriting-like overwriting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrokeSpec {
    /// Number of written lines across the page.
    pub lines: usize,
    /// Stroke thickness in pixels, measured vertically.
    pub thickness: f64,
    pub intensity: f64,
    pub seed: u64,
}

impl Default for StrokeSpec {
    fn default() -> Self {
        Self {
            lines: 8,
            thickness: 2.0,
            intensity: 0.05,
            seed: 1505,
        }
    }
}

/// Draws wavy text lines over `clean`; returns the inked image and the
/// exact set of inked pixels.
pub fn overwrite_strokes(clean: &Raster, spec: &StrokeSpec) -> (Raster, BitMask) {
    let (w, h) = clean.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let spacing = h as f64 / (spec.lines as f64 + 1.0);
    let mut mask = BitMask::empty(w, h);
    for line in 0..spec.lines {
        let baseline = spacing * (line as f64 + 1.0) + rng.gen_range(-0.15..0.15) * spacing;
        let amp = rng.gen_range(0.5..2.5);
        let freq = rng.gen_range(0.15..0.6);
        let phase = rng.gen_range(0.0..2.0 * PI);
        // words: runs of ink separated by gaps
        let mut x = rng.gen_range(0..(w / 10).max(1));
        while x < w {
            let word = rng.gen_range(6..20);
            for xi in x..(x + word).min(w) {
                let centre = baseline + amp * (freq * xi as f64 + phase).sin();
                for y in 0..h {
                    if (y as f64 - centre).abs() < spec.thickness / 2.0 {
                        mask.set(xi, y, true);
                    }
                }
            }
            x += word + rng.gen_range(3..8);
        }
    }
    let ch = clean.channels();
    let mut data = clean.data().to_vec();
    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) {
                let i = (y * w + x) * ch;
                data[i..i + ch].iter_mut().for_each(|v| *v = spec.intensity);
            }
        }
    }
    (Raster::new(w, h, ch, data).expect("shape preserved"), mask)
}

/// Proportions of a face, in units of the interocular distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceGeometry {
    pub center: Point,
    pub interocular: f64,
    pub tilt_deg: f64,
    /// Eye line to nose tip.
    pub nose_drop: f64,
    /// Eye line to mouth center.
    pub mouth_drop: f64,
    /// Horizontal offset of nose and mouth from the midline.
    pub midline_shift: f64,
    /// Left eye width over right eye width.
    pub eye_ratio: f64,
    /// Right eye width as a fraction of the interocular distance.
    pub eye_width: f64,
}

impl Default for FaceGeometry {
    fn default() -> Self {
        Self {
            center: Point::new(64.0, 56.0),
            interocular: 32.0,
            tilt_deg: 0.0,
            nose_drop: 0.75,
            mouth_drop: 1.2,
            midline_shift: 0.04,
            eye_ratio: 1.0,
            eye_width: 0.35,
        }
    }
}

/// Landmarks (with eye widths) for a face laid out by `g`. The anatomical
/// left eye sits at smaller x, as for a face seen in a mirror.
pub fn face_landmarks(g: &FaceGeometry) -> LandmarkSet {
    let (sin, cos) = g.tilt_deg.to_radians().sin_cos();
    let place = |u: f64, v: f64| {
        let (px, py) = (u * g.interocular, v * g.interocular);
        Point::new(g.center.x + cos * px + sin * py, g.center.y - sin * px + cos * py)
    };
    let right_w = g.eye_width * g.interocular;
    LandmarkSet::new(
        place(-0.5, 0.0),
        place(0.5, 0.0),
        place(g.midline_shift, g.nose_drop),
        place(g.midline_shift * 0.5, g.mouth_drop),
    )
    .expect("interocular distance is positive")
    .with_eye_widths(right_w * g.eye_ratio, right_w)
}

/// Perturbs every point by a uniform offset of at most `fraction` of the
/// interocular distance per axis.
pub fn jitter_landmarks(lm: &LandmarkSet, fraction: f64, seed: u64) -> LandmarkSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = fraction * lm.interocular().unwrap_or(1.0);
    lm.map_points(|p| Point::new(p.x + rng.gen_range(-r..=r), p.y + rng.gen_range(-r..=r)))
}

/// Renders a simple face for `lm` over [`smooth_portrait`] shading: dark
/// elliptical eyes sized by the eye widths, a nose ridge and a mouth.
pub fn render_face(width: usize, height: usize, lm: &LandmarkSet) -> Raster {
    render_face_on(&smooth_portrait(width, height), lm)
}

/// Like [`render_face`] but over the first channel of `shade`.
pub fn render_face_on(shade: &Raster, lm: &LandmarkSet) -> Raster {
    let (width, height) = shade.dims();
    let [le, re, nose, mouth] = lm.core_points().expect("valid landmark set");
    let iod = le.distance(re);
    let lw = lm.measurement(crate::compare::LEFT_EYE_WIDTH).unwrap_or(0.35 * iod);
    let rw = lm.measurement(crate::compare::RIGHT_EYE_WIDTH).unwrap_or(0.35 * iod);
    let blob = |p: Point, q: Point, rx: f64, ry: f64| {
        let d = ((p.x - q.x) / rx).powi(2) + ((p.y - q.y) / ry).powi(2);
        (-2.0 * d).exp()
    };
    let segment = |p: Point, a: Point, b: Point, r: f64| {
        let (vx, vy) = (b.x - a.x, b.y - a.y);
        let len2 = vx * vx + vy * vy;
        let t = (((p.x - a.x) * vx + (p.y - a.y) * vy) / len2).clamp(0.0, 1.0);
        let q = Point::new(a.x + t * vx, a.y + t * vy);
        (-(p.distance(q) / r).powi(2)).exp()
    };
    let eye_mid = Point::new((le.x + re.x) / 2.0, (le.y + re.y) / 2.0);
    let nose_top = Point::new(
        eye_mid.x + 0.35 * (nose.x - eye_mid.x),
        eye_mid.y + 0.35 * (nose.y - eye_mid.y),
    );
    let (mx, my) = ((re.x - le.x) / iod, (re.y - le.y) / iod);
    let half_mouth = 0.3 * iod;
    let m0 = Point::new(mouth.x - mx * half_mouth, mouth.y - my * half_mouth);
    let m1 = Point::new(mouth.x + mx * half_mouth, mouth.y + my * half_mouth);
    Raster::from_fn(width, height, 1, |x, y, _| {
        let p = Point::new(x as f64, y as f64);
        let ink = 0.45 * blob(p, le, lw / 2.0, lw / 4.0)
            + 0.45 * blob(p, re, rw / 2.0, rw / 4.0)
            + 0.2 * segment(p, nose_top, nose, 0.04 * iod)
            + 0.35 * segment(p, m0, m1, 0.05 * iod);
        shade.get(x, y, 0) - ink.min(0.5)
    })
    .expect("positive dimensions")
}

/// A clean drawing, the same drawing overwritten with text, and the ink.
#[derive(Debug, Clone)]
pub struct CodexPage {
    pub clean: Raster,
    pub inked: Raster,
    pub ink: BitMask,
}

/// A smooth `size × size` drawing overwritten with the default strokes.
pub fn codex_page(size: usize) -> CodexPage {
    let clean = smooth_portrait(size, size);
    let (inked, ink) = overwrite_strokes(&clean, &StrokeSpec::default());
    CodexPage { clean, inked, ink }
}

/// Two renderings of one face: a gray self-portrait and a tinted RGB
/// portrait showing the other side (mirrored), slightly rotated and
/// scaled, with landmarks jittered by 1% of the interocular distance.
#[derive(Debug, Clone)]
pub struct PortraitPair {
    pub self_portrait: Raster,
    pub self_landmarks: LandmarkSet,
    pub portrait: Raster,
    pub portrait_landmarks: LandmarkSet,
    /// The pose change applied to the portrait.
    pub pose: SimilarityTransform,
}

pub const PAIR_SIZE: (usize, usize) = (128, 144);

pub fn portrait_pair() -> PortraitPair {
    let (w, h) = PAIR_SIZE;
    let g = FaceGeometry {
        center: Point::new(64.0, 60.0),
        eye_ratio: 1.1,
        ..Default::default()
    };
    let self_landmarks = face_landmarks(&g);
    let pose = SimilarityTransform {
        reflect: true,
        scale: 0.95,
        rotation_deg: 6.0,
        dx: 2.0,
        dy: -3.0,
    };
    let posed = self_landmarks.transformed(&pose, w, h);
    let portrait_landmarks = jitter_landmarks(&posed, 0.01, 7);
    let gray = render_face(w, h, &portrait_landmarks);
    let tint = [1.0, 0.88, 0.72];
    let portrait = Raster::from_fn(w, h, 3, |x, y, c| gray.get(x, y, 0) * tint[c]).expect("positive dimensions");
    PortraitPair {
        self_portrait: render_face(w, h, &self_landmarks),
        self_landmarks,
        portrait,
        portrait_landmarks,
        pose,
    }
}

/// Ink removal followed by a neutral four-level wavelet pass.
pub const RESTORATION_PIPELINE: &str = r#"# overwritten drawing -> restored drawing
outputs = ["restored.pgm"]
report = "restoration.report"

[[inputs]]
path = "codex.pgm"

[[steps]]
kind = "restore"
threshold = 0.2
polarity = "darker"
neighborhood = 8

[[steps]]
kind = "wavelet"
levels = 4
gains = [1.0, 1.0, 1.0, 1.0]
thresholds = [0.0, 0.0, 0.0, 0.0]
"#;

/// Grayscale both portraits, mirror the portrait when the kinds differ,
/// align it by landmarks, compare, and compose side by side.
pub const COMPARISON_PIPELINE: &str = r#"# self-portrait vs portrait, normalized and shown together
outputs = ["comparison.pgm"]
report = "comparison.report"

[[inputs]]
path = "self_portrait.pgm"
landmarks = "self_portrait.landmarks"
kind = "self_portrait"

[[inputs]]
path = "portrait.ppm"
landmarks = "portrait.landmarks"
kind = "portrait"

[[steps]]
kind = "grayscale"

[[steps]]
kind = "transform"
mirror_policy = true
output = "portrait_mirrored.pgm"

[[steps]]
kind = "transform"
align = true
output = "portrait_aligned.pgm"

[[steps]]
kind = "feature_compare"

[[steps]]
kind = "asymmetry"
target = 0
output = "self_portrait_asymmetry.pgm"

[[steps]]
kind = "side_by_side"
gutter = 8
"#;

/// Writes the codex page and [`RESTORATION_PIPELINE`] into `dir`; returns
/// the config path.
pub fn write_restoration_workspace(dir: &Path) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let page = codex_page(128);
    fs::write(dir.join("codex.pgm"), save_pnm(&page.inked, true))?;
    fs::write(dir.join("clean.pgm"), save_pnm(&page.clean, true))?;
    let config = dir.join("restoration.toml");
    fs::write(&config, RESTORATION_PIPELINE)?;
    Ok(config)
}

/// Writes the portrait pair, its landmark files and [`COMPARISON_PIPELINE`]
/// into `dir`; returns the config path.
pub fn write_comparison_workspace(dir: &Path) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let pair = portrait_pair();
    fs::write(dir.join("self_portrait.pgm"), save_pnm(&pair.self_portrait, true))?;
    fs::write(dir.join("self_portrait.landmarks"), pair.self_landmarks.to_text())?;
    fs::write(dir.join("portrait.ppm"), save_pnm(&pair.portrait, true))?;
    fs::write(dir.join("portrait.landmarks"), pair.portrait_landmarks.to_text())?;
    let config = dir.join("comparison.toml");
    fs::write(&config, COMPARISON_PIPELINE)?;
    Ok(config)
}
