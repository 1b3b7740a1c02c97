use crate::error::{Error, Result};
use crate::geometry::{resample_into, SimilarityTransform};
use crate::raster::Raster;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlendMode {
    /// `(1 − α)·base + α·over`
    #[default]
    Normal,
    /// `base·((1 − α) + α·over)`, like layering one drawing over another.
    Multiply,
}

pub const DEFAULT_ALPHA: f64 = 0.5;

/// Transforms `overlay` into the frame of `base` and combines them per
/// pixel. Where the transformed overlay does not reach, `base` shows through.
/// The result has the channel count of `base`.
pub fn blend(
    base: &Raster,
    overlay: &Raster,
    t: &SimilarityTransform,
    alpha: f64,
    mode: BlendMode,
) -> Result<Raster> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    let overlay = overlay.with_channels(base.channels());
    let (w, h) = base.dims();
    let (warped, covered) = resample_into(&overlay, t, 0.0, w, h)?;
    let ch = base.channels();
    let data = base
        .data()
        .iter()
        .zip(warped.data())
        .enumerate()
        .map(|(i, (&b, &o))| {
            if !covered[i / ch] {
                return b;
            }
            match mode {
                BlendMode::Normal => (1.0 - alpha) * b + alpha * o,
                BlendMode::Multiply => b * ((1.0 - alpha) + alpha * o),
            }
        })
        .collect();
    Raster::new(w, h, ch, data)
}

/// Places `a` left of `b`, top-aligned, separated by `gutter` columns.
/// Uncovered canvas and the gutter take `gutter_value`. A gray input is
/// promoted to RGB when the other one is RGB.
pub fn side_by_side(a: &Raster, b: &Raster, gutter: usize, gutter_value: f64) -> Result<Raster> {
    let ch = a.channels().max(b.channels());
    let (a, b) = (a.with_channels(ch), b.with_channels(ch));
    let width = a.width() + gutter + b.width();
    let height = a.height().max(b.height());
    let mut canvas = vec![gutter_value.clamp(0.0, 1.0); width * height * ch];
    for (img, x0) in [(&a, 0), (&b, a.width() + gutter)] {
        for y in 0..img.height() {
            let start = (y * width + x0) * ch;
            canvas[start..start + img.width() * ch].copy_from_slice(img.row(y));
        }
    }
    Raster::new(width, height, ch, canvas)
}
