use crate::error::{Error, Result};
use crate::raster::Raster;

use super::landmarks::{LandmarkSet, LEFT_EYE_WIDTH, RIGHT_EYE_WIDTH};

/// `left_eye_width / right_eye_width`; 1 means equal eyes.
pub fn eye_size_ratio(lm: &LandmarkSet) -> Result<f64> {
    let width = |name: &str| {
        lm.measurement(name)
            .filter(|w| *w > 0.0)
            .ok_or_else(|| Error::MissingMeasurement(format!("`{name}` absent or not positive")))
    };
    Ok(width(LEFT_EYE_WIDTH)? / width(RIGHT_EYE_WIDTH)?)
}

/// `|img[x, y] − img[2·axis_x − x, y]|`, or 0 where the mirrored column
/// falls outside the image. Zero everywhere iff the image is mirror
/// symmetric about `axis_x` over the overlapping columns.
pub fn asymmetry_map(img: &Raster, axis_x: usize) -> Result<Raster> {
    if img.channels() != 1 {
        return Err(Error::NotGrayscale(img.channels()));
    }
    let (w, h) = img.dims();
    if axis_x >= w {
        return Err(Error::InvalidParameter(format!(
            "symmetry axis {axis_x} outside 0..{w}"
        )));
    }
    Raster::from_fn(w, h, 1, |x, y, _| {
        let mirror = 2 * axis_x as isize - x as isize;
        if mirror < 0 || mirror >= w as isize {
            0.0
        } else {
            (img.get(x, y, 0) - img.get(mirror as usize, y, 0)).abs()
        }
    })
}

/// Mean of the asymmetry map over the columns that have a mirror partner.
pub fn mean_asymmetry(img: &Raster, axis_x: usize) -> Result<f64> {
    let map = asymmetry_map(img, axis_x)?;
    let w = img.width();
    let reach = axis_x.min(w - 1 - axis_x);
    let cols = (axis_x - reach)..=(axis_x + reach);
    let n = cols.clone().count() * img.height();
    let total: f64 = (0..img.height())
        .flat_map(|y| cols.clone().map(move |x| (x, y)))
        .map(|(x, y)| map.get(x, y, 0))
        .sum();
    Ok(total / n as f64)
}
