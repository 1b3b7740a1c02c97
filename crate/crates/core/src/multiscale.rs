//! Undecimated "à trous" wavelet decomposition with the B3-spline kernel.
//!
//! Level `j` smooths the previous approximation with `(1, 4, 6, 4, 1) / 16`
//! dilated by `2^j` (rows, then columns). Each detail plane is the difference
//! of two consecutive approximations, so the residual plus all details
//! telescopes back to the source.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::Raster;

/// B3-spline taps, summed left to right.
pub const B3_KERNEL: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

pub const DEFAULT_LEVELS: usize = 4;

/// How samples beyond the border are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Reflect about the edge sample without repeating it.
    #[default]
    Mirror,
    /// Wrap around.
    Periodic,
}

impl Boundary {
    #[inline]
    fn index(self, i: isize, n: usize) -> usize {
        let n = n as isize;
        match self {
            Self::Mirror => {
                let mut i = i;
                // one reflection suffices while the dilated kernel fits
                while i < 0 || i >= n {
                    if i < 0 {
                        i = -i;
                    }
                    if i >= n {
                        i = 2 * (n - 1) - i;
                    }
                }
                i as usize
            }
            Self::Periodic => i.rem_euclid(n) as usize,
        }
    }
}

/// A single-channel grid of signed reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_raster(img: &Raster) -> Result<Self> {
        if img.channels() != 1 {
            return Err(Error::NotGrayscale(img.channels()));
        }
        Ok(Self {
            width: img.width(),
            height: img.height(),
            data: img.data().to_vec(),
        })
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Clamped conversion back to a gray raster.
    pub fn to_raster(&self) -> Result<Raster> {
        Raster::gray(self.width, self.height, self.data.clone())
    }

    /// Encodes signed values as `(d + 1) / 2` for viewing as a graymap.
    pub fn to_offset_raster(&self) -> Result<Raster> {
        Raster::gray(
            self.width,
            self.height,
            self.data.iter().map(|d| (d + 1.0) / 2.0).collect(),
        )
    }
}

/// One smoothing step at dilation `step`, rows then columns.
///
/// Taps are accumulated as offsets from the centre sample, which equals the
/// plain weighted sum because the weights sum to 1 and keeps flat regions
/// exactly flat.
fn smooth(src: &Plane, step: usize, boundary: Boundary) -> Plane {
    let (w, h) = src.dims();
    let step = step as isize;
    let mut rows = vec![0.0; w * h];
    rows.par_chunks_mut(w).enumerate().for_each(|(y, out)| {
        let line = &src.data[y * w..(y + 1) * w];
        for (x, o) in out.iter_mut().enumerate() {
            let centre = line[x];
            let mut acc = 0.0;
            for (k, tap) in B3_KERNEL.iter().enumerate() {
                let xi = boundary.index(x as isize + (k as isize - 2) * step, w);
                acc += tap * (line[xi] - centre);
            }
            *o = centre + acc;
        }
    });
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, line)| {
        for (x, o) in line.iter_mut().enumerate() {
            let centre = rows[y * w + x];
            let mut acc = 0.0;
            for (k, tap) in B3_KERNEL.iter().enumerate() {
                let yi = boundary.index(y as isize + (k as isize - 2) * step, h);
                acc += tap * (rows[yi * w + x] - centre);
            }
            *o = centre + acc;
        }
    });
    Plane {
        width: w,
        height: h,
        data: out,
    }
}

/// Detail planes (finest first) and the smooth residual.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletStack {
    pub details: Vec<Plane>,
    pub residual: Plane,
}

impl WaveletStack {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn source_dims(&self) -> (usize, usize) {
        self.residual.dims()
    }

    /// Unclamped `residual + Σ details`.
    pub fn sum(&self) -> Result<Plane> {
        let dims = self.residual.dims();
        let mut out = self.residual.clone();
        for d in &self.details {
            if d.dims() != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    found: d.dims(),
                });
            }
        }
        for (i, o) in out.data.iter_mut().enumerate() {
            for d in &self.details {
                *o += d.data[i];
            }
        }
        Ok(out)
    }
}

fn check_levels(width: usize, height: usize, levels: usize) -> Result<()> {
    if levels == 0 {
        return Err(Error::InvalidParameter("wavelet levels must be at least 1".into()));
    }
    let required = 1usize
        .checked_shl(levels as u32 - 1)
        .and_then(|v| v.checked_mul(4))
        .unwrap_or(usize::MAX);
    let actual = width.min(height);
    if required >= actual {
        return Err(Error::KernelTooLarge {
            levels,
            required,
            actual,
        });
    }
    Ok(())
}

/// Decomposes a gray raster into `levels` detail planes plus a residual.
pub fn atrous_decompose(img: &Raster, levels: usize) -> Result<WaveletStack> {
    decompose_with(img, levels, Boundary::Mirror)
}

pub fn decompose_with(img: &Raster, levels: usize, boundary: Boundary) -> Result<WaveletStack> {
    let plane = Plane::from_raster(img)?;
    decompose_plane(&plane, levels, boundary)
}

pub fn decompose_plane(plane: &Plane, levels: usize, boundary: Boundary) -> Result<WaveletStack> {
    check_levels(plane.width, plane.height, levels)?;
    let mut current = plane.clone();
    let mut details = Vec::with_capacity(levels);
    for j in 0..levels {
        let next = smooth(&current, 1 << j, boundary);
        let detail = current
            .data
            .iter()
            .zip(&next.data)
            .map(|(a, b)| a - b)
            .collect();
        details.push(Plane {
            width: plane.width,
            height: plane.height,
            data: detail,
        });
        current = next;
    }
    Ok(WaveletStack {
        details,
        residual: current,
    })
}

/// Sums the stack back into a raster, clamped to `[0, 1]`.
pub fn atrous_reconstruct(stack: &WaveletStack) -> Result<Raster> {
    stack.sum()?.to_raster()
}

/// Per-level soft thresholds and gains for the detail planes.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec {
    pub gains: Vec<f64>,
    pub soft_thresholds: Vec<f64>,
}

impl FilterSpec {
    /// Gains 1, thresholds 0: reconstructs the input.
    pub fn neutral(levels: usize) -> Self {
        Self {
            gains: vec![1.0; levels],
            soft_thresholds: vec![0.0; levels],
        }
    }

    pub fn levels(&self) -> usize {
        self.gains.len()
    }

    pub fn validate(&self, levels: usize) -> Result<()> {
        if self.gains.len() != levels || self.soft_thresholds.len() != levels {
            return Err(Error::Spec(format!(
                "expected {levels} gains and thresholds, got {} and {}",
                self.gains.len(),
                self.soft_thresholds.len()
            )));
        }
        if let Some(g) = self.gains.iter().find(|g| !(**g >= 0.0) || !g.is_finite()) {
            return Err(Error::Spec(format!("gain {g} must be finite and non-negative")));
        }
        if let Some(t) = self.soft_thresholds.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::Spec(format!("threshold {t} must lie in [0, 1]")));
        }
        Ok(())
    }
}

/// `sign(d) · max(|d| − t, 0)`
#[inline]
pub fn soft_threshold(d: f64, t: f64) -> f64 {
    let m = (d.abs() - t).max(0.0);
    if d < 0.0 {
        -m
    } else {
        m
    }
}

/// Shrinks then scales each detail plane; the residual is untouched.
pub fn filter_stack(stack: &WaveletStack, spec: &FilterSpec) -> Result<WaveletStack> {
    spec.validate(stack.levels())?;
    let details = stack
        .details
        .iter()
        .zip(spec.gains.iter().zip(&spec.soft_thresholds))
        .map(|(plane, (&gain, &t))| Plane {
            data: plane
                .data
                .iter()
                .map(|&d| soft_threshold(d, t) * gain)
                .collect(),
            ..*plane
        })
        .collect();
    Ok(WaveletStack {
        details,
        residual: stack.residual.clone(),
    })
}

/// Decompose, shrink and amplify the details, reconstruct and clamp.
pub fn wavelet_filter(img: &Raster, levels: usize, spec: &FilterSpec) -> Result<Raster> {
    spec.validate(levels)?;
    let stack = atrous_decompose(img, levels)?;
    atrous_reconstruct(&filter_stack(&stack, spec)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn impulse(n: usize, amplitude: f64) -> Raster {
        let c = n / 2;
        Raster::from_fn(n, n, 1, |x, y, _| if x == c && y == c { amplitude } else { 0.0 }).unwrap()
    }

    #[test]
    fn constant_image_has_zero_details() {
        let img = Raster::filled(40, 36, 1, 0.37).unwrap();
        let stack = atrous_decompose(&img, 3).unwrap();
        for d in &stack.details {
            assert!(d.data.iter().all(|&v| v == 0.0));
        }
        assert!(stack.residual.data.iter().all(|&v| v == 0.37));
    }

    #[test]
    fn impulse_center_values() {
        let stack = atrous_decompose(&impulse(17, 1.0), 1).unwrap();
        assert!((stack.details[0].get(8, 8) - 0.859375).abs() < 1e-12);
        assert!((stack.residual.get(8, 8) - 0.140625).abs() < 1e-12);
    }

    #[test]
    fn mirror_index_does_not_repeat_edge() {
        assert_eq!(Boundary::Mirror.index(-1, 5), 1);
        assert_eq!(Boundary::Mirror.index(-2, 5), 2);
        assert_eq!(Boundary::Mirror.index(5, 5), 3);
        assert_eq!(Boundary::Mirror.index(6, 5), 2);
        assert_eq!(Boundary::Periodic.index(-1, 5), 4);
        assert_eq!(Boundary::Periodic.index(7, 5), 2);
    }

    #[test]
    fn kernel_must_fit() {
        let img = Raster::filled(16, 16, 1, 0.5).unwrap();
        assert!(atrous_decompose(&img, 2).is_ok());
        // 2^(3-1) * 4 = 16, not < 16
        assert_eq!(
            atrous_decompose(&img, 3),
            Err(Error::KernelTooLarge {
                levels: 3,
                required: 16,
                actual: 16
            })
        );
        assert!(matches!(
            atrous_decompose(&img, 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn rgb_is_rejected() {
        let img = Raster::filled(16, 16, 3, 0.5).unwrap();
        assert_eq!(atrous_decompose(&img, 1), Err(Error::NotGrayscale(3)));
    }

    #[test]
    fn zeroed_details_reconstruct_to_residual() {
        let img = Raster::from_fn(24, 24, 1, |x, y, _| ((x * 7 + y * 3) % 11) as f64 / 10.0).unwrap();
        let mut stack = atrous_decompose(&img, 2).unwrap();
        for d in &mut stack.details {
            d.data.iter_mut().for_each(|v| *v = 0.0);
        }
        let out = atrous_reconstruct(&stack).unwrap();
        assert_eq!(out, stack.residual.to_raster().unwrap());
    }

    #[test]
    fn mismatched_planes_are_rejected() {
        let img = Raster::filled(16, 16, 1, 0.5).unwrap();
        let mut stack = atrous_decompose(&img, 1).unwrap();
        stack.details[0] = Plane::zeros(15, 16);
        assert!(matches!(
            atrous_reconstruct(&stack),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn soft_threshold_shape() {
        assert_eq!(soft_threshold(0.5, 0.2), 0.3);
        assert_eq!(soft_threshold(-0.5, 0.2), -0.3);
        assert_eq!(soft_threshold(0.1, 0.2), 0.0);
        assert_eq!(soft_threshold(-0.1, 0.2), 0.0);
    }

    #[test]
    fn spec_lengths_checked() {
        let img = Raster::filled(32, 32, 1, 0.5).unwrap();
        let spec = FilterSpec::neutral(3);
        assert!(matches!(wavelet_filter(&img, 2, &spec), Err(Error::Spec(_))));
        let bad = FilterSpec {
            gains: vec![-1.0],
            soft_thresholds: vec![0.0],
        };
        assert!(matches!(bad.validate(1), Err(Error::Spec(_))));
    }

    #[test]
    fn boosted_first_level_adds_one_more_detail() {
        let img = impulse(17, 0.4);
        let stack = atrous_decompose(&img, 2).unwrap();
        let spec = FilterSpec {
            gains: vec![2.0, 1.0],
            soft_thresholds: vec![0.0, 0.0],
        };
        let out = wavelet_filter(&img, 2, &spec).unwrap();
        let expected = 0.4 + stack.details[0].get(8, 8);
        assert!((out.get(8, 8, 0) - expected).abs() < 1e-12);
        assert!((expected - (0.4 + 0.4 * 0.859375)).abs() < 1e-12);
    }

    #[test]
    fn threshold_at_peak_zeroes_first_level() {
        let img = impulse(17, 0.8);
        let stack = atrous_decompose(&img, 1).unwrap();
        let peak = stack.details[0]
            .data
            .iter()
            .fold(0.0f64, |m, d| m.max(d.abs()));
        let spec = FilterSpec {
            gains: vec![1.0],
            soft_thresholds: vec![peak],
        };
        let filtered = filter_stack(&stack, &spec).unwrap();
        assert!(filtered.details[0].data.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn offset_encoding() {
        let p = Plane {
            width: 3,
            height: 1,
            data: vec![-1.0, 0.0, 1.0],
        };
        assert_eq!(p.to_offset_raster().unwrap().data(), &[0.0, 0.5, 1.0]);
    }
}
