//! Removal of overwritten ink: threshold the luminance into a mask, then fill
//! the masked pixels from their unmasked neighbours, pass after pass.
//!
//! Each pass is synchronous. Every masked pixel that touches at least one
//! unmasked pixel receives the mean of those neighbours, read from the buffer
//! as it stood when the pass began, and leaves the mask when the pass ends.
//! A stroke of half-width `w` therefore needs `w` passes to close.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::{to_grayscale, BitMask, Raster};

/// Which side of the threshold the ink lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InkPolarity {
    /// Ink is darker than the paper: pixels strictly below the threshold.
    #[default]
    Darker,
    /// Ink is lighter than the paper: pixels strictly above the threshold.
    Lighter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Neighborhood {
    Four,
    #[default]
    Eight,
}

impl Neighborhood {
    /// Neighbour offsets in the fixed summation order used by every pass.
    fn offsets(self) -> &'static [(isize, isize)] {
        const FOUR: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
        const EIGHT: [(isize, isize); 8] = [
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ];
        match self {
            Self::Four => &FOUR,
            Self::Eight => &EIGHT,
        }
    }
}

pub const DEFAULT_MAX_PASSES: usize = 1024;
pub const DEFAULT_THRESHOLD: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestoreParams {
    pub threshold: f64,
    pub polarity: InkPolarity,
    pub max_passes: usize,
    pub neighborhood: Neighborhood,
}

impl Default for RestoreParams {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            polarity: InkPolarity::Darker,
            max_passes: DEFAULT_MAX_PASSES,
            neighborhood: Neighborhood::Eight,
        }
    }
}

impl RestoreParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidParameter(format!(
                "threshold must lie in [0, 1], got {}",
                self.threshold
            )));
        }
        if self.max_passes == 0 {
            return Err(Error::InvalidParameter("max_passes must be at least 1".into()));
        }
        Ok(())
    }
}

/// Marks pixels strictly past `threshold` in the direction of `polarity`.
pub fn make_ink_mask(img: &Raster, threshold: f64, polarity: InkPolarity) -> Result<BitMask> {
    if img.channels() != 1 {
        return Err(Error::NotGrayscale(img.channels()));
    }
    let bits = img
        .data()
        .iter()
        .map(|&v| match polarity {
            InkPolarity::Darker => v < threshold,
            InkPolarity::Lighter => v > threshold,
        })
        .collect();
    BitMask::new(img.width(), img.height(), bits)
}

/// Result of [`inpaint_iterative`].
#[derive(Debug, Clone, PartialEq)]
pub struct Inpainted {
    pub image: Raster,
    pub passes_used: usize,
    /// Pixels still masked when the pass budget ran out.
    pub remaining: BitMask,
}

/// Fills masked pixels by repeated synchronous neighbour averaging.
pub fn inpaint_iterative(
    img: &Raster,
    mask: &BitMask,
    neighborhood: Neighborhood,
    max_passes: usize,
) -> Result<Inpainted> {
    if mask.dims() != img.dims() {
        return Err(Error::DimensionMismatch {
            expected: img.dims(),
            found: mask.dims(),
        });
    }
    let masked = mask.count();
    if masked == 0 {
        return Ok(Inpainted {
            image: img.clone(),
            passes_used: 0,
            remaining: mask.clone(),
        });
    }
    if masked == mask.bits().len() {
        return Err(Error::FullyMasked);
    }

    let (width, height) = img.dims();
    let channels = img.channels();
    let offsets = neighborhood.offsets();
    let stride = width * channels;

    let mut values = img.data().to_vec();
    let mut invalid = mask.bits().to_vec();
    let mut passes = 0;

    while passes < max_passes && invalid.iter().any(|&b| b) {
        let prev_values = &values;
        let prev_invalid = &invalid;
        // each row is computed only from the previous pass's buffers
        let rows: Vec<(Vec<f64>, Vec<bool>)> = (0..height)
            .into_par_iter()
            .map(|y| {
                let mut row = prev_values[y * stride..(y + 1) * stride].to_vec();
                let mut row_invalid = prev_invalid[y * width..(y + 1) * width].to_vec();
                let mut acc = vec![0.0; channels];
                for x in 0..width {
                    if !row_invalid[x] {
                        continue;
                    }
                    acc.iter_mut().for_each(|a| *a = 0.0);
                    let mut n = 0usize;
                    for &(dx, dy) in offsets {
                        let nx = x as isize + dx;
                        let ny = y as isize + dy;
                        if nx < 0 || ny < 0 || nx >= width as isize || ny >= height as isize {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if prev_invalid[ny * width + nx] {
                            continue;
                        }
                        let base = (ny * width + nx) * channels;
                        for (a, v) in acc.iter_mut().zip(&prev_values[base..base + channels]) {
                            *a += v;
                        }
                        n += 1;
                    }
                    if n > 0 {
                        for (c, a) in acc.iter().enumerate() {
                            row[x * channels + c] = a / n as f64;
                        }
                        row_invalid[x] = false;
                    }
                }
                (row, row_invalid)
            })
            .collect();

        let before = invalid.iter().filter(|&&b| b).count();
        for (y, (row, row_invalid)) in rows.into_iter().enumerate() {
            values[y * stride..(y + 1) * stride].copy_from_slice(&row);
            invalid[y * width..(y + 1) * width].copy_from_slice(&row_invalid);
        }
        passes += 1;
        let after = invalid.iter().filter(|&&b| b).count();
        if after == before {
            // unreachable while an unmasked pixel exists, but never spin
            break;
        }
    }

    Ok(Inpainted {
        image: Raster::new(width, height, channels, values)?,
        passes_used: passes,
        remaining: BitMask::new(width, height, invalid)?,
    })
}

/// Counts reported after a restoration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RestoreDiagnostics {
    pub masked_before: usize,
    pub masked_after: usize,
    pub passes_used: usize,
}

impl fmt::Display for RestoreDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "masked_before={}", self.masked_before)?;
        writeln!(f, "masked_after={}", self.masked_after)?;
        writeln!(f, "passes_used={}", self.passes_used)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Restored {
    pub image: Raster,
    pub diagnostics: RestoreDiagnostics,
}

/// Detects ink on the luminance and fills it on every channel.
pub fn restore(img: &Raster, params: &RestoreParams) -> Result<Restored> {
    params.validate()?;
    let mask = make_ink_mask(&to_grayscale(img), params.threshold, params.polarity)?;
    let filled = inpaint_iterative(img, &mask, params.neighborhood, params.max_passes)?;
    Ok(Restored {
        diagnostics: RestoreDiagnostics {
            masked_before: mask.count(),
            masked_after: filled.remaining.count(),
            passes_used: filled.passes_used,
        },
        image: filled.image,
    })
}
