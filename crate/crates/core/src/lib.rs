//! Digital restoration and portrait comparison.
//!
//! The crate covers one workflow end to end:
//!
//! - [`restore`]: remove overwritten ink from a scanned drawing by
//!   thresholding a mask and filling it from neighbouring pixels;
//! - [`multiscale`]: sharpen or denoise with an undecimated à trous
//!   wavelet filter;
//! - [`geometry`]: reflect, rotate and scale portraits, and decide whether a
//!   reflection is needed before comparing a self-portrait with a portrait;
//! - [`compare`]: merge two drawings, lay images side by side, and measure
//!   facial correspondence with landmark distances and asymmetry maps;
//! - [`cli`]: single-step commands and a declarative pipeline runner.
//!
//! Every image is a [`Raster`] of normalized intensities; PNM files are the
//! interchange format.
//!
//! ```
//! use sfumato::{fixtures, restore::{restore, RestoreParams}};
//!
//! let clean = fixtures::smooth_portrait(64, 64);
//! let (inked, _) = fixtures::overwrite_strokes(&clean, &Default::default());
//! let out = restore(&inked, &RestoreParams::default()).unwrap();
//! assert_eq!(out.diagnostics.masked_after, 0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod compare;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod multiscale;
pub mod raster;
pub mod restore;

pub use error::{Error, Result};
pub use raster::{BitMask, Raster};
