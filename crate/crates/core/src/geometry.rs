//! Similarity transforms of rasters and the mirror rule for comparing a
//! self-portrait with a portrait.
//!
//! Coordinates are pixel centers with `y` pointing down. A transform is
//! applied in a fixed order about the center of the source image:
//! reflect about the vertical center line, scale, rotate counterclockwise
//! as seen on screen, then translate.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::Raster;

/// A 2-D point in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityTransform {
    pub reflect: bool,
    pub scale: f64,
    /// Degrees, counterclockwise on screen.
    pub rotation_deg: f64,
    pub dx: f64,
    pub dy: f64,
}

impl Default for SimilarityTransform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl SimilarityTransform {
    pub const IDENTITY: Self = Self {
        reflect: false,
        scale: 1.0,
        rotation_deg: 0.0,
        dx: 0.0,
        dy: 0.0,
    };

    pub fn reflection() -> Self {
        Self {
            reflect: true,
            ..Self::IDENTITY
        }
    }

    pub fn rotation(degrees: f64) -> Self {
        Self {
            rotation_deg: degrees,
            ..Self::IDENTITY
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "scale must be positive, got {}",
                self.scale
            )));
        }
        if !self.rotation_deg.is_finite() || !self.dx.is_finite() || !self.dy.is_finite() {
            return Err(Error::InvalidParameter("transform has non-finite components".into()));
        }
        Ok(())
    }

    fn resamples(&self) -> bool {
        self.scale != 1.0 || self.rotation_deg != 0.0 || self.dx != 0.0 || self.dy != 0.0
    }

    /// Screen-counterclockwise rotation matrix `[[cos, sin], [-sin, cos]]` in y-down coordinates.
    fn rotation_cos_sin(&self) -> (f64, f64) {
        let r = self.rotation_deg.to_radians();
        (r.cos(), r.sin())
    }

    /// Maps a point of a `width × height` source into the output frame.
    pub fn apply_point(&self, p: Point, width: usize, height: usize) -> Point {
        let (cx, cy) = center(width, height);
        let x = if self.reflect { 2.0 * cx - p.x } else { p.x };
        let (ux, uy) = (self.scale * (x - cx), self.scale * (p.y - cy));
        let (cos, sin) = self.rotation_cos_sin();
        Point::new(
            cx + cos * ux + sin * uy + self.dx,
            cy - sin * ux + cos * uy + self.dy,
        )
    }

    /// Inverse of the scale/rotate/translate part: output point to
    /// (already reflected) source point.
    fn unmap(&self, x: f64, y: f64, cx: f64, cy: f64) -> (f64, f64) {
        let (cos, sin) = self.rotation_cos_sin();
        let (vx, vy) = (x - self.dx - cx, y - self.dy - cy);
        // transpose of the rotation, then undo the scale
        let ux = cos * vx - sin * vy;
        let uy = sin * vx + cos * vy;
        (cx + ux / self.scale, cy + uy / self.scale)
    }
}

fn center(width: usize, height: usize) -> (f64, f64) {
    ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0)
}

/// Mirror image about the vertical center line, exact.
pub fn reflect_h(img: &Raster) -> Raster {
    let (w, _) = img.dims();
    let ch = img.channels();
    let mut data = Vec::with_capacity(img.data().len());
    for y in 0..img.height() {
        let row = img.row(y);
        for x in (0..w).rev() {
            data.extend_from_slice(&row[x * ch..(x + 1) * ch]);
        }
    }
    Raster::new(w, img.height(), ch, data).expect("reflection preserves shape")
}

/// Bilinear sample at a fractional source position; `None` outside the grid.
pub fn sample_bilinear(img: &Raster, x: f64, y: f64, out: &mut [f64]) -> bool {
    let (w, h) = img.dims();
    let max_x = (w - 1) as f64;
    let max_y = (h - 1) as f64;
    if !(x >= 0.0 && x <= max_x && y >= 0.0 && y <= max_y) {
        return false;
    }
    let x0 = x.floor() as usize;
    let y0 = y.floor() as usize;
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let p00 = img.pixel(x0, y0);
    let p10 = img.pixel(x1, y0);
    let p01 = img.pixel(x0, y1);
    let p11 = img.pixel(x1, y1);
    for (c, o) in out.iter_mut().enumerate() {
        let top = p00[c] * (1.0 - fx) + p10[c] * fx;
        let bottom = p01[c] * (1.0 - fx) + p11[c] * fx;
        *o = top * (1.0 - fy) + bottom * fy;
    }
    true
}

/// Resamples `img` under `t` into a `width × height` frame. Pixels whose
/// preimage falls outside the source are reported in the returned coverage
/// vector and set to `fill`.
pub fn resample_into(
    img: &Raster,
    t: &SimilarityTransform,
    fill: f64,
    width: usize,
    height: usize,
) -> Result<(Raster, Vec<bool>)> {
    t.validate()?;
    let source = if t.reflect { reflect_h(img) } else { img.clone() };
    if !t.resamples() && source.dims() == (width, height) {
        return Ok((source, vec![true; width * height]));
    }
    let ch = source.channels();
    let (cx, cy) = center(source.width(), source.height());
    let fill = fill.clamp(0.0, 1.0);
    let rows: Vec<(Vec<f64>, Vec<bool>)> = (0..height)
        .into_par_iter()
        .map(|y| {
            let mut row = vec![fill; width * ch];
            let mut covered = vec![false; width];
            for x in 0..width {
                let (sx, sy) = t.unmap(x as f64, y as f64, cx, cy);
                covered[x] = sample_bilinear(&source, sx, sy, &mut row[x * ch..(x + 1) * ch]);
            }
            (row, covered)
        })
        .collect();
    let mut data = Vec::with_capacity(width * height * ch);
    let mut coverage = Vec::with_capacity(width * height);
    for (row, covered) in rows {
        data.extend(row);
        coverage.extend(covered);
    }
    Ok((Raster::new(width, height, ch, data)?, coverage))
}

/// Applies `t` with output size equal to input size; uncovered pixels get `fill`.
pub fn apply_transform(img: &Raster, t: &SimilarityTransform, fill: f64) -> Result<Raster> {
    let (w, h) = img.dims();
    resample_into(img, t, fill, w, h).map(|(r, _)| r)
}

/// Paper-white, the default for uncovered pixels.
pub const DEFAULT_FILL: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PortraitKind {
    /// Drawn by the sitter from a mirror.
    SelfPortrait,
    /// Drawn by another artist facing the sitter.
    Portrait,
}

/// Whether exactly one of two images must be reflected before comparing
/// facial sides. A mirror swaps the sides shown, so only mixed pairs differ.
pub fn mirror_policy(a: PortraitKind, b: PortraitKind) -> bool {
    a != b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize) -> Raster {
        Raster::from_fn(w, h, 1, |x, y, _| (x + 3 * y) as f64 / (w + 3 * h) as f64).unwrap()
    }

    #[test]
    fn reflect_two_pixels() {
        let img = Raster::gray(2, 1, vec![0.2, 0.8]).unwrap();
        assert_eq!(reflect_h(&img).data(), &[0.8, 0.2]);
    }

    #[test]
    fn reflect_is_involution_and_keeps_symmetric_images() {
        let img = Raster::from_fn(5, 3, 3, |x, y, c| ((x * 5 + y * 2 + c) % 9) as f64 / 8.0).unwrap();
        assert_eq!(reflect_h(&reflect_h(&img)), img);
        let sym = Raster::from_fn(6, 2, 1, |x, _, _| (x.min(5 - x)) as f64 / 3.0).unwrap();
        assert_eq!(reflect_h(&sym), sym);
    }

    #[test]
    fn identity_and_pure_reflection_are_exact() {
        let img = ramp(9, 7);
        assert_eq!(apply_transform(&img, &SimilarityTransform::IDENTITY, 1.0).unwrap(), img);
        assert_eq!(
            apply_transform(&img, &SimilarityTransform::reflection(), 1.0).unwrap(),
            reflect_h(&img)
        );
    }

    #[test]
    fn integer_translation_shifts() {
        let img = ramp(6, 4);
        let t = SimilarityTransform {
            dx: 2.0,
            ..SimilarityTransform::IDENTITY
        };
        let out = apply_transform(&img, &t, 0.25).unwrap();
        for y in 0..4 {
            assert_eq!(out.get(0, y, 0), 0.25);
            assert_eq!(out.get(1, y, 0), 0.25);
            for x in 2..6 {
                assert!((out.get(x, y, 0) - img.get(x - 2, y, 0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quarter_turn_moves_right_edge_to_top() {
        // counterclockwise on screen: the point right of center goes up
        let t = SimilarityTransform::rotation(90.0);
        let p = t.apply_point(Point::new(4.0, 2.0), 5, 5);
        assert!((p.x - 2.0).abs() < 1e-12 && (p.y - 0.0).abs() < 1e-12);

        let mut data = vec![0.0; 25];
        data[2 * 5 + 4] = 1.0;
        let img = Raster::gray(5, 5, data).unwrap();
        let out = apply_transform(&img, &t, 0.0).unwrap();
        assert!((out.get(2, 0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_map_agrees_with_resampling() {
        let t = SimilarityTransform {
            reflect: true,
            scale: 1.0,
            rotation_deg: 30.0,
            dx: 1.5,
            dy: -0.5,
        };
        let p = Point::new(3.0, 5.0);
        let q = t.apply_point(p, 11, 9);
        let (cx, cy) = center(11, 9);
        let (sx, sy) = t.unmap(q.x, q.y, cx, cy);
        // unmap lands on the reflected source point
        assert!((sx - (2.0 * cx - p.x)).abs() < 1e-12);
        assert!((sy - p.y).abs() < 1e-12);
    }

    #[test]
    fn bad_scale_rejected() {
        let t = SimilarityTransform {
            scale: 0.0,
            ..SimilarityTransform::IDENTITY
        };
        assert!(apply_transform(&ramp(3, 3), &t, 1.0).is_err());
    }

    #[test]
    fn mirror_truth_table() {
        use PortraitKind::*;
        assert!(mirror_policy(SelfPortrait, Portrait));
        assert!(mirror_policy(Portrait, SelfPortrait));
        assert!(!mirror_policy(Portrait, Portrait));
        assert!(!mirror_policy(SelfPortrait, SelfPortrait));
    }
}
