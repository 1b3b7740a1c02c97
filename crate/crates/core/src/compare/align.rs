//! Least-squares similarity alignment of two landmark sets.
//!
//! In two dimensions the Procrustes problem has a closed form: with both
//! sets centered, the best scaled rotation `[[a, b], [-b, a]]` has
//! `a = Σ X·Y / Σ|X|²` and `b = Σ (X.y Y.x − X.x Y.y) / Σ|X|²`. A reflected
//! fit is the same problem after negating the source `x` coordinates.

use crate::error::{Error, Result};
use crate::geometry::{Point, SimilarityTransform};

use super::landmarks::LandmarkSet;

/// An estimated similarity `p ↦ A·p + t` in plain origin-anchored form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alignment {
    pub reflect: bool,
    pub scale: f64,
    /// Degrees, counterclockwise on screen, in `(-180, 180]`.
    pub rotation_deg: f64,
    pub linear: [[f64; 2]; 2],
    pub translation: Point,
    pub residual_rms: f64,
    pub point_count: usize,
}

impl Alignment {
    pub fn map(&self, p: Point) -> Point {
        let [[a00, a01], [a10, a11]] = self.linear;
        Point::new(
            a00 * p.x + a01 * p.y + self.translation.x,
            a10 * p.x + a11 * p.y + self.translation.y,
        )
    }

    /// Re-expresses the alignment as a center-anchored transform for a
    /// source image of `width × height`.
    pub fn transform_for(&self, width: usize, height: usize) -> SimilarityTransform {
        let c = Point::new((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
        let ac = self.map(c);
        SimilarityTransform {
            reflect: self.reflect,
            scale: self.scale,
            rotation_deg: self.rotation_deg,
            dx: ac.x - c.x,
            dy: ac.y - c.y,
        }
    }
}

struct Fit {
    a: f64,
    b: f64,
    sse: f64,
}

fn fit_proper(src: &[Point], dst: &[Point]) -> Fit {
    let mut sxx = 0.0;
    let mut dot = 0.0;
    let mut cross = 0.0;
    for (x, y) in src.iter().zip(dst) {
        sxx += x.x * x.x + x.y * x.y;
        dot += x.x * y.x + x.y * y.y;
        cross += x.y * y.x - x.x * y.y;
    }
    let a = dot / sxx;
    let b = cross / sxx;
    let sse = src
        .iter()
        .zip(dst)
        .map(|(x, y)| {
            let ex = a * x.x + b * x.y - y.x;
            let ey = -b * x.x + a * x.y - y.y;
            ex * ex + ey * ey
        })
        .sum();
    Fit { a, b, sse }
}

fn centroid(points: &[Point]) -> Point {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point::new(sx / n, sy / n)
}

/// Fits the similarity mapping `src` points onto `dst` points pairwise.
pub fn align_points(src: &[Point], dst: &[Point], allow_reflection: bool) -> Result<Alignment> {
    if src.len() != dst.len() || src.len() < 2 {
        return Err(Error::DegenerateLandmarks(format!(
            "need at least two corresponding points, got {} and {}",
            src.len(),
            dst.len()
        )));
    }
    let cs = centroid(src);
    let cd = centroid(dst);
    let xs: Vec<Point> = src.iter().map(|p| Point::new(p.x - cs.x, p.y - cs.y)).collect();
    let ys: Vec<Point> = dst.iter().map(|p| Point::new(p.x - cd.x, p.y - cd.y)).collect();
    let spread: f64 = xs.iter().map(|p| p.x * p.x + p.y * p.y).sum();
    if !(spread > 0.0) {
        return Err(Error::DegenerateLandmarks("source points have zero spread".into()));
    }

    let proper = fit_proper(&xs, &ys);
    let mut reflect = false;
    let mut fit = proper;
    if allow_reflection {
        let mirrored: Vec<Point> = xs.iter().map(|p| Point::new(-p.x, p.y)).collect();
        let flipped = fit_proper(&mirrored, &ys);
        if flipped.sse < fit.sse {
            fit = flipped;
            reflect = true;
        }
    }

    let scale = fit.a.hypot(fit.b);
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::DegenerateLandmarks("target points have zero spread".into()));
    }
    let mut rotation_deg = fit.b.atan2(fit.a).to_degrees();
    if rotation_deg <= -180.0 {
        rotation_deg += 360.0;
    }
    let sign = if reflect { -1.0 } else { 1.0 };
    // A = [[a, b], [-b, a]] · diag(sign, 1)
    let linear = [[sign * fit.a, fit.b], [-sign * fit.b, fit.a]];
    let translation = Point::new(
        cd.x - (linear[0][0] * cs.x + linear[0][1] * cs.y),
        cd.y - (linear[1][0] * cs.x + linear[1][1] * cs.y),
    );
    Ok(Alignment {
        reflect,
        scale,
        rotation_deg,
        linear,
        translation,
        residual_rms: (fit.sse.max(0.0) / src.len() as f64).sqrt(),
        point_count: src.len(),
    })
}

/// Aligns every landmark name present in both sets.
pub fn align_by_landmarks(
    src: &LandmarkSet,
    dst: &LandmarkSet,
    allow_reflection: bool,
) -> Result<Alignment> {
    let (from, to): (Vec<Point>, Vec<Point>) = src
        .points()
        .filter_map(|(name, p)| dst.point(name).map(|q| (p, q)))
        .unzip();
    align_points(&from, &to, allow_reflection)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn face() -> LandmarkSet {
        LandmarkSet::new(
            Point::new(40.0, 50.0),
            Point::new(80.0, 48.0),
            Point::new(61.0, 75.0),
            Point::new(60.0, 95.0),
        )
        .unwrap()
    }

    #[test]
    fn self_alignment_is_identity() {
        let a = align_by_landmarks(&face(), &face(), true).unwrap();
        assert!(!a.reflect);
        assert!((a.scale - 1.0).abs() < 1e-12);
        assert!(a.rotation_deg.abs() < 1e-12);
        assert!(a.residual_rms < 1e-12);
        let t = a.transform_for(120, 140);
        assert!(t.dx.abs() < 1e-9 && t.dy.abs() < 1e-9);
    }

    #[test]
    fn mirrored_target_needs_reflection() {
        let src = face();
        let dst = src.map_points(|p| Point::new(200.0 - p.x, p.y));
        let a = align_by_landmarks(&src, &dst, true).unwrap();
        assert!(a.reflect);
        assert!(a.residual_rms <= 1e-9);
        assert!((a.scale - 1.0).abs() < 1e-12);

        let proper_only = align_by_landmarks(&src, &dst, false).unwrap();
        assert!(!proper_only.reflect);
        assert!(proper_only.residual_rms > 1.0);
    }

    #[test]
    fn transform_form_maps_points_like_the_fit() {
        let src = face();
        let t_true = SimilarityTransform {
            reflect: true,
            scale: 0.8,
            rotation_deg: -25.0,
            dx: 4.0,
            dy: -7.5,
        };
        let dst = src.transformed(&t_true, 120, 140);
        let a = align_by_landmarks(&src, &dst, true).unwrap();
        let t = a.transform_for(120, 140);
        for (name, p) in src.points() {
            let q = t.apply_point(p, 120, 140);
            let r = dst.point(name).unwrap();
            assert!(q.distance(r) < 1e-9, "{name}");
        }
        assert!(t.reflect);
        assert!((t.rotation_deg + 25.0).abs() < 1e-9);
        assert!((t.dx - 4.0).abs() < 1e-9 && (t.dy + 7.5).abs() < 1e-9);
    }

    #[test]
    fn half_turn_reports_positive_180() {
        let src = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 2.0)];
        let dst: Vec<Point> = src.iter().map(|p| Point::new(-p.x, -p.y)).collect();
        let a = align_points(&src, &dst, false).unwrap();
        assert!((a.rotation_deg - 180.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        let p = Point::new(1.0, 1.0);
        assert!(matches!(
            align_points(&[p, p], &[Point::new(0.0, 0.0), Point::new(1.0, 0.0)], false),
            Err(Error::DegenerateLandmarks(_))
        ));
        assert!(matches!(
            align_points(&[Point::new(0.0, 0.0), Point::new(1.0, 0.0)], &[p, p], false),
            Err(Error::DegenerateLandmarks(_))
        ));
        assert!(align_points(&[p], &[p], false).is_err());
    }
}
