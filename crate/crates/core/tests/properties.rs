use proptest::prelude::*;

use sfumato::compare::{asymmetry_map, blend, feature_vector, landmark_similarity, BlendMode, FeatureVector, LandmarkSet};
use sfumato::geometry::{apply_transform, reflect_h, Point, SimilarityTransform};
use sfumato::multiscale::{atrous_decompose, decompose_with, Boundary, Plane};
use sfumato::raster::{load_pnm, save_pnm, to_grayscale, BitMask, Raster};
use sfumato::restore::{inpaint_iterative, Neighborhood};

fn raster(max_side: usize, channels: usize) -> impl Strategy<Value = Raster> {
    (1..=max_side, 1..=max_side).prop_flat_map(move |(w, h)| {
        prop::collection::vec(0.0..=1.0f64, w * h * channels)
            .prop_map(move |data| Raster::new(w, h, channels, data).unwrap())
    })
}

fn grid_raster(max_side: usize, channels: usize) -> impl Strategy<Value = Raster> {
    (1..=max_side, 1..=max_side).prop_flat_map(move |(w, h)| {
        prop::collection::vec(0..=255u32, w * h * channels).prop_map(move |v| {
            Raster::new(w, h, channels, v.into_iter().map(|k| k as f64 / 255.0).collect()).unwrap()
        })
    })
}

/// An image with a mask that leaves at least one pixel known.
fn masked(max_side: usize) -> impl Strategy<Value = (Raster, BitMask)> {
    raster(max_side, 1).prop_flat_map(|img| {
        let (w, h) = img.dims();
        (Just(img), prop::collection::vec(prop::bool::weighted(0.4), w * h), 0..w * h).prop_map(
            move |(img, mut bits, keep)| {
                bits[keep] = false;
                (img, BitMask::new(w, h, bits).unwrap())
            },
        )
    })
}

fn features() -> impl Strategy<Value = FeatureVector> {
    prop::array::uniform6(0.1..3.0f64).prop_map(FeatureVector)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pnm_round_trip(img in grid_raster(20, 1), rgb in grid_raster(12, 3), binary: bool) {
        prop_assert_eq!(load_pnm(&save_pnm(&img, binary)).unwrap(), img);
        prop_assert_eq!(load_pnm(&save_pnm(&rgb, binary)).unwrap(), rgb);
    }

    #[test]
    fn grayscale_is_idempotent(img in raster(16, 3)) {
        let g = to_grayscale(&img);
        prop_assert_eq!(to_grayscale(&g), g);
    }

    #[test]
    fn inpainting_keeps_known_pixels((img, mask) in masked(16)) {
        let out = inpaint_iterative(&img, &mask, Neighborhood::Eight, 1024).unwrap();
        prop_assert!(out.remaining.is_empty());
        let (lo, hi) = img
            .data()
            .iter()
            .zip(mask.bits())
            .filter(|(_, &m)| !m)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&v, _)| (lo.min(v), hi.max(v)));
        for (i, (&m, (&a, &b))) in mask.bits().iter().zip(out.image.data().iter().zip(img.data())).enumerate() {
            if m {
                prop_assert!(a >= lo - 1e-12 && a <= hi + 1e-12, "pixel {} = {} outside [{}, {}]", i, a, lo, hi);
            } else {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn inpainting_commutes_with_reflection((img, mask) in masked(14)) {
        let direct = inpaint_iterative(&img, &mask, Neighborhood::Eight, 1024).unwrap();
        let mirrored = inpaint_iterative(&reflect_h(&img), &mask.reflected_h(), Neighborhood::Eight, 1024).unwrap();
        let back = reflect_h(&mirrored.image);
        prop_assert_eq!(direct.passes_used, mirrored.passes_used);
        for (a, b) in direct.image.data().iter().zip(back.data()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn wavelet_reconstruction_is_perfect(img in raster(40, 1), levels in 1usize..=3) {
        // smaller images are rejected rather than decomposed
        prop_assume!(img.width().min(img.height()) > 4 << (levels - 1));
        let stack = atrous_decompose(&img, levels).unwrap();
        let sum = stack.sum().unwrap();
        for (a, b) in sum.data.iter().zip(img.data()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn periodic_decomposition_is_shift_covariant(img in raster(24, 1), sx in 0usize..24, sy in 0usize..24) {
        prop_assume!(img.width() >= 9 && img.height() >= 9);
        let (w, h) = img.dims();
        let shifted = Raster::from_fn(w, h, 1, |x, y, _| img.get((x + sx) % w, (y + sy) % h, 0)).unwrap();
        let a = decompose_with(&img, 2, Boundary::Periodic).unwrap();
        let b = decompose_with(&shifted, 2, Boundary::Periodic).unwrap();
        let shift = |p: &Plane| Plane {
            width: w,
            height: h,
            data: (0..w * h).map(|i| p.get((i % w + sx) % w, (i / w + sy) % h)).collect(),
        };
        for (pa, pb) in a.details.iter().chain([&a.residual]).zip(b.details.iter().chain([&b.residual])) {
            let expected = shift(pa);
            for (u, v) in expected.data.iter().zip(&pb.data) {
                prop_assert!((u - v).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn periodic_residual_keeps_the_mean(img in raster(24, 1)) {
        prop_assume!(img.width() >= 9 && img.height() >= 9);
        let stack = decompose_with(&img, 2, Boundary::Periodic).unwrap();
        let n = img.data().len() as f64;
        let mean = img.data().iter().sum::<f64>() / n;
        let residual_mean = stack.residual.data.iter().sum::<f64>() / n;
        prop_assert!((mean - residual_mean).abs() <= 1e-12);
    }

    #[test]
    fn grayscale_commutes_with_transforms(
        img in raster(12, 3),
        reflect: bool,
        scale in 0.5..2.0f64,
        rotation_deg in -180.0..180.0f64,
    ) {
        let t = SimilarityTransform { reflect, scale, rotation_deg, dx: 0.0, dy: 0.0 };
        let a = to_grayscale(&apply_transform(&img, &t, 1.0).unwrap());
        let b = apply_transform(&to_grayscale(&img), &t, 1.0).unwrap();
        for (u, v) in a.data().iter().zip(b.data()) {
            prop_assert!((u - v).abs() <= 1e-9);
        }
    }

    #[test]
    fn similarity_is_symmetric_and_monotone(a in features(), b in features(), k in 1.01..4.0f64) {
        prop_assert_eq!(landmark_similarity(&a, &b), landmark_similarity(&b, &a));
        prop_assert_eq!(landmark_similarity(&a, &a), 1.0);
        // scaling the difference by k > 1 lowers the score
        let far = FeatureVector(std::array::from_fn(|i| a.0[i] + k * (b.0[i] - a.0[i])));
        prop_assume!(a != b);
        prop_assert!(landmark_similarity(&a, &far) < landmark_similarity(&a, &b));
    }

    #[test]
    fn features_ignore_pose(
        pts in prop::array::uniform8(0.0..100.0f64),
        reflect: bool,
        scale in 0.5..2.0f64,
        rotation_deg in -180.0..180.0f64,
    ) {
        let p = |i: usize| Point::new(pts[2 * i], pts[2 * i + 1]);
        let Ok(lm) = LandmarkSet::new(p(0), p(1), p(2), p(3)) else { return Ok(()) };
        prop_assume!(lm.interocular().unwrap() > 1.0);
        let t = SimilarityTransform { reflect, scale, rotation_deg, dx: 3.0, dy: -7.0 };
        let a = feature_vector(&lm).unwrap();
        let b = feature_vector(&lm.transformed(&t, 100, 100)).unwrap();
        for (u, v) in a.0.iter().zip(&b.0) {
            prop_assert!((u - v).abs() <= 1e-9 * u.abs().max(1.0));
        }
    }

    #[test]
    fn zero_alpha_blend_is_base(base in raster(10, 1), overlay in raster(10, 3), rotation_deg in -30.0..30.0f64) {
        let t = SimilarityTransform::rotation(rotation_deg);
        for mode in [BlendMode::Normal, BlendMode::Multiply] {
            prop_assert_eq!(&blend(&base, &overlay, &t, 0.0, mode).unwrap(), &base);
        }
    }

    #[test]
    fn asymmetry_map_is_symmetric(img in raster(16, 1), axis_frac in 0.0..1.0f64) {
        let w = img.width();
        let axis = ((axis_frac * w as f64) as usize).min(w - 1);
        let map = asymmetry_map(&img, axis).unwrap();
        for y in 0..img.height() {
            for x in 0..w {
                let m = 2 * axis as isize - x as isize;
                if m >= 0 && (m as usize) < w {
                    prop_assert_eq!(map.get(x, y, 0), map.get(m as usize, y, 0));
                } else {
                    prop_assert_eq!(map.get(x, y, 0), 0.0);
                }
            }
        }
    }
}
