//! Compares two faces by scale-free landmark distances and recovers the
//! pose change between them with a least-squares similarity fit.
//!
//! `cargo run --example landmark_compare`

use std::error::Error;
use std::fmt::Write as _;

use sfumato::compare::{
    align_by_landmarks, eye_size_ratio, feature_vector, landmark_similarity, FEATURE_LABELS,
};
use sfumato::fixtures::{face_landmarks, portrait_pair, FaceGeometry};

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let pair = portrait_pair();
    let a = feature_vector(&pair.self_landmarks)?;
    let b = feature_vector(&pair.portrait_landmarks)?;

    let mut out = String::new();
    for (label, (x, y)) in FEATURE_LABELS.iter().zip(a.0.iter().zip(&b.0)) {
        writeln!(out, "{label}: {x:.4} {y:.4}")?;
    }
    writeln!(out, "similarity={:.6}", landmark_similarity(&a, &b))?;
    writeln!(
        out,
        "eye_ratio={:.3} {:.3}",
        eye_size_ratio(&pair.self_landmarks)?,
        eye_size_ratio(&pair.portrait_landmarks)?
    )?;

    let stranger = face_landmarks(&FaceGeometry {
        nose_drop: 0.95,
        mouth_drop: 1.5,
        midline_shift: -0.1,
        ..Default::default()
    });
    writeln!(out, "stranger_similarity={:.6}", landmark_similarity(&a, &feature_vector(&stranger)?))?;

    let fit = align_by_landmarks(&pair.self_landmarks, &pair.portrait_landmarks, true)?;
    writeln!(
        out,
        "fit reflect={} scale={:.4} rotation_deg={:.3} residual_rms={:.4}",
        fit.reflect, fit.scale, fit.rotation_deg, fit.residual_rms
    )?;
    writeln!(
        out,
        "pose reflect={} scale={:.4} rotation_deg={:.3}",
        pair.pose.reflect, pair.pose.scale, pair.pose.rotation_deg
    )?;
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
