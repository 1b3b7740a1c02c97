//! Puts a portrait into the same handedness as a self-portrait (which shows
//! the sitter as seen in a mirror) and applies a small corrective rotation.
//!
//! `cargo run --example mirror_normalize [OUT_DIR]`

use std::error::Error;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sfumato::fixtures::portrait_pair;
use sfumato::geometry::{apply_transform, mirror_policy, PortraitKind, SimilarityTransform, DEFAULT_FILL};
use sfumato::raster::{save_pnm, to_grayscale};

pub fn run_example(out_dir: &Path) -> Result<String, Box<dyn Error>> {
    fs::create_dir_all(out_dir)?;
    let pair = portrait_pair();
    let portrait = to_grayscale(&pair.portrait);
    let (w, h) = portrait.dims();

    let mut out = String::new();
    let flip = mirror_policy(PortraitKind::SelfPortrait, PortraitKind::Portrait);
    writeln!(out, "mirror={flip}")?;
    let mut t = if flip { SimilarityTransform::reflection() } else { SimilarityTransform::IDENTITY };
    t.rotation_deg = -pair.pose.rotation_deg;
    let normalized = apply_transform(&portrait, &t, DEFAULT_FILL)?;
    let moved = pair.portrait_landmarks.transformed(&t, w, h);
    for (name, p) in moved.points() {
        writeln!(out, "{name}={:.2},{:.2}", p.x, p.y)?;
    }
    fs::write(out_dir.join("portrait.pgm"), save_pnm(&portrait, true))?;
    fs::write(out_dir.join("normalized.pgm"), save_pnm(&normalized, true))?;
    fs::write(out_dir.join("normalized.landmarks"), moved.to_text())?;
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("sfumato-examples/mirror_normalize"));
    print!("{}", run_example(&dir)?);
    println!("wrote {}", dir.display());
    Ok(())
}
