//! Aligns a portrait onto a self-portrait by landmarks, overlays the two
//! with partial opacity and lays them out side by side.
//!
//! `cargo run --example merge_portraits [OUT_DIR]`

use std::error::Error;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sfumato::compare::{align_by_landmarks, blend, side_by_side, BlendMode, DEFAULT_ALPHA};
use sfumato::fixtures::portrait_pair;
use sfumato::raster::save_pnm;

pub fn run_example(out_dir: &Path) -> Result<String, Box<dyn Error>> {
    fs::create_dir_all(out_dir)?;
    let pair = portrait_pair();
    let fit = align_by_landmarks(&pair.portrait_landmarks, &pair.self_landmarks, true)?;
    let (w, h) = pair.portrait.dims();
    let t = fit.transform_for(w, h);

    let normal = blend(&pair.self_portrait, &pair.portrait, &t, DEFAULT_ALPHA, BlendMode::Normal)?;
    let multiply = blend(&pair.self_portrait, &pair.portrait, &t, 1.0, BlendMode::Multiply)?;
    let sbs = side_by_side(&pair.self_portrait, &pair.portrait, 8, 1.0)?;
    fs::write(out_dir.join("overlay_normal.pgm"), save_pnm(&normal, true))?;
    fs::write(out_dir.join("overlay_multiply.pgm"), save_pnm(&multiply, true))?;
    fs::write(out_dir.join("side_by_side.ppm"), save_pnm(&sbs, true))?;

    let mut out = String::new();
    writeln!(out, "reflect={} scale={:.4} rotation_deg={:.3} dx={:.2} dy={:.2}", t.reflect, t.scale, t.rotation_deg, t.dx, t.dy)?;
    writeln!(out, "residual_rms={:.4}", fit.residual_rms)?;
    writeln!(out, "side_by_side={}x{}x{}", sbs.width(), sbs.height(), sbs.channels())?;
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("sfumato-examples/merge_portraits"));
    print!("{}", run_example(&dir)?);
    println!("wrote {}", dir.display());
    Ok(())
}
