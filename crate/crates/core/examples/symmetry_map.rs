//! Maps left/right differences about the eye midline and measures the
//! relative size of the two eyes.
//!
//! `cargo run --example symmetry_map [OUT_DIR]`

use std::error::Error;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sfumato::compare::{asymmetry_map, eye_size_ratio, mean_asymmetry, LEFT_EYE, RIGHT_EYE};
use sfumato::fixtures::{face_landmarks, render_face_on, FaceGeometry};
use sfumato::raster::{save_pnm, Raster};

pub fn run_example(out_dir: &Path) -> Result<String, Box<dyn Error>> {
    fs::create_dir_all(out_dir)?;
    // shading that is mirror-symmetric about column 64
    let shade = Raster::from_fn(129, 112, 1, |x, y, _| {
        let (u, v) = ((x as f64 - 64.0) / 64.0, y as f64 / 111.0);
        0.85 - 0.2 * u * u - 0.1 * v
    })?;
    let mut out = String::new();
    for (tag, ratio) in [("balanced", 1.0), ("uneven", 1.3)] {
        let lm = face_landmarks(&FaceGeometry {
            eye_ratio: ratio,
            midline_shift: 0.0,
            ..Default::default()
        });
        let img = render_face_on(&shade, &lm);
        let (l, r) = (lm.point(LEFT_EYE).ok_or("left eye")?, lm.point(RIGHT_EYE).ok_or("right eye")?);
        let axis = ((l.x + r.x) / 2.0).round() as usize;
        let map = asymmetry_map(&img, axis)?;
        fs::write(out_dir.join(format!("{tag}_asymmetry.pgm")), save_pnm(&map, true))?;
        writeln!(
            out,
            "{tag}: axis_x={axis} eye_ratio={:.3} mean_asymmetry={:.5}",
            eye_size_ratio(&lm)?,
            mean_asymmetry(&img, axis)?
        )?;
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("sfumato-examples/symmetry_map"));
    print!("{}", run_example(&dir)?);
    println!("wrote {}", dir.display());
    Ok(())
}
