//! Writes one image in all four netpbm variants and reads each back.
//!
//! `cargo run --example pnm_formats [OUT_DIR]`

use std::error::Error;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sfumato::fixtures::smooth_portrait;
use sfumato::raster::{load_pnm, save_pnm, to_grayscale, PnmKind};

pub fn run_example(out_dir: &Path) -> Result<String, Box<dyn Error>> {
    fs::create_dir_all(out_dir)?;
    let gray = smooth_portrait(48, 32).quantized();
    let rgb = gray.to_rgb();
    let mut out = String::new();
    for (img, binary) in [(&gray, false), (&rgb, false), (&gray, true), (&rgb, true)] {
        let kind = PnmKind::for_channels(img.channels(), binary);
        let bytes = save_pnm(img, binary);
        let ext = if img.channels() == 1 { "pgm" } else { "ppm" };
        fs::write(out_dir.join(format!("{}.{ext}", kind.magic())), &bytes)?;
        let back = load_pnm(&bytes)?;
        writeln!(out, "{}: {} bytes, lossless={}", kind.magic(), bytes.len(), &back == img)?;
    }
    writeln!(out, "gray_of_rgb_matches={}", to_grayscale(&rgb).quantized() == gray)?;
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("sfumato-examples/pnm_formats"));
    print!("{}", run_example(&dir)?);
    Ok(())
}
