//! Removes dark overwritten text from a drawing by iterative neighbor
//! averaging, then reports how close the result is to the clean drawing.
//!
//! `cargo run --example restore_codex [OUT_DIR]`

use std::error::Error;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sfumato::fixtures::codex_page;
use sfumato::raster::{psnr, save_pnm};
use sfumato::restore::{restore, RestoreParams};

pub fn run_example(out_dir: &Path) -> Result<String, Box<dyn Error>> {
    fs::create_dir_all(out_dir)?;
    let page = codex_page(128);
    let restored = restore(&page.inked, &RestoreParams::default())?;
    fs::write(out_dir.join("inked.pgm"), save_pnm(&page.inked, true))?;
    fs::write(out_dir.join("restored.pgm"), save_pnm(&restored.image, true))?;

    let mut out = String::new();
    write!(out, "{}", restored.diagnostics)?;
    writeln!(out, "psnr_inked={:.2}", psnr(&page.inked, &page.clean)?)?;
    writeln!(out, "psnr_restored={:.2}", psnr(&restored.image, &page.clean)?)?;
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("sfumato-examples/restore_codex"));
    print!("{}", run_example(&dir)?);
    println!("wrote {}", dir.display());
    Ok(())
}
