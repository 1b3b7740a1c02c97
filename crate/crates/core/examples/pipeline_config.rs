//! Writes the two reference pipelines with their inputs into a directory
//! and runs them, exactly as `sfumato run <config>` would.
//!
//! `cargo run --example pipeline_config [OUT_DIR]`

use std::error::Error;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sfumato::cli::{load_config, run_pipeline};
use sfumato::fixtures::{write_comparison_workspace, write_restoration_workspace};

pub fn run_example(out_dir: &Path) -> Result<String, Box<dyn Error>> {
    let mut out = String::new();
    for config in [
        write_restoration_workspace(&out_dir.join("restoration"))?,
        write_comparison_workspace(&out_dir.join("comparison"))?,
    ] {
        let base = config.parent().ok_or("config has a directory")?;
        let outcome = run_pipeline(&load_config(&config)?, base, None)?;
        writeln!(out, "## {}", config.display())?;
        out.push_str(&outcome.report.render());
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("sfumato-examples/pipeline_config"));
    print!("{}", run_example(&dir)?);
    Ok(())
}
