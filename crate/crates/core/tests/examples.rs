//! Runs every cargo example end to end.

#[allow(dead_code)]
#[path = "../examples/restore_codex.rs"]
mod restore_codex;
#[allow(dead_code)]
#[path = "../examples/wavelet_sharpen.rs"]
mod wavelet_sharpen;
#[allow(dead_code)]
#[path = "../examples/mirror_normalize.rs"]
mod mirror_normalize;
#[allow(dead_code)]
#[path = "../examples/landmark_compare.rs"]
mod landmark_compare;
#[allow(dead_code)]
#[path = "../examples/merge_portraits.rs"]
mod merge_portraits;
#[allow(dead_code)]
#[path = "../examples/symmetry_map.rs"]
mod symmetry_map;
#[allow(dead_code)]
#[path = "../examples/pipeline_config.rs"]
mod pipeline_config;
#[allow(dead_code)]
#[path = "../examples/pnm_formats.rs"]
mod pnm_formats;

fn line<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

#[test]
fn restore_codex_removes_all_ink() {
    let tmp = tempfile::tempdir().unwrap();
    let out = restore_codex::run_example(tmp.path()).unwrap();
    assert_eq!(line(&out, "masked_after="), "0");
    assert!(line(&out, "psnr_restored=").parse::<f64>().unwrap() >= 30.0);
    assert!(tmp.path().join("restored.pgm").is_file());
}

#[test]
fn wavelet_sharpen_dumps_planes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = wavelet_sharpen::run_example(tmp.path()).unwrap();
    assert!(line(&out, "reconstruction_max_error=").parse::<f64>().unwrap() < 1e-12);
    for f in ["detail_1.pgm", "detail_4.pgm", "residual.pgm", "sharpened.pgm"] {
        assert!(tmp.path().join(f).is_file(), "{f}");
    }
}

#[test]
fn mirror_normalize_reflects_portrait() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mirror_normalize::run_example(tmp.path()).unwrap();
    assert_eq!(line(&out, "mirror="), "true");
    assert!(tmp.path().join("normalized.landmarks").is_file());
}

#[test]
fn landmark_compare_recovers_pose() {
    let out = landmark_compare::run_example().unwrap();
    let same: f64 = line(&out, "similarity=").parse().unwrap();
    let other: f64 = line(&out, "stranger_similarity=").parse().unwrap();
    assert!(same > other, "{out}");
    assert!(line(&out, "fit ").starts_with("reflect=true"), "{out}");
}

#[test]
fn merge_portraits_writes_composites() {
    let tmp = tempfile::tempdir().unwrap();
    let out = merge_portraits::run_example(tmp.path()).unwrap();
    assert_eq!(line(&out, "side_by_side="), "264x144x3");
    for f in ["overlay_normal.pgm", "overlay_multiply.pgm", "side_by_side.ppm"] {
        assert!(tmp.path().join(f).is_file(), "{f}");
    }
}

#[test]
fn symmetry_map_separates_balanced_from_uneven() {
    let tmp = tempfile::tempdir().unwrap();
    let out = symmetry_map::run_example(tmp.path()).unwrap();
    assert!(line(&out, "balanced: ").ends_with("mean_asymmetry=0.00000"), "{out}");
    assert!(!line(&out, "uneven: ").ends_with("mean_asymmetry=0.00000"), "{out}");
}

#[test]
fn pipeline_config_runs_both_pipelines() {
    let tmp = tempfile::tempdir().unwrap();
    let out = pipeline_config::run_example(tmp.path()).unwrap();
    assert_eq!(out.matches("summary.status=ok").count(), 2, "{out}");
    assert!(tmp.path().join("comparison/comparison.pgm").is_file());
    assert!(tmp.path().join("restoration/restored.pgm").is_file());
}

#[test]
fn pnm_formats_are_lossless() {
    let tmp = tempfile::tempdir().unwrap();
    let out = pnm_formats::run_example(tmp.path()).unwrap();
    assert_eq!(out.matches("lossless=true").count(), 4, "{out}");
}
