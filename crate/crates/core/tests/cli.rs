use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sfumato::compare::{feature_vector, landmark_similarity};
use sfumato::fixtures::{codex_page, portrait_pair, smooth_portrait};
use sfumato::geometry::reflect_h;
use sfumato::raster::{load_pnm, save_pnm};
use sfumato::restore::{restore, RestoreParams};

fn sfumato(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfumato"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn restore_matches_library() {
    let tmp = tempfile::tempdir().unwrap();
    let page = codex_page(64);
    fs::write(tmp.path().join("in.pgm"), save_pnm(&page.inked, true)).unwrap();
    let out = sfumato(tmp.path(), &["restore", "--threshold", "0.2", "in.pgm", "out.pgm"]);
    assert!(out.status.success(), "{}", stderr(&out));

    let lib = restore(&page.inked.quantized(), &RestoreParams::default()).unwrap();
    assert_eq!(fs::read(tmp.path().join("out.pgm")).unwrap(), save_pnm(&lib.image, true));
    assert!(stderr(&out).contains(&format!("masked_before={}", lib.diagnostics.masked_before)));
    assert!(stderr(&out).contains("masked_after=0"));
}

#[test]
fn transform_reflect_matches_library() {
    let tmp = tempfile::tempdir().unwrap();
    let img = smooth_portrait(31, 20).quantized();
    fs::write(tmp.path().join("in.pgm"), save_pnm(&img, true)).unwrap();
    let out = sfumato(tmp.path(), &["--ascii", "transform", "--reflect", "in.pgm", "out.pgm"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let bytes = fs::read(tmp.path().join("out.pgm")).unwrap();
    assert!(bytes.starts_with(b"P2"));
    assert_eq!(load_pnm(&bytes).unwrap(), reflect_h(&img));
}

#[test]
fn compare_prints_library_similarity() {
    let tmp = tempfile::tempdir().unwrap();
    let pair = portrait_pair();
    fs::write(tmp.path().join("a.landmarks"), pair.self_landmarks.to_text()).unwrap();
    fs::write(tmp.path().join("b.landmarks"), pair.portrait_landmarks.to_text()).unwrap();
    let out = sfumato(tmp.path(), &["compare", "a.landmarks", "b.landmarks"]);
    assert!(out.status.success(), "{}", stderr(&out));

    let a = sfumato::compare::LandmarkSet::parse(&pair.self_landmarks.to_text()).unwrap();
    let b = sfumato::compare::LandmarkSet::parse(&pair.portrait_landmarks.to_text()).unwrap();
    let score = landmark_similarity(&feature_vector(&a).unwrap(), &feature_vector(&b).unwrap());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().any(|l| l == format!("similarity={score}")), "{stdout}");
}

#[test]
fn sbs_and_wavelet_write_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let img = smooth_portrait(40, 30);
    fs::write(tmp.path().join("a.pgm"), save_pnm(&img, true)).unwrap();
    let out = sfumato(tmp.path(), &["sbs", "--gutter", "2", "a.pgm", "a.pgm", "pair.pgm"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(load_pnm(&fs::read(tmp.path().join("pair.pgm")).unwrap()).unwrap().dims(), (82, 30));

    let out = sfumato(
        tmp.path(),
        &["wavelet", "--levels", "2", "--gains", "1.5,1", "--dump-planes", "planes", "a.pgm", "w.pgm"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    for f in ["w.pgm", "planes/detail_1.pgm", "planes/detail_2.pgm", "planes/residual.pgm"] {
        assert!(tmp.path().join(f).is_file(), "{f} missing");
    }
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(sfumato(tmp.path(), &["restore"]).status.code(), Some(2));
    assert_eq!(sfumato(tmp.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        sfumato(tmp.path(), &["restore", "--neighborhood", "6", "a.pgm", "b.pgm"]).status.code(),
        Some(2)
    );
    assert_eq!(sfumato(tmp.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn bad_config_exits_2_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("a.pgm"), save_pnm(&smooth_portrait(16, 16), true)).unwrap();
    fs::write(
        tmp.path().join("bad.toml"),
        "outputs = [\"out.pgm\"]\n[[inputs]]\npath = \"a.pgm\"\n[[steps]]\nkind = \"wavelet\"\nlevels = 0\n",
    )
    .unwrap();
    let out = sfumato(tmp.path(), &["run", "bad.toml"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));
    assert!(!tmp.path().join("out.pgm").exists());
    assert!(!tmp.path().join("out.pgm.report").exists());
}

#[test]
fn stage_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    // 8x8 cannot hold a four-level kernel
    fs::write(tmp.path().join("a.pgm"), save_pnm(&smooth_portrait(8, 8), true)).unwrap();
    let out = sfumato(tmp.path(), &["wavelet", "--levels", "4", "a.pgm", "b.pgm"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(!tmp.path().join("b.pgm").exists());
}

#[test]
fn io_failures_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(sfumato(tmp.path(), &["restore", "missing.pgm", "b.pgm"]).status.code(), Some(4));
    fs::write(tmp.path().join("junk.pgm"), b"P7 nonsense").unwrap();
    assert_eq!(sfumato(tmp.path(), &["transform", "junk.pgm", "b.pgm"]).status.code(), Some(4));
}

#[test]
fn empty_pipeline_copies_input_and_honours_report_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let img = smooth_portrait(12, 9).quantized();
    let bytes = save_pnm(&img, true);
    fs::write(tmp.path().join("a.pgm"), &bytes).unwrap();
    fs::write(tmp.path().join("copy.toml"), "outputs = [\"b.pgm\"]\n[[inputs]]\npath = \"a.pgm\"\n").unwrap();
    let out = sfumato(tmp.path(), &["--report", "custom.report", "run", "copy.toml"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(fs::read(tmp.path().join("b.pgm")).unwrap(), bytes);
    let report = fs::read_to_string(tmp.path().join("custom.report")).unwrap();
    assert!(report.contains("summary.steps=0"), "{report}");
    assert!(report.contains("summary.status=ok"), "{report}");
}
