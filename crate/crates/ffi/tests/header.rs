use std::path::{Path, PathBuf};
use std::process::Command;

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(manifest().join("include/picknorm.h")).unwrap();
    for f in [
        "pn_version",
        "pn_last_error_message",
        "pn_problem_from_json",
        "pn_problem_len",
        "pn_problem_free",
        "pn_compute",
        "pn_result_lower",
        "pn_result_upper",
        "pn_result_iterations",
        "pn_result_stalled",
        "pn_result_to_json",
        "pn_result_free",
        "pn_gleason_json",
        "pn_string_free",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct PnProblem PnProblem;"));
    assert!(header.contains("PN_STATUS_STALL = 4"));
}

fn static_lib() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    for dir in [profile_dir.to_path_buf(), profile_dir.join("deps")] {
        let p = dir.join("libpicknorm_ffi.a");
        if p.exists() {
            return p;
        }
    }
    panic!("libpicknorm_ffi.a not found under {}", profile_dir.display());
}

#[test]
fn c_program_links_against_the_static_library() {
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("picknorm_smoke");
    let status = Command::new("cc")
        .arg(manifest().join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest().join("include"))
        .arg(static_lib())
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "smoke exited with {:?}: {}", run.status.code(), String::from_utf8_lossy(&run.stdout));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "0.500000 0.500000");
}
