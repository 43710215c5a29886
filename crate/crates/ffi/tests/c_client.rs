use std::path::PathBuf;
use std::process::Command;

use fvmp::{ExperimentSpec, InitialCondition, LimiterKind, Scheme, Simulation, StreamCase};

/// Directory holding the library artifacts of the current profile.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(|deps| deps.parent()).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let dir = artifact_dir();
    let lib = dir.join("libfvmp_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let status = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Wextra", "-Werror", "-I"])
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());

    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();

    let spec = ExperimentSpec::new(
        Scheme::Fv2,
        LimiterKind::N2n,
        StreamCase::diag(),
        InitialCondition::CosBump,
        32,
    );
    let mut sim = Simulation::new(spec).unwrap();
    sim.run().unwrap();
    let expected = sim.report().unwrap().rel_l1;
    let rel_l1: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("rel_l1 "))
        .expect("rel_l1 line")
        .parse()
        .unwrap();
    assert_eq!(rel_l1, expected);
    assert!(stdout.contains(&format!("version {}", env!("CARGO_PKG_VERSION"))));
    assert!(stdout.contains("error: unknown scheme code 9"));
}
