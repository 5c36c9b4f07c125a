//! Compiles a C program against the generated header and the shared
//! library, then runs it on the bundled fixture.

use std::env;
use std::path::{Path, PathBuf};
use std::process::Command;

fn target_dir() -> PathBuf {
    // <target>/<profile>/deps/<test binary>
    let exe = env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let cc = env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler ({cc})");
        return;
    }
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let libdir = target_dir();
    assert!(
        libdir.join("libmonobreak_ffi.so").exists() || libdir.join("libmonobreak_ffi.dylib").exists(),
        "shared library not found in {}",
        libdir.display()
    );
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-L")
        .arg(&libdir)
        .arg("-lmonobreak_ffi")
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");

    let fixtures = manifest.join("../core/fixtures");
    let out = Command::new(&exe)
        .arg(fixtures.join("orders-demo"))
        .arg(fixtures.join("ops.json"))
        .env("LD_LIBRARY_PATH", &libdir)
        .env("DYLD_LIBRARY_PATH", &libdir)
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}\n{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.starts_with("services=2\nTotal Files: 14\n"), "{stdout}");
    assert!(stdout.contains("GraphNumber: 1"));
    assert!(stdout.ends_with("missing=3 null=1\n"), "{stdout}");
}
