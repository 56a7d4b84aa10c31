//! Compiles and runs a C program against the generated header and the
//! static library. Skipped when no C compiler is on the path.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "charflow.h"

int main(void) {
    CfSolution *sol = NULL;
    if (cf_solution_new(-1.0, 1.0, "x", "0", 0.0, &sol) != CF_STATUS_OK) return 10;
    double u = 0.0;
    if (cf_solution_solve_u(sol, 0.25, 0.1, &u) != CF_STATUS_OK) return 11;
    if (fabs(u - 0.25) > 1e-12) return 12;
    cf_solution_free(sol);

    CfSolution *bad = NULL;
    if (cf_solution_new(-1.0, 1.0, "x +", "0", 0.0, &bad) != CF_STATUS_PARSE) return 20;
    char msg[256];
    size_t n = cf_last_error_message(msg, sizeof msg);
    if (n == 0 || bad != NULL) return 21;

    double ux = 0.0, uy = 0.0;
    if (cf_recover_pointwise(1.0, -1.0, -1.0, -1.0, &ux, &uy) != CF_STATUS_OK) return 30;
    if (fabs(ux - 1.0) > 1e-15 || fabs(uy) > 1e-15) return 31;
    printf("ok %s\n", msg);
    return 0;
}
"#;

fn compiler() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .map(String::from)
}

#[test]
fn header_compiles_and_links() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // Integration test binaries live in target/<profile>/deps.
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libcharflow_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let bin = dir.path().join("main");
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok syntax error"));
}
