//! Compiles and links a small C program against the generated header and the
//! static library. Skipped when no C compiler is on PATH.
//!
//! `cargo test` does not produce the static library, so the test builds it
//! into its own target directory (the outer build holds the main one's lock).

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "edgeplacer.h"

int main(void) {
    EpConfig *cfg = NULL;
    if (ep_config_from_json("{\"scenario\": {\"horizon\": 30}, \"policy\": {\"name\": \"psp-wu\"}}", &cfg) != EP_STATUS_OK) {
        return 10;
    }
    if (ep_config_set(cfg, "policy.beta", "0.3") != EP_STATUS_OK) return 11;
    if (ep_config_set(cfg, "policy.beta", "7") != EP_STATUS_CONFIG) return 12;
    if (ep_last_error_message() == NULL) return 13;

    EpRun *run = NULL;
    if (ep_run(cfg, &run) != EP_STATUS_OK) return 14;
    EpRunSummary s;
    if (ep_run_summary(run, &s) != EP_STATUS_OK) return 15;
    if (s.horizon != 30 || !s.budget_holds) return 16;
    EpSlot slot;
    if (ep_run_slot(run, 29, &slot) != EP_STATUS_OK || slot.t != 29) return 17;

    char *csv = NULL;
    if (ep_sweep_csv(cfg, &csv) != EP_STATUS_CONFIG || csv != NULL) return 18;
    if (ep_config_set(cfg, "sweep", "{\"axis\": \"v\", \"values\": [10, 100]}") != EP_STATUS_OK) return 21;
    if (ep_sweep_csv(cfg, &csv) != EP_STATUS_OK) {
        fprintf(stderr, "%s\n", ep_last_error_message());
        return 22;
    }
    if (strncmp(csv, "axis,policy", 11) != 0) return 19;
    ep_string_free(csv);

    double q = 0.0;
    if (ep_update_queue(10.0, 7.0, 5.0, &q) != EP_STATUS_OK || q != 12.0) return 20;

    printf("%s %.6f\n", ep_version(), s.avg_latency_s);
    ep_run_free(run);
    ep_config_free(cfg);
    return 0;
}
"#;

fn compiler() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .map(str::to_owned)
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn build_static_lib() -> PathBuf {
    let target_dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("ffi-smoke");
    let status = Command::new(env!("CARGO"))
        .args(["build", "--quiet", "--lib", "--manifest-path"])
        .arg(crate_dir().join("Cargo.toml"))
        .arg("--target-dir")
        .arg(&target_dir)
        .status()
        .unwrap();
    assert!(status.success(), "building the static library failed");
    target_dir.join("debug").join("libedgeplacer_ffi.a")
}

#[test]
fn header_declares_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/edgeplacer.h")).unwrap();
    for name in [
        "typedef struct EpConfig EpConfig;",
        "typedef struct EpRun EpRun;",
        "EP_STATUS_OK = 0",
        "EP_STATUS_PANIC = 7",
        "ep_config_from_json",
        "ep_config_set",
        "ep_run_summary",
        "ep_sweep_csv",
        "ep_string_free",
        "ep_last_error_message",
    ] {
        assert!(header.contains(name), "header lacks `{name}`");
    }
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let lib = build_static_lib();
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let out = Command::new(&cc)
        .args(["-std=c11", "-Wall", "-Werror", "-I"])
        .arg(crate_dir().join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "compile failed:\n{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "smoke program exited with {:?}", run.status.code());
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.starts_with(env!("CARGO_PKG_VERSION")), "{stdout}");
}
