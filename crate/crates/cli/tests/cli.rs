//! End-to-end runs of the `tdk` binary: golden JSON reports, exit codes and
//! file outputs. Set `UPDATE_GOLDEN=1` to rewrite the golden files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Runs `tdk` from the fixtures directory so report paths stay relative.
fn tdk_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdk"))
        .current_dir(dir)
        .env_remove("TDK_SIZE_CAP")
        .args(args)
        .output()
        .expect("spawn tdk")
}

fn tdk(args: &[&str]) -> Output {
    tdk_in(&fixtures(), args)
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn report(out: &Output) -> Value {
    let mut v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    assert_eq!(v["schema"], "tdk.run/v1");
    assert!(v["wall_time_ms"].is_u64());
    v["wall_time_ms"] = Value::from(0);
    v
}

fn golden(name: &str, args: &[&str], expected_code: i32) {
    let out = tdk(args);
    assert_eq!(code(&out), expected_code, "{name}: {out:?}");
    let got = report(&out);
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.json"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
    }
    let want: Value = serde_json::from_str(
        &fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display())),
    )
    .unwrap();
    assert_eq!(got, want, "{name} drifted from {}", path.display());
}

#[test]
fn golden_distance_acg() {
    golden(
        "distance_acg",
        &["distance", "--source", "acg.source.txt", "--target", "acg.target.txt", "--max-k", "5", "--json"],
        0,
    );
}

#[test]
fn golden_decide_negative() {
    golden(
        "decide_k0",
        &["decide", "--source", "acg.source.txt", "--target", "acg.target.txt", "--k", "0", "--json"],
        1,
    );
}

#[test]
fn golden_kernelize() {
    golden(
        "kernelize_abcd",
        &["kernelize", "--source", "abcd.source.txt", "--target", "abcd.target.txt", "--json"],
        0,
    );
}

#[test]
fn golden_fpt_solve() {
    golden(
        "fpt_abcd",
        &["fpt-solve", "--source", "abcd.source.txt", "--target", "abcd.target.txt", "--k", "2", "--json"],
        0,
    );
}

#[test]
fn golden_ces() {
    golden("ces_solve_k3", &["ces", "solve", "--graph", "k3.graph.txt", "--c", "3", "--json"], 0);
    golden(
        "ces_decide_k3_7",
        &["ces", "decide", "--graph", "k3.graph.txt", "--c", "3", "--budget", "7", "--json"],
        1,
    );
}

#[test]
fn golden_clique_to_ces() {
    golden(
        "clique_to_ces_p3",
        &["reduce", "clique-to-ces", "--graph", "p3.graph.txt", "--k", "2", "--json"],
        0,
    );
}

#[test]
fn golden_generate() {
    golden("generate_seed7", &["generate", "--seed", "7", "--json"], 0);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&tdk(&["bogus"])), 2);
    assert_eq!(code(&tdk(&[])), 2);
    assert_eq!(code(&tdk(&["--help"])), 0);
    assert_eq!(code(&tdk(&["decide", "--source", "acg.source.txt"])), 2);
    assert_eq!(
        code(&tdk(&["distance", "--source", "missing.txt", "--target", "acg.target.txt"])),
        2
    );
    assert_eq!(
        code(&tdk(&["distance", "--source", "empty.txt", "--target", "acg.target.txt"])),
        2
    );
    assert_eq!(code(&tdk(&["ces", "solve", "--graph", "selfloop.graph.txt", "--c", "1"])), 2);
    assert_eq!(
        code(&tdk(&["decide", "--source", "acg.source.txt", "--target", "acg.target.txt", "--k", "2"])),
        0
    );
    // target shorter than source: unreachable
    assert_eq!(
        code(&tdk(&["distance", "--source", "acg.target.txt", "--target", "acg.source.txt"])),
        1
    );
    // kernelization needs an exemplar source
    assert_eq!(
        code(&tdk(&["kernelize", "--source", "acg.target.txt", "--target", "acg.target.txt"])),
        2
    );
}

#[test]
fn decide_witness_file_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixtures();
    let s = fx.join("acg.source.txt");
    let t = fx.join("acg.target.txt");
    let w = dir.path().join("w.txt");
    let out = tdk(&[
        "decide", "--source", s.to_str().unwrap(), "--target", t.to_str().unwrap(),
        "--k", "3", "--witness", w.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(&w).unwrap(), "2 1\n0 3\n");
    let out = tdk(&[
        "verify", "--target", t.to_str().unwrap(), "--schedule", w.to_str().unwrap(),
        "--source", s.to_str().unwrap(), "--json",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["result"]["length"], 2);

    fs::write(&w, "0 3\n").unwrap();
    let out = tdk(&[
        "verify", "--target", t.to_str().unwrap(), "--schedule", w.to_str().unwrap(),
        "--source", s.to_str().unwrap(), "--json",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(report(&out)["result"]["step_index"], 0);
}

#[test]
fn reduction_pipeline_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixtures().join("k3.graph.txt"), dir.path().join("k3.txt")).unwrap();
    let run = |args: &[&str]| tdk_in(dir.path(), args);

    // full-scale defaults are refused by the size cap, unless it is raised
    let refused = run(&["reduce", "ces-to-td", "--graph", "k3.txt", "--c", "3", "--r", "8"]);
    assert_eq!(code(&refused), 2);
    assert!(String::from_utf8_lossy(&refused.stderr).contains("cap"));

    let built = run(&[
        "reduce", "ces-to-td", "--graph", "k3.txt", "--c", "3", "--r", "8",
        "--d", "2", "--p", "3", "--out-prefix", "red", "--json",
    ]);
    assert_eq!(code(&built), 0, "{built:?}");
    let rep = report(&built);
    assert_eq!(rep["result"]["equivalence"], "forward-witness only");
    // p/m = 1, d = 2, n = 3, c = 3, r = 8
    assert_eq!(rep["result"]["budget"], 2 * (8 + 9) + 4 * 3 * 2 * 3);

    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("red.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["schema"], "tdk.reduction/v1");
    assert_eq!(manifest["equivalence"], "forward-witness only");
    assert_eq!(manifest["source_file"], "red.source.txt");

    for subset in ["", "0", "0,1", "0,1,2"] {
        let w = run(&["witness", "--manifest", "red.manifest.json", "--subset", subset, "--json"]);
        assert_eq!(code(&w), 0, "{w:?}");
        assert_eq!(report(&w)["result"]["schedule_file"], "red.schedule.txt");
        let v = run(&[
            "verify", "--target", "red.target.txt", "--schedule", "red.schedule.txt",
            "--source", "red.source.txt",
        ]);
        assert_eq!(code(&v), 0, "subset {subset:?}: {v:?}");
    }
    assert_eq!(code(&run(&["witness", "--manifest", "red.manifest.json", "--subset", "5"])), 2);
}

#[test]
fn size_cap_env_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixtures().join("k3.graph.txt"), dir.path().join("k3.txt")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_tdk"))
        .current_dir(dir.path())
        .env("TDK_SIZE_CAP", "100")
        .args(["reduce", "ces-to-td", "--graph", "k3.txt", "--c", "3", "--r", "8", "--d", "2", "--p", "3"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap of 100"));
}

#[test]
fn generated_files_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let gen = tdk_in(dir.path(), &["generate", "--seed", "11", "--source-len", "4", "--dups", "2", "--out-prefix", "g"]);
    assert_eq!(code(&gen), 0);
    let out = tdk_in(
        dir.path(),
        &["distance", "--source", "g.source.txt", "--target", "g.target.txt", "--json"],
    );
    assert_eq!(code(&out), 0);
    let d = report(&out)["result"]["distance"].as_u64().unwrap();
    assert!(d <= 2);
}
