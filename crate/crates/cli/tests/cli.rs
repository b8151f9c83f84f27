use std::process::{Command, Output};

fn ppants(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppants"))
        .args(args)
        .env_remove("PPANTS_FORMAT")
        .env_remove("PPANTS_LMAX")
        .env_remove("PPANTS_DMAX")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_dir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("ppants-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn trefoil_and_polynomial() {
    assert_eq!(stdout(&ppants(&["intersect", "xyzxyz"])), "3\n");
    assert_eq!(stdout(&ppants(&["intersect", "acb"])), "3\n");
    assert_eq!(stdout(&ppants(&["polyfit", "--delta", "0"])), "4L^2 - 24L + 38\n");
    assert_eq!(stdout(&ppants(&["polyfit", "--delta", "-1"])), "3L^2 - 9L + 9\n");
}

#[test]
fn motif_census_columns() {
    let out = stdout(&ppants(&["census", "--method", "motif", "--lmax", "17", "--dmax", "1", "--format", "csv"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "delta,L,count,method");
    assert!(lines.contains(&"-1,17,723,motif"));
    assert!(lines.contains(&"0,17,786,motif"));
    assert!(lines.contains(&"1,17,5076,motif"));
    assert_eq!(lines.len(), 1 + 3 * 16);
}

#[test]
fn output_ignores_thread_count() {
    let args = |t: &'static str| ["--threads", t, "census", "--method", "brute", "--lmax", "9", "--dmax", "12", "--format", "json"];
    let one = ppants(&args("1"));
    let many = ppants(&args("8"));
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn environment_overrides() {
    let out = Command::new(env!("CARGO_BIN_EXE_ppants"))
        .args(["census", "--method", "brute"])
        .env("PPANTS_LMAX", "3")
        .env("PPANTS_DMAX", "0")
        .env("PPANTS_FORMAT", "csv")
        .output()
        .unwrap();
    assert_eq!(stdout(&out), "delta,L,count,method\n-1,2,3,brute\n-1,3,9,brute\n0,2,0,brute\n0,3,1,brute\n");
}

#[test]
fn errors_are_json() {
    for args in [&["intersect", "xya"][..], &["intersect", "xyz"], &["census", "--lmax", "0"], &["frobnicate"], &["census", "--method", "brute", "--lmax", "40"]] {
        let out = ppants(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        assert!(err["error"].is_string() && err["message"].is_string(), "{args:?}");
    }
    let out = ppants(&["intersect", "xyzxy"]);
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "OddLength");
}

#[test]
fn cache_and_export() {
    let dir = temp_dir("cache");
    let d = dir.to_str().unwrap();
    let first = ppants(&["--cache-dir", d, "census", "--method", "brute", "--lmax", "7", "--dmax", "9"]);
    assert!(first.status.success());
    assert!(dir.join("census/brute-L7.csv").exists());
    assert!(dir.join("census/brute-7.csv").exists());
    let again = ppants(&["--cache-dir", d, "census", "--method", "brute", "--lmax", "7", "--dmax", "9"]);
    assert_eq!(first.stdout, again.stdout);

    let motif = ppants(&["--cache-dir", d, "motifs", "--delta", "1"]);
    assert_eq!(stdout(&motif).lines().count(), 153);
    assert!(dir.join("motifs/delta=1.txt").exists());

    let csv = dir.join("census/brute-7.csv");
    let md = ppants(&["export", csv.to_str().unwrap(), "--format", "markdown"]);
    let text = stdout(&md);
    assert!(text.starts_with("| L | δ=-1 |"));
    assert!(text.contains("| 7 | 93 | 66 | 276 | 156 | 216 | 150 | 135 | 51 | 21 | 6 |"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn verify_suites_pass() {
    let out = ppants(&["verify", "--suite", "all", "--lmax", "5", "--dmax", "1", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 6);
}

#[test]
fn surgery_commands() {
    assert_eq!(stdout(&ppants(&["expand", "xyzy", "xy@3"])), "xyzyxy\n");
    let out = ppants(&["contract", "xyxyxz", "xy@0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result_class"], "xyxz");
    assert_eq!(v["intersection"], 1);
    let bad = ppants(&["contract", "xyzy", "xy@0"]);
    assert_eq!(bad.status.code(), Some(2));
}
