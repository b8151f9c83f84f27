//! Replays every `console` block in the guide and the README against the
//! binary. A block holds `$ ppants ...` lines, each followed by its expected
//! output (stdout, then stderr) and optionally `[exit status N]`.

use std::path::{Path, PathBuf};
use std::process::Command;

struct Example {
    source: String,
    args: Vec<String>,
    expected: String,
    status: i32,
}

fn docs() -> Vec<PathBuf> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let mut files = vec![root.join("README.md")];
    let mut chapters: Vec<PathBuf> = std::fs::read_dir(root.join("book/src"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "md"))
        .collect();
    chapters.sort();
    files.extend(chapters);
    files
}

fn examples(path: &Path) -> Vec<Example> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut out: Vec<Example> = Vec::new();
    let mut in_block = false;
    for (n, line) in text.lines().enumerate() {
        if line.starts_with("```") {
            in_block = line.trim() == "```console";
            continue;
        }
        if !in_block {
            continue;
        }
        if let Some(cmd) = line.strip_prefix("$ ppants") {
            out.push(Example {
                source: format!("{}:{}", path.display(), n + 1),
                args: cmd.split_whitespace().map(String::from).collect(),
                expected: String::new(),
                status: 0,
            });
        } else if let Some(code) = line.strip_prefix("[exit status ").and_then(|s| s.strip_suffix(']')) {
            out.last_mut().unwrap().status = code.parse().unwrap();
        } else {
            let ex = out.last_mut().unwrap_or_else(|| panic!("output before command at {}:{}", path.display(), n + 1));
            ex.expected.push_str(line);
            ex.expected.push('\n');
        }
    }
    out
}

#[test]
fn documented_examples_run() {
    let mut count = 0;
    for path in docs() {
        for ex in examples(&path) {
            let out = Command::new(env!("CARGO_BIN_EXE_ppants"))
                .args(&ex.args)
                .env_remove("PPANTS_THREADS")
                .env_remove("PPANTS_CACHE_DIR")
                .env_remove("PPANTS_FORMAT")
                .env_remove("PPANTS_LMAX")
                .env_remove("PPANTS_DMAX")
                .env_remove("PPANTS_RADIUS")
                .output()
                .unwrap();
            let got = format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
            assert_eq!(got, ex.expected, "output of {}", ex.source);
            assert_eq!(out.status.code(), Some(ex.status), "status of {}", ex.source);
            count += 1;
        }
    }
    assert!(count >= 10, "only {count} examples found");
}
