//! End-to-end checks of the siedm binary: output shapes, exit codes, and
//! the byte-level handling promises.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_siedm"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Writes `text` and builds its index, returning (text path, index path).
fn build_index(dir: &Path, text: &[u8]) -> (PathBuf, PathBuf) {
    let text_path = dir.join("text.bin");
    let index_path = dir.join("text.idx");
    fs::write(&text_path, text).unwrap();
    let out = run_in(dir, &["build", "-i", "text.bin", "-o", "text.idx"]);
    assert_eq!(code(&out), 0, "build failed: {}", String::from_utf8_lossy(&out.stderr));
    (text_path, index_path)
}

#[test]
fn build_reports_grammar_statistics() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.bin"), b"abab").unwrap();
    let out = run_in(dir.path(), &["build", "-i", "t.bin", "-o", "t.idx"]);
    assert_eq!(code(&out), 0);
    let s = stdout(&out);
    assert!(s.contains("n: 2"), "{s}");
    assert!(s.contains("sigma: 2"), "{s}");
    assert!(s.contains("rounds: 2"), "{s}");
    assert!(s.contains("encoded tree:"), "{s}");
    assert!(s.contains("characteristic vectors:"), "{s}");
    assert!(s.contains("length vector:"), "{s}");
    assert!(dir.path().join("t.idx").is_file());
}

#[test]
fn search_prints_sorted_tsv() {
    let dir = tempfile::tempdir().unwrap();
    build_index(dir.path(), b"abab");
    let out = run_in(dir.path(), &["search", "-x", "text.idx", "-q", "ab", "-t", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "1\t0\n3\t0\n");
    let out = run_in(dir.path(), &["search", "-x", "text.idx", "-q", "ab", "-t", "1"]);
    assert_eq!(stdout(&out), "1\t0\n2\t1\n3\t0\n");
}

#[test]
fn search_json_carries_decomposition_size() {
    let dir = tempfile::tempdir().unwrap();
    build_index(dir.path(), b"abab");
    let out = run_in(
        dir.path(),
        &["search", "-x", "text.idx", "-q", "ab", "-t", "1", "--format", "json"],
    );
    assert_eq!(code(&out), 0);
    let rows: Vec<serde_json::Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).expect("valid json per line"))
        .collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["pos"], 1);
    assert_eq!(rows[0]["dist"], 0);
    assert_eq!(rows[1]["pos"], 2);
    assert_eq!(rows[1]["dist"], 1);
    assert_eq!(rows[1]["decomp_len"], 2);
}

#[test]
fn query_can_come_from_a_raw_byte_file() {
    // Same shape as the abab case, but with bytes no UTF-8 string can hold.
    let dir = tempfile::tempdir().unwrap();
    build_index(dir.path(), &[0xff, 0x00, 0xff, 0x00]);
    fs::write(dir.path().join("q.bin"), [0xff, 0x00]).unwrap();
    let out = run_in(
        dir.path(),
        &["search", "-x", "text.idx", "-Q", "q.bin", "-t", "0"],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "1\t0\n3\t0\n");
}

#[test]
fn stats_prints_counters_with_a_query() {
    let dir = tempfile::tempdir().unwrap();
    build_index(dir.path(), b"abab");
    let out = run_in(dir.path(), &["stats", "-x", "text.idx"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("text length: 4"));
    assert!(!stdout(&out).contains("#TN"));
    let out = run_in(dir.path(), &["stats", "-x", "text.idx", "-q", "ab", "-t", "1"]);
    assert_eq!(code(&out), 0);
    let s = stdout(&out);
    assert!(s.contains("#TN: "), "{s}");
    assert!(s.contains("#CAND: "), "{s}");
    assert!(s.contains("#TP: "), "{s}");
    assert!(s.contains("#OCC: "), "{s}");
    // Counters need both halves.
    let out = run_in(dir.path(), &["stats", "-x", "text.idx", "-q", "ab"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn exit_codes_separate_failure_classes() {
    let dir = tempfile::tempdir().unwrap();
    build_index(dir.path(), b"abab");

    // Usage: negative tau.
    let out = run_in(dir.path(), &["search", "-x", "text.idx", "-q", "ab", "-t", "-1"]);
    assert_eq!(code(&out), 1);
    // Usage: missing required argument.
    let out = run_in(dir.path(), &["search", "-x", "text.idx", "-t", "0"]);
    assert_eq!(code(&out), 1);
    // I/O: the index file does not exist.
    let out = run_in(dir.path(), &["search", "-x", "nope.idx", "-q", "ab", "-t", "0"]);
    assert_eq!(code(&out), 2);
    // Format: not an index file at all.
    fs::write(dir.path().join("junk.idx"), b"not an index").unwrap();
    let out = run_in(dir.path(), &["search", "-x", "junk.idx", "-q", "ab", "-t", "0"]);
    assert_eq!(code(&out), 3);
    // Corruption: a flipped byte inside a real index.
    let mut bytes = fs::read(dir.path().join("text.idx")).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x40;
    fs::write(dir.path().join("bad.idx"), &bytes).unwrap();
    let out = run_in(dir.path(), &["search", "-x", "bad.idx", "-q", "ab", "-t", "0"]);
    assert_eq!(code(&out), 3);
    // Query errors: too short, then longer than the text.
    let out = run_in(dir.path(), &["search", "-x", "text.idx", "-q", "a", "-t", "0"]);
    assert_eq!(code(&out), 4);
    let out = run_in(dir.path(), &["search", "-x", "text.idx", "-q", "ababab", "-t", "0"]);
    assert_eq!(code(&out), 4);
    // Text too short to index.
    fs::write(dir.path().join("one.bin"), b"a").unwrap();
    let out = run_in(dir.path(), &["build", "-i", "one.bin", "-o", "one.idx"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let text: Vec<u8> = b"the quick onyx goblin jumps over the lazy dwarf "
        .iter()
        .cycle()
        .take(4000)
        .copied()
        .collect();
    build_index(dir.path(), &text);
    let base = run_in(dir.path(), &["search", "-x", "text.idx", "-q", "onyx goblin", "-t", "4"]);
    assert_eq!(code(&base), 0);
    assert!(!stdout(&base).is_empty());
    let threaded = bin()
        .current_dir(dir.path())
        .env("SIEDM_THREADS", "3")
        .args(["search", "-x", "text.idx", "-q", "onyx goblin", "-t", "4"])
        .output()
        .unwrap();
    assert_eq!(code(&threaded), 0);
    assert_eq!(stdout(&base), stdout(&threaded));
    // A malformed cap is a usage error.
    let bad = bin()
        .current_dir(dir.path())
        .env("SIEDM_THREADS", "0")
        .args(["search", "-x", "text.idx", "-q", "onyx goblin", "-t", "4"])
        .output()
        .unwrap();
    assert_eq!(code(&bad), 1);
}

#[test]
fn oracle_subcommands_report_reference_results() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.bin"), b"abab").unwrap();

    let out = run_in(dir.path(), &["oracle", "edm", "-a", "abab", "-b", "ab"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "2\n");
    let out = run_in(dir.path(), &["oracle", "edm", "-a", "aaaa", "-b", "bbbb"]);
    assert_eq!(stdout(&out), "unresolved\n");
    let out = run_in(dir.path(), &["oracle", "edm", "-a", "toolong!", "-b", "ab"]);
    assert_eq!(code(&out), 1);

    let out = run_in(dir.path(), &["oracle", "window", "-i", "t.bin", "-q", "ab"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "1\t0\n2\t1\n3\t0\n");
    let out = run_in(
        dir.path(),
        &["oracle", "window", "-i", "t.bin", "-q", "ab", "-t", "1"],
    );
    let s = stdout(&out);
    assert!(
        s.ends_with("# search-agreement: both=3 oracle-only=0 search-only=0\n"),
        "{s}"
    );

    let out = run_in(dir.path(), &["oracle", "stab", "-i", "t.bin", "-q", "ab"]);
    assert_eq!(code(&out), 0);
    let s = stdout(&out);
    assert!(s.contains("stabbed pairs: 4"), "{s}");
    assert!(s.contains("distinct variables: 2"), "{s}");
}
