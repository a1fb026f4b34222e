use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use crossmod_cli::{exit_code, run, InputError, Options};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_crossmod"))
}

fn shipped(dir: &str) -> Vec<PathBuf> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(dir);
    let mut files: Vec<PathBuf> = std::fs::read_dir(&root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "scenario"))
        .collect();
    files.sort();
    files
}

fn exec(path: &Path, extra: &[&str]) -> Output {
    bin().arg(path).args(extra).output().unwrap()
}

#[test]
fn every_example_passes() {
    let files = shipped("");
    assert!(files.len() >= 15);
    for f in files {
        let out = exec(&f, &[]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}: {}",
            f.display(),
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn negatives_fail_with_documented_code() {
    let files = shipped("negative");
    assert!(files.len() >= 4);
    for f in files {
        let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
        let desc = doc["description"].as_str().unwrap();
        let want: i32 = desc.strip_prefix("exit ").and_then(|s| s[..1].parse().ok()).expect("documented code");
        let out = exec(&f, &[]);
        assert_eq!(out.status.code(), Some(want), "{}", f.display());
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["passed"], false);
    }
}

#[test]
fn reports_are_reproducible() {
    for f in shipped("").into_iter().take(6) {
        let a = exec(&f, &["--seed", "7"]).stdout;
        let b = exec(&f, &["--seed", "7"]).stdout;
        assert_eq!(a, b, "{}", f.display());
    }
}

#[test]
fn stdin_and_text_output() {
    let text = std::fs::read(shipped("").into_iter().find(|p| p.ends_with("s3a3.scenario")).unwrap()).unwrap();
    let mut child = bin()
        .args(["--output", "text", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&text).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("blocks algebra: [1, 1]"), "{s}");
}

#[test]
fn timings_are_opt_in() {
    let f = shipped("").into_iter().find(|p| p.ends_with("s3_blocks.scenario")).unwrap();
    assert!(!String::from_utf8(exec(&f, &[]).stdout).unwrap().contains("time_ms"));
    assert!(String::from_utf8(exec(&f, &["--timings"]).stdout).unwrap().contains("time_ms"));
}

#[test]
fn missing_file_is_an_input_error() {
    assert_eq!(bin().arg("/nonexistent.scenario").output().unwrap().status.code(), Some(2));
}

const CYCLIC: &str = r#"{
  "declare": {
    "Z4": {"type": "cyclic", "n": 4},
    "Z2": {"type": "cyclic", "n": 2},
    "cm": {"type": "crossed_module", "g": "Z4", "h": "Z2", "d": {"1": "2"}}
  },
  "tasks": [{"verb": "cstar", "args": {"cm": "cm"}}]
}"#;

#[test]
fn library_entry_point() {
    let r = run(CYCLIC, &Options::default());
    assert_eq!(exit_code(&r), 0);
    let r = r.unwrap();
    assert_eq!(r.tasks[0].dims["dim"], 2);
    assert_eq!(r.tasks[0].blocks["algebra"], vec![1, 1]);

    let bad = CYCLIC.replace(r#""h": "Z2""#, r#""h": "B""#);
    let err = run(&bad, &Options::default()).unwrap_err();
    assert!(matches!(&err, InputError::Parse { line: 5, message } if message.contains("\"B\"")), "{err:?}");
    assert_eq!(err.kind(), "ParseError");
}

#[test]
fn bad_tasks_are_parse_errors() {
    for (from, to) in [
        (r#""verb": "cstar""#, r#""verb": "frobnicate""#),
        (r#""cm": "cm"}"#, r#""cm": "Z4"}"#),
        (r#""cm": "cm"}"#, r#""cm": "cm", "extra": "Z2"}"#),
        (r#""d": {"1": "2"}"#, r#""d": {"1": "2"}, "q": 1"#),
    ] {
        let text = CYCLIC.replace(from, to);
        assert_ne!(text, CYCLIC);
        let err = run(&text, &Options::default()).unwrap_err();
        assert_eq!(err.kind(), "ParseError", "{to}: {err}");
    }
}

#[test]
fn cycles_are_rejected() {
    let text = r#"{"declare": {
        "A": {"type": "direct_product", "left": "B", "right": "B"},
        "B": {"type": "direct_product", "left": "A", "right": "A"}}}"#;
    let err = run(text, &Options::default()).unwrap_err();
    assert!(err.to_string().contains("cyclic declaration"), "{err}");
}

#[test]
fn failing_tasks_do_not_stop_later_ones() {
    let text = CYCLIC.replace(
        r#""tasks": [{"verb": "cstar", "args": {"cm": "cm"}}]"#,
        r#""tasks": [
          {"verb": "cstar", "args": {"cm": "cm"}, "expect": {"dims": {"dim": 3}}},
          {"verb": "cstar", "args": {"cm": "cm"}, "expect": {"dims": {"dim": 2}}}]"#,
    );
    let r = run(&text, &Options::default()).unwrap();
    assert!(!r.tasks[0].passed && r.tasks[1].passed);
    assert_eq!(exit_code(&Ok(r)), 1);
}

#[test]
fn tolerance_flag_reaches_the_settings() {
    let opts = Options {
        tol: Some(1e-6),
        seed: Some(3),
        ..Options::default()
    };
    let r = run(CYCLIC, &opts).unwrap();
    assert_eq!((r.tol, r.seed), (1e-6, 3));
}
