use std::path::PathBuf;
use std::process::{Command, Output};

fn input(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../inputs")
        .join(name)
}

fn zeonwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeonwalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn analyze_six_point_example() {
    let path = input("six.txt");
    let out = zeonwalk(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("|K| = 48"));
    assert!(text.contains("rank 3 (zeon 3), |G| = 6, 2 partitions x 4 ranges"));
    assert!(text.contains("alpha = [1/3, 2/3]"));
    assert!(text.contains("beta = [4/9, 2/9, 1/9, 2/9]"));
}

#[test]
fn analyze_writes_json() {
    let dir = std::env::temp_dir().join(format!("zeonwalk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let json = dir.join("four.json");
    let out = zeonwalk(&[
        "analyze",
        input("four.txt").to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
        "--level-cap",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    for row in report["Omega"].as_array().unwrap() {
        assert_eq!(row, &serde_json::json!(["1/6", "1/6", "1/3", "1/3"]));
    }
    assert_eq!(report["zeon_levels"].as_array().unwrap().len(), 2);
    assert_eq!(report["rank"]["semigroup"], report["rank"]["zeon"]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn json_to_stdout_is_deterministic() {
    let path = input("four.txt");
    let a = zeonwalk(&["analyze", path.to_str().unwrap(), "--json", "-"]);
    let b = zeonwalk(&["analyze", path.to_str().unwrap(), "--json", "-"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with('{'));
}

#[test]
fn weights_override() {
    let path = input("four.txt");
    let out = zeonwalk(&["analyze", path.to_str().unwrap(), "--weights", "1/3,2/3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let bad = zeonwalk(&["analyze", path.to_str().unwrap(), "--weights", "1/3,1/3"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn malformed_input_exits_one() {
    let out = zeonwalk(&["analyze", input("bad_word.txt").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
    let missing = zeonwalk(&["analyze", "/nonexistent/spec.txt"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn identities_on_doubly_stochastic_input() {
    let strict = zeonwalk(&["identities", input("doubly.json").to_str().unwrap()]);
    assert_eq!(strict.status.code(), Some(1));
    let out = zeonwalk(&[
        "identities",
        input("doubly.json").to_str().unwrap(),
        "--warn-only",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS  M N = (n/r) J"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn colorings_lists_all() {
    let out = zeonwalk(&["colorings", input("four_graph.txt").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 16);
    assert!(text.contains("[4 3 1 2] [3 4 4 3]  rank 2"));
}

#[test]
fn colorings_budget_and_sync() {
    let zero = zeonwalk(&[
        "colorings",
        input("four_graph.txt").to_str().unwrap(),
        "--budget",
        "0",
    ]);
    assert_eq!(zero.status.code(), Some(0));
    assert!(zero.stdout.is_empty());
    assert!(String::from_utf8_lossy(&zero.stderr).contains("budget of 0"));
    let sync = zeonwalk(&[
        "colorings",
        input("sync_graph.txt").to_str().unwrap(),
        "--find-sync",
    ]);
    let text = stdout(&sync);
    assert!(text.lines().last().unwrap().ends_with("synchronizing"));
}
