use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn algeq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algeq"))
        .args(args)
        .env_remove("ALGEQ_BUDGET_STATES")
        .env_remove("ALGEQ_BUDGET_SECS")
        .output()
        .expect("the algeq binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn data(name: &str) -> String {
    let path: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    path.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn jump_to_next_is_behaviourally_equivalent() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.pga", "#1; !");
    let b = write(&dir, "b.pga", "!");
    let out = algeq(&["equiv", "--rel", "b", &a, &b]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict: equivalent"));
}

#[test]
fn identity_table() {
    let dir = TempDir::new().unwrap();
    let id = write(&dir, "id.pga", "+in:1.get; out:1.set:1; !");
    let out = algeq(&["table", &id, "--n", "1", "--m", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "0→0 (1 step)\n1→1 (2 steps)\n");
    let csv = algeq(&["--format", "csv", "table", &id]);
    assert_eq!(stdout(&csv).lines().next(), Some("input_bits,output_bits,steps_min,steps_max"));
}

#[test]
fn steps_reports_output_and_count() {
    let dir = TempDir::new().unwrap();
    let id = write(&dir, "id.pga", "+in:1.get; out:1.set:1; !");
    let out = algeq(&["steps", &id, "--input", "1"]);
    assert_eq!(stdout(&out), "output: 1\nsteps: 2\n");
}

#[test]
fn unsat_pair_exit_codes() {
    let (x, y) = (data("unsat_x.pga"), data("unsat_y.pga"));
    let sa = algeq(&["equiv", "--rel", "sa", &x, &y]);
    assert_eq!(sa.status.code(), Some(1));
    assert!(stdout(&sa).contains("action sets differ"));
    let sc = algeq(&["equiv", "--rel", "sc", &x, &y]);
    assert_eq!(sc.status.code(), Some(0));
    assert!(stdout(&sc).contains("dead @path"));
}

#[test]
fn witnesses_round_trip_through_files() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.pga", "-aux:3.get; !; aux:5.set:1; out:1.set:1; !");
    let y = write(&dir, "y.pga", "+aux:2.get; !; out:1.set:1; aux:1.set:0; !");
    let witness = dir.path().join("w.txt").to_string_lossy().into_owned();
    let found = algeq(&["equiv", "--rel", "sa", &x, &y, "--witness-out", &witness]);
    assert_eq!(found.status.code(), Some(0), "{}", stdout(&found));
    let replayed = algeq(&["equiv", "--rel", "sa", &x, &y, "--replay", &witness]);
    assert_eq!(replayed.status.code(), Some(0), "{}", stdout(&replayed));

    let wrong = write(&dir, "wrong.txt", "xchg {1}\n");
    let rejected = algeq(&["equiv", "--rel", "sa", &x, &y, "--replay", &wrong]);
    assert_eq!(rejected.status.code(), Some(1));
}

#[test]
fn exhausted_budget_is_unknown() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.pga", "-aux:3.get; !; aux:5.set:1; out:1.set:1; !");
    let y = write(&dir, "y.pga", "+aux:2.get; !; out:1.set:1; aux:1.set:0; !");
    let out = algeq(&["equiv", "--rel", "sa", "--budget-states", "1", &x, &y]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("verdict: unknown"));
    let jsonl = algeq(&["--format", "jsonl", "equiv", "--rel", "sa", "--budget-states", "1", &x, &y]);
    let line: serde_json::Value = serde_json::from_str(stdout(&jsonl).trim()).unwrap();
    assert_eq!(line["verdict"], "unknown");
    assert!(line["report"].is_object());
}

#[test]
fn budget_defaults_come_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.pga", "-aux:3.get; !; aux:5.set:1; out:1.set:1; !");
    let y = write(&dir, "y.pga", "+aux:2.get; !; out:1.set:1; aux:1.set:0; !");
    let out = Command::new(env!("CARGO_BIN_EXE_algeq"))
        .args(["equiv", "--rel", "sa", &x, &y])
        .env("ALGEQ_BUDGET_STATES", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn jsonl_verdicts_carry_witnesses() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.pga", "#1; !");
    let b = write(&dir, "b.pga", "!");
    let out = algeq(&["--format", "jsonl", "equiv", "--rel", "b", &a, &b]);
    let line: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(line["verdict"], "equivalent");
    assert_eq!(line["witness"][0], "beh");
}

#[test]
fn parse_errors_name_the_position() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.pga", "+in:1.get;\n out:1.sett:1");
    let out = algeq(&["parse", &bad]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("bad.pga:2:8"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_three() {
    let out = algeq(&["equiv", "--rel", "zz", "a", "b"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn loop_programs_unroll() {
    let out = algeq(&["--notation", "loop", "parse", &data("repeat2.loop")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "aux:1.set:1; aux:1.set:1; !");
    let cross = TempDir::new().unwrap();
    let bad = write(&cross, "cross.loop", "repeat 2 { #3; aux:1.set:1 }; !");
    let rejected = algeq(&["--notation", "loop", "parse", &bad]);
    assert_eq!(rejected.status.code(), Some(4));
    assert!(stderr(&rejected).contains("repeat 2"), "{}", stderr(&rejected));
}

#[test]
fn multiplier_forms_compute_the_same_table() {
    let looped = algeq(&["--notation", "loop", "table", &data("multiplier.loop")]);
    let unrolled = algeq(&["--notation", "loop", "table", &data("multiplier_unrolled.pga")]);
    assert_eq!(looped.status.code(), Some(0));
    assert_eq!(stdout(&looped), stdout(&unrolled));
}

#[test]
fn validate_notation_passes_on_samples() {
    let out = algeq(&["--notation", "loop", "validate-notation", &data("repeat2.loop"), &data("multiplier.loop")]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn oracle_dump_reports_sizes() {
    let out = algeq(&["oracle", "--max-len", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("bounds: max_len 2, n 1, m 1, aux 1, jumps 4\n"), "{}", text);
}
