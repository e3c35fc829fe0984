use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn modsyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modsyn")).args(args).env_remove("MODSYN_REPORT_DIR").output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_prints_the_identity_table() {
    let dir = TempDir::new().unwrap();
    let prog = write(dir.path(), "id.cbv", "-- context: x : b\n-- type: b\nval x\n");
    let out = modsyn(&["run", "--fragment", "base", "--monad", "identity", arg(&prog)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("x = b0 |-> b0"), "{text}");
    assert!(text.contains("x = b1 |-> b1"), "{text}");
}

#[test]
fn run_evaluates_factorial_at_a_point() {
    let dir = TempDir::new().unwrap();
    let src = "-- context: x : Nat
-- type: Nat
letrec
  add (a : Nat, b : Nat) : Nat =
    fold val a with s : <0:{}|1+:Nat>.
      case val s of <0 u -> val b | 1+ p -> roll (val (tag 1+ p as <0:{}|1+:Nat>))>;
  mul (a : Nat, b : Nat) : Nat =
    fold val a with s : <0:{}|1+:Nat>.
      case val s of <0 u -> val 0 | 1+ p -> (val add) {0 = val p, 1 = val b}>;
  fact (n : Nat) : Nat =
    case unroll (val n) of
      < 0 u -> val 1
      | 1+ k -> let r = (val fact) {0 = val k} in (val mul) {0 = val n, 1 = val r} >
in (val fact) {0 = val x}
";
    let prog = write(dir.path(), "fact.cbv", src);
    let out = modsyn(&["run", "--nat-bound", "25", "--at", "x = 3", arg(&prog)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).trim(), "Some 6");
}

#[test]
fn run_shows_divergence_of_an_infinite_loop() {
    let dir = TempDir::new().unwrap();
    let prog = write(
        dir.path(),
        "loop.cbv",
        "-- context: x : b\n-- type: b\nfor i = val x in val (tag Cont i as <Cont:b|Done:b>)\n",
    );
    let out = modsyn(&["run", arg(&prog)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).matches("None").count(), 2);
}

#[test]
fn exit_codes_for_bad_programs_and_models() {
    let dir = TempDir::new().unwrap();
    let unbound = write(dir.path(), "bad.cbv", "val y\n");
    assert_eq!(modsyn(&["run", arg(&unbound)]).status.code(), Some(1));
    let syntax = write(dir.path(), "syntax.cbv", "let = in\n");
    assert_eq!(modsyn(&["run", arg(&syntax)]).status.code(), Some(1));
    let disabled = write(dir.path(), "lam.cbv", "-- type: b -> b\nval \\x : b. val x\n");
    assert_eq!(modsyn(&["run", "--fragment", "base", arg(&disabled)]).status.code(), Some(1));
    let looping = write(dir.path(), "loop.cbv", "-- context: x : b\nfor i = val x in val (tag Done i as <Cont:b|Done:b>)\n");
    assert_eq!(modsyn(&["run", "--monad", "state:2", arg(&looping)]).status.code(), Some(2));
    assert_eq!(modsyn(&["run", arg(&dir.path().join("missing.cbv"))]).status.code(), Some(1));
}

#[test]
fn model_files_are_read() {
    let dir = TempDir::new().unwrap();
    let prog = write(dir.path(), "id.cbv", "-- context: x : b\n-- type: b\nval x\n");
    let model = write(dir.path(), "model.toml", "monad = \"powerset\"\nnat_bound = 3\n[base]\nb = 3\n");
    let out = modsyn(&["run", "--fragment", "base", "--model", arg(&model), arg(&prog)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().filter(|l| l.contains("|->")).count(), 3);
    let fragment = write(dir.path(), "fragment.toml", "extensions = [\"sequential\"]\nbase_types = [\"b\"]\n");
    let seq = write(dir.path(), "seq.cbv", "-- context: x : b\n-- type: b\nlet y = val x in val y\n");
    assert_eq!(modsyn(&["run", "--fragment", arg(&fragment), arg(&seq)]).status.code(), Some(0));
}

#[test]
fn substituting_the_variables_changes_nothing() {
    let dir = TempDir::new().unwrap();
    let prog = write(dir.path(), "p.cbv", "-- context: x : b, y : b\n-- type: b\nlet z = val x in val y\n");
    let sub = write(dir.path(), "id.sub", "-- context: x : b, y : b\nx := x\ny := y\n");
    let out = modsyn(&["subst", "--fragment", "sequential", "--monad", "option", arg(&prog), arg(&sub)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let shown = stdout(&modsyn(&["run", "--fragment", "sequential", arg(&prog)]));
    let original = shown.lines().next().unwrap().trim_start_matches("-- ").split(" : ").next().unwrap().to_string();
    assert_eq!(text.lines().next().unwrap(), original);
    assert!(text.contains("PASS"), "{text}");
}

#[test]
fn duplicate_assignment_merges_variables() {
    let dir = TempDir::new().unwrap();
    let prog = write(dir.path(), "p.cbv", "-- context: f : b -> b, y : b\n-- type: b\n(val f) (val y)\n");
    let sub = write(dir.path(), "merge.sub", "-- context: v : b -> b, w : b\nf := v\ny := w\n");
    let out = modsyn(&["subst", "--fragment", "functions", "--monad", "option", arg(&prog), arg(&sub)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("val v (val w)"), "{}", stdout(&out));
    let missing = write(dir.path(), "missing.sub", "f := v\n");
    assert_eq!(modsyn(&["subst", "--fragment", "functions", arg(&prog), arg(&missing)]).status.code(), Some(1));
}

#[test]
fn fragments_lists_all_configurations() {
    let out = modsyn(&["fragments"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with('{')).count(), 128);
    assert!(text.contains("strong monad over a Cartesian category"));
    assert!(text.contains("<Cont:τ|Done:τ'>"));
}

#[test]
fn check_writes_a_deterministic_report() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("a.json");
    let second = dir.path().join("b.json");
    for path in [&first, &second] {
        let out = modsyn(&["check", "term-laws", "--fragment", "full", "--count", "40", "--seed", "7", "--report", arg(path)]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    }
    let a = std::fs::read(&first).unwrap();
    assert_eq!(a, std::fs::read(&second).unwrap());
    let parsed: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert!(parsed.to_string().contains("term-laws"));
}

#[test]
fn check_skew_reports_the_empty_witness() {
    let out = modsyn(&["check", "skew"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains('∅'));
}

#[test]
fn check_monad_laws_for_option() {
    let out = modsyn(&["check", "monad-laws", "--monad", "option"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).matches("PASS").count(), 4);
}

#[test]
fn report_directory_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_modsyn"))
        .args(["check", "pointed"])
        .env("MODSYN_REPORT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("pointed.json").is_file());
}

#[test]
fn unknown_monads_are_input_errors() {
    assert_eq!(modsyn(&["check", "monad-laws", "--monad", "continuation"]).status.code(), Some(1));
}
