use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn mkfa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mkfa")).args(args).output().expect("runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_two_state_fixture() {
    let o = mkfa(&["eval", &fixture("two.mkfa"), "a"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("a\t<21/25,1/100,19/500,14/125>\t≈ <0.840000,"));
}

#[test]
fn eval_constant_on_every_word() {
    let o = mkfa(&["eval", &fixture("const_k1.mkfa"), "aa", "ε", "bab"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().all(|l| l.contains("<3/10,1/5,2/5,1/10>")));
    assert!(text.lines().nth(1).unwrap().starts_with("ε\t"));
}

#[test]
fn exit_codes() {
    assert_eq!(mkfa(&["eval", &fixture("garbled.mkfa"), "a"]).status.code(), Some(1));
    assert_eq!(mkfa(&["eval", &fixture("broken.mkfa"), "a"]).status.code(), Some(2));
    assert_eq!(mkfa(&["eval", &fixture("two.mkfa"), "ac"]).status.code(), Some(3));
    assert_eq!(mkfa(&["eval", "no-such-file.mkfa", "a"]).status.code(), Some(1));
}

#[test]
fn construct_disjunction_keeps_first_states_first() {
    let two = fixture("two.mkfa");
    let o = mkfa(&["construct", "disjunction", &two, &two]);
    let text = stdout(&o);
    let states: Vec<&str> = text.lines().filter(|l| l.starts_with("state ")).collect();
    assert_eq!(states, ["state 1:p", "state 1:q", "state 2:p", "state 2:q"]);
}

#[test]
fn construct_cauchy_rejects_nondeterministic_input() {
    let n = fixture("nondet.mkfa");
    let o = mkfa(&["construct", "cauchy", &n, &n]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("deterministic"));
}

#[test]
fn construct_support_is_classical() {
    let o = mkfa(&["construct", "support", &fixture("const_k1.mkfa")]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().nth(1) == Some("kind classical"));
}

#[test]
fn verify_is_deterministic_and_passes() {
    let args = ["verify", "conj_char", "--maxlen", "4", "--trials", "20", "--seed", "7"];
    let a = mkfa(&args);
    let b = mkfa(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("verify conj_char: PASS"));
}

#[test]
fn records_are_one_json_object_per_line() {
    let o = mkfa(&["--format", "records", "verify", "bimonoid", "--trials", "50"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(v["suite"], "bimonoid");
    assert_eq!(v["mismatches"].as_array().unwrap().len(), 0);
}

#[test]
fn probe_scalar_left_reports_without_failing() {
    let o = mkfa(&["probe", "scalar-left", "--seed", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("counterexample"));
    assert!(text.contains("dead word"));
    assert_eq!(mkfa(&["probe", "no-such-gap"]).status.code(), Some(2));
}

fn compile_then_eval(f: &str, words: &[&str]) -> (String, String) {
    let compiled = mkfa(&["logic", "compile", f]);
    assert!(compiled.status.success());
    let dir = std::env::temp_dir().join(format!("mkfa-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("compiled-{}.mkfa", f.len()));
    std::fs::write(&path, &compiled.stdout).unwrap();
    let mut args = vec!["eval", path.to_str().unwrap()];
    args.extend(words);
    let via_automaton = stdout(&mkfa(&args));
    let mut args = vec!["logic", "eval", f];
    args.extend(words);
    (via_automaton, stdout(&mkfa(&args)))
}

// Formulas whose sums cannot be reordered: one weighted summand, or none.
#[test]
fn logic_compile_agrees_with_logic_eval() {
    let words = ["ε", "a", "b", "ab", "ba", "bb", "aab", "bab"];
    for f in [
        "((exists x . (first(x) & P_a(x))) (*) <0.3,0.2,0.4,0.1>) (+) ((exists x . (last(x) & P_b(x))) (*) <0.9,0.05,0.03,0.02>)",
        "sum x . (P_a(x) (*) <0.3,0.2,0.4,0.1>)",
        "forall x . (P_a(x) -> exists y . (succ(y, x) & P_b(y)))",
    ] {
        let (a, b) = compile_then_eval(f, &words);
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn decompile_output_is_restricted() {
    let d = mkfa(&["logic", "decompile", &fixture("two.mkfa")]);
    assert!(d.status.success());
    let mut child = Command::new(env!("CARGO_BIN_EXE_mkfa"))
        .args(["logic", "check-rmso"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&d.stdout).unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "RMSO");
}

#[test]
fn check_rmso_locates_the_violation() {
    let o = mkfa(&["logic", "check-rmso", "sum x . (<1,0,0,0> (*) <0,1,0,0>)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("at /0: left operand of (*)"));
}
