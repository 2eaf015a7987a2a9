//! End-to-end checks of the command-line interface: outputs, exit codes,
//! and diagnostics.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(name);
    p.to_str().unwrap().to_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abduce"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn solve_prints_the_best_explanation() {
    let out = run(&["solve", &fixture("intro_horn.abd")]);
    assert_eq!(stdout(&out), "BEST\n1\n");
    assert_eq!(code(&out), 0);

    let out = run(&["solve", &fixture("affine_forcing.abd")]);
    assert_eq!(stdout(&out), "BEST\n1\n");
    assert_eq!(code(&out), 0);
}

#[test]
fn solve_reports_missing_explanations_with_exit_one() {
    let out = run(&["solve", &fixture("affine_noexp.abd")]);
    assert_eq!(stdout(&out), "NO EXPLANATION\n");
    assert_eq!(code(&out), 1);
}

#[test]
fn solve_reports_unsupported_pairs_with_exit_two() {
    let out = run(&["solve", &fixture("unsupported.abd")]);
    assert!(stdout(&out).starts_with("UNSUPPORTED: "));
    assert_eq!(code(&out), 2);
}

#[test]
fn parse_and_validation_errors_exit_three() {
    let out = run(&["solve", &fixture("bad_parse.abd")]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("line 2"),
        "diagnostic should carry the line: {err}"
    );

    let out = run(&["solve", &fixture("bad_abducible.abd")]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("validation"),
        "expected a validation error: {err}"
    );

    let out = run(&["solve", "/nonexistent/path.abd"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn usage_errors_exit_three() {
    let out = run(&["solve"]);
    assert_eq!(code(&out), 3);
    let out = run(&["no-such-command"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn verify_cross_checks_small_instances() {
    let out = run(&["solve", &fixture("intro_horn.abd"), "--verify"]);
    assert_eq!(code(&out), 0);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("verify: ok"), "expected a verify note: {err}");
}

#[test]
fn check_distinguishes_explanations() {
    let file = fixture("intro_horn.abd");
    let out = run(&["check", &file, "--hypothesis", "1"]);
    assert_eq!(stdout(&out), "EXPLANATION\n");
    assert_eq!(code(&out), 0);

    let out = run(&["check", &file, "--hypothesis", "-1"]);
    assert_eq!(stdout(&out), "NOT AN EXPLANATION\n");
    assert_eq!(code(&out), 1);

    // empty hypothesis: q does not follow from the base alone
    let out = run(&["check", &file, "--hypothesis", ""]);
    assert_eq!(stdout(&out), "NOT AN EXPLANATION\n");
    assert_eq!(code(&out), 1);

    // x2 is not an abducible
    let out = run(&["check", &file, "--hypothesis", "2"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn necessity_answers_per_variable() {
    let file = fixture("horn_positive_cnf.abd");
    let out = run(&["necessity", &file, "--var", "1"]);
    assert_eq!(stdout(&out), "NECESSARY\n");
    assert_eq!(code(&out), 0);

    let out = run(&["necessity", &file, "--var", "2"]);
    assert_eq!(code(&out), 3, "x2 is not an abducible");
}

#[test]
fn enum_full_lists_lexicographically() {
    let file = fixture("enum_two.abd");
    let out = run(&["enum-full", &file]);
    assert_eq!(stdout(&out), "-1 2\n1 2\n");
    assert_eq!(code(&out), 0);

    let out = run(&["enum-full", &file, "--limit", "1"]);
    assert_eq!(stdout(&out), "-1 2\n");
}

#[test]
fn oracle_subcommands_agree_with_the_solver() {
    let file = fixture("intro_horn.abd");
    let out = run(&["oracle", &file, "--best"]);
    assert_eq!(stdout(&out), "1\n");
    assert_eq!(code(&out), 0);

    let out = run(&["oracle", &file, "--full"]);
    assert_eq!(stdout(&out), "1\n");

    let out = run(&["oracle", &file, "--relevance", "1"]);
    assert_eq!(stdout(&out), "RELEVANT\n");
    assert_eq!(code(&out), 0);
}

#[test]
fn inconsistent_terms_warn_on_stderr() {
    let out = run(&["solve", &fixture("warn_inconsistent_term.abd")]);
    assert_eq!(code(&out), 0);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("warning: line 5"),
        "expected a dropped-term warning: {err}"
    );
}

#[test]
fn gen_emits_parseable_problems() {
    for class in [
        "affine",
        "horn",
        "reverse-horn",
        "two-dnf",
        "positive",
        "negative",
        "horn-renamable",
    ] {
        let out = run(&[
            "gen", "--class", class, "--vars", "8", "--terms", "5", "--seed", "7",
        ]);
        assert_eq!(code(&out), 0, "gen {class} failed");
        let text = stdout(&out);
        let parsed = abduce::io::parse_problem(&text).expect("generated file parses");
        assert_eq!(parsed.problem.num_vars(), 8);
    }
}

#[test]
fn gen_solve_pipeline_is_supported() {
    // every default pairing emitted by gen must be inside the support matrix
    for (class, seed) in [
        ("affine", 1u64),
        ("horn", 2),
        ("reverse-horn", 3),
        ("two-dnf", 4),
        ("positive", 5),
        ("negative", 6),
        ("horn-renamable", 7),
    ] {
        let gen = run(&[
            "gen",
            "--class",
            class,
            "--vars",
            "7",
            "--terms",
            "4",
            "--seed",
            &seed.to_string(),
        ]);
        let text = stdout(&gen);
        let parsed = abduce::io::parse_problem(&text).unwrap();
        let outcome = abduce::engine::solve(&parsed.problem);
        assert!(
            !matches!(outcome, abduce::engine::SolveOutcome::Unsupported(_)),
            "gen {class} produced an unsupported pair: {outcome:?}"
        );
    }
}
