use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn regsimp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regsimp"))
        .args(args)
        .output()
        .expect("run regsimp")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("regsimp-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

#[test]
fn simplify_expr() {
    let o = regsimp(&["simplify", "--expr", "a + a"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "a\n");
}

#[test]
fn simplify_input_skips_blank_and_comment_lines() {
    let p = temp_file("input.txt", "a+a\n# comment\n\nb*b*\n");
    let o = regsimp(&["simplify", "--input", p.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "a\nb*\n");
}

#[test]
fn syntax_error_exits_1_with_line_number() {
    let o = regsimp(&["simplify", "--expr", "a+("]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn full_arena_exits_2() {
    let o = regsimp(&["simplify", "--expr", "(a+b)*abab(a+b)*", "--capacity", "12"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_algorithm_letters_exit_3() {
    assert_eq!(regsimp(&["simplify", "--expr", "a", "--alg", "xyz"]).status.code(), Some(3));
    assert_eq!(regsimp(&["simplify", "--expr", "a", "--alg", "a"]).status.code(), Some(3));
}

#[test]
fn check_equiv_and_include() {
    let o = regsimp(&["check", "--equiv", "(a+b)*", "(a*b*)*"]);
    assert_eq!(stdout(&o), "true\n");
    let o = regsimp(&["check", "--include", "a", "a+b"]);
    assert_eq!(stdout(&o), "true\n");
    let o = regsimp(&["check", "--include", "a+b", "a"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn strict_check_exits_4_on_false() {
    let o = regsimp(&["check", "--equiv", "--strict", "a", "b"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stdout(&o), "false\n");
    let o = regsimp(&["check", "--equiv", "--strict", "a", "a"]);
    assert!(o.status.success());
}

#[test]
fn check_diff() {
    let o = regsimp(&["check", "--diff", "a*", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "aa*\n");
}

#[test]
fn gen_is_deterministic_per_seed() {
    let a = stdout(&regsimp(&["gen", "--size", "20", "--count", "5", "--seed", "3"]));
    let b = stdout(&regsimp(&["gen", "--size", "20", "--count", "5", "--seed", "3"]));
    let c = stdout(&regsimp(&["gen", "--size", "20", "--count", "5", "--seed", "4"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.lines().count(), 5);
}

#[test]
fn gen_no_zero() {
    let o = regsimp(&["gen", "--size", "30", "--count", "20", "--no-zero"]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains('0'));
}

#[test]
fn stats_csv() {
    let p = temp_file("corpus.txt", "a+a\nb*b*\n(a+b)*a\n");
    let o = regsimp(&["stats", "--input", p.to_str().unwrap(), "--alg", ",rsS", "--format", "csv"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("algorithms,l_N,n_min,l_avg"));
    assert!(lines[1].starts_with(","));
    assert!(lines[2].starts_with("rsS,"));
}
