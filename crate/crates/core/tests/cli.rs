use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn pcgroup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcgroup")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn order_of_builtin_file() {
    let dir = std::env::temp_dir().join(format!("pcgroup-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("builtin-p3.pc");
    let out = pcgroup(&["builtin", "example_p3", "--n", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = pcgroup(&["order", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "19683\n");
    let out = pcgroup(&["--format", "lines", "order", path.to_str().unwrap()]);
    assert_eq!(stdout(&out), "order 19683\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn class_of_trivial_group() {
    let out = pcgroup(&["class", &data("empty.pc")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "class 0\nterm order generators\nK1 1 1\n");
}

#[test]
fn class_and_series() {
    let out = pcgroup(&["--format", "lines", "class", &data("example_p3_n2.pc")]);
    assert_eq!(
        stdout(&out),
        "class 5\nterm 1 order 19683\nterm 2 order 729\nterm 3 order 243\nterm 4 order 27\nterm 5 order 3\nterm 6 order 1\n"
    );
}

#[test]
fn check_exit_codes() {
    assert_eq!(pcgroup(&["check", &data("quaternion8.pc")]).status.code(), Some(0));
    let out = pcgroup(&["check", &data("example_p2_n3.pc")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("failure triple-overlap c,b,a"));
    // group-level commands refuse inconsistent presentations
    assert_eq!(pcgroup(&["order", &data("inconsistent.pc")]).status.code(), Some(1));
}

#[test]
fn parse_errors_exit_2() {
    let dir = std::env::temp_dir().join(format!("pcgroup-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.pc");
    std::fs::write(&path, "pgroup p=2\ngens a\norder a 2\ncomm e3 a = 1\n").unwrap();
    let out = pcgroup(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4: undeclared generator e3"));
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(pcgroup(&["identities", &data("quaternion8.pc"), "--ids", "nope"]).status.code(), Some(2));
    assert_eq!(pcgroup(&["verify-pn", &data("quaternion8.pc")]).status.code(), Some(2));
}

#[test]
fn maximals_and_pn() {
    let out = pcgroup(&["--format", "lines", "maximals", &data("example_p3_n2.pc")]);
    assert_eq!(
        stdout(&out),
        "maximal 1 order 6561 class 3\nmaximal 2 order 6561 class 3\nmaximal 3 order 6561 class 3\nmaximal 4 order 6561 class 3\n"
    );
    let out = pcgroup(&["--format", "lines", "verify-pn", &data("dihedral16.pc"), "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("pn n=2 class=3 d=2 maximals=3 member=true\n"));
}

#[test]
fn identities_lines_are_stable() {
    let args = ["--format", "lines", "identities", &data("example_p3_n2.pc"), "--ids", "hall_witt,vanishing", "--trials", "50", "--seed", "5"];
    let first = pcgroup(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(stdout(&first), "check vanishing pass trials=50 failures=0\ncheck hall_witt pass trials=50 failures=0\n");
    assert_eq!(stdout(&first), stdout(&pcgroup(&args)));
}

#[test]
fn verify_paper_report() {
    let out = pcgroup(&["--format", "lines", "verify-paper", "--n2", "3", "--n3", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("fact example_p3(n=2) class 5\n"));
    assert!(text.contains("fact example_p2(n=3) reproducible false\n"));
    assert!(text.contains("overlap example_p2(n=3) triple-overlap c,b,a"));
    assert!(text.contains("warning example_p2(n=3) warning: [e3,a]: dropped relation"));
    assert!(text.ends_with("fail=0\n"));
    assert_eq!(text, stdout(&pcgroup(&["--format", "lines", "verify-paper", "--n2", "3", "--n3", "2"])));
}
