use std::process::Command;

fn majorbound(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_majorbound")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn bound_subcommand() {
    let (code, out, _) = majorbound(&["bound", "--spectrum", "0.5,0.3,0.2", "--f", "vn", "--m", "1", "--eps", "0.3"]);
    assert_eq!(code, 0);
    assert_eq!(out, "0.336505833505\nCaseF1\n0.5,0.5\n");
    let (code, out, _) = majorbound(&["bound", "--spectrum", "0.4,0.3,0.2,0.1", "--m", "1", "--eps", "0.15"]);
    assert_eq!(code, 0);
    assert!(out.contains("CaseF3(ell=3)"));
}

#[test]
fn rank_subcommand() {
    let (code, out, _) = majorbound(&["rank", "--spectrum", "gibbs N=1", "--eps", "0.1"]);
    assert_eq!((code, out.as_str()), (0, "5\n"));
    let (_, out, _) = majorbound(&["rank", "--spectrum", "geometric q=0.5", "--eps", "0"]);
    assert_eq!(out, "inf\n");
}

#[test]
fn figure_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let (code, _, _) = majorbound(&["figure", "fig3", "--output", path.to_str().unwrap()]);
        assert_eq!(code, 0);
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    assert!(text.starts_with("eps,N1,N10,N100\n1e-06,"));
    assert_eq!(text.lines().count(), 201);
    assert!(text.trim_end().ends_with("1,2,2,2"));
}

#[test]
fn spectrum_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.csv");
    std::fs::write(&path, "index,probability\n1,0.5\n2,0.3\n3,0.2\n").unwrap();
    let (code, out, _) = majorbound(&["bound", "--spectrum", path.to_str().unwrap(), "--m", "1", "--eps", "0.3"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("0.336505833505\n"));
}

#[test]
fn verify_subcommand() {
    let (code, out, _) = majorbound(&[
        "verify",
        "--spectrum",
        "0.4,0.3,0.2,0.1",
        "--m",
        "1",
        "--eps",
        "0.15",
        "--f",
        "renyi:2",
        "--json",
    ]);
    assert_eq!(code, 0, "{out}");
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["passed"], true);
}

#[test]
fn input_errors_exit_two() {
    for args in [
        &["bound", "--spectrum", "0.5,0.4", "--eps", "0.1"][..],
        &["bound", "--spectrum", "0.5,0.5", "--eps", "2"],
        &["bound", "--spectrum", "0.5,0.5", "--f", "renyi:1", "--eps", "0.1"],
        &["figure", "fig9"],
        &["verify", "--spectrum", "0.5,0.5", "--eps", "0.1", "--resolution", "1"],
        &["nonsense"],
    ] {
        let (code, _, err) = majorbound(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty());
    }
}

#[test]
fn tolerance_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_majorbound"))
        .args(["bound", "--spectrum", "0.5,0.49999", "--eps", "0.1"])
        .env("MAJORBOUND_TOL", "1e-4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = Command::new(env!("CARGO_BIN_EXE_majorbound"))
        .args(["bound", "--spectrum", "0.5,0.5", "--eps", "0.1"])
        .env("MAJORBOUND_TOL", "abc")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
