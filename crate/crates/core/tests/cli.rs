use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_hessian-lv");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("HESSIAN_LV_THREADS").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn exponents_report() {
    let out = run(&["exponents", "--n", "5", "--k", "1", "--sigma", "0", "--q", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("lambda_tilde,2\n"));
    assert!(text.contains("regime,Spiral"));

    let text = stdout(&run(&["exponents", "--n", "12", "--k", "1", "--q", "5"]));
    assert!(text.contains("regime,StableNode"));
    let qjl: f64 = text.lines().find_map(|l| l.strip_prefix("q_jl,")).unwrap().parse().unwrap();
    assert!((qjl - 3.926649916).abs() < 1e-6);
}

#[test]
fn invalid_dimension_exits_2() {
    let out = run(&["exponents", "--n", "4", "--k", "2", "--q", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n ≤ 2k"));
    assert_eq!(run(&["count", "--n", "5", "--k", "1", "--q", "3"]).status.code(), Some(2));
}

#[test]
fn orbit_files() {
    let a = stdout(&run(&["orbit", "--n", "5", "--k", "1", "--q", "3"]));
    assert!(a.lines().any(|l| l == "# n = 5") && a.lines().any(|l| l.starts_with("# version = ")));
    let rows = data_rows(&a);
    let last = rows.last().unwrap();
    assert!((last[1] - 2.0).hypot(last[2] - 1.0) < 1e-6);

    let b = data_rows(&stdout(&run(&["orbit", "--n", "12", "--k", "1", "--q", "5"])));
    assert!(b.windows(2).all(|w| w[1][2] > w[0][2]));

    assert_eq!(run(&["orbit", "--n", "5", "--k", "1", "--q", "2"]).status.code(), Some(3));
}

#[test]
fn orbit_json_mirrors_csv() {
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["orbit", "--n", "12", "--k", "1", "--q", "5", "--format", "json"]))).unwrap();
    assert_eq!(json["meta"]["n"], 12);
    let rows = json["rows"].as_array().unwrap();
    let csv = data_rows(&stdout(&run(&["orbit", "--n", "12", "--k", "1", "--q", "5"])));
    assert_eq!(rows.len(), csv.len());
    assert_eq!(rows[5]["y"].as_f64().unwrap(), csv[5][2]);
}

#[test]
fn count_prints_count_and_flag() {
    let out = run(&["count", "--n", "12", "--k", "1", "--sigma", "0", "--q", "5", "--lambda", "2.0"]);
    assert_eq!(stdout(&out), "1 false\n");
    let out = run(&["count", "--n", "5", "--k", "1", "--q", "3", "--lambda", "2"]);
    let text = stdout(&out);
    let (count, flag) = text.trim().split_once(' ').unwrap();
    assert!(count.parse::<usize>().unwrap() >= 3);
    assert_eq!(flag, "true");
}

#[test]
fn bifurcation_rows() {
    let text = stdout(&run(&["bifurcation", "--n", "12", "--k", "1", "--q", "5", "--points", "50"]));
    assert!(text.lines().any(|l| l == "t0,lambda,A"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 50);
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
}

fn solve_into(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["solve", "--n", "5", "--k", "1", "--sigma", "0", "--q", "3", "--lambda", "1.998", "--output"];
    let d = dir.to_str().unwrap();
    args.push(d);
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn solve_writes_one_file_per_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve_into(dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let mut files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(files.len() >= 2);
    let first = std::fs::read_to_string(&files[0]).unwrap();
    assert!(first.lines().any(|l| l == "r,u,du"));
    let rows = data_rows(&first);
    assert_eq!(rows[0][0], 0.0);
    assert!(rows.last().unwrap()[1].abs() < 1e-8);
}

#[test]
fn output_is_byte_stable() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    solve_into(d1.path(), &["--format", "json"]);
    solve_into(d2.path(), &["--format", "json"]);
    let a = std::fs::read(d1.path().join("solution_1.json")).unwrap();
    let b = std::fs::read(d2.path().join("solution_1.json")).unwrap();
    assert_eq!(a, b);
    let args = ["bifurcation", "--n", "5", "--k", "1", "--q", "3", "--points", "200"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = ["bifurcation", "--n", "5", "--k", "1", "--q", "3", "--points", "300"];
    let free = run(&args).stdout;
    let one = Command::new(BIN).args(args).env("HESSIAN_LV_THREADS", "1").output().unwrap();
    assert_eq!(one.stdout, free);
    let bad = Command::new(BIN).args(args).env("HESSIAN_LV_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_passes() {
    for (n, k, sigma) in [("5", "1", "0"), ("6", "2", "0"), ("5", "1", "2")] {
        let out = run(&["verify", "--n", n, "--k", k, "--sigma", sigma]);
        assert_eq!(out.status.code(), Some(0));
        let text = stdout(&out);
        assert!(text.lines().all(|l| l.starts_with("PASS ")));
    }
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = solve_into(&blocker.join("sub"), &[]);
    assert_eq!(out.status.code(), Some(4));
}
