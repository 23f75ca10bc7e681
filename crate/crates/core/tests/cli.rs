use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hilfer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hilfer"))
        .args(args)
        .env_remove("HP_THREADS")
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, name: &str, problem: &str, extra: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, format!("[problem]\n{problem}\n{extra}")).unwrap();
    path
}

const LINEAR: &str = r#"a = 0
alpha = 0.5
beta = 0.5
x0 = 1
h = 0.5
b = 50
k = "-1/4"
rhs = "x""#;

const FAST: &str = "[numerics]\nN = 32\nQ = 16\n";

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn zero_rhs_keeps_y_at_x0() {
    let dir = tempfile::tempdir().unwrap();
    let problem = LINEAR.replace("rhs = \"x\"", "rhs = \"0\"");
    let cfg = config(dir.path(), "zero.toml", &problem, FAST);
    let out = hilfer(&["solve", path_str(&cfg)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = read_csv(&dir.path().join("output").join("solution.csv"));
    assert_eq!(header, ["t", "y", "x"]);
    assert_eq!(rows.len(), 33);
    assert!(rows.iter().all(|r| r[1] == 1.0));
    let (header, rows) = read_csv(&dir.path().join("output").join("iterations.csv"));
    assert_eq!(header, ["n", "d_n", "u_n", "ratio"]);
    assert_eq!(rows.len(), 1);
    let summary = fs::read_to_string(dir.path().join("output").join("summary.txt")).unwrap();
    assert!(summary.contains("status        converged"), "{summary}");
}

#[test]
fn csv_numbers_carry_17_digits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "lin.toml", LINEAR, FAST);
    let out_dir = dir.path().join("o");
    let out = hilfer(&["solve", path_str(&cfg), "-o", path_str(&out_dir)]);
    assert!(out.status.success());
    let text = fs::read_to_string(out_dir.join("solution.csv")).unwrap();
    let second = text.lines().nth(2).unwrap();
    for cell in second.split(',') {
        let mantissa = cell.split('e').next().unwrap();
        let digits = mantissa.chars().filter(char::is_ascii_digit).count();
        assert_eq!(digits, 17, "{cell}");
    }
    let summary = fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    assert!(summary.contains("sampled estimate"), "{summary}");
}

#[test]
fn malformed_rhs_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let problem = LINEAR.replace("rhs = \"x\"", "rhs = \"t^(\"");
    let cfg = config(dir.path(), "bad.toml", &problem, "");
    let out = hilfer(&["solve", path_str(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("offset 3"), "{err}");
    assert!(err.contains("problem.rhs"), "{err}");
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = config(dir.path(), "u.toml", LINEAR, "[numerics]\nsteps = 4\n");
    let out = hilfer(&["solve", path_str(&unknown)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("steps") && err.contains("line"), "{err}");

    let invalid = config(
        dir.path(),
        "i.toml",
        &LINEAR.replace("alpha = 0.5", "alpha = 1"),
        "",
    );
    assert_eq!(
        hilfer(&["solve", path_str(&invalid)]).status.code(),
        Some(1)
    );

    let missing = dir.path().join("nope.toml");
    assert_eq!(
        hilfer(&["solve", path_str(&missing)]).status.code(),
        Some(1)
    );
}

#[test]
fn non_convergence_exits_2_with_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "n.toml",
        LINEAR,
        "[numerics]\nN = 32\nQ = 16\nmax_iter = 2\n",
    );
    let out = hilfer(&["solve", path_str(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    let (_, rows) = read_csv(&dir.path().join("output").join("iterations.csv"));
    assert_eq!(rows.len(), 2);
    let summary = fs::read_to_string(dir.path().join("output").join("summary.txt")).unwrap();
    assert!(summary.contains("not converged"));
}

#[test]
fn confinement_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let problem = LINEAR.replace("b = 50", "b = 0.1");
    let cfg = config(
        dir.path(),
        "c.toml",
        &problem,
        &format!("[hypotheses]\nM = 0.001\n{FAST}"),
    );
    let out = hilfer(&["solve", path_str(&cfg)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("left the tube"));
}

#[test]
fn rhs_domain_error_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    // the tube reaches negative x, where sqrt is undefined
    let problem = LINEAR
        .replace("rhs = \"x\"", "rhs = \"sqrt(x)\"")
        .replace("b = 50", "b = 5");
    let cfg = config(dir.path(), "d.toml", &problem, FAST);
    assert_eq!(hilfer(&["solve", path_str(&cfg)]).status.code(), Some(4));
}

#[test]
fn solve_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "lin.toml", LINEAR, FAST);
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_hilfer"))
            .args(["solve", path_str(&cfg), "-o", path_str(&out)])
            .env("HP_THREADS", threads)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        (
            fs::read(out.join("solution.csv")).unwrap(),
            fs::read(out.join("iterations.csv")).unwrap(),
        )
    };
    let seq = run("seq", "0");
    assert_eq!(seq, run("seq2", "0"));
    assert_eq!(seq, run("par", "3"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "lin.toml", LINEAR, FAST);
    let out = Command::new(env!("CARGO_BIN_EXE_hilfer"))
        .args(["solve", path_str(&cfg)])
        .env("HP_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_quadrature_passes() {
    let out = hilfer(&["verify", "quadrature"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("0 failed"), "{text}");
    assert!(!text.contains("FAIL"));
    assert_ne!(hilfer(&["verify", "nonsense"]).status.code(), Some(0));
}

#[test]
fn sweep_over_q_and_single_value_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "lin.toml", LINEAR, FAST);
    let out_dir = dir.path().join("sw");
    let out = hilfer(&[
        "sweep",
        path_str(&cfg),
        "--axis",
        "Q",
        "--values",
        "8,16,32",
        "-o",
        path_str(&out_dir),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("Q,status,iterations,residual_sup,sup_change_vs_finest"));
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.contains(",converged,")));

    // one value reproduces the plain solve
    let single = dir.path().join("one");
    let out = hilfer(&[
        "sweep",
        path_str(&cfg),
        "--axis",
        "N",
        "--values",
        "32",
        "-o",
        path_str(&single),
    ]);
    assert!(out.status.success());
    let row = fs::read_to_string(single.join("sweep.csv")).unwrap();
    let cells: Vec<String> = row
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(String::from)
        .collect();
    let solve_dir = dir.path().join("plain");
    assert!(
        hilfer(&["solve", path_str(&cfg), "-o", path_str(&solve_dir)])
            .status
            .success()
    );
    let iterations = fs::read_to_string(solve_dir.join("iterations.csv")).unwrap();
    assert_eq!(cells[2], (iterations.lines().count() - 1).to_string());
    let summary = fs::read_to_string(solve_dir.join("summary.txt")).unwrap();
    let residual = summary
        .lines()
        .find(|l| l.starts_with("residual_sup"))
        .unwrap()
        .split_whitespace()
        .nth(1)
        .unwrap();
    assert_eq!(cells[3], residual);
}

#[test]
fn sweep_marks_failed_rows_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "lin.toml", LINEAR, FAST);
    let out_dir = dir.path().join("sw");
    let out = hilfer(&[
        "sweep",
        path_str(&cfg),
        "--axis",
        "alpha",
        "--values",
        "0.5,1.5",
        "-o",
        path_str(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert!(text.lines().nth(1).unwrap().contains(",converged,"));
    assert!(text.lines().nth(2).unwrap().contains(",error,"));
}
