use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coupled-fixpoint"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn solve_example_reports_origin() {
    let o = run(&["solve-example"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("coupled fixed point"), "{text}");
    assert!(text.contains("berinde(phi=identity, psi=psi-linear:0.25): Certified"), "{text}");
}

#[test]
fn solve_example_trace_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        assert_eq!(code(&run(&["solve-example", "--seed", "7", "--out", p.to_str().unwrap()])), 0);
    }
    let a = std::fs::read(a).unwrap();
    assert_eq!(a, std::fs::read(b).unwrap());
    assert!(a.starts_with(b"n,x_0,y_0,delta_n,chain_ok\n0,-2,3,,true\n"));
}

#[test]
fn falsify_luong_prints_diagonal_witness() {
    let o = run(&["falsify", "--condition", "luong", "--map", "example1", "--phi", "identity", "--psi", "linear:0.25"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "Falsified");
    assert_eq!(v["witness"]["x"], v["witness"]["u"]);
}

#[test]
fn certify_exit_codes_follow_verdict() {
    let luong = run(&["certify", "--config", config("luong_example.json").to_str().unwrap()]);
    assert_eq!(code(&luong), 1);
    let cor = run(&["certify", "--config", config("berinde_cor_derived.json").to_str().unwrap(), "--budget", "2000"]);
    assert_eq!(code(&cor), 0, "{}", String::from_utf8_lossy(&cor.stderr));
    let none = run(&["falsify", "--config", config("berinde_cor_derived.json").to_str().unwrap(), "--budget", "200"]);
    assert_eq!(code(&none), 1);
}

#[test]
fn witness_files_are_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = ["a.json", "b.json", "c.json"].iter().map(|n| dir.path().join(n)).collect();
    for (p, seed) in paths.iter().zip(["5", "5", "6"]) {
        let o = run(&["falsify", "--condition", "bhaskar", "--k", "0.5", "--map", "example1", "--seed", seed, "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    let read = |i: usize| std::fs::read(&paths[i]).unwrap();
    assert_eq!(read(0), read(1));
    assert_ne!(read(0), read(2));
}

#[test]
fn solve_fredholm_writes_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = run(&["solve-fredholm", config("derived.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (t, x) = l.split_once(',').unwrap();
            (t.parse().unwrap(), x.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 101);
    assert!(rows.iter().all(|(_, x)| (x - 384.0 / 383.0).abs() <= 1e-8));

    let o = run(&["solve-fredholm", "--config", config("trivial.json").to_str().unwrap(), "--grid", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout), "t,x\n0,0\n0.5,0.5\n1,1\n");
}

#[test]
fn solve_fredholm_refuses_inflated_constants() {
    let o = run(&["solve-fredholm", config("bad.json").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("condition (iii)"), "{err}");
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = std::fs::read_to_string(config("derived.json")).unwrap().replace("constant:0.25", "gaussian:1");
    std::fs::write(&bad, text).unwrap();
    let o = run(&["solve-fredholm", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("kernels.k1"));

    assert_eq!(code(&run(&["solve-fredholm", "/does/not/exist.json"])), 2);
    assert_eq!(code(&run(&["solve-fredholm", config("derived.json").to_str().unwrap(), "--grid", "1"])), 2);
    assert_eq!(code(&run(&["certify", "--condition", "bhaskar", "--map", "example1"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
}

#[test]
fn validate_functions_exit_codes() {
    assert_eq!(code(&run(&["validate-functions", "--theta", "theta1:0.25", "--theta", "theta3"])), 0);
    assert_eq!(code(&run(&["validate-functions", "--theta", "theta1:0.75"])), 1);
    assert_eq!(code(&run(&["validate-functions", "--phi", "bogus"])), 2);
}
