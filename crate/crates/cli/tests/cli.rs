use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stacky-count"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let o = run(args);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn local_counts_csv() {
    let out = stdout(&["local", "--group", "z2", "--q", "2", "--nmax", "4"]);
    assert_eq!(out, "p,f,group,n,count,dimension\n2,1,z2,0,2,0\n2,1,z2,1,0,\n2,1,z2,2,2,1\n2,1,z2,3,0,\n2,1,z2,4,4,2\n");
}

#[test]
fn invariants_json() {
    let v = json(&["invariants", "--group", "z3z3", "--height", "discriminant"]);
    assert_eq!((v["a"].as_str(), v["b"].as_u64()), (Some("5/24"), Some(1)));
    let v = json(&["invariants", "--group", "z9", "--height", "conductor"]);
    assert_eq!((v["a"].as_str(), v["b"].as_u64()), (Some("1"), Some(8)));
    let v = json(&["invariants", "--height", "o1", "--d", "2", "--c0", "1"]);
    assert_eq!((v["a"].as_str(), v["b"].as_u64()), (Some("1"), Some(2)));
    let v = json(&["invariants", "--rho", "1", "--gamma", "2"]);
    assert_eq!((v["a"].as_str(), v["b"].as_u64()), (Some("1"), Some(3)));
}

#[test]
fn global_census_and_enumeration_agree() {
    let args = [
        "global",
        "--group",
        "zp:1",
        "--q",
        "2",
        "--height",
        "conductor",
        "--Bmax",
        "16",
    ];
    let census = stdout(&args);
    assert!(census.starts_with("B,count\n1,2\n2,2\n4,8\n"));
    let mut e = args.to_vec();
    e.extend(["--method", "enumerate"]);
    assert_eq!(stdout(&e), census);
    let disc = [
        "global",
        "--group",
        "zp:2",
        "--q",
        "2",
        "--height",
        "discriminant",
        "--Bmax",
        "64",
    ];
    let mut e = disc.to_vec();
    e.extend(["--method", "enumerate"]);
    assert_eq!(stdout(&e), stdout(&disc));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let p = path.to_str().unwrap();
        stdout(&[
            "--threads",
            threads,
            "global",
            "--group",
            "zp:1",
            "--q",
            "3",
            "--Bmax",
            "59049",
            "--out",
            p,
        ]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"subcommand": "global", "group": "zp:1", "q": 2, "height": "conductor", "Bmax": 16}"#,
    )
    .unwrap();
    let from_config = stdout(&["--config", cfg.to_str().unwrap()]);
    let from_flags = stdout(&[
        "global",
        "--group",
        "zp:1",
        "--q",
        "2",
        "--height",
        "conductor",
        "--Bmax",
        "16",
    ]);
    assert_eq!(from_config, from_flags);
    // command-line flags override the file
    let overridden = stdout(&["--config", cfg.to_str().unwrap(), "global", "--Bmax", "4"]);
    assert_eq!(overridden, "B,count\n1,2\n2,2\n4,8\n");
    fs::write(&cfg, r#"{"q": 2}"#).unwrap();
    assert_eq!(code(&["--config", cfg.to_str().unwrap()]), 2);
}

#[test]
fn p1_and_mu2_tables() {
    assert_eq!(
        stdout(&["p1", "--q", "2", "--Bmax", "2"]),
        "B,count\n1,3\n2,9\n"
    );
    assert_eq!(
        stdout(&["mu2", "--q", "3", "--Bmax", "1"]),
        "B,count\n1,2\n"
    );
}

#[test]
fn elliptic_json() {
    let v = json(&[
        "elliptic", "--q", "3", "--a2", "1", "--a4", "0", "--a6", "2*t^-1", "--prec", "40",
    ]);
    for key in [
        "ord0", "ordinf", "alpha2", "alpha4", "bj_prime", "fe", "ff", "fd", "kodaira",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(
        (v["ff"].as_u64(), v["fd"].as_u64(), v["kodaira"].as_str()),
        (Some(3), Some(11), Some("II*"))
    );
    let g = json(&[
        "elliptic", "--global", "--a2", "1", "--a4", "0", "--a6", "2/t",
    ]);
    assert_eq!(
        (g["F"].as_str(), g["D"].as_str()),
        (Some("3^4"), Some("3^12"))
    );
}

#[test]
fn asym_and_product() {
    let v = json(&["asym", "--B", "1000", "--beta1", "2", "--beta2", "1"]);
    let (e, q) = (
        v["exact"].as_f64().unwrap(),
        v["quadrature"].as_f64().unwrap(),
    );
    assert!(((e - q) / q).abs() < 1e-9);
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.csv");
    let table = stdout(&[
        "global",
        "--group",
        "zp:1",
        "--q",
        "3",
        "--Bmax",
        "3486784401",
    ]);
    fs::write(&t, table).unwrap();
    let fit = json(&[
        "asym",
        "--table",
        t.to_str().unwrap(),
        "--Bmin",
        "81",
        "--rate",
        "1,1",
    ]);
    assert!(fit["beta_minus_1"].as_f64().unwrap() > 0.3);
    let out = stdout(&[
        "product",
        "--left",
        "range:100",
        "--right",
        "range:100",
        "--Bs",
        "1,2,4",
    ]);
    assert_eq!(out, "B,count\n1,1\n2,3\n4,8\n");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["local", "--group", "z6", "--q", "2"]), 2);
    assert_eq!(code(&["local", "--group", "z3", "--q", "2"]), 2);
    assert_eq!(code(&["nonsense"]), 2);
    assert_eq!(
        code(&["p1", "--q", "3", "--Bmax", "729", "--budget", "10"]),
        3
    );
    let cov = [
        "global",
        "--group",
        "zp:1",
        "--q",
        "2",
        "--Bmax",
        "256",
        "--method",
        "enumerate",
        "--max-order",
        "1",
    ];
    assert_eq!(code(&cov), 4);
    assert_eq!(
        code(&["elliptic", "--a2", "0", "--a4", "O(t^3)", "--a6", "1"]),
        5
    );
    assert_eq!(
        code(&["elliptic", "--q", "2", "--a2", "1", "--a4", "0", "--a6", "1"]),
        2
    );
}

#[test]
fn verify_runs_selected_criteria() {
    let out = stdout(&["verify", "--suite", "acceptance", "--only", "9,10"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l.starts_with("PASS criterion")));
    let tate = stdout(&["verify", "--suite", "tate", "--count", "20"]);
    assert_eq!(tate.lines().filter(|l| l.starts_with("PASS")).count(), 2);
}
