use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genbargmann")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn custom_factorial(dir: &Path) -> String {
    let mut text = String::from("# extension: linear\n# exponents: 2 0.5\n");
    let mut acc = 0.0f64;
    for n in 0..40u32 {
        if n > 0 {
            acc += (n as f64).ln();
        }
        text.push_str(&format!("{n}, {acc}\n"));
    }
    let path = dir.join("fact.txt");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn families_listing() {
    let out = run(&["families", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"].as_array().unwrap().len(), 4);
    assert_eq!(v["metadata"]["tool"], "genbargmann");
    let one = json(&run(&["families", "ml:2:1.5", "--json"]));
    assert_eq!(one["result"].as_array().unwrap().len(), 1);
    let text = String::from_utf8(run(&["families"]).stdout).unwrap();
    assert!(text.contains("factorial_squared"));
}

#[test]
fn classify_verdicts_and_exit_codes() {
    let over = json(&run(&["classify", "--family", "factorial", "--seq", "lattice:A=1.5", "--json"]));
    assert_eq!(over["result"]["verdict"]["kind"], "Overcomplete");
    let under = json(&run(&["classify", "--family", "factorial", "--seq", "radial:t=1,delta=1", "--json"]));
    assert_eq!(under["result"]["verdict"]["kind"], "Undercomplete");
    let threshold = run(&["classify", "--family", "factorial", "--seq", "lattice:A=3.14159265"]);
    assert_eq!(threshold.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&threshold.stderr).contains("indeterminate"));
    let bad = run(&["classify", "--family", "factorial", "--seq", "lattice:A=abc"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("position 10"));
    assert_eq!(run(&["classify", "--family", "factorial"]).status.code(), Some(2));
}

#[test]
fn witness_writes_amplitudes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("w.csv");
    let report = dir.path().join("w.json");
    let out = run(&[
        "witness", "--family", "factorial", "--seq", "line:l=1", "--p", "1", "--truncation", "200", "--degree", "120",
        "--csv", csv.to_str().unwrap(), "--out", report.to_str().unwrap(), "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&report).unwrap(), out.stdout);
    let v = json(&out);
    assert!(v["result"]["max_orthogonality_residual"].as_f64().unwrap() < 1e-8);
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("n,re,im\n"));
    assert_eq!(table.lines().count(), 122);
    let refused = run(&["witness", "--family", "factorial", "--seq", "lattice:A=1"]);
    assert_eq!(refused.status.code(), Some(1));
}

#[test]
fn growth_density_moments_gram() {
    let dir = tempfile::tempdir().unwrap();
    let g = json(&run(&["growth", "--function", "extremal", "--family", "factorial", "--json"]));
    assert!((g["result"]["order"].as_f64().unwrap() - 2.0).abs() < 0.05);
    let c = json(&run(&["growth", "--function", "exp:s=2,r=1", "--method", "coefficients", "--json"]));
    assert!((c["result"]["type"].as_f64().unwrap() - 2.0).abs() < 0.2);
    assert_eq!(run(&["growth", "--function", "extremal"]).status.code(), Some(2));

    let pts = dir.path().join("pts.csv");
    let d = json(&run(&["density", "--seq", "line:l=0.5,count=2000", "--csv", pts.to_str().unwrap(), "--json"]));
    assert!((d["result"]["density"]["t"].as_f64().unwrap() - 1.0).abs() < 0.02);
    assert!(std::fs::read_to_string(&pts).unwrap().starts_with("N,re,im,modulus"));

    let m = json(&run(&["moments", "--family", "factorial_squared", "--n-max", "4", "--json"]));
    let rows = m["result"]["moments"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r["relative_error"].as_f64().unwrap() < 1e-6));

    let spec = format!("file:{}", pts.to_str().unwrap());
    let too_many = run(&["gram", "--family", "factorial", "--seq", &spec]);
    assert_eq!(too_many.status.code(), Some(1));
    let small = dir.path().join("small.csv");
    std::fs::write(&small, "re,im\n0.5,0\n0,0.6\n-0.4,-0.2\n").unwrap();
    let spec = format!("file:{}", small.to_str().unwrap());
    let gram = json(&run(&["gram", "--family", "factorial", "--seq", &spec, "--fock-dim", "16", "--json"]));
    assert_eq!(gram["result"]["rank"]["numerical_rank"], 3);
    let tail = run(&["gram", "--family", "factorial", "--seq", "lattice:A=1,count=60"]);
    assert_eq!(tail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&tail.stderr).contains("at least"));
}

#[test]
fn custom_family_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = custom_factorial(dir.path());
    let spec = format!("custom:{path}");
    let v = json(&run(&["families", &spec, "--json"]));
    assert_eq!(v["result"][0]["a"], 2.0);
    let c = json(&run(&["classify", "--family", &spec, "--seq", "lattice:A=1.5", "--json"]));
    assert_eq!(c["result"]["verdict"]["kind"], "Overcomplete");
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "# extension: cubic\n0, 0\n").unwrap();
    let out = run(&["families", &format!("custom:{}", bad.to_str().unwrap())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["density", "--seq", "lattice:A=0.8,count=3000,phase=random", "--seed", "5", "--json"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let other = run(&["density", "--seq", "lattice:A=0.8,count=3000,phase=random", "--seed", "6", "--json"]);
    let (va, vo) = (json(&a), json(&other));
    assert_eq!(va["result"], vo["result"]);
    assert_ne!(va["metadata"]["seed"], vo["metadata"]["seed"]);
}

#[test]
fn help_documents_grammar() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ml:ALPHA:BETA") && text.contains("radial:t=T,delta=D"));
}
