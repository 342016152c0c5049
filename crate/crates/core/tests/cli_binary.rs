use std::process::{Command, Output};

fn arboreal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arboreal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn certify_five() {
    let o = arboreal(&["sieve", "certify", "--modulus", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "m=5: {2,3}\n");
}

#[test]
fn orders_for_binary_depth_three() {
    let o = arboreal(&["tree", "orders", "--d", "2", "--n", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["aut"], "128");
    assert_eq!(v["stab"], "16");
    assert_eq!(v["s"], "8");
    assert_eq!(v["enumerated"]["s"], 8);
}

#[test]
fn scan_reports_no_squares() {
    let o = arboreal(&["delta", "scan", "--nmax", "12", "--kmax", "500"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no squares found"));
    assert!(!o.stderr.is_empty(), "progress goes to stderr");
}

#[test]
fn certificate_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("arboreal-it-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c11.json");
    let p = path.to_str().unwrap();
    let o = arboreal(&["sieve", "certify", "--modulus", "11", "--save", p]);
    assert_eq!(o.status.code(), Some(0));
    let o = arboreal(&["sieve", "verify", "--certificate", p]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(&path, r#"{"modulus":11,"residues":[1,2]}"#).unwrap();
    let o = arboreal(&["sieve", "verify", "--certificate", p]);
    assert_eq!(o.status.code(), Some(1));
    let o = arboreal(&["sieve", "cover", "--bound", "30", "--certificates", p, "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("k0,covered,modulus,residue\n1,true,11,1\n2,true,11,2\n3,false,,\n"));
}

#[test]
fn centralizer_from_file() {
    let dir = std::env::temp_dir().join(format!("arboreal-it-c-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("swap.txt");
    std::fs::write(&path, "ε:10\n0:01\n1:01\n00:01\n01:01\n10:01\n11:01\n").unwrap();
    let o = arboreal(&["centralizer", "--generators", path.to_str().unwrap(), "--level", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("|C| = 16"));
    assert!(out.contains("kernel order 8 (bound 8)"));
    assert!(out.contains("Hausdorff bound 1/2"));
}

#[test]
fn exit_code_contract() {
    assert_eq!(arboreal(&["tree", "orders"]).status.code(), Some(2));
    assert_eq!(arboreal(&["delta", "poly", "--nmax", "99"]).status.code(), Some(2));
    assert_eq!(arboreal(&["sieve", "table"]).status.code(), Some(1));
    assert_eq!(arboreal(&["identities", "--k", "-2"]).status.code(), Some(0));
    assert_eq!(arboreal(&["--help"]).status.code(), Some(0));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let args = ["density", "--map", "x^2-x+1", "--a0", "2", "--xmax", "20000", "--format", "json"];
    let a = arboreal(&args);
    let b = arboreal(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.stdout, b.stdout);
}
