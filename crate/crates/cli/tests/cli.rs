use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn zetagcd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetagcd")).args(args).current_dir(root()).output().unwrap()
}

fn zetagcd_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetagcd")).args(args).env(key, value).current_dir(root()).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema(name: &str) -> jsonschema::Validator {
    let text = stdout(&zetagcd(&["schema", name]));
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(name: &str, line: &str) {
    let v: Value = serde_json::from_str(line).unwrap();
    let s = schema(name);
    let errors: Vec<String> = s.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}\n{line}");
}

#[test]
fn zeta_of_fermat_cubic_curve() {
    let out = stdout(&zetagcd(&["zeta", "data/fermat_cubic_curve.json"]));
    assert_eq!(out.trim(), r#"{"numerator":[1,0,2],"q":2,"w":1}"#);
    assert_valid("zeta", out.trim());
    assert_valid("weil", out.trim());
}

#[test]
fn zeta_counts() {
    let out = stdout(&zetagcd(&["zeta", "data/fermat_cubic_curve.json", "--count-only", "-k", "2"]));
    let v: Value = serde_json::from_str(&out).unwrap();
    // 1 + 2T^2 predicts N_2 = 4 + 1 + 4
    assert_eq!(v["counts"]["2"], 9);
    assert_valid("counts", out.trim());
    let plane = stdout(&zetagcd(&["zeta", "data/projective_plane_f3.json", "-k", "1", "-k", "2"]));
    assert_eq!(plane.trim(), r#"{"counts":{"1":13,"2":91},"q":3}"#);
}

#[test]
fn torsion_of_rp2() {
    let out = stdout(&zetagcd(&["torsion", "data/rp2.json"]));
    assert!(out.contains(r#""H2_torsion":[2]"#), "{out}");
    assert_valid("torsion", out.trim());
    assert_eq!(out, stdout(&zetagcd(&["torsion", "--fixture", "rp2"])));
}

#[test]
fn torsion_bound_evaluators() {
    let b = stdout(&zetagcd(&["torsion", "--bounds", "1", "1", "real-affine"]));
    assert!(b.contains(r#""cells":"2048""#), "{b}");
    assert_valid("bound", b.trim());
    let p = stdout(&zetagcd(&["torsion", "--prime", "2", "4"]));
    assert_valid("prime", p.trim());
    let v: Value = serde_json::from_str(&p).unwrap();
    assert!(v["chain"].as_array().unwrap().iter().all(|s| s["holds"] == true));
    let exact = stdout(&zetagcd(&["torsion", "--prime", "2", "4", "--orders", "2,6"]));
    assert!(exact.contains(r#""ell":5"#));
    let t = stdout(&zetagcd(&["torsion", "--threshold", "3", "3", "2", "--w", "8"]));
    assert_valid("threshold", t.trim());
    let v: Value = serde_json::from_str(&t).unwrap();
    assert_eq!((v["aux_bound"].as_u64(), v["aux_min_w"].as_u64()), (Some(162), Some(8)));
    assert_eq!(v["configured_meets_bound"], false);
}

#[test]
fn estimate_sp2_f3() {
    let out = stdout(&zetagcd(&["estimate", "--family", "Sp", "--s", "2", "--ell", "3", "--f", "1 -2 1"]));
    assert!(out.contains(",9,24,"), "{out}");
}

#[test]
fn gcd_is_reproducible() {
    let args = ["gcd", "data/fermat_cubic_surface_pencil.json", "--Q", "4096", "--trials", "6", "--target", "data/target_one.json", "--seed", "9"];
    let a = stdout(&zetagcd(&args));
    let b = stdout(&zetagcd(&args));
    assert_eq!(a, b);
    let mut one = args.to_vec();
    one.extend(["--workers", "1"]);
    assert_eq!(a, stdout(&zetagcd(&one)));
    assert_eq!(a.lines().count(), 6);
    for line in a.lines() {
        assert_valid("trial", line);
    }
}

#[test]
fn pencil_report() {
    let out = stdout(&zetagcd(&["pencil", "data/fermat_cubic_surface_pencil.json", "--scan", "2"]));
    assert_valid("pencil", out.trim());
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["scan"]["lefschetz"], false);
}

#[test]
fn exit_codes() {
    let bad = zetagcd(&["estimate", "--family", "Sp", "--s", "2", "--ell", "2", "--f", "1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty() && !bad.stderr.is_empty());
    assert_eq!(zetagcd(&["zeta", "data/missing.json"]).status.code(), Some(2));
    assert_eq!(zetagcd(&["torsion", "--bounds", "2", "2", "simple"]).status.code(), Some(2));
    let cap = zetagcd_env(&["pencil", "data/fermat_cubic_surface_pencil.json", "--scan", "4"], "ZETAGCD_ENUM_CAP", "10");
    assert_eq!(cap.status.code(), Some(3));
    let group = zetagcd_env(&["estimate", "--s", "4", "--f", "1 0 0 0 1", "--samples", "0"], "ZETAGCD_GROUP_CAP", "10");
    assert_eq!(group.status.code(), Some(2));
    assert_eq!(zetagcd(&["schema", "nope"]).status.code(), Some(2));
}

/// Runs every `console` block of the README: lines starting with `$ ` are
/// commands, the lines after them the expected standard output. A line
/// `...` matches any remaining output.
#[test]
fn readme_examples() {
    let readme = std::fs::read_to_string(root().join("README.md")).unwrap();
    let mut blocks = Vec::new();
    let mut cur: Option<Vec<&str>> = None;
    for line in readme.lines() {
        match (&mut cur, line.trim_end()) {
            (None, "```console") => cur = Some(Vec::new()),
            (Some(_), "```") => blocks.push(cur.take().unwrap()),
            (Some(b), l) => b.push(l),
            _ => {}
        }
    }
    assert!(!blocks.is_empty());
    let mut ran = 0;
    for block in blocks {
        let mut i = 0;
        while i < block.len() {
            let cmd = block[i].strip_prefix("$ zetagcd ").unwrap_or_else(|| panic!("not a command: {}", block[i]));
            let mut expected = Vec::new();
            i += 1;
            while i < block.len() && !block[i].starts_with("$ ") {
                expected.push(block[i]);
                i += 1;
            }
            let args = shell_words(cmd);
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            let out = stdout(&zetagcd(&refs));
            let got: Vec<&str> = out.lines().collect();
            match expected.iter().position(|l| *l == "...") {
                Some(k) => assert_eq!(&got[..k], &expected[..k], "{cmd}"),
                None => assert_eq!(got, expected, "{cmd}"),
            }
            ran += 1;
        }
    }
    assert!(ran >= 5);
}

/// Splits on whitespace outside double quotes.
fn shell_words(cmd: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let (mut quoted, mut started) = (false, false);
    for c in cmd.chars() {
        match c {
            '"' => {
                quoted = !quoted;
                started = true;
            }
            c if c.is_whitespace() && !quoted => {
                if started {
                    out.push(std::mem::take(&mut cur));
                    started = false;
                }
            }
            c => {
                cur.push(c);
                started = true;
            }
        }
    }
    if started {
        out.push(cur);
    }
    out
}
