use std::process::{Command, Output};

use serde_json::Value;

fn es_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_es-lab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let o = es_lab(&all);
    (o.status.code().unwrap(), serde_json::from_str(&stdout(&o)).expect("JSON on stdout"))
}

#[test]
fn decompose_2009() {
    let o = es_lab(&["decompose", "2009", "--terms", "2", "--all"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "4/2009 = 1/504 + 1/144648\n4/2009 = 1/574 + 1/4018\n4/2009 = 1/588 + 1/3444\n"
    );
    let (code, v) = json(&["decompose", "2009", "--terms", "2", "--all"]);
    assert_eq!(code, 0);
    assert_eq!(v["pairs"], serde_json::json!([[504, 144648], [574, 4018], [588, 3444]]));
}

#[test]
fn min_class_2521() {
    let o = es_lab(&["min-class", "2521"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "C_6 (636, 70588, 5611746)\n");
    let (_, v) = json(&["min-class", "2521"]);
    assert_eq!(v["class"], 6);
    assert_eq!(v["denominators"], serde_json::json!([636, 70588, 5611746]));
}

#[test]
fn sieve_run_mordell() {
    let o = es_lab(&["sieve", "run", "--plan", "mordell-840"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "mod 840 (6 residues): 1,121,169,289,361,529\n");
    let (_, v) = json(&["sieve", "run", "--plan", "mordell-840"]);
    assert_eq!(v["residues"], serde_json::json!([1, 121, 169, 289, 361, 529]));
    assert_eq!(v["modulus"], 840);
}

#[test]
fn sieve_intersect_and_classify() {
    let (_, v) = json(&["sieve", "intersect", "--plan", "thm-1320", "--plan", "prop-1.4"]);
    assert_eq!(v["residues"].as_array().unwrap().len(), 36);
    let (_, v) = json(&["sieve", "classify", "--plan", "thm-9240", "--remove-identities"]);
    let c = &v["classification"];
    assert_eq!(c["squares"].as_array().unwrap().len(), 20);
    assert_eq!(c["primes"].as_array().unwrap().len(), 9);
    assert_eq!(c["composite_nonsquare"].as_array().unwrap().len(), 5);
}

#[test]
fn sieve_set_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.txt");
    std::fs::write(&path, "# mod 168 p14\n1\n25\n121\n").unwrap();
    let (_, v) = json(&["sieve", "intersect", "--set", path.to_str().unwrap(), "--plan", "prop-1.5"]);
    assert_eq!(v["residues"], serde_json::json!([1, 121, 169, 289, 361, 529]));
}

#[test]
fn identity_commands() {
    let o = es_lab(&["identity", "verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("res-1201-printed\tFAILS\tprinted-form-invalid-corrected"));
    assert_eq!(es_lab(&["identity", "verify", "res-1201-printed"]).status.code(), Some(1));
    assert_eq!(es_lab(&["identity", "verify", "res-1201"]).status.code(), Some(0));
    assert_eq!(es_lab(&["identity", "verify", "nope"]).status.code(), Some(2));

    let (_, v) = json(&["identity", "list"]);
    assert_eq!(v.as_array().unwrap().len(), 14);

    let o = es_lab(&["identity", "search", "9240", "1201", "--max-offset", "10"]);
    assert!(stdout(&o).contains("1/(5(9240k+1201)(15k+2))"), "{}", stdout(&o));
    let (_, v) = json(&["identity", "search-ext", "120120", "2521"]);
    assert!(v.as_array().unwrap().iter().any(|id| id["claimed_class"] == 3374));
}

#[test]
fn verify_exit_codes_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let (code, v) = json(&["verify", "--to", "100", "--primes-only", "--max-class", "8", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["examined"], 25);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 26);

    // C_3 members exceed cap 2: a counterexample under the cap.
    let (code, v) = json(&["verify", "--to", "2000", "--primes-only", "--max-class", "2"]);
    assert_eq!(code, 1);
    assert!(v["exceptions"].as_array().unwrap().contains(&Value::from(1129)));

    let cp = dir.path().join("cp.json");
    let a = json(&["verify", "--to", "5000", "--primes-only", "--threads", "1", "--checkpoint", cp.to_str().unwrap()]).1;
    let b = json(&["verify", "--to", "5000", "--primes-only", "--threads", "3"]).1;
    assert_eq!(a["counts"], b["counts"]);
    assert_eq!(a["first_occurrences"], b["first_occurrences"]);

    let (code, v) = json(&["verify", "--to", "2000", "--primes-only", "--plan", "mordell-840"]);
    assert_eq!(code, 0);
    assert_eq!(v["fast_path"]["class_bound"], 2);
}

#[test]
fn family_stats_and_check() {
    let (code, v) = json(&["family-stats", "9240", "1201", "--from", "0", "--to", "100", "--max-class", "8"]);
    assert_eq!(code, 0);
    assert_eq!(v["exceptions"], serde_json::json!([]));
    let (code, v) = json(&["check", "8803369"]);
    assert_eq!(code, 0);
    assert_eq!(v["class"], 27);
    let o = es_lab(&["check", "2521", "--max-class", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("C_3"));
}

#[test]
fn usage_errors() {
    assert_eq!(es_lab(&[]).status.code(), Some(2));
    assert_eq!(es_lab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(es_lab(&["min-class", "12", "--bogus"]).status.code(), Some(2));
    assert_eq!(es_lab(&["min-class", "x"]).status.code(), Some(2));
    assert_eq!(es_lab(&["min-class", "1"]).status.code(), Some(2));
    assert_eq!(es_lab(&["sieve", "run", "--plan", "nope"]).status.code(), Some(2));
    assert_eq!(es_lab(&["decompose", "7", "--terms", "4"]).status.code(), Some(2));
    let o = es_lab(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("family-stats"));
    // Progress never reaches a piped stderr.
    let o = es_lab(&["verify", "--to", "3000"]);
    assert!(o.stderr.is_empty());
}

#[test]
fn in_process_run() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = es_lab::cli::run(["es-lab", "min-class", "73"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap(), "C_2 (20, 292, 730)\n");
}
