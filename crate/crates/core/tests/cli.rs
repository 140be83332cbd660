use std::process::Command;

use serde_json::Value;

fn richlab(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_richlab"))
        .args(args)
        .env_remove("RICHLAB_CACHE_DIR")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, stdout, stderr) = richlab(args);
    assert_eq!(code, 0, "{stderr}");
    serde_json::from_str(&stdout).unwrap()
}

#[test]
fn check_reports_richness() {
    let v = json(&["check", "abacaba"]);
    assert_eq!(v["word"], "abacaba");
    assert_eq!(v["rich"], true);
    assert_eq!(v["palindromes"], 8);
    assert_eq!(v["meta"]["tool"], "richlab");
    assert!(v["meta"]["elapsed_ms"].is_number());
    assert_eq!(v["meta"]["config"]["command"]["subcommand"], "check");

    let v = json(&["check", "abca"]);
    assert_eq!(v["rich"], false);
    assert_eq!(v["palindromes"], 4);
}

#[test]
fn count_table_ends_with_252() {
    let v = json(&["count", "--q", "2", "--n", "8"]);
    let table = v["table"].as_array().unwrap();
    assert_eq!(table.len(), 8);
    assert_eq!(table[7]["n"], 8);
    assert_eq!(table[7]["count"], "252");

    let (code, csv, _) = richlab(&["--format", "csv", "count", "--q", "2", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(csv, "n,count,max_luf\n1,2,1\n2,4,2\n3,8,2\n4,16,3\n");
}

#[test]
fn reports_are_reproducible() {
    let a = richlab(&[
        "--omit-timing",
        "count",
        "--q",
        "3",
        "--n",
        "9",
        "--workers",
        "1",
    ]);
    let b = richlab(&[
        "--omit-timing",
        "count",
        "--q",
        "3",
        "--n",
        "9",
        "--workers",
        "1",
    ]);
    assert_eq!(a, b);
    let c = richlab(&[
        "--omit-timing",
        "count",
        "--q",
        "3",
        "--n",
        "9",
        "--workers",
        "4",
        "--shard-depth",
        "2",
    ]);
    let strip = |s: &str| {
        let mut v: Value = serde_json::from_str(s).unwrap();
        v.as_object_mut().unwrap().remove("meta");
        v
    };
    assert_eq!(strip(&a.1), strip(&c.1));
    let d = richlab(&[
        "--omit-timing",
        "count",
        "--q",
        "3",
        "--n",
        "9",
        "--symmetric",
    ]);
    assert_eq!(strip(&a.1)["table"], strip(&d.1)["table"]);
}

#[test]
fn count_uses_and_validates_cache() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q2.jsonl");
    let p = path.to_str().unwrap();
    let first = json(&["count", "--q", "2", "--n", "9", "--cache", p]);
    assert!(path.exists());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 10);
    // a shorter request is served from the cache
    let second = json(&["count", "--q", "2", "--n", "6", "--cache", p]);
    assert_eq!(
        second["table"].as_array().unwrap()[..],
        first["table"].as_array().unwrap()[..6]
    );

    let (code, _, stderr) = richlab(&["count", "--q", "3", "--n", "4", "--cache", p]);
    assert_eq!(code, 1);
    assert!(stderr.contains("q = 2"), "{stderr}");

    std::fs::write(&path, &text[..text.len() - 5]).unwrap();
    let (code, _, stderr) = richlab(&["count", "--q", "2", "--n", "4", "--cache", p]);
    assert_eq!(code, 1);
    assert!(stderr.contains("malformed"), "{stderr}");
}

#[test]
fn cache_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_richlab"))
        .args(["count", "--q", "2", "--n", "5"])
        .env("RICHLAB_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("rich_q2.jsonl").exists());
}

#[test]
fn ups_and_maxluf() {
    let v = json(&["ups", "aab"]);
    assert_eq!(v["parts"], serde_json::json!(["aa", "b"]));
    assert_eq!(v["p"], 2);
    assert_eq!(v["word"], "aab");

    let v = json(&["maxluf", "--q", "2", "--n", "6", "--phi", "identity"]);
    assert_eq!(v["table"][1]["max_luf"], 2);
    assert_eq!(v["comparison"]["all_hold"], false);

    let (code, _, _) = richlab(&["ups", ""]);
    assert_eq!(code, 1);
}

#[test]
fn bound_recurrence_csv() {
    let (code, csv, stderr) = richlab(&[
        "--format",
        "csv",
        "bound-recurrence",
        "--q",
        "2",
        "--n-max",
        "12",
        "--seed-n",
        "6",
    ]);
    assert_eq!(code, 0, "{stderr}");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,exponent_log_q,provenance");
    assert_eq!(lines.len(), 13);
    assert!(lines[1].ends_with(",exact-seed"));
    assert!(lines[12].starts_with("12,") && lines[12].ends_with(",recurrence"));

    let (code, _, stderr) = richlab(&[
        "bound-recurrence",
        "--q",
        "2",
        "--n-max",
        "5",
        "--seeds-cache",
        "/nonexistent.jsonl",
    ]);
    assert_eq!(code, 1);
    assert!(stderr.contains("error"));
}

#[test]
fn bootstrap_single_step() {
    let v = json(&[
        "bootstrap",
        "--q",
        "2",
        "--d",
        "2",
        "--c1",
        "1",
        "--c2",
        "1",
        "--c3",
        "0.1",
        "--iters",
        "1",
    ]);
    assert_eq!(v["c1"], 0.55);
    assert!((v["c2"].as_f64().unwrap() - 2.542695).abs() < 1e-6);

    let (code, _, _) = richlab(&[
        "bootstrap",
        "--q",
        "2",
        "--d",
        "1",
        "--c1",
        "1",
        "--c2",
        "1",
        "--c3",
        "0.1",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn compare_exponents() {
    let v = json(&[
        "compare-exponents",
        "--q",
        "2",
        "--d",
        "2",
        "--c1",
        "1",
        "--c2",
        "0.01",
        "--c3",
        "0.1",
        "--phi",
        "1,0.8,0,0,1",
        "--psi",
        "ln",
        "--n",
        "1e10",
    ]);
    assert_eq!(v["new_is_smaller"], true);
    assert_eq!(v["first_term_dominates"], true);
}

#[test]
fn verify_exit_codes() {
    assert_eq!(richlab(&["verify", "crossover"]).0, 0);
    assert_eq!(
        richlab(&["verify", "composition-bound", "--n-max", "40"]).0,
        0
    );
    assert_eq!(
        richlab(&["verify", "delta", "--f", "sqrt", "--lo", "1", "--hi", "1e6"]).0,
        0
    );

    let (code, stdout, _) = richlab(&[
        "verify",
        "delta",
        "--f",
        "1,2,0,0,1",
        "--lo",
        "1",
        "--hi",
        "10",
    ]);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["first_violation"]["condition"], "f'' >= 0");

    assert_eq!(
        richlab(&[
            "verify",
            "psi-family",
            "--phi",
            "1,0.8,0,0,1",
            "--psi",
            "ln",
            "--lo",
            "8",
            "--hi",
            "1e6"
        ])
        .0,
        0
    );
    assert_eq!(
        richlab(&[
            "verify",
            "psi-family",
            "--phi",
            "identity",
            "--psi",
            "1,2,0,0,1",
            "--lo",
            "2",
            "--hi",
            "10"
        ])
        .0,
        2
    );

    let (code, stdout, _) = richlab(&[
        "verify",
        "d-condition",
        "--phi",
        "1,0.8,0,0,1",
        "--psi",
        "ln",
        "--d",
        "1.5",
        "--lo",
        "1e2",
        "--hi",
        "1e8",
        "--grid",
        "10000",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["last_violation"].as_f64().unwrap() < 1048576.0);
    assert!(v["threshold"].as_f64().unwrap() >= 1048576.0);

    assert_eq!(
        richlab(&[
            "verify",
            "phi-composition",
            "--phi",
            "sqrt",
            "--lo",
            "2",
            "--hi",
            "1e6"
        ])
        .0,
        2
    );
    assert_eq!(
        richlab(&[
            "verify",
            "phi-composition",
            "--phi",
            "identity",
            "--lo",
            "2",
            "--hi",
            "1e6"
        ])
        .0,
        0
    );

    assert_eq!(
        richlab(&["verify", "jensen", "--f", "sqrt", "--lo", "1", "--hi", "100", "--trials", "50"])
            .0,
        0
    );
    assert_eq!(
        richlab(&["verify", "jensen", "--lo", "1", "--hi", "100", "--trials", "50"]).0,
        0
    );
    // x^2 fails the concavity hypothesis: a domain error, not a counterexample
    assert_eq!(
        richlab(&[
            "verify",
            "jensen",
            "--f",
            "1,2,0,0,1",
            "--lo",
            "1",
            "--hi",
            "100"
        ])
        .0,
        1
    );

    assert_eq!(
        richlab(&["verify", "product-bound", "--trials", "100"]).0,
        0
    );
    assert_eq!(
        richlab(&[
            "verify",
            "p-monotonicity",
            "--n-lo",
            "10",
            "--n-hi",
            "200",
            "--p-max",
            "10"
        ])
        .0,
        0
    );
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(richlab(&["frobnicate"]).0, 1);
    assert_eq!(richlab(&["count", "--q", "2"]).0, 1);
    assert_eq!(
        richlab(&["verify", "delta", "--f", "1,2", "--lo", "1", "--hi", "2"]).0,
        1
    );
    assert_eq!(richlab(&["check", "ABC"]).0, 1);
    assert_eq!(richlab(&["--format", "csv", "check", "aba"]).0, 1);
    assert_eq!(richlab(&["--help"]).0, 0);
}
