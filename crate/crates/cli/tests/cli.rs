use std::process::{Command, Output};

fn sumfactor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumfactor"))
        .args(args)
        .env_remove("SUMFACTOR_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn collapse_exact_and_failing() {
    let o = sumfactor(&["collapse", "--rel", r"odd>=3 ~(2,2)~ odd>=3 \ {9,15,21}"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "holds");
    assert_eq!(v["schema"], 1);

    let o = sumfactor(&["collapse", "--rel", r"odd>=3 ~(2,2)~ odd>=3 \ {3}", "--window", "1..500"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["counterexample"], 6);

    let o = sumfactor(&["collapse", "--rel", "odd>=3 ~(2,2)~> primes>=3", "--window", "3..20000", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("odd>=3 ~(2,2)~> primes>=3\nholds_on_window"));
}

#[test]
fn configuration_errors_exit_2() {
    assert_eq!(sumfactor(&["collapse", "--rel", "odd>=3"]).status.code(), Some(2));
    assert_eq!(sumfactor(&["collapse", "--rel", "odd>=3 ~(2)~ odd>=3", "--window", "9..3"]).status.code(), Some(2));
    assert_eq!(sumfactor(&["verify", "--suite", "other"]).status.code(), Some(2));
    assert_eq!(sumfactor(&["ring", "--modulus", "64"]).status.code(), Some(2));
    assert_eq!(sumfactor(&["bogus"]).status.code(), Some(2));
    assert_eq!(sumfactor(&["--help"]).status.code(), Some(0));
}

#[test]
fn ring_table_contains_counterexample_rows() {
    let o = sumfactor(&["ring", "--modulus", "8", "--nmax", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("modulus,b,c,m_fold,n_fold,sumset_equal,fp,subset,equiv,implies\n"));
    assert!(out.contains("8,0 2 4,0 2,2,2,false,true,true,false,false\n"));
    assert!(out.contains("8,0 2 4,0 2,3,3,true,true,true,true,true\n"));
    assert!(out.contains("8,0 2 4,0 2,2,3,true,true,true,true,true\n"));
}

#[test]
fn strata_csv_and_census() {
    let dir = std::env::temp_dir().join(format!("sumfactor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let census = dir.join("census.json");
    let o = sumfactor(&["strata", "--limit", "100", "--census", census.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("c,layer,witness_prime,witness_partner"));
    assert_eq!(lines.next(), Some("9,1,5,7"));
    assert_eq!(lines.next(), Some("15,1,5,13"));
    let c: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&census).unwrap()).unwrap();
    assert_eq!(c["max_layer"], 1);
    assert_eq!(c["unassigned"], 0);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn partitions_and_sieve() {
    let o = sumfactor(&["partitions", "--target", "12", "--set", "primes>=3", "--k", "2", "--format", "text"]);
    assert_eq!(stdout(&o), "12 = 5 + 7\n");
    let o = sumfactor(&["partitions", "--target", "7", "--set", "odd>=3", "--k", "2", "--format", "text"]);
    assert_eq!(stdout(&o), "");
    let o = sumfactor(&["sieve", "--limit", "100", "--k", "24"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["pi"].as_u64(), v["nth_prime"].as_u64()), (Some(25), Some(89)));
}

#[test]
fn verify_marks_every_check_with_a_reference() {
    let o = sumfactor(&["verify", "--limit", "20000", "--threads", "2"]);
    assert_eq!(o.status.code(), Some(1), "the 2k membership exceptions differ from the claim");
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 20);
    for c in checks {
        assert!(!c["paper_ref"].as_str().unwrap().is_empty());
        assert!(c["elapsed_ms"].is_null());
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| c["status"] == "fails")
        .map(|c| c["claim"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["cor311_membership"]);

    let o = sumfactor(&["verify", "--limit", "20000", "--timings"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["checks"][0]["elapsed_ms"].is_u64());
}
