use std::process::{Command, Output};

use serde_json::Value;

fn qosearch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qosearch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn attack_json_has_the_documented_fields() {
    let out = qosearch(&[
        "attack",
        "--n",
        "4096",
        "--algorithm",
        "truncated-bs:1",
        "--v-override",
        "4",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["algorithm"], "truncated-bs:1");
    assert_eq!(doc["n"], 4096);
    assert_eq!(doc["depth"], 4);
    assert_eq!(doc["params"]["v"], 6);
    let records = doc["records"].as_array().unwrap();
    assert_eq!(records.len(), 4);
    for field in [
        "s", "parent", "child", "S_values", "chosen_r", "S_before", "S_after",
    ] {
        assert!(records[0].get(field).is_some(), "missing {field}");
    }
    assert_eq!(records[0]["S_values"].as_array().unwrap().len(), 8);
    assert_eq!(doc["final_interval"]["m"], 1);
    assert_eq!(doc["hybrid"]["verdict"]["distinguishable"], false);
}

#[test]
fn attack_output_is_deterministic() {
    let args = [
        "attack",
        "--n",
        "4096",
        "--algorithm",
        "random:T=2,w=1,seed=5",
        "--v-override",
        "4",
    ];
    let a = qosearch(&args);
    let b = qosearch(&args);
    assert!(matches!(code(&a), 0 | 1));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn attack_csv_lists_one_row_per_subdivide() {
    let out = qosearch(&[
        "attack",
        "--n",
        "4096",
        "--algorithm",
        "zero-query",
        "--v-override",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("s,parent_l,parent_m,child_l,child_m,chosen_r,S_before,S_after,S_1"));
    assert_eq!(header.split(',').count(), 8 + 8);
    assert_eq!(lines.count(), 4);
}

#[test]
fn regime_errors_exit_with_three() {
    let out = qosearch(&[
        "attack",
        "--n",
        "4096",
        "--algorithm",
        "truncated-bs:3",
        "--v-override",
        "4",
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("regime"));
    assert!(out.stdout.is_empty());
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        &["attack", "--n", "100", "--algorithm", "zero-query"][..],
        &["attack", "--n", "64", "--algorithm", "quicksort"],
        &[
            "attack",
            "--n",
            "64",
            "--algorithm",
            "lifted-bs",
            "--pair",
            "65",
        ],
        &[
            "attack",
            "--n",
            "64",
            "--algorithm",
            "zero-query",
            "--success-threshold",
            "1.5",
        ],
        &[
            "attack",
            "--n",
            "512",
            "--algorithm",
            "zero-query",
            "--u",
            "3",
        ],
        &["params", "--q", "-1", "--t", "8", "--u", "4"],
        &["sweep", "--q", "18.3", "--t", "8"],
        &["params", "--q", "18.3"],
    ] {
        let out = qosearch(args);
        assert_eq!(
            code(&out),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn pair_mode_judges_lifted_search_distinguishable() {
    let out = qosearch(&[
        "attack",
        "--n",
        "16",
        "--algorithm",
        "lifted-bs",
        "--pair",
        "9",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["k_lo"], 8);
    assert_eq!(v["k_hi"], 9);
    assert_eq!(v["distinguishable"], true);
    assert_eq!(v["contradiction"], false);
}

#[test]
fn params_reports_and_rejects() {
    let ok = qosearch(&["params", "--q", "18.3", "--t", "8", "--u", "4"]);
    assert_eq!(code(&ok), 0);
    let doc = json(&ok);
    assert_eq!(doc["v"], 6);
    assert_eq!(doc["rejection"], Value::Null);

    let bad = qosearch(&[
        "params", "--q", "3", "--t", "4", "--u", "1", "--format", "csv",
    ]);
    assert_eq!(code(&bad), 1);
    let text = String::from_utf8(bad.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("3.00000000000000e0,4,1,false,"));
}

#[test]
fn sweep_sorts_by_coefficient() {
    let out = qosearch(&["sweep", "--q", "18.3,40", "--t", "8,16", "--u", "4"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 4);
    let coefficients: Vec<f64> = rows.iter().map(|r| r[7].parse().unwrap()).collect();
    assert!(coefficients.windows(2).all(|w| w[0] >= w[1]));
    assert_eq!(rows[0][8], "1/12");
    assert_eq!(rows[3][8], "1/16");
}

#[test]
fn verify_writes_to_out_file() {
    let path = std::env::temp_dir().join(format!("qosearch-verify-{}.csv", std::process::id()));
    let out = qosearch(&[
        "verify",
        "--n",
        "64",
        "--count",
        "2",
        "--queries",
        "2",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.starts_with("check,evaluated,violations,worst_slack\n"));
    let row = text
        .lines()
        .find(|l| l.starts_with("sum_contraction,"))
        .unwrap();
    assert!(row.starts_with("sum_contraction,8,0,"), "{row}");
}

#[test]
fn unwritable_out_path_is_a_configuration_error() {
    let out = qosearch(&[
        "params",
        "--q",
        "18.3",
        "--t",
        "8",
        "--u",
        "4",
        "--out",
        "/nonexistent/dir/p.json",
    ]);
    assert_eq!(code(&out), 2);
}
