// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::process::{Command, Output};

fn maxorder(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_maxorder"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("MAXORDER_THREADS", t),
        None => cmd.env_remove("MAXORDER_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is json"))
        .collect()
}

#[test]
fn iterated_value() {
    let out = maxorder(&["iter", "--rule", "field:-4", "625"], None);
    assert!(out.status.success());
    let v = &json(&out)[0];
    assert_eq!(
        (v["n"].as_u64(), v["f"].as_u64(), v["ffn"].as_u64()),
        (Some(625), Some(5), Some(2))
    );
}

#[test]
fn series_constant() {
    let out = maxorder(&["constant", "--rule", "divisor:1", "--tol", "1e-6"], None);
    assert!(out.status.success());
    let v = &json(&out)[0];
    assert!((v["value"].as_f64().unwrap() - 2.7959).abs() < 1e-4);
    assert!(v["tail_bound"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn minimal_preimage() {
    let out = maxorder(&["min-preimage", "--rule", "divisor:1", "16"], None);
    let v = &json(&out)[0];
    assert_eq!(v["N"], 16);
    assert_eq!(v["m"], 120);
    assert_eq!(v["exponents"], serde_json::json!([3, 1, 1]));
}

#[test]
fn wide_preimage_is_exact() {
    // m_13 for the quarter lattice count is 5^12 = 244140625
    let out = maxorder(&["min-preimage", "--rule", "field:-4", "13"], None);
    assert_eq!(json(&out)[0]["m"], 244_140_625u64);
    // m_{13·17} = 5^16 · 13^12 is past 64 bits and is printed as a plain integer
    let out = maxorder(&["min-preimage", "--rule", "field:-4", "221"], None);
    let text = String::from_utf8(out.stdout).unwrap();
    let digits = text
        .split("\"m\":")
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap();
    let expected = 5u128.pow(16) * 13u128.pow(12);
    assert!(expected > u64::MAX as u128);
    assert_eq!(digits, expected.to_string());
}

#[test]
fn exit_codes_and_error_records() {
    let cases: [(&[&str], i32, &str); 5] = [
        (&["eval", "--rule", "divisor:1", "0"], 2, "domain"),
        (&["nth-split", "2", "1"], 2, "validation"),
        (
            &["scan-max", "--rule", "divisor:1", "100", "--scan-cap", "50"],
            3,
            "capacity",
        ),
        (
            &[
                "min-preimage",
                "--rule",
                "divisor:1",
                "720720",
                "--budget",
                "3",
            ],
            3,
            "capacity",
        ),
        (&["no-such-command"], 1, "usage"),
    ];
    for (args, code, kind) in cases {
        let out = maxorder(args, None);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        assert!(out.stdout.is_empty());
        let err: serde_json::Value =
            serde_json::from_str(String::from_utf8(out.stderr).unwrap().trim()).unwrap();
        assert_eq!(err["error"], kind, "{args:?}");
    }
}

#[test]
fn csv_round_trip() {
    let out = maxorder(
        &[
            "--format",
            "csv",
            "witness",
            "--rule",
            "divisor:1",
            "1e30",
            "--c-e",
            "1",
        ],
        None,
    );
    assert!(out.status.success());
    let mut rd = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    let get = |k: &str| rows[0][header.iter().position(|h| h == k).unwrap()].to_string();
    assert_eq!(get("nu"), "3;1;1");
    assert_eq!(get("ffn"), "16");
    assert_eq!(get("n"), "2*3*5*7^2*11^4");
    let json_out = maxorder(&["witness", "--rule", "divisor:1", "1e30"], None);
    let v = &json(&json_out)[0];
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), header.len());
    assert_eq!(v["log_ffn"].as_f64().unwrap().to_string(), get("log_ffn"));
}

#[test]
fn output_is_independent_of_thread_count() {
    for args in [
        &["scan-max", "--rule", "divisor:1", "300000"][..],
        &["forms-check", "all", "5000"][..],
        &[
            "--format", "csv", "scan-max", "--rule", "field:-3", "200000",
        ][..],
    ] {
        let base = maxorder(args, Some("1")).stdout;
        assert!(!base.is_empty());
        for t in ["2", "4", "8"] {
            assert_eq!(maxorder(args, Some(t)).stdout, base, "{args:?} threads {t}");
        }
    }
}

#[test]
fn synthetic_rule_file() {
    let dir = std::env::temp_dir().join(format!("maxorder-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("exp.rule");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(
        f,
        "# g doubles at every step\nname = doubling\nq = all\ng = table 1,2 ; extend geometric 2"
    )
    .unwrap();
    drop(f);
    let sel = format!("synthetic:{}", path.display());
    let out = maxorder(
        &[
            "audit", "--rule", &sel, "--j-min", "10", "--j-max", "200", "--nu-max", "100",
        ],
        None,
    );
    assert!(out.status.success());
    let recs = json(&out);
    assert_eq!(recs.len(), 7);
    let a6 = recs.iter().find(|r| r["id"] == "A6").unwrap();
    assert_eq!(a6["status"], "fail");
    assert!(a6["counterexample"]
        .as_str()
        .unwrap()
        .starts_with("nu = 25"));
    let out = maxorder(&["eval", "--rule", &sel, "8"], None);
    assert_eq!(json(&out)[0]["f"], 8);
    std::fs::remove_dir_all(&dir).unwrap();
}
