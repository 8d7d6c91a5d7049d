use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypergrass"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn analyze_t1() {
    let v = json(&["analyze", "--field", "2", "--n", "5", "--form", "123"]);
    assert_eq!(v["schema"], "hypergrass/analyze/v1");
    let r = &v["result"];
    assert_eq!(r["rank"], 3);
    assert_eq!(r["type"], "T1");
    assert_eq!(r["spread"], false);
}

#[test]
fn analyze_json_form_matches_text_form() {
    let a = json(&["analyze", "--field", "3", "--n", "6", "--form", "123+2*456"]);
    let b = json(&[
        "analyze",
        "--field",
        "3",
        "--n",
        "6",
        "--form-json",
        r#"{"123": 1, "456": 2}"#,
    ]);
    assert_eq!(a, b);
}

#[test]
fn census_n5() {
    let v = json(&["census", "--field", "2", "--n", "5"]);
    let r = &v["result"];
    assert_eq!(r["classes"], 1023);
    assert_eq!(r["buckets"].as_object().unwrap().len(), 2);
}

#[test]
fn census_is_independent_of_workers() {
    let a = run(&["census", "--field", "2", "--n", "5", "--workers", "1"]);
    let b = run(&["census", "--field", "2", "--n", "5", "--workers", "3"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = [
        "oracle", "--field", "3", "--n", "5", "--trials", "5", "--seed", "9",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["delta-verify", "--field", "3", "--seed", "4"];
    let a = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, run(&args).stdout);
}

#[test]
fn count_verdicts_and_csv() {
    let v = json(&["count", "--q", "2", "--n", "10"]);
    assert_eq!(v["result"]["reports"][0]["verdict"], "NotASpreadPossible");
    let out = run(&[
        "count", "--q", "2,3", "--n-min", "6", "--n-max", "8", "--format", "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "q,n,r,r_mod_3,residue,verdict");
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[1], "2,6,2,2,0,DivisibilityHolds");
}

#[test]
fn canonical_and_hexcheck() {
    let v = json(&["canonical", "--type", "t9", "--field", "3"]);
    let form = v["result"]["form"].as_str().unwrap().to_string();
    assert_eq!(form, "123+147+257+367+456");
    let h = json(&["hexcheck", "--field", "3", "--n", "7", "--form", &form]);
    assert_eq!(h["result"]["hexagonal"], true);
    assert_eq!(h["result"]["agree"], true);
}

#[test]
fn out_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let out = run(&[
        "count",
        "--q",
        "2",
        "--n",
        "6",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(v["result"]["reports"][0]["residue"], 0);
}

#[test]
fn exit_codes() {
    let code = |a: &[&str]| run(a).status.code().unwrap();
    assert_eq!(code(&["analyze", "--n", "5", "--form", "12x"]), 2);
    assert_eq!(
        code(&["analyze", "--n", "5", "--form", "123", "--form-json", "{}"]),
        2
    );
    assert_eq!(
        code(&["analyze", "--n", "5", "--field", "6", "--form", "123"]),
        2
    );
    assert_eq!(code(&["census", "--n", "6", "--field", "3"]), 3);
    let large = [
        "--field",
        "large:2305843009213693951",
        "--n",
        "5",
        "--form",
        "123",
    ];
    assert_eq!(code(&[&["analyze"][..], &large].concat()), 2);
    assert_eq!(code(&[&["spreadcheck"][..], &large].concat()), 2);
    assert_eq!(
        code(&["census", "--field", "large:2305843009213693951", "--n", "5"]),
        2
    );
    assert_eq!(
        code(&["delta-verify", "--field", "large:2305843009213693951"]),
        2
    );
    assert_eq!(
        code(&["analyze", "--field", "7", "--n", "9", "--form", "123", "--cap", "1000"]),
        3
    );
    assert_eq!(code(&["count", "--q", "2", "--n", "7"]), 2);
    assert_eq!(code(&["delta-verify", "--field", "2", "--mode", "ehom"]), 2);
    assert_eq!(
        code(&["analyze", "--n", "5", "--form", "123", "--format", "csv"]),
        2
    );
}

// every key a command writes is declared by its versioned schema
#[test]
fn reports_match_their_schemas() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/schemas");
    let runs: [&[&str]; 6] = [
        &[
            "analyze", "--field", "2", "--n", "6", "--form", "123+456", "--timing",
        ],
        &["census", "--field", "2", "--n", "5"],
        &["canonical", "--type", "t10", "--field", "3"],
        &[
            "spreadcheck",
            "--field",
            "2",
            "--n",
            "8",
            "--form",
            "123+145+167+246+257+347+356+168",
        ],
        &["count", "--q", "2", "--n", "8"],
        &["oracle", "--field", "2", "--n", "5", "--trials", "2"],
    ];
    for args in runs {
        let v = json(args);
        let path = format!("{dir}/{}.v1.schema.json", args[0]);
        let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v["schema"], schema["$id"]);
        let check = |doc: &Value, s: &Value| {
            let props = s["properties"].as_object().unwrap();
            for k in doc.as_object().unwrap().keys() {
                assert!(props.contains_key(k), "{}: undeclared key {k}", args[0]);
            }
            for k in s["required"].as_array().unwrap() {
                assert!(
                    doc.get(k.as_str().unwrap()).is_some(),
                    "{}: missing {k}",
                    args[0]
                );
            }
        };
        check(&v, &schema);
        check(&v["result"], &schema["properties"]["result"]);
    }
}
