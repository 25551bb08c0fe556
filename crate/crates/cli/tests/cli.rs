use std::process::{Command, Output};

use serde_json::Value;

fn betadiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_betadiv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = betadiv(&all);
    let v: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stdout)));
    (code(&out), v)
}

fn text(args: &[&str]) -> (i32, String) {
    let out = betadiv(args);
    (code(&out), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn covered_set_is_not_n_free() {
    let (c, v) = json(&["nfree", "union(mult(2),mult(3))"]);
    assert_eq!(c, 1);
    assert_eq!(v["verdict"], "refuted");
    assert_eq!(v["cover"]["covers"], serde_json::json!([2, 3]));
    assert_eq!(v["schema"], "betadiv-cli/1");
}

#[test]
fn principal_divisibility() {
    assert_eq!(
        code(&betadiv(&["divides", "principal:6", "principal:18"])),
        0
    );
    assert_eq!(
        code(&betadiv(&["divides", "principal:6", "principal:15"])),
        1
    );
}

#[test]
fn exact_antichain_of_primes() {
    let (c, v) = json(&["antichain", "P", "--bound", "30", "--exact"]);
    assert_eq!(c, 0);
    assert_eq!(v["size"], 10);
    assert_eq!(
        v["certificate"]["witness"],
        serde_json::json!([2, 3, 5, 7, 11, 13, 17, 19, 23, 29])
    );
}

#[test]
fn antichain_extension() {
    let (c, v) = json(&[
        "antichain",
        "union(mult(2),mult(3))",
        "--extend",
        "4,9",
        "--bound",
        "100000",
    ]);
    assert_eq!(c, 1);
    assert_eq!(v["extension"], Value::Null);
    let (c, v) = json(&["antichain", "P", "--extend", "2,3,5", "--bound", "10"]);
    assert_eq!(c, 0);
    assert_eq!(v["extension"], 7);
    let (c, v) = json(&[
        "antichain",
        "up(primesIdx(1,2))",
        "--lcm-with",
        "up(primesIdx(2,2))",
        "--extend",
        "6",
        "--bound",
        "1000",
    ]);
    assert_eq!(c, 0);
    assert_eq!(v["extension"]["lcm"], 35);
}

#[test]
fn exit_codes_follow_verdicts() {
    assert_eq!(code(&betadiv(&["member", "P", "7"])), 0);
    assert_eq!(code(&betadiv(&["member", "P", "8"])), 1);
    assert_eq!(
        code(&betadiv(&[
            "member",
            "down(factorials)",
            "7",
            "--budget",
            "10"
        ])),
        2
    );
    assert_eq!(code(&betadiv(&["upclosed", "mult(6)"])), 0);
    assert_eq!(code(&betadiv(&["upclosed", "P"])), 1);
    assert_eq!(
        code(&betadiv(&[
            "enumerate",
            "down(factorials)",
            "--bound",
            "20"
        ])),
        2
    );
    assert_eq!(
        code(&betadiv(&["enumerate", "mult(3)", "--bound", "20"])),
        0
    );
}

#[test]
fn usage_errors_exit_64() {
    let out = betadiv(&["member", "mult(", "3"]);
    assert_eq!(code(&out), 64);
    assert!(String::from_utf8_lossy(&out.stderr).contains("primesIdx(r,m)"));
    assert_eq!(code(&betadiv(&["member", "P", "0"])), 64);
    assert_eq!(code(&betadiv(&["member", "P", "5", "--budget", "0"])), 64);
    assert_eq!(
        code(&betadiv(&["divides", "principal:x", "principal:2"])),
        64
    );
    assert_eq!(code(&betadiv(&["harness", "X9.9"])), 64);
    assert_eq!(code(&betadiv(&["no-such-command"])), 64);
    assert_eq!(code(&betadiv(&["chain-build", "--scheme", "spiral"])), 64);
}

#[test]
fn computation_errors_are_not_refutations() {
    let (c, v) = json(&["factor", "1000036000099"]);
    assert_eq!(c, 3);
    assert_eq!(v["error"], "error");
    assert_eq!(code(&betadiv(&["factor", "1000036000099"])), 3);
}

#[test]
fn text_and_json_agree() {
    let cases: [&[&str]; 6] = [
        &["member", "level(2)", "15"],
        &["member", "quot(mult(6),2)", "4"],
        &[
            "divides",
            "gen:[up(primesIdx(1,2))]",
            "gen:[up(primesIdx(1,4))]",
        ],
        &["product-member", "principal:2", "gen:[mult(3)]", "mult(6)"],
        &["d-member", "principal:6", "mult(3)"],
        &["interp", "gen:[mult(24)]", "gen:[mult(24)]"],
    ];
    for args in cases {
        let (tc, out) = text(args);
        let (jc, v) = json(args);
        assert_eq!(tc, jc, "{args:?}");
        let state = v["verdict"].as_str().unwrap();
        let line = out.lines().find(|l| l.starts_with("verdict")).unwrap();
        assert!(line.ends_with(state), "{args:?}: {line} vs {state}");
    }
}

#[test]
fn interpolation_triple() {
    let (c, v) = json(&[
        "interp",
        "gen:[mult(24)]",
        "gen:[mult(24)]",
        "--bound",
        "1000",
    ]);
    assert_eq!(c, 0);
    let t = &v["certificate"];
    let (a, cc, b) = (
        t["a"].as_u64().unwrap(),
        t["c"].as_u64().unwrap(),
        t["b"].as_u64().unwrap(),
    );
    assert!(a != cc && cc != b && cc % a == 0 && b % cc == 0 && a % 24 == 0);
    assert_eq!(code(&betadiv(&["interp", "principal:2", "principal:6"])), 1);
    assert_eq!(
        code(&betadiv(&[
            "interp",
            "gen:[{2,3,5,7}]",
            "gen:[{2,3,5,7}]",
            "--bound",
            "10"
        ])),
        1
    );
}

#[test]
fn chain_round_trip() {
    let (c, built) = json(&["chain-build", "--k", "4", "--scheme", "tree"]);
    assert_eq!(c, 0);
    assert_eq!(built["links"].as_array().unwrap().len(), 5);
    let path = std::env::temp_dir().join(format!("betadiv-chain-{}.json", std::process::id()));
    std::fs::write(&path, built.to_string()).unwrap();
    let (c, v) = json(&[
        "chain-verify",
        "--chain",
        path.to_str().unwrap(),
        "--bound",
        "100000",
    ]);
    std::fs::remove_file(&path).ok();
    assert_eq!(c, 0, "{v}");
    assert_eq!(v["pass"], true);
    assert_eq!(v["matrix"].as_array().unwrap().len(), 5);
}

#[test]
fn chain_file_with_swapped_links_fails() {
    let (_, mut built) = json(&["chain-build", "--k", "3"]);
    let links = built["links"].as_array_mut().unwrap();
    links.swap(1, 3);
    let path = std::env::temp_dir().join(format!("betadiv-swapped-{}.json", std::process::id()));
    std::fs::write(&path, built.to_string()).unwrap();
    let (c, v) = json(&[
        "chain-verify",
        "--chain",
        path.to_str().unwrap(),
        "--bound",
        "100000",
    ]);
    std::fs::remove_file(&path).ok();
    assert_eq!(c, 1);
    assert_eq!(v["pass"], false);
}

#[test]
fn harness_examples_pass() {
    let (c, v) = json(&["harness", "T2.2", "--bound", "300"]);
    assert_eq!(c, 0);
    assert_eq!(v["cases"][0]["outcome"], "pass");
    let (c, out) = text(&["harness", "L5.3", "--corpus", "default"]);
    assert_eq!(c, 0);
    assert!(out.contains("union(mult(2),mult(3)): cover [2, 3]"));
    let (c, v) = json(&["harness", "T4.2", "--k", "12", "--bound", "1000000"]);
    assert_eq!(c, 0);
    assert_eq!(v["cases"][0]["passed"], 168);
}

#[test]
fn failing_cases_replay() {
    let (c, v) = json(&["harness", "E3.5b"]);
    assert_eq!(c, 1);
    let case = &v["cases"][0];
    assert_eq!(case["outcome"], "fail");
    let examples = case["counterexamples"].as_array().unwrap();
    assert!(!examples.is_empty());
    for ce in examples {
        let argv: Vec<&str> = ce["replay"]
            .as_array()
            .unwrap()
            .iter()
            .map(|a| a.as_str().unwrap())
            .collect();
        assert_eq!(argv[0], "betadiv");
        let (rc, rv) = json(&argv[1..]);
        assert_eq!(rv["verdict"], ce["observed"], "{argv:?}");
        assert_eq!(rc, 0);
    }
}

#[test]
fn harness_is_deterministic() {
    let args = [
        "harness", "L2.1b", "T5.5", "--seed", "7", "--bound", "20000",
    ];
    let (c1, a) = json(&args);
    let (c2, b) = json(&args);
    assert_eq!(c1, c2);
    assert_eq!(a, b);
    assert_eq!(a["cases"][0]["lemma_id"], "L2.1b");
    assert_eq!(a["cases"][1]["lemma_id"], "T5.5");
    assert_eq!(a["corpus_size"], 63);
}

#[test]
fn corpus_file() {
    let path = std::env::temp_dir().join(format!("betadiv-corpus-{}.txt", std::process::id()));
    std::fs::write(&path, "# small\nP\nmult(6)\nup({4,9})\n").unwrap();
    let (c, v) = json(&[
        "harness",
        "L5.3",
        "T3.3",
        "--corpus",
        path.to_str().unwrap(),
        "--bound",
        "1000",
    ]);
    assert_eq!(c, 0, "{v}");
    assert_eq!(v["corpus_size"], 3);
    std::fs::write(&path, "P\nmult(\n").unwrap();
    let out = betadiv(&["harness", "L5.3", "--corpus", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code(&out), 64);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn factor_output() {
    let (c, v) = json(&["factor", "360"]);
    assert_eq!(c, 0);
    assert_eq!(v["factors"], serde_json::json!([[2, 3], [3, 2], [5, 1]]));
    assert_eq!(v["omega"], 6);
}
