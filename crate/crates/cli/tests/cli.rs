use std::process::{Command, Output};

fn distorder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distorder")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn dmrl_counterexample_exit_codes() {
    let pair = ["check-order", "--order", "dmrl", "--x", "q:17/8*p-1/2*p^2", "--y", "q:ln(15/8+p)", "--grid-points", "256"];
    let before = distorder(&pair);
    assert_eq!(code(&before), 0, "{}", String::from_utf8_lossy(&before.stderr));
    let v = json(&before);
    for field in ["scenario", "order", "holds", "witnesses", "grid", "tolerances"] {
        assert!(v[0].get(field).is_some(), "missing {field}");
    }

    let mut distorted = pair.to_vec();
    distorted.extend(["--distort", "p^5"]);
    let after = distorder(&distorted);
    assert_eq!(code(&after), 1);
    let v = json(&after);
    assert_eq!(v[0]["holds"], false);
    assert!(!v[0]["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn reflexive_ttt_holds() {
    assert_eq!(code(&distorder(&["check-order", "--order", "ttt", "--x", "exp:1", "--y", "exp:1"])), 0);
}

#[test]
fn invalid_input_exits_2() {
    let bad = distorder(&["check-order", "--order", "ttt", "--x", "exp:-1", "--y", "exp:1"]);
    assert_eq!(code(&bad), 2);
    assert!(!bad.stderr.is_empty());
    assert_eq!(code(&distorder(&["check-order", "--order", "ttt", "--x", "q:p^", "--y", "exp:1"])), 2);
    assert_eq!(code(&distorder(&["classify", "--h", "1 - p"])), 2);
    assert_eq!(code(&distorder(&["classify", "--signature", "1,1", "--copula", "product"])), 2);
    assert_eq!(code(&distorder(&["reproduce", "nonsense"])), 2);
}

#[test]
fn scenario_config_with_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scenario.json");
    std::fs::write(
        &config,
        r#"{"name": "exp", "x": "exp:2", "y": "exp:1", "orders": ["ttt", "star"], "grid": {"points": 64}}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = distorder(&["check-order", "--config", config.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("exp_ttt.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# ttt_y - ttt_x; uniform grid of 64 points"));
    assert_eq!(lines.next(), Some("p,value"));
    assert_eq!(lines.count(), 64);
    let verdict: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("exp_star.json")).unwrap()).unwrap();
    assert_eq!(verdict["scenario"], "exp");
    assert_eq!(verdict["holds"], true);

    // a flag overrides the config and reverses the ttt comparison
    let out = distorder(&["check-order", "--config", config.to_str().unwrap(), "--x", "exp:0.5", "--order", "ttt"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn classify_distortion_and_advice() {
    let out = distorder(&["classify", "--h", "p^5"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["shape"]["convex"], true);
    assert_eq!(v["shape"]["starshaped"], true);
    let ttt = v["advice"].as_array().unwrap().iter().find(|a| a["order"] == "ttt").unwrap();
    assert_eq!(ttt["result"], "preserved");
}

#[test]
fn classify_systems() {
    let out = distorder(&["classify", "--signature", "2,0,-2,1", "--copula", "durante:f=p^0.5,n=4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "antistarshaped-any-f");
    assert_eq!(v["corollary"]["parameters"]["x2"]["exact"], "4/3");
    assert_eq!(v["shape"], "antistarshaped");

    let out = distorder(&["classify", "--signature", "0,6,-8,3", "--copula", "diagonal:d=1/4*p+3/4*(2*p^2-p^3),n=4"]);
    let v = json(&out);
    assert_eq!(v["shape"], "antistarshaped");
    let preserved: Vec<&str> = v["advice"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|a| a["result"] == "preserved")
        .map(|a| a["order"].as_str().unwrap())
        .collect();
    assert!(preserved.contains(&"ew") && preserved.contains(&"dmrl"), "{preserved:?}");
}

#[test]
fn distort_and_system_tables() {
    let out = distorder(&["distort", "--x", "exp:1", "--h", "power:2", "--grid-points", "16"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(2)
        .map(|l| {
            let (p, v) = l.split_once(',').unwrap();
            (p.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 16);
    // survival h(e^{-x}) = e^{-2x}: the distorted law is exponential(2)
    for (p, v) in rows {
        assert!((v - -(1.0 - p).ln() / 2.0).abs() < 1e-9, "{p}: {v}");
    }

    let dir = tempfile::tempdir().unwrap();
    let out = distorder(&["system", "--signature", "0,1", "--copula", "product", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["shape"], "starshaped");
    assert!(dir.path().join("h_T.csv").exists() && dir.path().join("classification.json").exists());
}

#[test]
fn empty_sweep() {
    let out = distorder(&["sweep", "--trials", "0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["seed"], 20240917);
    assert!(v["suites"].as_array().unwrap().iter().all(|s| s["trials"] == 0 && s["passed"] == 0));
}

#[test]
fn small_sweep_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(&config, r#"{"trials": 3, "grid_points": 64, "suites": ["ttt", "ew"]}"#).unwrap();
    let out = distorder(&["sweep", "--config", config.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["suites"].as_array().unwrap().len(), 2);
    std::fs::write(&config, r#"{"trails": 3}"#).unwrap();
    assert_eq!(code(&distorder(&["sweep", "--config", config.to_str().unwrap()])), 2);
}

#[test]
fn io_failure_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = distorder(&["reproduce", "ex_durante_1", "--out-dir", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&distorder(&["sweep", "--config", missing.to_str().unwrap()])), 4);
}

#[test]
fn reproduce_ex_qmit_dual_ratio_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let out = distorder(&["reproduce", "ex_qmit", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("ex_qmit_dual_ratio.csv")).unwrap();
    let values: Vec<f64> = csv.lines().skip(2).map(|l| l.split_once(',').unwrap().1.parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert_eq!(json(&out)["summary"]["shape"], "dual-antistarshaped");
}
