use std::process::{Command, Output};

fn cekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cekit"))
        .args(args)
        .env_remove("CEKIT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn h(p: f64) -> f64 {
    [p, 1.0 - p]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

#[test]
fn ghz3_named_row() {
    let o = cekit(&["compute", "--state", "ghz:3", "--s", "1,2,3", "--named"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["state", "subset", "E", "R2", "T3", "C"]);
    let vals: Vec<f64> = rows[0][2..].iter().map(|s| num(s)).collect();
    for (v, want) in vals.iter().zip([0.75, 0.75, 0.28125, 0.375]) {
        assert!((v - want).abs() < 1e-12, "{v} vs {want}");
    }
}

#[test]
fn product_state_is_zero() {
    let o = cekit(&["compute", "--state", "product:3:5", "--alpha", "0.5:3:4", "--beta", "0:2:3"]);
    assert!(o.status.success());
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 12);
    for row in rows {
        for v in &row[4..] {
            assert!(num(v).abs() < 1e-12);
        }
    }
}

#[test]
fn dicke_4_2_matches_decomposition() {
    // (1/8)(4 S_A + 3 S_AB): one-qubit marginal is I/2, two-qubit marginal
    // has spectrum {1/6, 2/3, 1/6}.
    let spec_ab = [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0];
    let vn = |p: &[f64]| -> f64 { p.iter().map(|&x| -x * x.log2()).sum() };
    let tr = |p: &[f64], a: f64| -> f64 { p.iter().map(|x| x.powf(a)).sum() };
    let e = (4.0 * 1.0 + 3.0 * vn(&spec_ab)) / 8.0;
    let r2 = (4.0 * -(0.5f64).log2() + 3.0 * -tr(&spec_ab, 2.0).log2()) / 8.0;
    let t3 = (4.0 * (1.0 - 0.25) / 2.0 + 3.0 * (1.0 - tr(&spec_ab, 3.0)) / 2.0) / 8.0;
    let c = (4.0 * 0.5 + 3.0 * (1.0 - tr(&spec_ab, 2.0))) / 8.0;

    let o = cekit(&["compute", "--state", "dicke:4:2", "--named"]);
    let (_, rows) = csv_rows(&stdout(&o));
    let vals: Vec<f64> = rows[0][2..].iter().map(|s| num(s)).collect();
    for (v, want) in vals.iter().zip([e, r2, t3, c]) {
        assert!((v - want).abs() < 1e-12, "{v} vs {want}");
    }
}

#[test]
fn sweep_n3_von_neumann_delta() {
    let o = cekit(&["ghz-w-sweep", "--n-min", "2", "--n-max", "3", "--sizes", "2,3"]);
    assert!(o.status.success());
    let (_, rows) = csv_rows(&stdout(&o));
    let w3: f64 = (0..=3)
        .map(|k| [1.0, 3.0, 3.0, 1.0][k] * h(k as f64 / 3.0))
        .sum::<f64>()
        / 8.0;
    let row = rows
        .iter()
        .find(|r| r[0] == "3" && r[1] == "3" && r[2] == "E")
        .unwrap();
    assert!((num(&row[5]) - (0.75 - w3)).abs() < 1e-12);
    for r in rows.iter().filter(|r| r[0] == "2") {
        assert!(num(&r[5]).abs() < 1e-12);
    }
}

#[test]
fn sweep_switches_to_closed_forms() {
    let o = cekit(&["ghz-w-sweep", "--n-min", "10", "--n-max", "11", "--sizes", "10"]);
    assert!(o.status.success());
    let (_, rows) = csv_rows(&stdout(&o));
    let methods: Vec<&str> = rows.iter().map(|r| r[6].as_str()).collect();
    assert!(methods.contains(&"exact") && methods.contains(&"closed-form"));
    // |s| = n = 10: E(GHZ) = 1 − 2^{1−n}
    let g = rows.iter().find(|r| r[0] == "10" && r[2] == "E").unwrap();
    assert!((num(&g[3]) - (1.0 - 2f64.powi(-9))).abs() < 1e-12);
}

#[test]
fn star_sweep_endpoints_and_symmetry() {
    let o = cekit(&["star-sweep", "--grid", "0:pi/2:9"]);
    assert!(o.status.success());
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 9);
    for v in rows[0][1..5].iter().chain(&rows[8][1..5]) {
        assert!(num(v).abs() < 1e-12);
    }
    for k in 0..9 {
        for c in 1..5 {
            assert!((num(&rows[k][c]) - num(&rows[8 - k][c])).abs() < 1e-12);
        }
        assert_eq!(rows[k][5], "true");
    }
    assert!((num(&rows[4][1]) - 1.5).abs() < 1e-12);
}

#[test]
fn csv_is_deterministic_and_json_round_trips() {
    let args = ["star-sweep", "--grid", "0:pi/2:25"];
    let a = stdout(&cekit(&args));
    let b = stdout(&cekit(&args));
    assert_eq!(a, b);

    let j = cekit(&["star-sweep", "--grid", "0:pi/2:25", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["table"], "star-sweep");
    let (header, rows) = csv_rows(&a);
    let cols: Vec<&str> = v["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(cols, header);
    for (row, jrow) in rows.iter().zip(v["rows"].as_array().unwrap()) {
        for c in 0..5 {
            let jx = jrow[c].as_f64().unwrap();
            let cx = num(&row[c]);
            assert!((cx - jx).abs() <= 5e-15 * jx.abs(), "{cx} vs {jx}");
        }
    }
}

#[test]
fn dicke_table_assertions_hold() {
    let o = cekit(&["dicke-table", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn swaptest_reports_exact_and_bounds() {
    let o = cekit(&["swaptest", "--state", "ghz:3", "--shots", "20000", "--seed", "3", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["exact_c"].as_f64().unwrap() - 0.375).abs() < 1e-12);
    assert!((v["circuit_c"].as_f64().unwrap() - 0.375).abs() < 1e-12);
    let est = v["estimate"].as_f64().unwrap();
    let sigma = v["sigma"].as_f64().unwrap();
    assert!((est - 0.375).abs() < 5.0 * sigma);
    assert_eq!(v["shots"]["shots"], 20000);
    assert!(v["distribution"]["probs"]["000"].is_number());
}

#[test]
fn verify_passes_and_reports() {
    let o = cekit(&["verify", "ordering", "--trials", "50", "--seed", "4"]);
    assert!(o.status.success());
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["ordering", "4", "50", "50", "0"]);
    let o = cekit(&["verify", "locc", "--trial-seed", "12345"]);
    assert!(o.status.success());
}

#[test]
fn roof_json_has_ensemble() {
    let o = cekit(&[
        "roof", "--state", "mixed-random:2:2:3", "--s", "1", "--restarts", "3", "--iterations", "100",
        "--format", "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let members = v["result"]["best_ensemble"]["members"].as_array().unwrap();
    let total: f64 = members.iter().map(|m| m["p"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-10);
    assert_eq!(members[0]["amplitudes"].as_array().unwrap().len(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(cekit(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(cekit(&["compute", "--state", "ghz:3", "--s", "1,4"]).status.code(), Some(2));
    assert_eq!(cekit(&["compute", "--state", "bogus:1"]).status.code(), Some(2));
    assert_eq!(cekit(&["compute", "--state", "ghz:3", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(cekit(&["compute", "--state", "ghz:21"]).status.code(), Some(4));
    assert_eq!(cekit(&["swaptest", "--state", "ghz:6"]).status.code(), Some(4));
    assert_eq!(cekit(&["roof", "--state", "mixed-random:3:7:1", "--s", "1"]).status.code(), Some(4));
    assert_eq!(cekit(&["star-sweep", "--grid", "0:2:3"]).status.code(), Some(2));
}

#[test]
fn out_flag_and_thread_cap() {
    let path = std::env::temp_dir().join(format!("cekit-out-{}.csv", std::process::id()));
    let o = Command::new(env!("CARGO_BIN_EXE_cekit"))
        .args(["dicke-table", "--out", path.to_str().unwrap()])
        .env("CEKIT_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.starts_with("k,E,R2,T3,C\n"));

    let bad = Command::new(env!("CARGO_BIN_EXE_cekit"))
        .args(["dicke-table"])
        .env("CEKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn star_recipe_accepts_pi_expressions() {
    let o = cekit(&["compute", "--state", "star:pi/4", "--named"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = csv_rows(&stdout(&o));
    assert!((num(&rows[0][2]) - 1.5).abs() < 1e-12);
    assert_eq!(cekit(&["compute", "--state", "star:pie"]).status.code(), Some(2));
}
