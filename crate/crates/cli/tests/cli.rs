use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_isingrect"));
    c.env_remove("ISINGRECT_PRECISION_BITS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

#[test]
fn z_all_routes_agree() {
    let o = run(&["z", "--L", "3", "--M", "4", "--Kh", "0.4", "--Kv", "0.7", "--route", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let zs: Vec<f64> = v["routes"].as_object().unwrap().values().filter_map(|r| r["logZ"].as_f64()).collect();
    assert!(zs.len() >= 5);
    for a in &zs {
        for b in &zs {
            assert!((a - b).exp_m1().abs() < 1e-9);
        }
    }
    for key in ["L", "M", "K_h", "K_v", "k", "eta_im_over_Kprime", "routes", "checks"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(v["checks"]["pf_eq_det"].as_f64().unwrap() < 1e-9);
}

#[test]
fn identities_example_exits_zero() {
    let o = run(&["identities", "--k", "0.6", "--eta-frac", "0.9", "--M", "6", "--L", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
}

#[test]
fn gating_failure_exits_three() {
    let o = run(&["identities", "--k", "0.6", "--eta-frac", "0.9", "--M", "6", "--L", "5", "--tol", "1e-20"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn uplane_writes_field_file() {
    let dir = std::env::temp_dir().join(format!("isingrect-uplane-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("field.txt");
    let args = ["uplane", "--M", "6", "--L", "5", "--k", "0.6", "--eta-frac", "0.9", "--n", "1", "--grid", "64", "--out"];
    let o = bin().args(args).arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.starts_with("# isingrect uplane v1"));
    assert!(text.lines().any(|l| l == "marker u_mu 6"));
    assert!(text.lines().any(|l| l == "field 4096"));

    let p2 = dir.join("field2.txt");
    bin().args(args).arg(&p2).output().unwrap();
    assert_eq!(text, std::fs::read_to_string(&p2).unwrap());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["z", "--L", "3", "--M", "4", "--Kh", "0.4"],
        &["z", "--L", "3", "--M", "4", "--Kh", "0.4", "--Kv", "0.7", "--k", "0.5", "--eta-frac", "0.5"],
        &["z", "--L", "3", "--M", "4", "--k", "0.5", "--eta-frac", "1.5"],
        &["z", "--L", "3", "--M", "4", "--k", "0.5", "--eta-frac", "0"],
        &["--precision-bits", "64", "z", "--L", "3", "--M", "4", "--Kh", "0.4", "--Kv", "0.7"],
        &["z", "--L", "3", "--M", "4", "--Kh", "0.4", "--Kv", "0.7", "--route", "nope"],
        &["frobnicate"],
        &["--format", "json", "uplane", "--M", "6", "--L", "5", "--k", "0.6", "--eta-frac", "0.9"],
    ];
    for c in cases {
        let o = run(c);
        assert_eq!(o.status.code(), Some(2), "{c:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"), "{c:?}");
    }
}

#[test]
fn critical_modulus_is_numerical_failure() {
    // K_h = K_v = K_c gives k = 1 exactly; spectral routes refuse.
    let kc = 0.5 * (1.0f64 + 2f64.sqrt()).ln();
    let s = kc.to_string();
    let o = run(&["z", "--L", "4", "--M", "4", "--Kh", &s, "--Kv", &s, "--route", "hankel"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["routes"]["hankel"]["logZ"].is_null());
    let o = run(&["z", "--L", "4", "--M", "4", "--Kh", &s, "--Kv", &s]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn env_sets_default_precision() {
    let o = bin()
        .env("ISINGRECT_PRECISION_BITS", "160")
        .args(["z", "--L", "3", "--M", "4", "--Kh", "0.3", "--Kv", "0.3", "--route", "hankel"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["routes"]["hankel"]["precision_bits"].as_u64().unwrap() >= 160);
    let o = bin()
        .env("ISINGRECT_PRECISION_BITS", "12")
        .args(["z", "--L", "3", "--M", "4", "--Kh", "0.3", "--Kv", "0.3"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_round_trips_byte_identically() {
    for args in [
        &["compare", "--L", "4", "--M", "4", "--Kh", "0.4", "--Kv", "0.7"][..],
        &["spectrum", "--L", "5", "--M", "6", "--k", "0.6", "--eta-frac", "0.9"][..],
        &["identities", "--L", "5", "--M", "4", "--k", "0.95", "--eta-frac", "0.5"][..],
    ] {
        let o = run(args);
        let text = stdout(&o);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text, "{args:?}");
    }
}

fn csv_roundtrip(text: &str) -> String {
    let mut out = String::new();
    for (i, line) in text.lines().enumerate() {
        let cells: Vec<String> = line
            .split(',')
            .map(|c| match c.parse::<f64>() {
                Ok(x) if i > 0 && c.contains(['.', 'e']) => num(x),
                _ => c.to_string(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[test]
fn csv_round_trips_byte_identically() {
    for args in [
        &["--format", "csv", "z", "--L", "4", "--M", "6", "--Kh", "0.3", "--Kv", "0.3"][..],
        &["--format", "csv", "spectrum", "--L", "5", "--M", "6", "--k", "0.6", "--eta-frac", "0.9"][..],
        &["scan", "--L", "4", "--M", "4", "--k-from", "0.4", "--k-to", "0.9", "--steps", "4"][..],
    ] {
        let text = stdout(&run(args));
        assert!(text.lines().count() > 1);
        assert_eq!(csv_roundtrip(&text), text, "{args:?}");
    }
}

#[test]
fn scan_is_deterministic_across_worker_budgets() {
    let base = ["scan", "--L", "4", "--M", "6", "--k-from", "0.3", "--k-to", "1.8", "--steps", "7", "--eta-frac", "0.7"];
    let a = bin().args(["--workers", "1"]).args(base).output().unwrap();
    let b = bin().args(["--workers", "4"]).args(base).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let ks: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(ks.len(), 7);
    assert!(ks.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn compare_reports_pairwise_and_swap() {
    let o = run(&["compare", "--L", "3", "--M", "4", "--k", "0.6", "--eta-frac", "0.9"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["max_pairwise"].as_f64().unwrap() < 1e-9);
    assert!(v["result"]["checks"]["swap_invariance"].as_f64().unwrap() < 1e-9);
    assert!(v["pairwise"].as_object().unwrap().len() >= 10);
}
