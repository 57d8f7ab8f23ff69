use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn myopic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_myopic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

const MRC: &str = r#"{
    "scenario": "mrc",
    "eta": 2,
    "mrc": {"nodes": 5, "spacing_m": 1, "noise_w": 1},
    "sweep": {"variable": "power_w", "start": 1, "stop": 100, "steps": 20, "scale": "log"},
    "strategies": [{"k": 1}, {"k": 2}, {"omniscient": true}]
}"#;

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(i).unwrap().parse().unwrap()).collect()
}

#[test]
fn mrc_sweep_is_ordered_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "mrc.json", MRC);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let svg = dir.path().join("a.svg");
    let out = myopic(&["mrc", "--config", &cfg, "--out", a.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = myopic(&["mrc", "--config", &cfg, "--out", b.to_str().unwrap(), "--jobs", "1"]);
    assert!(out.status.success());
    let csv = fs::read_to_string(&a).unwrap();
    assert_eq!(csv, fs::read_to_string(&b).unwrap());

    assert_eq!(csv.lines().count(), 21);
    assert!(csv.starts_with("power_w,k1_rate_bits_per_use,k1_bottleneck_node,"));
    let k1 = column(&csv, "k1_rate_bits_per_use");
    let k2 = column(&csv, "k2_rate_bits_per_use");
    let omni = column(&csv, "omni_rate_bits_per_use");
    for i in 0..k1.len() {
        assert!(k1[i] <= k2[i] && k2[i] <= omni[i], "row {i}: {} {} {}", k1[i], k2[i], omni[i]);
    }
    let rho = column(&csv, "rho_k2");
    assert!(rho.iter().all(|&r| r <= 1.0) && rho[19] < rho[0]);
    assert!(column(&csv, "incomplete").iter().all(|&f| f == 0.0));

    let plot = fs::read_to_string(&svg).unwrap();
    assert!(plot.starts_with("<svg") && plot.matches("<polyline").count() == 3);
    assert!(!plot.contains("href"));
}

#[test]
fn empty_strategy_list_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"scenario": "mrc", "strategies": []}"#);
    let out = myopic(&["mrc", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strategy list is empty"));
    assert!(out.stdout.is_empty());
}

#[test]
fn validate_reports_all_errors_at_once() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"scenario": "brc", "eta": 0.5, "brc": {"d12_m": -1, "p9_w": 2}, "strategies": [{"k": 1}]}"#,
    );
    let out = myopic(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("eta must be >= 2"), "{err}");
    assert!(err.contains("d12_m: must be positive"));
    assert!(err.contains("p9_w: unknown key"));

    let cfg = write_config(dir.path(), "d.json", r#"{"scenario": "relay"}"#);
    let out = myopic(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("valid: mrc, marc, brc, large, discrete"));

    let cfg = write_config(dir.path(), "e.json", "{ not json");
    assert_eq!(myopic(&["validate", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn missing_eta_is_noted() {
    let out = myopic(&["validate", "--set", "scenario=brc", "--set", r#"strategies=[{"k":1}]"#]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("note: eta not given"));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok: brc"));
}

#[test]
fn overrides_and_stdout() {
    let out = myopic(&[
        "brc",
        "--set",
        r#"strategies=[{"k":1},{"omniscient":true}]"#,
        "--set",
        "brc.d12_m=3",
        "--set",
        "eta=2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert_eq!(column(&csv, "rho_onehop"), vec![1.0]);
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let out = myopic(&[
        "large",
        "--set",
        "large.nodes=10",
        "--out",
        "/nonexistent-dir/sub/out.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(myopic(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(myopic(&["mrc", "--set", "nodot"]).status.code(), Some(1));
    assert_eq!(myopic(&["--help"]).status.code(), Some(0));
}

#[test]
fn discrete_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "d.json",
        r#"{
            "scenario": "discrete",
            "discrete": {
                "inputs": [2, 2], "outputs": [2, 2],
                "table": [1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1],
                "pmfs": [[0.5, 0.5], [0.5, 0.5]],
                "encoders": ["own_only", "own_only"]
            },
            "strategies": [{"k": 1}, {"omniscient": true}]
        }"#,
    );
    let out = myopic(&["discrete", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv, "case,k1_rate_bits_per_use,k1_bottleneck_node,omni_rate_bits_per_use,omni_bottleneck_node\n1,1,2,1,2\n");
}
