//! End-to-end command tests driving the compiled binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entengine"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("entengine-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_target(dir: &PathBuf, name: &str, json: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path
}

const FLIPPED_GHZ3: &str = r#"{
  "n_qubits": 3,
  "terms": [
    {"bits": "100", "re": 0.7071067811865476, "im": 0.0},
    {"bits": "011", "re": 0.7071067811865476, "im": 0.0}
  ]
}"#;

const STANDARD_GHZ3: &str = r#"{
  "n_qubits": 3,
  "terms": [
    {"bits": "000", "re": 0.7071067811865476, "im": 0.0},
    {"bits": "111", "re": 0.7071067811865476, "im": 0.0}
  ]
}"#;

#[test]
fn feasibility_exit_codes() {
    let dir = tempdir("feas");
    let ok = write_target(&dir, "flipped.json", FLIPPED_GHZ3);
    let out = run(&["feasibility", ok.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"feasible\": true"));
    assert!(text.contains("\"hot_site\": 0"));

    let bad = write_target(&dir, "standard.json", STANDARD_GHZ3);
    let out = run(&["feasibility", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let empty = write_target(&dir, "empty.json", r#"{"n_qubits": 2, "terms": []}"#);
    let out = run(&["feasibility", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn steady_writes_artifacts() {
    let dir = tempdir("steady");
    let out = run(&["steady", "ghz", "3", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("p_suc"));
    assert!(text.contains("fidelity"));

    for name in ["steady_state.json", "heralded.json", "summary.json"] {
        let path = dir.join(name);
        assert!(path.exists(), "{name} missing");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    let p = summary["p_suc"].as_f64().unwrap();
    assert!(p > 0.0 && p < 1.0);
    assert!(summary["metadata"]["timestamp"].as_u64().is_some());
    assert_eq!(summary["metadata"]["model"], "reset");
}

#[test]
fn steady_uncoupled_machine_matches_thermal_prediction() {
    // g = 0: the heralded state comes from a product of thermal states.
    // With the cold baths at zero temperature every cold qutrit sits in
    // its (filtered-out) ground state, so the herald never fires; exit 1.
    let dir = tempdir("uncoupled");
    let cfg = serde_json::json!({
        "machine": {"family": "ghz", "n": 2},
        "model": "reset",
        "couplings": {"g": 0.0},
        "out": dir.join("run"),
    });
    let cfg_path = write_target(&dir, "cfg.json", &cfg.to_string());
    let out = run(&["steady", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    // At infinite cold temperature the thermal product survives the
    // filter: p_suc = (2/3)^N and the fidelity equals the target's
    // largest diagonal weight against a uniform heralded block.
    let cfg = serde_json::json!({
        "machine": {"family": "ghz", "n": 2},
        "model": "reset",
        "couplings": {"g": 0.0},
        "temperatures": {"hot": "infinite", "cold": "infinite"},
        "out": dir.join("run2"),
    });
    let cfg_path = write_target(&dir, "cfg2.json", &cfg.to_string());
    let out = run(&["steady", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let p_line = text.lines().find(|l| l.starts_with("p_suc")).unwrap();
    let p: f64 = p_line.split('=').nth(1).unwrap().trim().parse().unwrap();
    assert!((p - 4.0 / 9.0).abs() < 1e-9, "p_suc {p}");
    let f_line = text.lines().find(|l| l.starts_with("fidelity")).unwrap();
    let f: f64 = f_line.split('=').nth(1).unwrap().trim().parse().unwrap();
    assert!((f - 0.25).abs() < 1e-9, "fidelity {f}");
}

#[test]
fn capacity_exit_code() {
    let dir = tempdir("capacity");
    let out = run(&["steady", "ghz", "6", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn maxpsuc_prints_published_value() {
    let out = run(&["maxpsuc", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "0.111111111111");
}

#[test]
fn pareto_emits_nondominated_csv() {
    let dir = tempdir("pareto");
    let cfg = serde_json::json!({
        "machine": {"family": "ghz", "n": 2},
        "sweep": {"resolution": 6, "refine": false,
                   "ratio_gamma": [1e-6, 1e3], "ratio_g": [1e-3, 1e3]},
        "out": dir,
    });
    let cfg_path = write_target(&dir, "cfg.json", &cfg.to_string());
    let out = run(&["pareto", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.join("pareto_ghz.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "machine,N,l,gamma_h,gamma_c,g,p_suc,fidelity");
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    // Fidelity column is non-increasing along the front.
    let fied: Vec<f64> = rows
        .iter()
        .map(|r| r.split(',').nth(7).unwrap().parse().unwrap())
        .collect();
    for w in fied.windows(2) {
        assert!(w[0] >= w[1]);
    }
}

#[test]
fn identical_configs_give_byte_identical_csv() {
    let dir = tempdir("determinism");
    let mk = |tag: &str| {
        let out_dir = dir.join(tag);
        let cfg = serde_json::json!({
            "machine": {"family": "ghz", "n": 2},
            "sweep": {"resolution": 5, "refine": true,
                       "ratio_gamma": [1e-5, 1e2], "ratio_g": [1e-2, 1e2]},
            "out": out_dir,
        });
        let cfg_path = write_target(&dir, &format!("{tag}.json"), &cfg.to_string());
        let out = run(&["pareto", "--config", cfg_path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        fs::read(out_dir.join("pareto_ghz.csv")).unwrap()
    };
    assert_eq!(mk("a"), mk("b"));
}

#[test]
fn bell_cluster_reports_lhv_bound_two() {
    let dir = tempdir("bell");
    let cfg = serde_json::json!({
        "machine": {"family": "cluster"},
        "sweep": {"resolution": 4, "refine": false,
                   "ratio_gamma": [1e-4, 1e2], "ratio_g": [1e-1, 1e2]},
        "out": dir,
    });
    let cfg_path = write_target(&dir, "cfg.json", &cfg.to_string());
    let out = run(&["bell", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.join("bell_cluster.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "machine,p_suc,F,bell_name,value,lhv_bound");
    for row in lines {
        assert!(row.starts_with("cluster,"));
        assert!(row.contains(",cluster,"));
        assert!(row.ends_with("2.00000000000e0"));
    }
}

#[test]
fn tempsweep_emits_grid() {
    let dir = tempdir("tempsweep");
    let cfg = serde_json::json!({
        "machine": {"family": "ghz", "n": 2},
        "model": "lindblad",
        "couplings": {"gamma_h": 1e-4, "gamma_c": 5e-3, "g": 1.6e-3},
        "temperature_grid": {
            "hot": [{"finite": 1.0}, {"finite": 4.0}],
            "cold": [{"finite": 0.1}]
        },
        "out": dir,
    });
    let cfg_path = write_target(&dir, "cfg.json", &cfg.to_string());
    let out = run(&["tempsweep", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.join("tempsweep_ghz_lindblad.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3); // header + 2x1 grid
}

#[test]
fn print_config_shows_all_defaults() {
    let out = run(&["pareto", "ghz", "3", "--print-config"]);
    assert_eq!(out.status.code(), Some(0));
    let cfg: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("print-config emits JSON");
    assert_eq!(cfg["machine"]["family"], "ghz");
    assert_eq!(cfg["sweep"]["resolution"], 25);
    assert_eq!(cfg["model"], "reset");
    assert!(cfg["tolerances"]["hermiticity"].as_f64().is_some());
}

#[test]
fn usage_errors_exit_one() {
    let out = run(&["pareto"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["steady", "nonsense", "3"]);
    assert_eq!(out.status.code(), Some(1));
}
